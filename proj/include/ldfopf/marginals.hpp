#pragma once

#include "ldfopf/pipeline.hpp"

namespace ldfopf {

/// Marginal-price analytics for one solved case. Load coordinates follow the
/// demand vector layout [real loads; reactive loads] in canonical bus order.
struct MarginalReport {
  Eigen::VectorXd C_flow;    // n, $/p.u. of flow limit, <= 0
  Eigen::VectorXd C_load;    // 2 n_l
  Eigen::VectorXd baseline;  // uncongested part -G' lambda
  std::vector<int> binding;  // branch positions, sorted
  std::vector<int> binding_disagreement;  // primal/dual criteria disagree
  std::vector<int> near_degenerate;       // limits within tolerance of flows
  double K = 0.0;            // 0 when binding set is empty
  double bound_value = 0.0;  // K * sum |C_flow| over binding branches
};

/// Branches whose cone constraint is tight at the optimum. Primal criterion
/// f_max - ||flow|| <= tol * max(1, f_max); branches where the dual
/// criterion (mu > dual_tol) disagrees are reported separately.
std::vector<int> binding_set(const CaseSolution& sol, double tol = 1e-6,
                             double dual_tol = 1e-6,
                             std::vector<int>* disagreement = nullptr);

Eigen::VectorXd flow_marginal_costs(const ReducedOpf& red,
                                    const DualSolution& dual);

/// Closed form -lambda'G - sum_{j in I} (theta_j s_j + phi_j t_j).
Eigen::VectorXd load_marginal_costs(const ReducedOpf& red,
                                    const DualSolution& dual,
                                    const std::vector<int>& binding);

/// K = max_{j in I} sqrt(nnz(s_j)) * ||[s_j; t_j]||; with the norm identity
/// this is max sqrt(2) * |H_j ∩ N_l|. Throws on an empty set.
double bound_constant(const ReducedOpf& red, const std::vector<int>& binding);

MarginalReport analyze_marginals(const CaseSolution& sol);

struct Theorem1Check {
  Eigen::VectorXd lhs_real, lhs_reactive;
  double rhs = 0.0;
  bool holds = false;
};

/// Evaluates the congestion-price bound between a congested report and an
/// uncongested baseline of the same case. The baseline must have an empty
/// binding set.
Theorem1Check theorem1_check(const MarginalReport& congested,
                             const MarginalReport& uncongested);

struct FdResult {
  double value = 0.0;
  bool one_sided = false;  // a perturbed problem was infeasible
};

/// Central finite difference of the optimal cost in one demand coordinate
/// (layout of the demand vector, injection convention), from two fresh solves.
FdResult fd_load_gradient(const NetworkCase& net, int coordinate,
                          double delta = 1e-4, const SolverOptions& opts = {});

/// Central finite difference in one branch flow limit (canonical position).
FdResult fd_flow_limit_gradient(const NetworkCase& net, int branch,
                                double delta = 1e-4,
                                const SolverOptions& opts = {});

/// CSV report: one row per load coordinate and one per branch.
void dump_marginals_csv(const CaseSolution& sol, const MarginalReport& report,
                        std::ostream& out);

}  // namespace ldfopf
