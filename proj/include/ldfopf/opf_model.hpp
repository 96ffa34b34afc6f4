#pragma once

#include <Eigen/Dense>
#include <vector>

#include "ldfopf/ldf.hpp"
#include "ldfopf/netcase.hpp"

namespace ldfopf {

struct ModelError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// The reduced OPF in generator variables (p_g, q_g):
///
///   min  c_tilde' p_g + constant_offset
///   s.t. M_p p_g + M_q q_g <= G l + h
///        p_lo <= p_g <= p_hi,  q_lo <= q_g <= q_hi
///        || [r_j' p_g + s_j' l, r_j' q_g + t_j' l] || <= f_max(j)
///
/// Linear row layout (fixed, so multiplier indices have stable meaning):
///   [0, n)        voltage upper bounds, canonical bus order
///   [n, 2n)       voltage lower bounds (negated)
///   2n            slack real upper,   2n+1  slack real lower
///   2n+2          slack reactive upper, 2n+3 slack reactive lower
struct ReducedOpf {
  int n = 0, n_g = 0, n_l = 0;
  Eigen::VectorXd c_tilde;       // n_g
  Eigen::MatrixXd M_p, M_q;      // m x n_g
  Eigen::MatrixXd G;             // m x 2 n_l
  Eigen::VectorXd h;             // m
  Eigen::VectorXd p_lo, p_hi, q_lo, q_hi;  // n_g
  Eigen::VectorXd load;          // l = [p_l; q_l], injection convention
  std::vector<Eigen::VectorXd> r, s, t;  // all n branches
  Eigen::VectorXd f_max;         // n; kUnbounded when no limit
  std::vector<int> bounded;      // branch positions with a finite limit
  double constant_offset = 0.0;  // slack-elimination term, restores objective (3)
  std::vector<int> gen_pos, load_pos;  // canonical positions per axis
  std::vector<int> gen_bus_ids, load_bus_ids;

  int rows() const { return static_cast<int>(h.size()); }
};

/// Full dual variable set of the reduced OPF.
struct DualSolution {
  Eigen::VectorXd lambda;                        // m
  Eigen::VectorXd alpha_lb, alpha_ub;            // n_g
  Eigen::VectorXd beta_lb, beta_ub;              // n_g
  Eigen::VectorXd theta, phi, mu;                // n, zero at unbounded branches
};

struct DualResiduals {
  double stationarity_p = 0.0;  // max-norm residual of the p_g condition
  double stationarity_q = 0.0;
  double cone_violation = 0.0;  // max over j of ||(theta,phi)|| - mu
  double negativity = 0.0;      // most negative sign-constrained multiplier

  double max_all() const;
};

ReducedOpf reduce(const NetworkCase& net, const RadialTopology& topo,
                  const LdfModel& ldf);

double primal_objective(const ReducedOpf& red, const Eigen::VectorXd& p_g);

double dual_value(const ReducedOpf& red, const DualSolution& dual);

DualResiduals check_dual_feasible(const ReducedOpf& red,
                                  const DualSolution& dual);

/// CSV dump of (c_tilde | M_p | M_q | G | h) with a row-order legend.
void dump_reduced_csv(const ReducedOpf& red, std::ostream& out);

}  // namespace ldfopf
