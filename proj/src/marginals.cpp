#include "ldfopf/marginals.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>

namespace ldfopf {

std::vector<int> binding_set(const CaseSolution& sol, double tol,
                             double dual_tol, std::vector<int>* disagreement) {
  if (sol.res.status != SolveStatus::Optimal)
    throw ArgumentError("binding_set requires an optimal solution");
  std::vector<int> binding;
  if (disagreement) disagreement->clear();
  for (int j : sol.red.bounded) {
    const double flow = std::hypot(sol.fp(j), sol.fq(j));
    const double fmax = sol.red.f_max(j);
    const bool primal = fmax - flow <= tol * std::max(1.0, fmax);
    const bool dual = sol.dual.mu(j) > dual_tol;
    if (primal) binding.push_back(j);
    if (disagreement && primal != dual) disagreement->push_back(j);
  }
  return binding;
}

Eigen::VectorXd flow_marginal_costs(const ReducedOpf& red,
                                    const DualSolution& dual) {
  Eigen::VectorXd C = Eigen::VectorXd::Zero(red.n);
  for (int j : red.bounded) C(j) = -dual.mu(j);
  return C;
}

Eigen::VectorXd load_marginal_costs(const ReducedOpf& red,
                                    const DualSolution& dual,
                                    const std::vector<int>& binding) {
  Eigen::VectorXd C = -red.G.transpose() * dual.lambda;
  for (int j : binding)
    C -= dual.theta(j) * red.s[j] + dual.phi(j) * red.t[j];
  return C;
}

double bound_constant(const ReducedOpf& red, const std::vector<int>& binding) {
  if (binding.empty())
    throw ArgumentError("bound constant is undefined for an empty binding set");
  double K = 0.0;
  for (int j : binding) {
    const int nnz = static_cast<int>((red.s[j].array() != 0.0).count());
    const double st_norm =
        std::sqrt(red.s[j].squaredNorm() + red.t[j].squaredNorm());
    K = std::max(K, std::sqrt(static_cast<double>(nnz)) * st_norm);
  }
  return K;
}

MarginalReport analyze_marginals(const CaseSolution& sol) {
  MarginalReport rep;
  rep.binding = binding_set(sol, 1e-6, 1e-6, &rep.binding_disagreement);
  rep.C_flow = flow_marginal_costs(sol.red, sol.dual);
  rep.C_load = load_marginal_costs(sol.red, sol.dual, rep.binding);
  rep.baseline = -sol.red.G.transpose() * sol.dual.lambda;
  for (int j : sol.red.bounded) {
    const double flow = std::hypot(sol.fp(j), sol.fq(j));
    const double gap = std::abs(sol.red.f_max(j) - flow);
    // a limit sitting exactly on the unconstrained flow makes the price
    // set-valued; flag it instead of suppressing the report
    if (gap <= 1e-6 * std::max(1.0, sol.red.f_max(j)) &&
        sol.dual.mu(j) <= 1e-6)
      rep.near_degenerate.push_back(j);
  }
  if (!rep.binding.empty()) {
    rep.K = bound_constant(sol.red, rep.binding);
    double sum = 0.0;
    for (int j : rep.binding) sum += std::abs(rep.C_flow(j));
    rep.bound_value = rep.K * sum;
  }
  return rep;
}

Theorem1Check theorem1_check(const MarginalReport& congested,
                             const MarginalReport& uncongested) {
  if (!uncongested.binding.empty())
    throw ArgumentError("baseline report has a nonempty binding set");
  Theorem1Check chk;
  const Eigen::VectorXd diff =
      (congested.C_load - uncongested.C_load).cwiseAbs();
  const int nl = static_cast<int>(diff.size()) / 2;
  chk.lhs_real = diff.head(nl);
  chk.lhs_reactive = diff.tail(nl);
  chk.rhs = congested.binding.empty() ? 0.0 : congested.bound_value;
  chk.holds = (diff.array() <= chk.rhs + 1e-9).all();
  return chk;
}

namespace {

// Differentiates the reduced objective (cost net of the slack-elimination
// constant) so the estimate is comparable with the closed-form prices, whose
// derivation drops that constant.
double reduced_cost(const CaseSolution& sol) {
  return sol.J - sol.red.constant_offset;
}

FdResult central_difference(const NetworkCase& base, const CaseSolution& plus,
                            const CaseSolution& minus, double delta,
                            const SolverOptions& opts) {
  const bool ok_p = plus.res.status == SolveStatus::Optimal;
  const bool ok_m = minus.res.status == SolveStatus::Optimal;
  if (ok_p && ok_m)
    return {(reduced_cost(plus) - reduced_cost(minus)) / (2.0 * delta), false};
  if (!ok_p && !ok_m)
    throw ArgumentError("both perturbed problems are infeasible");
  CaseSolution mid = solve_case(base, opts);
  if (mid.res.status != SolveStatus::Optimal)
    throw ArgumentError("base problem did not solve to optimality");
  if (ok_p) return {(reduced_cost(plus) - reduced_cost(mid)) / delta, true};
  return {(reduced_cost(mid) - reduced_cost(minus)) / delta, true};
}

}  // namespace

FdResult fd_load_gradient(const NetworkCase& net, int coordinate, double delta,
                          const SolverOptions& opts) {
  RadialTopology topo = validate_radial(net);
  std::vector<int> load_ids;
  for (int j = 0; j < topo.n; ++j) {
    const Bus* b = net.find_bus(topo.bus_ids[j]);
    if (b->kind == BusKind::Load) load_ids.push_back(b->id);
  }
  const int nl = static_cast<int>(load_ids.size());
  if (coordinate < 0 || coordinate >= 2 * nl)
    throw ArgumentError("demand coordinate out of range");
  const bool reactive = coordinate >= nl;
  const int bus_id = load_ids[coordinate % nl];

  auto perturbed = [&](double d) {
    NetworkCase out = net;
    for (Bus& b : out.buses) {
      if (b.id != bus_id) continue;
      // +d on the injection coordinate means -d of consumption
      if (reactive)
        b.q_demand -= d;
      else
        b.p_demand -= d;
    }
    return solve_case(out, opts);
  };
  CaseSolution plus = perturbed(delta), minus = perturbed(-delta);
  return central_difference(net, plus, minus, delta, opts);
}

FdResult fd_flow_limit_gradient(const NetworkCase& net, int branch,
                                double delta, const SolverOptions& opts) {
  RadialTopology topo = validate_radial(net);
  if (branch < 0 || branch >= topo.n)
    throw ArgumentError("branch position out of range");
  const int k = topo.branch_index[branch];
  if (!net.branches[k].bounded())
    throw ArgumentError("branch has no flow limit to perturb");
  auto perturbed = [&](double d) {
    NetworkCase out = net;
    out.branches[k].f_max += d;
    return solve_case(out, opts);
  };
  CaseSolution plus = perturbed(delta), minus = perturbed(-delta);
  return central_difference(net, plus, minus, delta, opts);
}

void dump_marginals_csv(const CaseSolution& sol, const MarginalReport& report,
                        std::ostream& out) {
  out << "# ldf-opf v1\n";
  out << std::setprecision(12);
  out << "kind,id,axis,C_load,baseline,abs_delta,bound\n";
  const int nl = sol.red.n_l;
  for (int half = 0; half < 2; ++half) {
    for (int l = 0; l < nl; ++l) {
      const int c = half * nl + l;
      out << "load," << sol.red.load_bus_ids[l] << ","
          << (half ? "reactive" : "real") << "," << report.C_load(c) << ","
          << report.baseline(c) << ","
          << std::abs(report.C_load(c) - report.baseline(c)) << ","
          << report.bound_value << "\n";
    }
  }
  out << "kind,branch,flow,limit,binding,C_flow\n";
  for (int j = 0; j < sol.topo.n; ++j) {
    const bool bind =
        std::find(report.binding.begin(), report.binding.end(), j) !=
        report.binding.end();
    out << "branch," << j + 1 << "," << std::hypot(sol.fp(j), sol.fq(j))
        << ",";
    if (std::isfinite(sol.red.f_max(j)))
      out << sol.red.f_max(j);
    else
      out << "unbounded";
    out << "," << (bind ? 1 : 0) << "," << report.C_flow(j) << "\n";
  }
}

}  // namespace ldfopf
