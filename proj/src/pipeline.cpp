#include "ldfopf/pipeline.hpp"

namespace ldfopf {

CaseSolution solve_case(const NetworkCase& net, const SolverOptions& opts) {
  CaseSolution sol;
  sol.net = net;
  sol.topo = validate_radial(net);
  sol.ldf = build_ldf_model(net, sol.topo);
  sol.red = reduce(net, sol.topo, sol.ldf);
  ConicProgram prog = assemble(sol.red);
  sol.res = solve(prog, opts);

  const int n = sol.topo.n;
  const int ng = sol.red.n_g, nl = sol.red.n_l;
  sol.p = Eigen::VectorXd::Zero(n);
  sol.q = Eigen::VectorXd::Zero(n);
  for (int g = 0; g < ng; ++g) {
    sol.p(sol.red.gen_pos[g]) = sol.res.x(g);
    sol.q(sol.red.gen_pos[g]) = sol.res.x(ng + g);
  }
  for (int l = 0; l < nl; ++l) {
    sol.p(sol.red.load_pos[l]) = sol.red.load(l);
    sol.q(sol.red.load_pos[l]) = sol.red.load(nl + l);
  }
  sol.v = sol.ldf.R * sol.p + sol.ldf.X * sol.q +
          Eigen::VectorXd::Constant(n, sol.ldf.v0);
  sol.fp = sol.ldf.F * sol.p;
  sol.fq = sol.ldf.F * sol.q;
  sol.p_s = -sol.p.sum();
  sol.q_s = -sol.q.sum();
  sol.J = sol.res.obj;

  if (sol.res.status == SolveStatus::Optimal)
    sol.dual = extract_duals(prog, sol.red, sol.res);
  return sol;
}

std::vector<BranchFlow> branch_flows(const CaseSolution& sol) {
  std::vector<BranchFlow> flows(sol.topo.n);
  for (int j = 0; j < sol.topo.n; ++j) flows[j] = {sol.fp(j), sol.fq(j)};
  return flows;
}

}  // namespace ldfopf
