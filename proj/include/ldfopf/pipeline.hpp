#pragma once

#include "ldfopf/solver.hpp"

namespace ldfopf {

/// End-to-end solve of one case: topology, LDF model, reduction, conic
/// solve, dual extraction and recovered network quantities.
struct CaseSolution {
  NetworkCase net;
  RadialTopology topo;
  LdfModel ldf;
  ReducedOpf red;
  SolveResult res;
  DualSolution dual;  // populated only when res.status == Optimal

  Eigen::VectorXd p, q;    // full injections, canonical bus order
  Eigen::VectorXd v;       // squared voltages
  Eigen::VectorXd fp, fq;  // branch flows
  double p_s = 0.0, q_s = 0.0;
  double J = 0.0;  // objective of the original problem
};

CaseSolution solve_case(const NetworkCase& net, const SolverOptions& opts = {});

/// Per-branch flow setpoints of a solved case, canonical order.
std::vector<BranchFlow> branch_flows(const CaseSolution& sol);

}  // namespace ldfopf
