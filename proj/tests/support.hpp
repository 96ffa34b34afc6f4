#pragma once

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "ldfopf/marginals.hpp"
#include "ldfopf/pipeline.hpp"

namespace ldfopf::test {

inline std::string data_path(const std::string& name) {
  return std::string(LDFOPF_DATA_DIR) + "/" + name;
}

inline NetworkCase load_fixture(const std::string& name) {
  return load_case_file(data_path(name));
}

inline std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Brute-force minimum of a reduced OPF with a single generator by grid
/// search over the (p_g, q_g) box. Independent of the conic path.
inline double grid_search_objective(const ReducedOpf& red,
                                    double resolution = 1e-3,
                                    double feas_tol = 1e-9) {
  if (red.n_g != 1)
    throw std::logic_error("grid oracle only handles one generator");
  const Eigen::VectorXd rhs = red.G * red.load + red.h;
  double best = std::numeric_limits<double>::infinity();
  const double p_lo = red.p_lo(0), p_hi = red.p_hi(0);
  const double q_lo = red.q_lo(0), q_hi = red.q_hi(0);
  const int np = static_cast<int>(std::round((p_hi - p_lo) / resolution));
  const int nq = static_cast<int>(std::round((q_hi - q_lo) / resolution));
  for (int ip = 0; ip <= np; ++ip) {
    const double p = p_lo + ip * resolution;
    for (int iq = 0; iq <= nq; ++iq) {
      const double q = q_lo + iq * resolution;
      bool ok = true;
      for (int i = 0; ok && i < red.rows(); ++i) {
        const double lhs = red.M_p(i, 0) * p + red.M_q(i, 0) * q;
        if (std::isfinite(rhs(i)) && lhs > rhs(i) + feas_tol) ok = false;
      }
      for (int j : red.bounded) {
        if (!ok) break;
        const double y = red.r[j](0) * p + red.s[j].dot(red.load);
        const double z = red.r[j](0) * q + red.t[j].dot(red.load);
        if (std::hypot(y, z) > red.f_max(j) + feas_tol) ok = false;
      }
      if (ok) best = std::min(best, red.c_tilde(0) * p + red.constant_offset);
    }
  }
  return best;
}

/// Copy of the case with flow limits scaled from the unconstrained optimum
/// flows: f_max(j) = gamma * ||flow_j||, floored at the flow the branch must
/// carry when every generator is off (keeps the case feasible).
inline NetworkCase with_scaled_flow_limits(const NetworkCase& net,
                                           const CaseSolution& unconstrained,
                                           double gamma,
                                           const std::vector<int>& branches) {
  NetworkCase all_off = net;
  for (Generator& g : all_off.generators) {
    g.p_max = g.p_min = 0.0;
    g.q_max = g.q_min = 0.0;
  }
  CaseSolution base = solve_case(all_off);
  // a pinned generator-bus voltage can make the all-off case infeasible;
  // then no floor is needed
  const bool floored = base.res.status == SolveStatus::Optimal;
  NetworkCase out = net;
  for (int pos : branches) {
    const double f_unc =
        std::hypot(unconstrained.fp(pos), unconstrained.fq(pos));
    const double f_floor =
        floored ? std::hypot(base.fp(pos), base.fq(pos)) : 0.0;
    const int k = unconstrained.topo.branch_index[pos];
    out.branches[k].f_max = std::max(gamma * f_unc, 1.02 * f_floor + 1e-6);
  }
  return out;
}

}  // namespace ldfopf::test
