#include "ldfopf/opf_model.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>

namespace ldfopf {

double DualResiduals::max_all() const {
  return std::max(std::max(stationarity_p, stationarity_q),
                  std::max(cone_violation, negativity));
}

ReducedOpf reduce(const NetworkCase& net, const RadialTopology& topo,
                  const LdfModel& ldf) {
  ReducedOpf red;
  red.n = topo.n;
  red.gen_pos = ldf.gen_pos;
  red.load_pos = ldf.load_pos;
  red.n_g = static_cast<int>(ldf.gen_pos.size());
  red.n_l = static_cast<int>(ldf.load_pos.size());
  const int n = red.n, ng = red.n_g, nl = red.n_l;

  for (int g : ldf.gen_pos) red.gen_bus_ids.push_back(topo.bus_ids[g]);
  for (int l : ldf.load_pos) red.load_bus_ids.push_back(topo.bus_ids[l]);

  // generator data in canonical axis order
  red.c_tilde.resize(ng);
  red.p_lo.resize(ng);
  red.p_hi.resize(ng);
  red.q_lo.resize(ng);
  red.q_hi.resize(ng);
  for (int g = 0; g < ng; ++g) {
    const Generator* gen = net.find_generator(red.gen_bus_ids[g]);
    red.c_tilde(g) = gen->cost - net.slack.cost;
    red.p_lo(g) = gen->p_min;
    red.p_hi(g) = gen->p_max;
    red.q_lo(g) = gen->q_min;
    red.q_hi(g) = gen->q_max;
  }

  // demand injections l = [p_l; q_l] (files store positive consumption)
  red.load.resize(2 * nl);
  for (int l = 0; l < nl; ++l) {
    const Bus* b = net.find_bus(red.load_bus_ids[l]);
    red.load(l) = -b->p_demand;
    red.load(nl + l) = -b->q_demand;
  }

  // column selections of R, X per partition
  Eigen::MatrixXd Rg(n, ng), Xg(n, ng), Rl(n, nl), Xl(n, nl);
  for (int g = 0; g < ng; ++g) {
    Rg.col(g) = ldf.R.col(ldf.gen_pos[g]);
    Xg.col(g) = ldf.X.col(ldf.gen_pos[g]);
  }
  for (int l = 0; l < nl; ++l) {
    Rl.col(l) = ldf.R.col(ldf.load_pos[l]);
    Xl.col(l) = ldf.X.col(ldf.load_pos[l]);
  }

  const int m = 2 * n + 4;
  red.M_p = Eigen::MatrixXd::Zero(m, ng);
  red.M_q = Eigen::MatrixXd::Zero(m, ng);
  red.G = Eigen::MatrixXd::Zero(m, 2 * nl);
  red.h = Eigen::VectorXd::Zero(m);

  Eigen::VectorXd v_lo(n), v_hi(n);
  for (int j = 0; j < n; ++j) {
    const Bus* b = net.find_bus(topo.bus_ids[j]);
    v_lo(j) = b->v_min;
    v_hi(j) = b->v_max;
  }

  // voltage upper: Rg p_g + Xg q_g <= -[Rl Xl] l + (v_hi - v0)
  red.M_p.topRows(n) = Rg;
  red.M_q.topRows(n) = Xg;
  red.G.topRows(n).leftCols(nl) = -Rl;
  red.G.topRows(n).rightCols(nl) = -Xl;
  red.h.head(n) = (v_hi.array() - ldf.v0).matrix();
  // voltage lower (negated)
  red.M_p.middleRows(n, n) = -Rg;
  red.M_q.middleRows(n, n) = -Xg;
  red.G.middleRows(n, n).leftCols(nl) = Rl;
  red.G.middleRows(n, n).rightCols(nl) = Xl;
  red.h.segment(n, n) = (ldf.v0 - v_lo.array()).matrix();

  // slack injections: p_s = -1'p_g - 1'l_p, q_s analogous
  const int sp_ub = 2 * n, sp_lb = 2 * n + 1, sq_ub = 2 * n + 2,
            sq_lb = 2 * n + 3;
  red.M_p.row(sp_ub).setConstant(-1.0);
  red.G.row(sp_ub).head(nl).setConstant(1.0);
  red.h(sp_ub) = net.slack.p_max;
  red.M_p.row(sp_lb).setConstant(1.0);
  red.G.row(sp_lb).head(nl).setConstant(-1.0);
  red.h(sp_lb) = -net.slack.p_min;
  red.M_q.row(sq_ub).setConstant(-1.0);
  red.G.row(sq_ub).tail(nl).setConstant(1.0);
  red.h(sq_ub) = net.slack.q_max;
  red.M_q.row(sq_lb).setConstant(1.0);
  red.G.row(sq_lb).tail(nl).setConstant(-1.0);
  red.h(sq_lb) = -net.slack.q_min;

  red.r = ldf.r;
  red.s = ldf.s;
  red.t = ldf.t;
  red.f_max.resize(n);
  for (int j = 0; j < n; ++j) {
    red.f_max(j) = net.branches[topo.branch_index[j]].f_max;
    if (std::isfinite(red.f_max(j))) red.bounded.push_back(j);
  }

  // eliminating c_s p_s leaves the constant -c_s * 1'l_p
  double load_p_sum = red.load.head(nl).sum();
  red.constant_offset = -net.slack.cost * load_p_sum;
  return red;
}

double primal_objective(const ReducedOpf& red, const Eigen::VectorXd& p_g) {
  if (p_g.size() != red.n_g)
    throw ArgumentError("p_g dimension mismatch in primal_objective");
  return red.c_tilde.dot(p_g) + red.constant_offset;
}

namespace {

// Sums v'w skipping infinite v entries paired with zero multipliers
// (rows/bounds that the conic program omits).
double guarded_dot(const Eigen::VectorXd& v, const Eigen::VectorXd& w) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v(i)) && w(i) == 0.0) continue;
    acc += v(i) * w(i);
  }
  return acc;
}

}  // namespace

double dual_value(const ReducedOpf& red, const DualSolution& dual) {
  Eigen::VectorXd gl_h = red.G * red.load;
  double val = 0.0;
  for (int i = 0; i < red.rows(); ++i) {
    double rhs = gl_h(i) + red.h(i);
    if (!std::isfinite(rhs) && dual.lambda(i) == 0.0) continue;
    val -= rhs * dual.lambda(i);
  }
  val += guarded_dot(red.p_lo, dual.alpha_lb) - guarded_dot(red.p_hi, dual.alpha_ub);
  val += guarded_dot(red.q_lo, dual.beta_lb) - guarded_dot(red.q_hi, dual.beta_ub);
  for (int j = 0; j < red.n; ++j) {
    if (!std::isfinite(red.f_max(j))) continue;
    val -= (dual.theta(j) * red.s[j] + dual.phi(j) * red.t[j]).dot(red.load);
    val -= dual.mu(j) * red.f_max(j);
  }
  return val + red.constant_offset;
}

DualResiduals check_dual_feasible(const ReducedOpf& red,
                                  const DualSolution& dual) {
  DualResiduals res;
  Eigen::VectorXd stat_p =
      red.c_tilde + red.M_p.transpose() * dual.lambda + dual.alpha_ub -
      dual.alpha_lb;
  Eigen::VectorXd stat_q = red.M_q.transpose() * dual.lambda + dual.beta_ub -
                           dual.beta_lb;
  // the Lagrangian couples both auxiliary rows through r_j
  for (int j : red.bounded) {
    stat_p -= dual.theta(j) * red.r[j];
    stat_q -= dual.phi(j) * red.r[j];
  }
  res.stationarity_p = stat_p.size() ? stat_p.cwiseAbs().maxCoeff() : 0.0;
  res.stationarity_q = stat_q.size() ? stat_q.cwiseAbs().maxCoeff() : 0.0;
  for (int j : red.bounded) {
    double viol = std::hypot(dual.theta(j), dual.phi(j)) - dual.mu(j);
    res.cone_violation = std::max(res.cone_violation, viol);
    res.negativity = std::max(res.negativity, -dual.mu(j));
  }
  auto neg = [&res](const Eigen::VectorXd& v) {
    if (v.size()) res.negativity = std::max(res.negativity, -v.minCoeff());
  };
  neg(dual.lambda);
  neg(dual.alpha_lb);
  neg(dual.alpha_ub);
  neg(dual.beta_lb);
  neg(dual.beta_ub);
  res.negativity = std::max(res.negativity, 0.0);
  res.cone_violation = std::max(res.cone_violation, 0.0);
  return res;
}

void dump_reduced_csv(const ReducedOpf& red, std::ostream& out) {
  out << "# ldf-opf v1\n";
  out << "# rows: v_ub[0.." << red.n - 1 << "], v_lb[0.." << red.n - 1
      << "], ps_ub, ps_lb, qs_ub, qs_lb\n";
  out << "# columns: row_kind, M_p.., M_q.., G.., h\n";
  out << std::setprecision(17);
  const char* kinds[4] = {"ps_ub", "ps_lb", "qs_ub", "qs_lb"};
  for (int i = 0; i < red.rows(); ++i) {
    if (i < red.n)
      out << "v_ub_" << i;
    else if (i < 2 * red.n)
      out << "v_lb_" << (i - red.n);
    else
      out << kinds[i - 2 * red.n];
    for (int g = 0; g < red.n_g; ++g) out << "," << red.M_p(i, g);
    for (int g = 0; g < red.n_g; ++g) out << "," << red.M_q(i, g);
    for (int l = 0; l < 2 * red.n_l; ++l) out << "," << red.G(i, l);
    out << "," << red.h(i) << "\n";
  }
}

}  // namespace ldfopf
