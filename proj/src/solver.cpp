#include "ldfopf/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace ldfopf {

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::PrimalInfeasible: return "primal-infeasible";
    case SolveStatus::DualInfeasible: return "dual-infeasible";
    case SolveStatus::MaxIterations: return "max-iterations";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Assembly
// ---------------------------------------------------------------------------

ConicProgram assemble(const ReducedOpf& red) {
  const int ng = red.n_g;
  const int nv = 2 * ng;
  ConicProgram prog;
  prog.n_g = ng;
  prog.obj_offset = red.constant_offset;
  prog.c = Eigen::VectorXd::Zero(nv);
  prog.c.head(ng) = red.c_tilde;

  Eigen::VectorXd core_rhs = red.G * red.load + red.h;

  std::vector<Eigen::RowVectorXd> rows;
  std::vector<double> rhs;
  auto push = [&](const Eigen::RowVectorXd& a, double bval,
                  ConicProgram::RowKind kind, int index) {
    rows.push_back(a);
    rhs.push_back(bval);
    prog.row_tags.push_back({kind, index});
  };

  Eigen::RowVectorXd a(nv);
  for (int i = 0; i < red.rows(); ++i) {
    if (!std::isfinite(core_rhs(i))) continue;
    a.head(ng) = red.M_p.row(i);
    a.tail(ng) = red.M_q.row(i);
    push(a, core_rhs(i), ConicProgram::RowKind::Core, i);
  }
  for (int g = 0; g < ng; ++g) {
    a.setZero();
    if (std::isfinite(red.p_hi(g))) {
      a(g) = 1.0;
      push(a, red.p_hi(g), ConicProgram::RowKind::PUb, g);
      a(g) = 0.0;
    }
    if (std::isfinite(red.p_lo(g))) {
      a(g) = -1.0;
      push(a, -red.p_lo(g), ConicProgram::RowKind::PLb, g);
      a(g) = 0.0;
    }
    if (std::isfinite(red.q_hi(g))) {
      a(ng + g) = 1.0;
      push(a, red.q_hi(g), ConicProgram::RowKind::QUb, g);
      a(ng + g) = 0.0;
    }
    if (std::isfinite(red.q_lo(g))) {
      a(ng + g) = -1.0;
      push(a, -red.q_lo(g), ConicProgram::RowKind::QLb, g);
      a(ng + g) = 0.0;
    }
  }
  prog.nonneg = static_cast<int>(rows.size());

  for (int j : red.bounded) {
    if (static_cast<int>(red.r[j].size()) != ng)
      throw AssemblyError("cone coefficient dimension mismatch");
    a.setZero();
    rows.push_back(a);
    rhs.push_back(red.f_max(j));
    a.head(ng) = red.r[j].transpose();
    rows.push_back(a);
    rhs.push_back(-red.s[j].dot(red.load));
    a.setZero();
    a.tail(ng) = red.r[j].transpose();
    rows.push_back(a);
    rhs.push_back(-red.t[j].dot(red.load));
    prog.cone_branch.push_back(j);
  }
  prog.soc_count = static_cast<int>(prog.cone_branch.size());

  const int m = static_cast<int>(rows.size());
  prog.A.resize(m, nv);
  prog.b.resize(m);
  for (int i = 0; i < m; ++i) {
    prog.A.row(i) = rows[i];
    prog.b(i) = rhs[i];
  }
  return prog;
}

ConicProgram assemble_full(const NetworkCase& net, const RadialTopology& topo,
                           const LdfModel& ldf) {
  const int n = topo.n;
  const int nv = 2 * n;
  ConicProgram prog;
  prog.c = Eigen::VectorXd::Constant(nv, 0.0);
  // objective (3): generator costs plus c_s * p_s with p_s = -1'p
  for (int j = 0; j < n; ++j) prog.c(j) = -net.slack.cost;
  for (std::size_t g = 0; g < ldf.gen_pos.size(); ++g) {
    int pos = ldf.gen_pos[g];
    prog.c(pos) += net.find_generator(topo.bus_ids[pos])->cost;
  }

  std::vector<Eigen::RowVectorXd> rows;
  std::vector<double> rhs;
  auto push = [&](const Eigen::RowVectorXd& a, double bval) {
    if (!std::isfinite(bval)) return;
    rows.push_back(a);
    rhs.push_back(bval);
  };
  Eigen::RowVectorXd a(nv);

  for (int i = 0; i < n; ++i) {
    const Bus* bus = net.find_bus(topo.bus_ids[i]);
    a.head(n) = ldf.R.row(i);
    a.tail(n) = ldf.X.row(i);
    push(a, bus->v_max - ldf.v0);
    push(-a, ldf.v0 - bus->v_min);
  }
  // load pins (paired rows) and generator bounds
  for (int j = 0; j < n; ++j) {
    const Bus* bus = net.find_bus(topo.bus_ids[j]);
    if (bus->kind == BusKind::Load) {
      a.setZero();
      a(j) = 1.0;
      push(a, -bus->p_demand);
      push(-a, bus->p_demand);
      a(j) = 0.0;
      a(n + j) = 1.0;
      push(a, -bus->q_demand);
      push(-a, bus->q_demand);
    } else {
      const Generator* g = net.find_generator(bus->id);
      a.setZero();
      a(j) = 1.0;
      push(a, g->p_max);
      push(-a, -g->p_min);
      a(j) = 0.0;
      a(n + j) = 1.0;
      push(a, g->q_max);
      push(-a, -g->q_min);
    }
  }
  // slack bounds
  a.setZero();
  a.head(n).setConstant(-1.0);
  push(a, net.slack.p_max);
  push(-a, -net.slack.p_min);
  a.setZero();
  a.tail(n).setConstant(-1.0);
  push(a, net.slack.q_max);
  push(-a, -net.slack.q_min);

  prog.nonneg = static_cast<int>(rows.size());
  prog.row_tags.assign(rows.size(), {ConicProgram::RowKind::Core, 0});

  for (int j = 0; j < n; ++j) {
    const Branch& br = net.branches[topo.branch_index[j]];
    if (!br.bounded()) continue;
    a.setZero();
    rows.push_back(a);
    rhs.push_back(br.f_max);
    a.head(n) = ldf.F.row(j);
    rows.push_back(a);
    rhs.push_back(0.0);
    a.setZero();
    a.tail(n) = ldf.F.row(j);
    rows.push_back(a);
    rhs.push_back(0.0);
    prog.cone_branch.push_back(j);
  }
  prog.soc_count = static_cast<int>(prog.cone_branch.size());

  const int m = static_cast<int>(rows.size());
  prog.A.resize(m, nv);
  prog.b.resize(m);
  for (int i = 0; i < m; ++i) {
    prog.A.row(i) = rows[i];
    prog.b(i) = rhs[i];
  }
  return prog;
}

// ---------------------------------------------------------------------------
// Cone algebra
// ---------------------------------------------------------------------------

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct ConeLayout {
  int nonneg;
  int soc;  // count of 3-dim cones
  int dim() const { return nonneg + 3 * soc; }
  int barrier_degree() const { return nonneg + soc; }
  int soc_off(int k) const { return nonneg + 3 * k; }
};

Eigen::VectorXd cone_identity(const ConeLayout& K) {
  Eigen::VectorXd e = Eigen::VectorXd::Zero(K.dim());
  e.head(K.nonneg).setOnes();
  for (int k = 0; k < K.soc; ++k) e(K.soc_off(k)) = 1.0;
  return e;
}

// max step alpha >= 0 with u + alpha*du staying in the cone
double step_to_boundary(const ConeLayout& K, const Eigen::VectorXd& u,
                        const Eigen::VectorXd& du) {
  double alpha = kInf;
  for (int i = 0; i < K.nonneg; ++i)
    if (du(i) < 0.0) alpha = std::min(alpha, -u(i) / du(i));
  for (int k = 0; k < K.soc; ++k) {
    int o = K.soc_off(k);
    const double u0 = u(o), d0 = du(o);
    const Eigen::Vector2d u1(u(o + 1), u(o + 2));
    const Eigen::Vector2d d1(du(o + 1), du(o + 2));
    const double a = d0 * d0 - d1.squaredNorm();
    const double b = 2.0 * (u0 * d0 - u1.dot(d1));
    const double c = u0 * u0 - u1.squaredNorm();
    double root = kInf;
    if (std::abs(a) < 1e-14 * (std::abs(b) + std::abs(c) + 1.0)) {
      if (b < 0.0) root = -c / b;
    } else {
      const double disc = b * b - 4.0 * a * c;
      if (disc >= 0.0) {
        const double sq = std::sqrt(disc);
        // numerically stable pair of roots
        const double q = -0.5 * (b + (b >= 0 ? sq : -sq));
        double r1 = q / a, r2 = (q != 0.0) ? c / q : kInf;
        if (r1 > 0.0) root = std::min(root, r1);
        if (r2 > 0.0) root = std::min(root, r2);
        if (a < 0.0 && r1 <= 0.0 && r2 <= 0.0) root = kInf;
      }
    }
    alpha = std::min(alpha, root);
  }
  return alpha;
}

// Nesterov-Todd scaling: W y = W^{-1} s = lambda
struct Scaling {
  Eigen::VectorXd orthant_w2;          // s_i / y_i
  std::vector<Eigen::Matrix3d> W, Winv, W2;
  Eigen::VectorXd lambda;
};

Scaling compute_scaling(const ConeLayout& K, const Eigen::VectorXd& s,
                        const Eigen::VectorXd& y) {
  Scaling sc;
  sc.orthant_w2.resize(K.nonneg);
  sc.lambda.resize(K.dim());
  for (int i = 0; i < K.nonneg; ++i) {
    sc.orthant_w2(i) = s(i) / y(i);
    sc.lambda(i) = std::sqrt(s(i) * y(i));
  }
  sc.W.resize(K.soc);
  sc.Winv.resize(K.soc);
  sc.W2.resize(K.soc);
  const Eigen::Vector3d Jdiag(1.0, -1.0, -1.0);
  for (int k = 0; k < K.soc; ++k) {
    int o = K.soc_off(k);
    Eigen::Vector3d sk = s.segment<3>(o), yk = y.segment<3>(o);
    double res_s = sk(0) * sk(0) - sk(1) * sk(1) - sk(2) * sk(2);
    double res_y = yk(0) * yk(0) - yk(1) * yk(1) - yk(2) * yk(2);
    res_s = std::max(res_s, 1e-300);
    res_y = std::max(res_y, 1e-300);
    Eigen::Vector3d sbar = sk / std::sqrt(res_s);
    Eigen::Vector3d ybar = yk / std::sqrt(res_y);
    double gamma = std::sqrt(0.5 * (1.0 + sbar.dot(ybar)));
    Eigen::Vector3d wbar =
        (sbar + Jdiag.asDiagonal() * ybar) / (2.0 * gamma);
    double eta = std::pow(res_s / res_y, 0.25);

    Eigen::Matrix3d V;
    const double w0 = wbar(0);
    const Eigen::Vector2d w1(wbar(1), wbar(2));
    V(0, 0) = w0;
    V.block<1, 2>(0, 1) = w1.transpose();
    V.block<2, 1>(1, 0) = w1;
    V.block<2, 2>(1, 1) =
        Eigen::Matrix2d::Identity() + w1 * w1.transpose() / (1.0 + w0);
    sc.W[k] = eta * V;
    Eigen::Matrix3d Vi = V;
    Vi.block<1, 2>(0, 1) = -w1.transpose();
    Vi.block<2, 1>(1, 0) = -w1;
    sc.Winv[k] = Vi / eta;
    sc.W2[k] = (eta * eta) *
               (2.0 * wbar * wbar.transpose() -
                Eigen::Matrix3d(Jdiag.asDiagonal()));
    sc.lambda.segment<3>(o) = sc.W[k] * yk;
  }
  return sc;
}

Eigen::VectorXd apply_W(const ConeLayout& K, const Scaling& sc,
                        const Eigen::VectorXd& v) {
  Eigen::VectorXd out(K.dim());
  out.head(K.nonneg) =
      sc.orthant_w2.array().sqrt() * v.head(K.nonneg).array();
  for (int k = 0; k < K.soc; ++k)
    out.segment<3>(K.soc_off(k)) = sc.W[k] * v.segment<3>(K.soc_off(k));
  return out;
}

Eigen::VectorXd apply_Winv(const ConeLayout& K, const Scaling& sc,
                           const Eigen::VectorXd& v) {
  Eigen::VectorXd out(K.dim());
  out.head(K.nonneg) =
      v.head(K.nonneg).array() / sc.orthant_w2.array().sqrt();
  for (int k = 0; k < K.soc; ++k)
    out.segment<3>(K.soc_off(k)) = sc.Winv[k] * v.segment<3>(K.soc_off(k));
  return out;
}

Eigen::VectorXd apply_W2(const ConeLayout& K, const Scaling& sc,
                         const Eigen::VectorXd& v) {
  Eigen::VectorXd out(K.dim());
  out.head(K.nonneg) = sc.orthant_w2.array() * v.head(K.nonneg).array();
  for (int k = 0; k < K.soc; ++k)
    out.segment<3>(K.soc_off(k)) = sc.W2[k] * v.segment<3>(K.soc_off(k));
  return out;
}

// Jordan product u o v
Eigen::VectorXd jordan_product(const ConeLayout& K, const Eigen::VectorXd& u,
                               const Eigen::VectorXd& v) {
  Eigen::VectorXd out(K.dim());
  out.head(K.nonneg) = u.head(K.nonneg).array() * v.head(K.nonneg).array();
  for (int k = 0; k < K.soc; ++k) {
    int o = K.soc_off(k);
    Eigen::Vector3d a = u.segment<3>(o), b = v.segment<3>(o);
    out(o) = a.dot(b);
    out(o + 1) = a(0) * b(1) + b(0) * a(1);
    out(o + 2) = a(0) * b(2) + b(0) * a(2);
  }
  return out;
}

// solves lambda o u = w
Eigen::VectorXd jordan_div(const ConeLayout& K, const Eigen::VectorXd& lambda,
                           const Eigen::VectorXd& w) {
  Eigen::VectorXd out(K.dim());
  out.head(K.nonneg) =
      w.head(K.nonneg).array() / lambda.head(K.nonneg).array();
  for (int k = 0; k < K.soc; ++k) {
    int o = K.soc_off(k);
    const double l0 = lambda(o);
    const Eigen::Vector2d l1(lambda(o + 1), lambda(o + 2));
    const double w0 = w(o);
    const Eigen::Vector2d w1(w(o + 1), w(o + 2));
    const double det = l0 * l0 - l1.squaredNorm();
    const double u0 = (l0 * w0 - l1.dot(w1)) / det;
    const Eigen::Vector2d u1 = (w1 - u0 * l1) / l0;
    out(o) = u0;
    out(o + 1) = u1(0);
    out(o + 2) = u1(1);
  }
  return out;
}

// LDL' factorization of a symmetric quasi-definite matrix, no pivoting.
struct LdlFactor {
  Eigen::MatrixXd L;
  Eigen::VectorXd d;

  void factor(const Eigen::MatrixXd& M) {
    const Eigen::Index N = M.rows();
    L = Eigen::MatrixXd::Identity(N, N);
    d.resize(N);
    Eigen::VectorXd scaled(N);
    for (Eigen::Index k = 0; k < N; ++k) {
      scaled.head(k) = L.row(k).head(k).transpose().cwiseProduct(d.head(k));
      d(k) = M(k, k) - L.row(k).head(k).dot(scaled.head(k));
      if (k + 1 < N)
        L.col(k).tail(N - k - 1) =
            (M.col(k).tail(N - k - 1) -
             L.bottomLeftCorner(N - k - 1, k) * scaled.head(k)) /
            d(k);
    }
  }

  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const {
    Eigen::VectorXd z =
        L.triangularView<Eigen::UnitLower>().solve(rhs);
    z.array() /= d.array();
    return L.transpose().triangularView<Eigen::UnitUpper>().solve(z);
  }
};

}  // namespace

// ---------------------------------------------------------------------------
// Homogeneous self-dual interior-point method
// ---------------------------------------------------------------------------

SolveResult solve(const ConicProgram& prog, const SolverOptions& opts) {
  const int n = prog.vars();
  const int m = prog.rows();
  const ConeLayout K{prog.nonneg, prog.soc_count};
  if (K.dim() != m)
    throw AssemblyError("cone block sizes do not sum to the row dimension");
  const Eigen::MatrixXd& A = prog.A;
  const Eigen::VectorXd& b = prog.b;
  const Eigen::VectorXd& c = prog.c;
  const double nu = static_cast<double>(K.barrier_degree());
  const double binf = m ? b.cwiseAbs().maxCoeff() : 0.0;
  const double cinf = n ? c.cwiseAbs().maxCoeff() : 0.0;
  const double reg = 1e-9;
  const double ftb = 0.99;  // fraction-to-boundary

  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd y = cone_identity(K);
  Eigen::VectorXd s = y;
  double tau = 1.0, kappa = 1.0;

  SolveResult result;
  result.status = SolveStatus::MaxIterations;

  auto finalize = [&](SolveStatus status) {
    result.status = status;
    result.x = x / tau;
    result.slack = s / tau;
    result.y = y / tau;
    result.obj = c.dot(result.x) + prog.obj_offset;
  };

  const int N = n + m;
  Eigen::MatrixXd Kmat = Eigen::MatrixXd::Zero(N, N);
  LdlFactor ldl;

  for (int iter = 0; iter <= opts.max_iter; ++iter) {
    result.iterations = iter;

    Eigen::VectorXd rx = -A.transpose() * y - c * tau;
    Eigen::VectorXd ry = A * x + s - b * tau;
    const double rtau = c.dot(x) + b.dot(y) + kappa;
    const double mu = (s.dot(y) + tau * kappa) / (nu + 1.0);

    // convergence at the scaled point
    const Eigen::VectorXd xs = x / tau, ys = y / tau, ss = s / tau;
    const double pres = (A * xs + ss - b).cwiseAbs().maxCoeff() / (1.0 + binf);
    const double dres =
        (A.transpose() * ys + c).cwiseAbs().maxCoeff() / (1.0 + cinf);
    const double gap = ss.dot(ys);
    const double pcost = c.dot(xs);
    const double relgap = gap / (1.0 + std::abs(pcost));
    result.residuals = {pres, dres, gap};

    if (opts.log)
      *opts.log << "iter " << iter << " pcost " << pcost + prog.obj_offset
                << " gap " << gap << " pres " << pres << " dres " << dres
                << " tau " << tau << " kappa " << kappa << "\n";

    if (pres <= opts.tol && dres <= opts.tol && relgap <= opts.tol) {
      finalize(SolveStatus::Optimal);
      return result;
    }

    // infeasibility certificates once the embedding collapses tau
    if (kappa > tau) {
      const double by = b.dot(y);
      if (by < -1e-14) {
        Eigen::VectorXd ycert = y / (-by);
        if ((A.transpose() * ycert).cwiseAbs().maxCoeff() <=
            opts.tol * (1.0 + cinf)) {
          finalize(SolveStatus::PrimalInfeasible);
          result.certificate = ycert;
          return result;
        }
      }
      const double cx = c.dot(x);
      if (cx < -1e-14) {
        Eigen::VectorXd xcert = x / (-cx);
        Eigen::VectorXd scert = s / (-cx);
        if ((A * xcert + scert).cwiseAbs().maxCoeff() <=
            opts.tol * (1.0 + binf)) {
          finalize(SolveStatus::DualInfeasible);
          result.certificate = xcert;
          return result;
        }
      }
    }
    if (iter == opts.max_iter) break;

    const Scaling sc = compute_scaling(K, s, y);

    // KKT matrix [ reg*I  A' ; A  -(W'W + reg*I) ]
    Kmat.topLeftCorner(n, n) =
        reg * Eigen::MatrixXd::Identity(n, n);
    Kmat.topRightCorner(n, m) = A.transpose();
    Kmat.bottomLeftCorner(m, n) = A;
    Eigen::MatrixXd W2 = Eigen::MatrixXd::Zero(m, m);
    W2.diagonal().head(K.nonneg) = sc.orthant_w2;
    for (int k = 0; k < K.soc; ++k)
      W2.block<3, 3>(K.soc_off(k), K.soc_off(k)) = sc.W2[k];
    Kmat.bottomRightCorner(m, m) =
        -(W2 + reg * Eigen::MatrixXd::Identity(m, m));
    ldl.factor(Kmat);

    auto kkt_solve = [&](const Eigen::VectorXd& rhs) {
      Eigen::VectorXd sol = ldl.solve(rhs);
      // one refinement pass against the regularized system
      sol += ldl.solve(rhs - Kmat * sol);
      return sol;
    };

    Eigen::VectorXd rhs1(N);
    rhs1.head(n) = -c;
    rhs1.tail(m) = b;
    const Eigen::VectorXd z1 = kkt_solve(rhs1);
    const double den =
        c.dot(z1.head(n)) + b.dot(z1.tail(m)) - kappa / tau;

    const Eigen::VectorXd e = cone_identity(K);
    const Eigen::VectorXd lam_sq = jordan_product(K, sc.lambda, sc.lambda);

    auto direction = [&](const Eigen::VectorXd& bx, const Eigen::VectorXd& by,
                         double btau, const Eigen::VectorXd& bs, double bkappa,
                         Eigen::VectorXd& dx, Eigen::VectorXd& dy,
                         Eigen::VectorXd& ds, double& dtau, double& dkappa) {
      const Eigen::VectorXd wdiv = apply_W(K, sc, jordan_div(K, sc.lambda, bs));
      Eigen::VectorXd rhs2(N);
      rhs2.head(n) = -bx;
      rhs2.tail(m) = by - wdiv;
      const Eigen::VectorXd z2 = kkt_solve(rhs2);
      dtau = (btau - bkappa / tau - c.dot(z2.head(n)) - b.dot(z2.tail(m))) /
             den;
      dx = z2.head(n) + dtau * z1.head(n);
      dy = z2.tail(m) + dtau * z1.tail(m);
      ds = wdiv - apply_W2(K, sc, dy);
      dkappa = (bkappa - kappa * dtau) / tau;
    };

    auto max_step = [&](const Eigen::VectorXd& ds, const Eigen::VectorXd& dy,
                        double dtau, double dkappa) {
      double alpha = std::min(step_to_boundary(K, s, ds),
                              step_to_boundary(K, y, dy));
      if (dtau < 0.0) alpha = std::min(alpha, -tau / dtau);
      if (dkappa < 0.0) alpha = std::min(alpha, -kappa / dkappa);
      return alpha;
    };

    // predictor
    Eigen::VectorXd dxa, dya, dsa;
    double dtaua, dkappaa;
    direction(-rx, -ry, -rtau, -lam_sq, -tau * kappa, dxa, dya, dsa, dtaua,
              dkappaa);
    const double alpha_aff = std::min(1.0, max_step(dsa, dya, dtaua, dkappaa));
    double sigma = std::pow(1.0 - alpha_aff, 3);
    sigma = std::clamp(sigma, 1e-8, 0.999);

    // corrector (Mehrotra)
    Eigen::VectorXd bs = -lam_sq -
                         jordan_product(K, apply_Winv(K, sc, dsa),
                                        apply_W(K, sc, dya)) +
                         sigma * mu * e;
    const double bkappa = -tau * kappa - dtaua * dkappaa + sigma * mu;
    Eigen::VectorXd dx, dy, ds;
    double dtau, dkappa;
    const double rscale = 1.0 - sigma;
    direction(-rscale * rx, -rscale * ry, -rscale * rtau, bs, bkappa, dx, dy,
              ds, dtau, dkappa);

    double alpha = ftb * max_step(ds, dy, dtau, dkappa);
    alpha = std::min(alpha, 1.0);
    if (!std::isfinite(alpha) || alpha <= 0.0) break;

    const Eigen::VectorXd x_prev = x, y_prev = y, s_prev = s;
    const double tau_prev = tau, kappa_prev = kappa;
    x += alpha * dx;
    y += alpha * dy;
    s += alpha * ds;
    tau += alpha * dtau;
    kappa += alpha * dkappa;
    if (!x.allFinite() || !y.allFinite() || !s.allFinite() ||
        !std::isfinite(tau) || !std::isfinite(kappa)) {
      x = x_prev;
      y = y_prev;
      s = s_prev;
      tau = tau_prev;
      kappa = kappa_prev;
      break;
    }
  }

  // breakdown or iteration cap: the embedding may still have driven the
  // iterate toward an infeasibility ray; certificates are judged after
  // normalization so a collapsed tau does not mask them
  {
    const double bty = b.dot(y);
    if (bty < -1e-12) {
      Eigen::VectorXd ycert = y / (-bty);
      const double r = (A.transpose() * ycert).cwiseAbs().maxCoeff() /
                       (1.0 + ycert.cwiseAbs().maxCoeff());
      if (r <= 1e-6) {
        finalize(SolveStatus::PrimalInfeasible);
        result.certificate = ycert;
        return result;
      }
    }
    const double ctx = c.dot(x);
    if (ctx < -1e-12) {
      Eigen::VectorXd xcert = x / (-ctx);
      Eigen::VectorXd scert = s / (-ctx);
      const double r = (A * xcert + scert).cwiseAbs().maxCoeff() /
                       (1.0 + xcert.cwiseAbs().maxCoeff());
      if (r <= 1e-6) {
        finalize(SolveStatus::DualInfeasible);
        result.certificate = xcert;
        return result;
      }
    }
  }

  finalize(SolveStatus::MaxIterations);
  return result;
}

// ---------------------------------------------------------------------------
// Dual extraction
// ---------------------------------------------------------------------------

DualSolution extract_duals(const ConicProgram& prog, const ReducedOpf& red,
                           const SolveResult& result) {
  if (result.status != SolveStatus::Optimal)
    throw ArgumentError("dual extraction requires an optimal solve, got " +
                        std::string(to_string(result.status)));
  DualSolution dual;
  dual.lambda = Eigen::VectorXd::Zero(red.rows());
  dual.alpha_lb = Eigen::VectorXd::Zero(red.n_g);
  dual.alpha_ub = Eigen::VectorXd::Zero(red.n_g);
  dual.beta_lb = Eigen::VectorXd::Zero(red.n_g);
  dual.beta_ub = Eigen::VectorXd::Zero(red.n_g);
  dual.theta = Eigen::VectorXd::Zero(red.n);
  dual.phi = Eigen::VectorXd::Zero(red.n);
  dual.mu = Eigen::VectorXd::Zero(red.n);

  for (int i = 0; i < prog.nonneg; ++i) {
    const double v = std::max(result.y(i), 0.0);
    const auto& tag = prog.row_tags[i];
    switch (tag.kind) {
      case ConicProgram::RowKind::Core: dual.lambda(tag.index) = v; break;
      case ConicProgram::RowKind::PUb: dual.alpha_ub(tag.index) = v; break;
      case ConicProgram::RowKind::PLb: dual.alpha_lb(tag.index) = v; break;
      case ConicProgram::RowKind::QUb: dual.beta_ub(tag.index) = v; break;
      case ConicProgram::RowKind::QLb: dual.beta_lb(tag.index) = v; break;
    }
  }
  for (int k = 0; k < prog.soc_count; ++k) {
    const int o = prog.nonneg + 3 * k;
    const int j = prog.cone_branch[k];
    double mu = std::max(result.y(o), 0.0);
    double theta = -result.y(o + 1);
    double phi = -result.y(o + 2);
    // dual-cone membership can be off by solver tolerance; project
    const double norm = std::hypot(theta, phi);
    if (norm > mu && norm > 0.0) {
      theta *= mu / norm;
      phi *= mu / norm;
    }
    dual.mu(j) = mu;
    dual.theta(j) = theta;
    dual.phi(j) = phi;
  }
  return dual;
}

}  // namespace ldfopf
