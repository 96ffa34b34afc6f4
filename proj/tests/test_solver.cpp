#include <doctest.h>

#include <sstream>

#include "support.hpp"

using namespace ldfopf;
using ldfopf::test::grid_search_objective;
using ldfopf::test::load_fixture;

namespace {

ConicProgram lp(const Eigen::VectorXd& c, const Eigen::MatrixXd& A,
                const Eigen::VectorXd& b) {
  ConicProgram prog;
  prog.c = c;
  prog.A = A;
  prog.b = b;
  prog.nonneg = static_cast<int>(b.size());
  return prog;
}

}  // namespace

TEST_CASE("solver: scalar LP") {
  // min x s.t. x >= 1
  Eigen::VectorXd c(1), b(1);
  Eigen::MatrixXd A(1, 1);
  c << 1.0;
  A << -1.0;
  b << -1.0;
  SolveResult res = solve(lp(c, A, b));
  REQUIRE(res.status == SolveStatus::Optimal);
  CHECK(res.x(0) == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(res.obj == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(res.y(0) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(res.residuals.primal < 1e-8);
  CHECK(res.residuals.dual < 1e-8);
}

TEST_CASE("solver: box LP with degenerate-free interior") {
  // min -x - 2y s.t. x <= 2, y <= 3, x + y <= 4
  Eigen::VectorXd c(2), b(3);
  Eigen::MatrixXd A(3, 2);
  c << -1.0, -2.0;
  A << 1, 0, 0, 1, 1, 1;
  b << 2, 3, 4;
  SolveResult res = solve(lp(c, A, b));
  REQUIRE(res.status == SolveStatus::Optimal);
  CHECK(res.x(0) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(res.x(1) == doctest::Approx(3.0).epsilon(1e-6));
  CHECK(res.obj == doctest::Approx(-7.0).epsilon(1e-7));
}

TEST_CASE("solver: scalar SOC") {
  // min -x s.t. ||(x, 0)|| <= 1
  ConicProgram prog;
  prog.c = Eigen::VectorXd::Constant(1, -1.0);
  prog.A = Eigen::MatrixXd::Zero(3, 1);
  prog.A(1, 0) = -1.0;
  prog.b = Eigen::VectorXd::Zero(3);
  prog.b(0) = 1.0;
  prog.nonneg = 0;
  prog.soc_count = 1;
  SolveResult res = solve(prog);
  REQUIRE(res.status == SolveStatus::Optimal);
  CHECK(res.x(0) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("solver: rotated point on a circle") {
  // min -x - y s.t. ||(x, y)|| <= sqrt(2); optimum (1, 1)
  ConicProgram prog;
  prog.c = Eigen::VectorXd::Constant(2, -1.0);
  prog.A = Eigen::MatrixXd::Zero(3, 2);
  prog.A(1, 0) = -1.0;
  prog.A(2, 1) = -1.0;
  prog.b = Eigen::VectorXd::Zero(3);
  prog.b(0) = std::sqrt(2.0);
  prog.soc_count = 1;
  SolveResult res = solve(prog);
  REQUIRE(res.status == SolveStatus::Optimal);
  CHECK(res.x(0) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(res.x(1) == doctest::Approx(1.0).epsilon(1e-6));
  // dual cone membership of the SOC multiplier
  CHECK(res.y(0) + 1e-9 >=
        std::hypot(res.y(1), res.y(2)));
}

TEST_CASE("solver: primal infeasible certificate") {
  // x <= 0 and x >= 1
  Eigen::VectorXd c(1), b(2);
  Eigen::MatrixXd A(2, 1);
  c << 0.0;
  A << 1.0, -1.0;
  b << 0.0, -1.0;
  SolveResult res = solve(lp(c, A, b));
  REQUIRE(res.status == SolveStatus::PrimalInfeasible);
  // Farkas ray: y >= 0, A'y = 0, b'y < 0
  REQUIRE(res.certificate.size() == 2);
  const Eigen::VectorXd& y = res.certificate;
  CHECK(y.minCoeff() > -1e-9);
  CHECK((A.transpose() * y).norm() < 1e-6 * y.norm());
  CHECK(b.dot(y) < -1e-8);
}

TEST_CASE("solver: unbounded problem") {
  // min -x s.t. x >= 0
  Eigen::VectorXd c(1), b(1);
  Eigen::MatrixXd A(1, 1);
  c << -1.0;
  A << -1.0;
  b << 0.0;
  SolveResult res = solve(lp(c, A, b));
  CHECK(res.status == SolveStatus::DualInfeasible);
}

TEST_CASE("solver: deterministic across repeated solves") {
  NetworkCase net = load_fixture("case4.m");
  RadialTopology topo = validate_radial(net);
  LdfModel ldf = build_ldf_model(net, topo);
  ReducedOpf red = reduce(net, topo, ldf);
  ConicProgram prog = assemble(red);
  SolveResult a = solve(prog);
  SolveResult b = solve(prog);
  REQUIRE(a.status == SolveStatus::Optimal);
  CHECK(a.iterations == b.iterations);
  CHECK((a.x - b.x).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.y - b.y).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("solver: 4-bus objective matches the grid oracle") {
  NetworkCase net = load_fixture("case4.m");
  RadialTopology topo = validate_radial(net);
  LdfModel ldf = build_ldf_model(net, topo);
  ReducedOpf red = reduce(net, topo, ldf);
  SolveResult res = solve(assemble(red));
  REQUIRE(res.status == SolveStatus::Optimal);
  const double oracle = grid_search_objective(red, 5e-4);
  // the grid only visits feasible lattice points, so it upper-bounds the
  // optimum to grid accuracy
  CHECK(res.obj <= oracle + 1e-9);
  CHECK(res.obj == doctest::Approx(oracle).epsilon(5e-3));
}

TEST_CASE("solver: strong duality and dual feasibility on random cases") {
  int solved = 0;
  for (std::uint64_t seed = 300; seed < 312; ++seed) {
    NetworkCase net = random_radial_case(6 + static_cast<int>(seed % 20), seed);
    RadialTopology topo = validate_radial(net);
    LdfModel ldf = build_ldf_model(net, topo);
    ReducedOpf red = reduce(net, topo, ldf);
    ConicProgram prog = assemble(red);
    SolveResult res = solve(prog);
    if (res.status != SolveStatus::Optimal) continue;  // tight random cases
    ++solved;
    DualSolution dual = extract_duals(prog, red, res);
    DualResiduals dr = check_dual_feasible(red, dual);
    CHECK(dr.max_all() < 1e-6);
    const double gap = std::abs(res.obj - dual_value(red, dual));
    CHECK(gap < 1e-6 * std::max(1.0, std::abs(res.obj)));
  }
  CHECK(solved >= 8);
}

TEST_CASE("solver: reduction equals the full-variable formulation") {
  for (std::uint64_t seed = 400; seed < 406; ++seed) {
    NetworkCase net = random_radial_case(5 + static_cast<int>(seed % 10), seed);
    RadialTopology topo = validate_radial(net);
    LdfModel ldf = build_ldf_model(net, topo);
    ReducedOpf red = reduce(net, topo, ldf);
    SolveResult a = solve(assemble(red));
    SolveResult b = solve(assemble_full(net, topo, ldf));
    REQUIRE(a.status == b.status);
    if (a.status != SolveStatus::Optimal) continue;
    CHECK(std::abs(a.obj - b.obj) < 1e-8 * std::max(1.0, std::abs(a.obj)));
  }
}

TEST_CASE("solver: iteration log is emitted on request") {
  NetworkCase net = load_fixture("case4.m");
  RadialTopology topo = validate_radial(net);
  LdfModel ldf = build_ldf_model(net, topo);
  ConicProgram prog = assemble(reduce(net, topo, ldf));
  std::ostringstream log;
  SolverOptions opts;
  opts.log = &log;
  solve(prog, opts);
  CHECK(log.str().find("iter") != std::string::npos);
}

TEST_CASE("solver: positive scaling of the cost scales solution values") {
  // needs a unique dual: the pinned-voltage fixture splits multipliers
  // between its paired equality rows, so use a plain random case
  NetworkCase net = random_radial_case(10, 31);
  RadialTopology topo = validate_radial(net);
  LdfModel ldf = build_ldf_model(net, topo);
  ConicProgram prog = assemble(reduce(net, topo, ldf));
  SolveResult base = solve(prog);
  REQUIRE(base.status == SolveStatus::Optimal);
  for (double gamma : {0.5, 2.0}) {
    ConicProgram scaled = prog;
    scaled.c *= gamma;
    scaled.obj_offset *= gamma;
    SolveResult res = solve(scaled);
    REQUIRE(res.status == SolveStatus::Optimal);
    CHECK(res.obj == doctest::Approx(gamma * base.obj).epsilon(1e-7));
    CHECK((res.y - gamma * base.y).cwiseAbs().maxCoeff() <
          1e-7 * std::max(1.0, base.y.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("solver: complementary slackness at accepted optima") {
  for (std::uint64_t seed = 700; seed < 706; ++seed) {
    NetworkCase net = random_radial_case(15, seed);
    RadialTopology topo = validate_radial(net);
    LdfModel ldf = build_ldf_model(net, topo);
    ConicProgram prog = assemble(reduce(net, topo, ldf));
    SolveResult res = solve(prog);
    if (res.status != SolveStatus::Optimal) continue;
    for (int i = 0; i < prog.nonneg; ++i)
      CHECK(std::abs(res.slack(i) * res.y(i)) < 1e-6);
  }
}
