#include <doctest.h>

#include <algorithm>
#include <sstream>

#include "support.hpp"

using namespace ldfopf;
using ldfopf::test::load_fixture;

namespace {

Eigen::MatrixXd expected_R4() {
  Eigen::MatrixXd R(3, 3);
  R << 0.012, 0.006, 0.0,  //
      0.006, 0.006, 0.0,   //
      0.0, 0.0, 0.006;
  return R;
}

}  // namespace

TEST_CASE("incidence: 4-bus") {
  NetworkCase net = load_fixture("case4.m");
  RadialTopology topo = validate_radial(net);
  Eigen::MatrixXd full = build_incidence_full(topo);
  REQUIRE(full.rows() == 3);
  REQUIRE(full.cols() == 4);
  for (int i = 0; i < 3; ++i) {
    CHECK(full.row(i).sum() == doctest::Approx(0.0));
    CHECK(full.row(i).cwiseAbs().sum() == doctest::Approx(2.0));
    CHECK(full(i, i + 1) == -1.0);
  }
  // branches into buses 3 and 4 leave the slack; the branch into bus 2
  // leaves bus 3
  CHECK(full(1, 0) == 1.0);
  CHECK(full(2, 0) == 1.0);
  CHECK(full(0, 0) == 0.0);
  CHECK(full(0, 2) == 1.0);

  Eigen::MatrixXd A = build_incidence(topo);
  CHECK(A == full.rightCols(3));
  CHECK(std::abs(A.determinant()) == doctest::Approx(1.0));
}

TEST_CASE("F: 4-bus exact") {
  NetworkCase net = load_fixture("case4.m");
  RadialTopology topo = validate_radial(net);
  Eigen::MatrixXd F = build_F(topo);
  Eigen::MatrixXd expect(3, 3);
  expect << -1, 0, 0,  //
      -1, -1, 0,       //
      0, 0, -1;
  CHECK((F - expect).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("F equals dense inverse transpose of A on random trees") {
  for (std::uint64_t seed : {11u, 12u, 13u, 14u, 15u}) {
    NetworkCase net = random_radial_case(40 + 30 * static_cast<int>(seed % 5),
                                         seed);
    RadialTopology topo = validate_radial(net);
    Eigen::MatrixXd A = build_incidence(topo);
    Eigen::MatrixXd F = build_F(topo);
    // independent oracle: invert A numerically
    Eigen::MatrixXd Finv =
        A.transpose().fullPivLu().inverse();
    CHECK((F - Finv).cwiseAbs().maxCoeff() < 1e-10);
    for (int i = 0; i < topo.n; ++i)
      for (int j = 0; j < topo.n; ++j)
        CHECK((F(i, j) == 0.0 || F(i, j) == -1.0));
  }
}

TEST_CASE("R and X: 4-bus exact") {
  NetworkCase net = load_fixture("case4.m");
  RadialTopology topo = validate_radial(net);
  Eigen::MatrixXd R, X;
  build_RX(net, topo, R, X);
  Eigen::MatrixXd Re = expected_R4();
  CHECK((R - Re).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((X - 2.0 * Re).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("R matches 2 F' diag(r) F on random trees") {
  for (std::uint64_t seed : {21u, 22u, 23u}) {
    NetworkCase net = random_radial_case(120, seed);
    RadialTopology topo = validate_radial(net);
    Eigen::MatrixXd R, X;
    build_RX(net, topo, R, X);
    Eigen::MatrixXd F = build_F(topo);
    Eigen::VectorXd rr(topo.n), xx(topo.n);
    for (int j = 0; j < topo.n; ++j) {
      const Branch& br = net.branches[topo.branch_index[j]];
      rr(j) = br.r;
      xx(j) = br.x;
    }
    Eigen::MatrixXd Ro = 2.0 * F.transpose() * rr.asDiagonal() * F;
    Eigen::MatrixXd Xo = 2.0 * F.transpose() * xx.asDiagonal() * F;
    CHECK((R - Ro).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((X - Xo).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((R - R.transpose()).cwiseAbs().maxCoeff() == 0.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(R);
    CHECK(es.eigenvalues().minCoeff() > -1e-12);
  }
}

TEST_CASE("branch coefficients: 4-bus exact") {
  NetworkCase net = load_fixture("case4.m");
  RadialTopology topo = validate_radial(net);
  LdfModel m = build_ldf_model(net, topo);
  REQUIRE(m.gen_pos == std::vector<int>{0});
  REQUIRE(m.load_pos == std::vector<int>({1, 2}));
  // branch 2 (position 1) carries the generator and the first load
  CHECK(m.r[1].size() == 1);
  CHECK(m.r[1](0) == -1.0);
  Eigen::VectorXd s2(4), t2(4);
  s2 << -1, 0, 0, 0;
  t2 << 0, 0, -1, 0;
  CHECK((m.s[1] - s2).cwiseAbs().maxCoeff() == 0.0);
  CHECK((m.t[1] - t2).cwiseAbs().maxCoeff() == 0.0);
  // branch 1 (position 0) feeds only the generator bus
  CHECK(m.r[0](0) == -1.0);
  CHECK(m.s[0].cwiseAbs().maxCoeff() == 0.0);
  // branch 3 (position 2) feeds only the second load
  CHECK(m.r[2](0) == 0.0);
  CHECK(m.s[2](1) == -1.0);
  CHECK(m.t[2](3) == -1.0);
}

TEST_CASE("squared coefficient norms count downstream buses") {
  // ||r_j||^2 = |H_j ∩ generators|, ||s_j||^2 = ||t_j||^2 = |H_j ∩ loads|,
  // exactly, over random trees
  for (std::uint64_t seed = 100; seed < 110; ++seed) {
    NetworkCase net = random_radial_case(150, seed);
    RadialTopology topo = validate_radial(net);
    LdfModel m = build_ldf_model(net, topo);
    std::vector<char> is_gen(topo.n, 0);
    for (int g : m.gen_pos) is_gen[g] = 1;
    for (int j = 0; j < topo.n; ++j) {
      int gens = 0, loads = 0;
      for (int k : topo.downstream[j]) (is_gen[k] ? gens : loads)++;
      CHECK(m.r[j].squaredNorm() == static_cast<double>(gens));
      CHECK(m.s[j].squaredNorm() == static_cast<double>(loads));
      CHECK(m.t[j].squaredNorm() == static_cast<double>(loads));
    }
  }
}

TEST_CASE("voltage model matches branch recursion on a chain") {
  // independent oracle: accumulate voltage drops branch by branch on a
  // 5-bus chain and compare with R p + X q + v0
  NetworkCase net;
  net.base_mva = 1.0;
  net.slack = SlackBus{1, 1.0, -10, 10, -10, 10, 1.0};
  net.buses.push_back(Bus{1, BusKind::Slack, 1, 1, 0, 0});
  for (int i = 2; i <= 5; ++i)
    net.buses.push_back(Bus{i, BusKind::Load, 0.5, 1.5, 0.0, 0.0});
  for (int i = 2; i <= 5; ++i)
    net.branches.push_back(
        Branch{i - 1, i - 1, i, 0.01 * i, 0.02 * i, kUnbounded});
  RadialTopology topo = validate_radial(net);
  LdfModel m = build_ldf_model(net, topo);

  Eigen::VectorXd p(4), q(4);
  p << 0.3, -0.2, 0.1, 0.05;
  q << -0.1, 0.2, 0.0, 0.15;
  Eigen::VectorXd v_model = m.R * p + m.X * q + Eigen::VectorXd::Constant(4, m.v0);

  // downstream flows, then v_child = v_parent - 2(r f^p + x f^q) with flow
  // oriented toward the slack
  Eigen::VectorXd v_chain(4);
  double up = 1.0;
  for (int j = 0; j < 4; ++j) {
    double fp = 0.0, fq = 0.0;
    for (int k = j; k < 4; ++k) fp -= p(k), fq -= q(k);
    const Branch& br = net.branches[topo.branch_index[j]];
    v_chain(j) = up - 2.0 * (br.r * fp + br.x * fq);
    up = v_chain(j);
  }
  CHECK((v_model - v_chain).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("matrix CSV dump round-trips at full precision") {
  Eigen::MatrixXd m(2, 2);
  m << 1.0 / 3.0, -2.0e-17, 5.0, 0.1;
  std::ostringstream out;
  dump_matrix_csv(m, out);
  std::istringstream in(out.str());
  std::string line;
  Eigen::MatrixXd back(2, 2);
  for (int i = 0; i < 2; ++i) {
    REQUIRE(std::getline(in, line));
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    row >> back(i, 0) >> back(i, 1);
  }
  CHECK((m - back).cwiseAbs().maxCoeff() == 0.0);
}
