#include <doctest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "support.hpp"

using namespace ldfopf;
using ldfopf::test::load_fixture;
using ldfopf::test::with_scaled_flow_limits;

namespace {

/// case4 with the trunk branch limit pulled below the unconstrained flow.
NetworkCase congested_case4(double gamma = 0.85) {
  NetworkCase net = load_fixture("case4.m");
  CaseSolution unc = solve_case(net);
  REQUIRE(unc.res.status == SolveStatus::Optimal);
  return with_scaled_flow_limits(net, unc, gamma, {1});
}

}  // namespace

TEST_CASE("binding set: tightened trunk binds, dual agrees") {
  NetworkCase net = congested_case4();
  CaseSolution sol = solve_case(net);
  REQUIRE(sol.res.status == SolveStatus::Optimal);
  std::vector<int> disagreement;
  std::vector<int> binding = binding_set(sol, 1e-6, 1e-6, &disagreement);
  CHECK(binding == std::vector<int>{1});
  CHECK(disagreement.empty());
  CHECK(sol.dual.mu(1) > 1e-6);
}

TEST_CASE("binding set: unconstrained case is empty") {
  CaseSolution sol = solve_case(load_fixture("case4.m"));
  REQUIRE(sol.res.status == SolveStatus::Optimal);
  CHECK(binding_set(sol).empty());
}

TEST_CASE("flow marginal costs are nonpositive and zero off the limits") {
  CaseSolution sol = solve_case(congested_case4());
  MarginalReport rep = analyze_marginals(sol);
  CHECK(rep.C_flow(0) == 0.0);
  CHECK(rep.C_flow(2) == 0.0);
  CHECK(rep.C_flow(1) < 0.0);
  CHECK(rep.C_flow(1) == doctest::Approx(-sol.dual.mu(1)));
}

TEST_CASE("flow marginal matches a finite difference in the limit") {
  NetworkCase net = congested_case4();
  CaseSolution sol = solve_case(net);
  MarginalReport rep = analyze_marginals(sol);
  FdResult fd = fd_flow_limit_gradient(net, 1, 1e-5);
  CHECK(rep.C_flow(1) ==
        doctest::Approx(fd.value)
            .epsilon(std::max(1e-3, 1e-2 * std::abs(fd.value))));
}

TEST_CASE("load marginals match finite differences, congested") {
  NetworkCase net = congested_case4();
  CaseSolution sol = solve_case(net);
  MarginalReport rep = analyze_marginals(sol);
  REQUIRE(rep.binding == std::vector<int>{1});
  for (int c = 0; c < 2 * sol.red.n_l; ++c) {
    FdResult fd = fd_load_gradient(net, c, 1e-5);
    const double tol = std::max(1e-3, 1e-2 * std::abs(fd.value));
    CHECK(std::abs(rep.C_load(c) - fd.value) < tol);
  }
}

TEST_CASE("load marginals match finite differences, uncongested") {
  NetworkCase net = load_fixture("case4.m");
  CaseSolution sol = solve_case(net);
  MarginalReport rep = analyze_marginals(sol);
  CHECK((rep.C_load - rep.baseline).cwiseAbs().maxCoeff() == 0.0);
  for (int c = 0; c < 2 * sol.red.n_l; ++c) {
    FdResult fd = fd_load_gradient(net, c, 1e-5);
    const double tol = std::max(1e-3, 1e-2 * std::abs(fd.value));
    CHECK(std::abs(rep.C_load(c) - fd.value) < tol);
  }
}

TEST_CASE("bound constant: exact on the 4-bus trunk") {
  CaseSolution sol = solve_case(congested_case4());
  // the trunk serves one load bus: K = sqrt(1) * sqrt(1 + 1)
  CHECK(bound_constant(sol.red, {1}) == doctest::Approx(std::sqrt(2.0)));
  CHECK_THROWS_AS(bound_constant(sol.red, {}), ArgumentError);
}

TEST_CASE("price deviation bound holds on the 4-bus case") {
  CaseSolution congested = solve_case(congested_case4());
  CaseSolution open = solve_case(load_fixture("case4.m"));
  MarginalReport rc = analyze_marginals(congested);
  MarginalReport ro = analyze_marginals(open);
  Theorem1Check chk = theorem1_check(rc, ro);
  CHECK(chk.holds);
  CHECK(chk.rhs == doctest::Approx(rc.K * std::abs(rc.C_flow(1))));
  CHECK(chk.lhs_real.maxCoeff() <= chk.rhs + 1e-9);
  // a congested baseline is rejected
  CHECK_THROWS_AS(theorem1_check(rc, rc), ArgumentError);
}

TEST_CASE("objective is monotone in nested flow limits") {
  int checked = 0;
  for (std::uint64_t seed = 600; seed < 612; ++seed) {
    NetworkCase net = random_radial_case(10 + static_cast<int>(seed % 8), seed);
    CaseSolution unc = solve_case(net);
    if (unc.res.status != SolveStatus::Optimal) continue;
    std::vector<int> targets;
    for (int j = 0; j < unc.topo.n; j += 2) targets.push_back(j);
    NetworkCase loose = with_scaled_flow_limits(net, unc, 0.95, targets);
    NetworkCase tight = with_scaled_flow_limits(net, unc, 0.85, targets);
    CaseSolution a = solve_case(loose);
    CaseSolution b = solve_case(tight);
    if (a.res.status != SolveStatus::Optimal ||
        b.res.status != SolveStatus::Optimal)
      continue;
    ++checked;
    const double tol = 1e-7 * std::max(1.0, std::abs(unc.J));
    CHECK(a.J >= unc.J - tol);
    CHECK(b.J >= a.J - tol);
    MarginalReport rep = analyze_marginals(b);
    CHECK(rep.C_flow.maxCoeff() <= 1e-9);
  }
  CHECK(checked >= 6);
}

TEST_CASE("near-degenerate limits are flagged, not hidden") {
  NetworkCase net = load_fixture("case4.m");
  CaseSolution unc = solve_case(net);
  // place the limit exactly on the unconstrained flow
  NetworkCase exact =
      set_flow_limits_from_solution(net, unc.topo, branch_flows(unc), {1});
  CaseSolution sol = solve_case(exact);
  REQUIRE(sol.res.status == SolveStatus::Optimal);
  MarginalReport rep = analyze_marginals(sol);
  // the limit may read as binding with a near-zero price; either way the
  // degeneracy is surfaced through one of the two flag channels
  const bool flagged = !rep.near_degenerate.empty() ||
                       !rep.binding_disagreement.empty() ||
                       sol.dual.mu(1) > 1e-6;
  CHECK(flagged);
}

TEST_CASE("marginals CSV layout") {
  CaseSolution sol = solve_case(congested_case4());
  MarginalReport rep = analyze_marginals(sol);
  std::ostringstream out;
  dump_marginals_csv(sol, rep, out);
  const std::string text = out.str();
  CHECK(text.rfind("# ldf-opf v1\n", 0) == 0);
  CHECK(text.find("load,3,real,") != std::string::npos);
  CHECK(text.find("load,4,reactive,") != std::string::npos);
  CHECK(text.find("unbounded") != std::string::npos);
  // 1 comment + 2 header rows + 4 load rows + 3 branch rows
  CHECK(std::count(text.begin(), text.end(), '\n') == 10);
}

TEST_CASE("finite differences reject bad coordinates") {
  NetworkCase net = load_fixture("case4.m");
  CHECK_THROWS_AS(fd_load_gradient(net, 4), ArgumentError);
  CHECK_THROWS_AS(fd_flow_limit_gradient(net, 0, 1e-5), ArgumentError);
}

TEST_CASE("optimal cost is convex in the demand vector") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> scale(0.5, 1.5);
  std::uniform_real_distribution<double> mix(0.0, 1.0);
  NetworkCase base = ldfopf::test::load_fixture("case4.m");
  int checked = 0;
  for (int trial = 0; trial < 6; ++trial) {
    NetworkCase n1 = base, n2 = base;
    for (std::size_t i = 0; i < base.buses.size(); ++i) {
      n1.buses[i].p_demand *= scale(rng);
      n1.buses[i].q_demand *= scale(rng);
      n2.buses[i].p_demand *= scale(rng);
      n2.buses[i].q_demand *= scale(rng);
    }
    const double a = mix(rng);
    NetworkCase nm = base;
    for (std::size_t i = 0; i < base.buses.size(); ++i) {
      nm.buses[i].p_demand =
          a * n1.buses[i].p_demand + (1.0 - a) * n2.buses[i].p_demand;
      nm.buses[i].q_demand =
          a * n1.buses[i].q_demand + (1.0 - a) * n2.buses[i].q_demand;
    }
    CaseSolution s1 = solve_case(n1), s2 = solve_case(n2), sm = solve_case(nm);
    if (s1.res.status != SolveStatus::Optimal ||
        s2.res.status != SolveStatus::Optimal ||
        sm.res.status != SolveStatus::Optimal)
      continue;
    ++checked;
    CHECK(sm.J <= a * s1.J + (1.0 - a) * s2.J + 1e-7);
  }
  CHECK(checked >= 4);
}
