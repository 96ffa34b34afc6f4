// Command line front end: solve one case, run the two-branch flow-limit
// sweep experiment, or validate model invariants. All CSV artifacts are
// deterministic for a fixed (case, seed, flags) triple.

#include <CLI11.hpp>

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "ldfopf/marginals.hpp"

using namespace ldfopf;

namespace {

constexpr const char* kCsvHeader = "# ldf-opf v1\n";

int worker_count(std::size_t jobs) {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  if (const char* env = std::getenv("LDF_OPF_THREADS")) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap > 0 && static_cast<unsigned>(cap) < hw)
      hw = static_cast<unsigned>(cap);
  }
  return static_cast<int>(std::min<std::size_t>(hw, std::max<std::size_t>(jobs, 1)));
}

std::ofstream open_out(const std::string& dir, const std::string& name,
                       bool header = true) {
  std::filesystem::create_directories(dir);
  std::ofstream out(dir + "/" + name);
  if (!out) throw std::runtime_error("cannot write " + dir + "/" + name);
  if (header) out << kCsvHeader;
  out << std::setprecision(12);
  return out;
}

void write_solution_csv(const CaseSolution& sol, std::ostream& out) {
  out << "objective," << sol.J << "\n";
  out << "kind,bus,p,q,v\n";
  out << "slack," << sol.net.slack.bus << "," << sol.p_s << "," << sol.q_s
      << "," << sol.net.slack.v0 << "\n";
  for (int j = 0; j < sol.topo.n; ++j) {
    const Bus* b = sol.net.find_bus(sol.topo.bus_ids[j]);
    out << to_string(b->kind) << "," << b->id << "," << sol.p(j) << ","
        << sol.q(j) << "," << sol.v(j) << "\n";
  }
  out << "branch,from,to,fp,fq,flow,limit\n";
  for (int j = 0; j < sol.topo.n; ++j) {
    const Branch& br = sol.net.branches[sol.topo.branch_index[j]];
    out << j + 1 << "," << br.from_bus << "," << br.to_bus << "," << sol.fp(j)
        << "," << sol.fq(j) << "," << std::hypot(sol.fp(j), sol.fq(j)) << ",";
    if (br.bounded())
      out << sol.red.f_max(j);
    else
      out << "unbounded";
    out << "\n";
  }
}

void write_duals_csv(const CaseSolution& sol, std::ostream& out) {
  out << "row,lambda\n";
  const int n = sol.red.n;
  const char* slack_rows[4] = {"ps_ub", "ps_lb", "qs_ub", "qs_lb"};
  for (int i = 0; i < sol.red.rows(); ++i) {
    if (i < n)
      out << "v_ub_" << sol.topo.bus_ids[i];
    else if (i < 2 * n)
      out << "v_lb_" << sol.topo.bus_ids[i - n];
    else
      out << slack_rows[i - 2 * n];
    out << "," << sol.dual.lambda(i) << "\n";
  }
  out << "generator,alpha_lb,alpha_ub,beta_lb,beta_ub\n";
  for (int g = 0; g < sol.red.n_g; ++g)
    out << sol.red.gen_bus_ids[g] << "," << sol.dual.alpha_lb(g) << ","
        << sol.dual.alpha_ub(g) << "," << sol.dual.beta_lb(g) << ","
        << sol.dual.beta_ub(g) << "\n";
  out << "branch,theta,phi,mu\n";
  for (int j : sol.red.bounded)
    out << j + 1 << "," << sol.dual.theta(j) << "," << sol.dual.phi(j) << ","
        << sol.dual.mu(j) << "\n";
}

// ------------------------------------------------------------------- solve
int cmd_solve(const std::string& path,
              const std::vector<std::string>& limit_flags,
              const std::string& out_dir) {
  NetworkCase net = load_case_file(path);
  RadialTopology topo = validate_radial(net);
  for (const std::string& flag : limit_flags) {
    const auto eq = flag.find('=');
    if (eq == std::string::npos)
      throw ArgumentError("--flow-limit expects <branch>=<limit>, got " + flag);
    const int branch = std::stoi(flag.substr(0, eq));
    const double limit = std::stod(flag.substr(eq + 1));
    if (branch < 1 || branch > topo.n)
      throw ArgumentError("branch number out of range: " + flag);
    if (!(limit > 0.0))
      throw ArgumentError("flow limit must be positive: " + flag);
    net.branches[topo.branch_index[branch - 1]].f_max = limit;
  }

  CaseSolution sol = solve_case(net);
  std::cout << std::setprecision(12) << "status " << to_string(sol.res.status)
            << "\n";
  if (sol.res.status != SolveStatus::Optimal) {
    if (sol.res.status == SolveStatus::PrimalInfeasible)
      std::cout << "case is infeasible; a Farkas certificate of "
                << sol.res.certificate.size() << " multipliers was found\n";
    else if (sol.res.status == SolveStatus::DualInfeasible)
      std::cout << "cost is unbounded below on the feasible set\n";
    else
      std::cout << "solver stopped after " << sol.res.iterations
                << " iterations without certificate\n";
    return 2;
  }
  std::cout << "objective " << sol.J << "\n";

  auto s = open_out(out_dir, "solution.csv");
  write_solution_csv(sol, s);
  auto d = open_out(out_dir, "duals.csv");
  write_duals_csv(sol, d);
  auto m = open_out(out_dir, "marginals.csv", /*header=*/false);
  dump_marginals_csv(sol, analyze_marginals(sol), m);
  return 0;
}

// ------------------------------------------------------------------- sweep
struct SweepConfig {
  std::string path;
  std::vector<int> branches;  // two public branch numbers
  double scale_start = 1.0, scale_end = 0.75;
  int steps = 20;
  int watch_bus = 20;
  std::uint64_t seed = 1;
  int dg_count = 0;
  double dg_p_max = 0.0, dg_q_mag = 0.0;
  double dg_cost_lo = 0.0, dg_cost_hi = 1.0;
  std::string out_dir = ".";
};

struct SweepRow {
  double s1 = 0.0, s2 = 0.0;
  double dc_real = std::nan(""), dc_reactive = std::nan("");
  double bound = std::nan("");
  int holds = -1;  // -1 flags a non-optimal solve
};

int cmd_sweep(const SweepConfig& cfg) {
  if (cfg.branches.size() != 2)
    throw ArgumentError("--branches expects exactly two branch numbers");
  if (!(0.0 < cfg.scale_end && cfg.scale_end <= cfg.scale_start &&
        cfg.scale_start <= 1.0))
    throw ArgumentError("scale grid must satisfy 0 < end <= start <= 1");
  if (cfg.steps < 1) throw ArgumentError("scale grid needs at least one step");

  NetworkCase net = load_case_file(cfg.path);
  if (cfg.dg_count > 0)
    net = augment_distributed_generation(net, cfg.dg_count, cfg.dg_p_max,
                                         cfg.dg_q_mag,
                                         {cfg.dg_cost_lo, cfg.dg_cost_hi},
                                         cfg.seed);
  RadialTopology topo = validate_radial(net);
  for (int b : cfg.branches)
    if (b < 1 || b > topo.n)
      throw ArgumentError("branch number out of range: " + std::to_string(b));
  const Bus* watch = net.find_bus(cfg.watch_bus);
  if (!watch || watch->kind != BusKind::Load)
    throw ArgumentError("watch bus must be a load bus");

  // pass 1: unconstrained setpoints, then freeze the line upstream of every
  // generator at its flow setpoint
  CaseSolution unc = solve_case(net);
  if (unc.res.status != SolveStatus::Optimal)
    throw std::runtime_error("unconstrained pass did not solve to optimality");
  std::vector<int> frozen;
  for (const Generator& g : net.generators)
    frozen.push_back(topo.position(g.bus));
  std::sort(frozen.begin(), frozen.end());
  frozen.erase(std::unique(frozen.begin(), frozen.end()), frozen.end());
  NetworkCase limited =
      set_flow_limits_from_solution(net, topo, branch_flows(unc), frozen);

  MarginalReport baseline = analyze_marginals(unc);
  const int nl = unc.red.n_l;
  int watch_idx = -1;
  for (int l = 0; l < nl; ++l)
    if (unc.red.load_bus_ids[l] == cfg.watch_bus) watch_idx = l;
  if (watch_idx < 0) throw ArgumentError("watch bus lost during augmentation");

  const int pos1 = cfg.branches[0] - 1, pos2 = cfg.branches[1] - 1;
  const int k1 = topo.branch_index[pos1], k2 = topo.branch_index[pos2];

  std::vector<SweepRow> rows(static_cast<std::size_t>(cfg.steps) * cfg.steps);
  auto scale_at = [&](int i) {
    if (cfg.steps == 1) return cfg.scale_start;
    return cfg.scale_start +
           (cfg.scale_end - cfg.scale_start) * i / (cfg.steps - 1);
  };

  std::atomic<std::size_t> next{0};
  auto work = [&]() {
    for (;;) {
      const std::size_t idx = next.fetch_add(1);
      if (idx >= rows.size()) return;
      const int i = static_cast<int>(idx) / cfg.steps;
      const int k = static_cast<int>(idx) % cfg.steps;
      SweepRow row;
      row.s1 = scale_at(i);
      row.s2 = scale_at(k);
      NetworkCase point = limited;
      point.branches[k1].f_max *= row.s1;
      point.branches[k2].f_max *= row.s2;
      CaseSolution sol = solve_case(point);
      if (sol.res.status == SolveStatus::Optimal) {
        MarginalReport rep = analyze_marginals(sol);
        Theorem1Check chk = theorem1_check(rep, baseline);
        row.dc_real = rep.C_load(watch_idx) - baseline.C_load(watch_idx);
        row.dc_reactive =
            rep.C_load(nl + watch_idx) - baseline.C_load(nl + watch_idx);
        row.bound = chk.rhs;
        row.holds = chk.holds ? 1 : 0;
      }
      rows[idx] = row;
    }
  };
  std::vector<std::thread> pool;
  const int workers = worker_count(rows.size());
  pool.reserve(workers);
  for (int t = 0; t < workers; ++t) pool.emplace_back(work);
  for (std::thread& t : pool) t.join();

  auto out = open_out(cfg.out_dir, "sweep.csv");
  out << "scale_b1,scale_b2,dC_real,dC_reactive,bound,holds\n";
  int flagged = 0, violations = 0;
  for (const SweepRow& row : rows) {
    out << row.s1 << "," << row.s2 << "," << row.dc_real << ","
        << row.dc_reactive << "," << row.bound << "," << row.holds << "\n";
    if (row.holds < 0) ++flagged;
    if (row.holds == 0) ++violations;
  }
  std::cout << rows.size() << " grid points, " << flagged
            << " non-optimal, " << violations << " bound violations\n";
  return 0;
}

// ---------------------------------------------------------------- validate
struct CheckTable {
  bool all_pass = true;
  void report(const std::string& name, bool pass, const std::string& note) {
    std::cout << (pass ? "pass  " : "FAIL  ") << name;
    if (!note.empty()) std::cout << " (" << note << ")";
    std::cout << "\n";
    all_pass = all_pass && pass;
  }
};

int cmd_validate(const std::string& path, int random_n, std::uint64_t seed) {
  NetworkCase net;
  if (random_n > 0)
    net = random_radial_case(random_n, seed);
  else
    net = load_case_file(path);

  CheckTable table;
  std::ostringstream note;

  RadialTopology topo = validate_radial(net);
  LdfModel ldf = build_ldf_model(net, topo);

  Eigen::MatrixXd A = build_incidence(topo);
  const double f_err =
      (ldf.F - A.transpose().fullPivLu().inverse()).cwiseAbs().maxCoeff();
  table.report("F matches inverted incidence", f_err <= 1e-10,
               "max err " + std::to_string(f_err));

  bool norms = true;
  std::vector<char> is_gen(topo.n, 0);
  for (int g : ldf.gen_pos) is_gen[g] = 1;
  for (int j = 0; j < topo.n && norms; ++j) {
    int gens = 0, loads = 0;
    for (int k : topo.downstream[j]) (is_gen[k] ? gens : loads)++;
    norms = ldf.r[j].squaredNorm() == gens &&
            ldf.s[j].squaredNorm() == loads && ldf.t[j].squaredNorm() == loads;
  }
  table.report("coefficient norms count downstream buses", norms, "");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(ldf.R);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ex(ldf.X);
  table.report("R and X positive semi-definite",
               es.eigenvalues().minCoeff() > -1e-12 &&
                   ex.eigenvalues().minCoeff() > -1e-12,
               "");

  ReducedOpf red = reduce(net, topo, ldf);
  ConicProgram prog = assemble(red);
  SolveResult res = solve(prog);
  SolveResult full = solve(assemble_full(net, topo, ldf));
  const bool both = res.status == SolveStatus::Optimal &&
                    full.status == SolveStatus::Optimal;
  table.report("solve status agreement", res.status == full.status,
               std::string(to_string(res.status)));
  if (both) {
    const double gap =
        std::abs(res.obj - full.obj) / std::max(1.0, std::abs(res.obj));
    table.report("reduced equals full formulation", gap <= 1e-8,
                 "relative gap " + std::to_string(gap));

    DualSolution dual = extract_duals(prog, red, res);
    const double dres = check_dual_feasible(red, dual).max_all();
    table.report("dual feasibility residuals", dres <= 1e-6, "");
    const double dgap = std::abs(res.obj - dual_value(red, dual)) /
                        (1.0 + std::abs(res.obj));
    table.report("strong duality gap", dgap <= 1e-6, "");

    CaseSolution sol = solve_case(net);
    MarginalReport rep = analyze_marginals(sol);
    bool fd_ok = true;
    std::string fd_note = "no congested coordinate sampled";
    if (!rep.binding.empty() || !red.bounded.empty()) {
      const int coord = 0;
      FdResult fd = fd_load_gradient(net, coord);
      const double tol = std::max(1e-3, 1e-2 * std::abs(fd.value));
      fd_ok = std::abs(rep.C_load(coord) - fd.value) <= tol || fd.one_sided;
      fd_note = "coordinate 0 error " +
                std::to_string(std::abs(rep.C_load(coord) - fd.value));
    }
    table.report("marginal price vs finite difference", fd_ok, fd_note);
  }

  return table.all_pass ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LinDistFlow OPF with marginal price analytics"};
  app.require_subcommand(1);

  std::string case_path, out_dir = ".";
  std::vector<std::string> limit_flags;
  auto* solve_cmd = app.add_subcommand("solve", "solve one case");
  solve_cmd->add_option("case", case_path, "case file (.m or .json)")
      ->required();
  solve_cmd->add_option("--flow-limit", limit_flags,
                        "override a branch limit, <branch>=<limit>");
  solve_cmd->add_option("--out", out_dir, "output directory");

  SweepConfig cfg;
  std::string scale_spec = "1.0:0.75:20";
  std::vector<double> dg_spec, dg_cost{0.0, 1.0};
  auto* sweep_cmd =
      app.add_subcommand("sweep", "two-branch flow-limit sweep experiment");
  sweep_cmd->add_option("case", cfg.path, "case file")->required();
  sweep_cmd->add_option("--branches", cfg.branches, "two branch numbers")
      ->required()
      ->delimiter(',');
  sweep_cmd->add_option("--scale", scale_spec, "grid spec start:end:steps");
  sweep_cmd->add_option("--watch-bus", cfg.watch_bus, "load bus to price");
  sweep_cmd->add_option("--seed", cfg.seed, "generation seed");
  sweep_cmd
      ->add_option("--dg", dg_spec, "add generators: count,p_max,q_mag")
      ->delimiter(',');
  sweep_cmd->add_option("--dg-cost", dg_cost, "generator cost range lo,hi")
      ->delimiter(',');
  sweep_cmd->add_option("--out", cfg.out_dir, "output directory");

  int random_n = 0;
  std::uint64_t random_seed = 1;
  auto* validate_cmd =
      app.add_subcommand("validate", "run the model invariant suite");
  validate_cmd->add_option("case", case_path, "case file");
  validate_cmd->add_option("--random", random_n,
                           "validate a generated tree of this size instead");
  validate_cmd->add_option("--seed", random_seed, "generation seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve_cmd->parsed()) return cmd_solve(case_path, limit_flags, out_dir);
    if (sweep_cmd->parsed()) {
      if (!dg_spec.empty()) {
        if (dg_spec.size() != 3)
          throw ArgumentError("--dg expects count,p_max,q_mag");
        cfg.dg_count = static_cast<int>(dg_spec[0]);
        cfg.dg_p_max = dg_spec[1];
        cfg.dg_q_mag = dg_spec[2];
      }
      if (dg_cost.size() != 2)
        throw ArgumentError("--dg-cost expects lo,hi");
      cfg.dg_cost_lo = dg_cost[0];
      cfg.dg_cost_hi = dg_cost[1];
      std::istringstream spec(scale_spec);
      char colon;
      if (!(spec >> cfg.scale_start >> colon >> cfg.scale_end >> colon >>
            cfg.steps))
        throw ArgumentError("--scale expects start:end:steps");
      return cmd_sweep(cfg);
    }
    if (validate_cmd->parsed()) {
      if (case_path.empty() && random_n <= 0)
        throw ArgumentError("validate needs a case file or --random");
      return cmd_validate(case_path, random_n, random_seed);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
