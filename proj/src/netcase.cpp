#include "ldfopf/netcase.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

namespace ldfopf {

const char* to_string(BusKind kind) {
  switch (kind) {
    case BusKind::Slack: return "slack";
    case BusKind::Generator: return "generator";
    case BusKind::Load: return "load";
  }
  return "?";
}

const Bus* NetworkCase::find_bus(int id) const {
  for (const Bus& b : buses)
    if (b.id == id) return &b;
  return nullptr;
}

const Generator* NetworkCase::find_generator(int bus) const {
  for (const Generator& g : generators)
    if (g.bus == bus) return &g;
  return nullptr;
}

void NetworkCase::validate() const {
  int slack_count = 0;
  std::set<int> ids;
  for (const Bus& b : buses) {
    if (!ids.insert(b.id).second)
      throw ValidationError("duplicate bus id " + std::to_string(b.id));
    if (b.kind == BusKind::Slack) {
      ++slack_count;
      if (b.id != slack.bus)
        throw ValidationError("slack bus entry does not match slack record");
    }
    if (b.v_min > b.v_max)
      throw ValidationError("bus " + std::to_string(b.id) + ": v_min > v_max");
    if (b.kind == BusKind::Generator) {
      const Generator* g = find_generator(b.id);
      if (!g)
        throw ValidationError("generator bus " + std::to_string(b.id) +
                              " has no generator record");
      if (b.p_demand != 0.0 || b.q_demand != 0.0)
        throw ValidationError("bus " + std::to_string(b.id) +
                              " has both generation and load");
      if (g->p_min > g->p_max || g->q_min > g->q_max)
        throw ValidationError("generator at bus " + std::to_string(b.id) +
                              ": inverted bounds");
    }
    if (b.kind == BusKind::Load && find_generator(b.id))
      throw ValidationError("load bus " + std::to_string(b.id) +
                            " has a generator record");
  }
  if (slack_count != 1)
    throw ValidationError("case must contain exactly one slack bus");
  if (slack.p_min > slack.p_max || slack.q_min > slack.q_max)
    throw ValidationError("slack: inverted bounds");
  if (static_cast<int>(branches.size()) != static_cast<int>(buses.size()) - 1)
    throw ValidationError(
        "branch count must equal non-slack bus count: " +
        std::to_string(branches.size()) + " branches, " +
        std::to_string(buses.size() - 1) + " non-slack buses");
  for (const Branch& br : branches) {
    if (!ids.count(br.from_bus) || !ids.count(br.to_bus))
      throw ValidationError("branch " + std::to_string(br.id) +
                            " references unknown bus");
    if (br.r < 0 || br.x < 0)
      throw ValidationError("branch " + std::to_string(br.id) +
                            ": negative impedance");
    if (br.bounded() && br.f_max <= 0)
      throw ValidationError("branch " + std::to_string(br.id) +
                            ": flow limit must be positive");
  }
  for (const Generator& g : generators) {
    const Bus* b = find_bus(g.bus);
    if (!b || b->kind != BusKind::Generator)
      throw ValidationError("generator record at non-generator bus " +
                            std::to_string(g.bus));
  }
}

// ---------------------------------------------------------------------------
// MATPOWER subset parser
// ---------------------------------------------------------------------------

namespace {

struct Matrix {
  std::vector<std::vector<double>> rows;
  int first_line = 0;
};

// Reads mpc.<name> = [...]; blocks and mpc.baseMVA = <num>;. Comments (%)
// and everything else are ignored.
struct MatpowerFile {
  double base_mva = -1;
  std::unordered_map<std::string, Matrix> matrices;
};

MatpowerFile scan_matpower(std::istream& in) {
  MatpowerFile out;
  std::string line;
  int lineno = 0;
  std::string current;  // matrix being filled, empty if none
  while (std::getline(in, line)) {
    ++lineno;
    if (auto pos = line.find('%'); pos != std::string::npos) line.erase(pos);
    // trim
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    line = line.substr(first);

    if (current.empty()) {
      if (line.rfind("mpc.", 0) != 0) continue;
      auto eq = line.find('=');
      if (eq == std::string::npos)
        throw ParseError("line " + std::to_string(lineno) +
                         ": expected '=' after mpc field");
      std::string name = line.substr(4, eq - 4);
      name.erase(name.find_last_not_of(" \t") + 1);
      std::string rest = line.substr(eq + 1);
      if (name == "baseMVA") {
        try {
          out.base_mva = std::stod(rest);
        } catch (const std::exception&) {
          throw ParseError("line " + std::to_string(lineno) +
                           ": malformed baseMVA");
        }
        continue;
      }
      auto bracket = rest.find('[');
      if (bracket == std::string::npos) continue;  // scalar field we ignore
      out.matrices[name] = Matrix{{}, lineno};
      current = name;
      rest = rest.substr(bracket + 1);
      line = rest;
      // fall through to row parsing with the remainder of this line
    }

    bool closing = false;
    if (auto close = line.find(']'); close != std::string::npos) {
      closing = true;
      line = line.substr(0, close);
    }
    // rows may be terminated by ';'
    std::stringstream rows(line);
    std::string row;
    while (std::getline(rows, row, ';')) {
      std::stringstream fields(row);
      std::vector<double> values;
      std::string tok;
      while (fields >> tok) {
        try {
          std::size_t used = 0;
          values.push_back(std::stod(tok, &used));
          if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
          throw ParseError("line " + std::to_string(lineno) +
                           ": malformed value '" + tok + "' in mpc." + current);
        }
      }
      if (!values.empty()) out.matrices[current].rows.push_back(values);
    }
    if (closing) current.clear();
  }
  if (!current.empty())
    throw ParseError("unterminated matrix block mpc." + current);
  return out;
}

const Matrix& require(const MatpowerFile& f, const std::string& name) {
  auto it = f.matrices.find(name);
  if (it == f.matrices.end())
    throw ParseError("missing required block mpc." + name);
  return it->second;
}

void require_cols(const Matrix& m, std::size_t cols, const std::string& name) {
  for (std::size_t i = 0; i < m.rows.size(); ++i)
    if (m.rows[i].size() < cols)
      throw ParseError("line " + std::to_string(m.first_line) + ": mpc." +
                       name + " row " + std::to_string(i + 1) + " has " +
                       std::to_string(m.rows[i].size()) + " columns, need " +
                       std::to_string(cols));
}

}  // namespace

NetworkCase parse_matpower_case(std::istream& in) {
  MatpowerFile f = scan_matpower(in);
  if (f.base_mva <= 0) throw ParseError("missing or invalid mpc.baseMVA");
  const Matrix& bus = require(f, "bus");
  const Matrix& branch = require(f, "branch");
  const Matrix& gen = require(f, "gen");
  require_cols(bus, 13, "bus");
  require_cols(branch, 6, "branch");
  require_cols(gen, 10, "gen");

  NetworkCase net;
  net.base_mva = f.base_mva;
  const double base = f.base_mva;

  // gencost rows parallel gen rows; linear cost term only
  std::vector<double> cost(gen.rows.size(), 0.0);
  if (auto it = f.matrices.find("gencost"); it != f.matrices.end()) {
    const Matrix& gc = it->second;
    if (gc.rows.size() != gen.rows.size())
      throw ParseError("mpc.gencost must have one row per generator");
    for (std::size_t i = 0; i < gc.rows.size(); ++i) {
      const auto& row = gc.rows[i];
      if (row.size() < 4 || row[0] != 2)
        throw ParseError("mpc.gencost row " + std::to_string(i + 1) +
                         ": only polynomial model 2 is supported");
      int ncost = static_cast<int>(row[3]);
      if (row.size() < 4 + static_cast<std::size_t>(ncost))
        throw ParseError("mpc.gencost row " + std::to_string(i + 1) +
                         ": truncated coefficient list");
      // coefficients are ordered highest degree first
      for (int k = 0; k < ncost; ++k) {
        int degree = ncost - 1 - k;
        double coeff = row[4 + k];
        if (degree > 1 && coeff != 0.0)
          throw ParseError("mpc.gencost row " + std::to_string(i + 1) +
                           ": quadratic cost terms are not supported");
        if (degree == 1) cost[i] = coeff * base;  // $/MW -> $/p.u.
      }
    }
  }

  // generator records keyed by bus
  struct GenRow {
    double qmax, qmin, vg, pmax, pmin, cost;
  };
  std::unordered_map<int, GenRow> gens;
  for (std::size_t i = 0; i < gen.rows.size(); ++i) {
    const auto& r = gen.rows[i];
    int bus_id = static_cast<int>(r[0]);
    if (gens.count(bus_id))
      throw ParseError("multiple mpc.gen rows for bus " +
                       std::to_string(bus_id));
    gens[bus_id] = GenRow{r[3], r[4], r[5], r[8], r[9], cost[i]};
  }

  int slack_id = -1;
  for (const auto& r : bus.rows) {
    int id = static_cast<int>(r[0]);
    int type = static_cast<int>(r[1]);
    double pd = r[2] / base, qd = r[3] / base;
    double vmax = r[11], vmin = r[12];
    Bus b;
    b.id = id;
    b.v_min = vmin * vmin;  // bounds live in squared-voltage space
    b.v_max = vmax * vmax;
    if (type == 3) {
      if (slack_id >= 0) throw ParseError("multiple slack (type 3) buses");
      slack_id = id;
      b.kind = BusKind::Slack;
      auto it = gens.find(id);
      if (it == gens.end())
        throw ParseError("slack bus " + std::to_string(id) +
                         " has no mpc.gen row");
      const GenRow& g = it->second;
      net.slack = SlackBus{id,          g.vg * g.vg,   g.pmin / base,
                           g.pmax / base, g.qmin / base, g.qmax / base,
                           g.cost};
    } else if (type == 2 || (gens.count(id) && pd == 0.0 && qd == 0.0)) {
      b.kind = BusKind::Generator;
      auto it = gens.find(id);
      if (it == gens.end())
        throw ParseError("generator bus " + std::to_string(id) +
                         " has no mpc.gen row");
      if (pd != 0.0 || qd != 0.0)
        throw ParseError("bus " + std::to_string(id) +
                         " carries both generation and load");
      const GenRow& g = it->second;
      net.generators.push_back(Generator{id, g.pmin / base, g.pmax / base,
                                         g.qmin / base, g.qmax / base, g.cost});
    } else {
      if (gens.count(id))
        throw ParseError("bus " + std::to_string(id) +
                         " carries both generation and load");
      b.kind = BusKind::Load;
      b.p_demand = pd;
      b.q_demand = qd;
    }
    net.buses.push_back(b);
  }
  if (slack_id < 0) throw ParseError("no slack (type 3) bus");

  int branch_id = 0;
  for (const auto& r : branch.rows) {
    Branch br;
    br.id = ++branch_id;
    br.from_bus = static_cast<int>(r[0]);
    br.to_bus = static_cast<int>(r[1]);
    br.r = r[2];
    br.x = r[3];
    double rate_a = r[5];
    br.f_max = rate_a == 0.0 ? kUnbounded : rate_a / base;
    net.branches.push_back(br);
  }

  net.validate();
  return net;
}

// ---------------------------------------------------------------------------
// Native JSON format
// ---------------------------------------------------------------------------

namespace {

using nlohmann::json;

double num_field(const json& j, const std::string& obj, const char* key) {
  if (!j.contains(key) || !j[key].is_number())
    throw ParseError(obj + ": missing or non-numeric field '" + key + "'");
  return j[key].get<double>();
}

int int_field(const json& j, const std::string& obj, const char* key) {
  if (!j.contains(key) || !j[key].is_number_integer())
    throw ParseError(obj + ": missing or non-integer field '" + key + "'");
  return j[key].get<int>();
}

}  // namespace

NetworkCase parse_native_case(std::istream& in) {
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  NetworkCase net;
  net.base_mva = num_field(doc, "case", "base_mva");
  if (!doc.contains("slack") || !doc["slack"].is_object())
    throw ParseError("case: missing 'slack' object");
  const json& s = doc["slack"];
  net.slack.bus = int_field(s, "slack", "bus");
  net.slack.v0 = num_field(s, "slack", "v0");
  net.slack.p_min = num_field(s, "slack", "p_min");
  net.slack.p_max = num_field(s, "slack", "p_max");
  net.slack.q_min = num_field(s, "slack", "q_min");
  net.slack.q_max = num_field(s, "slack", "q_max");
  net.slack.cost = num_field(s, "slack", "cost");

  for (const char* key : {"buses", "branches", "generators"})
    if (!doc.contains(key) || !doc[key].is_array())
      throw ParseError(std::string("case: missing '") + key + "' array");

  for (const json& jb : doc["buses"]) {
    Bus b;
    b.id = int_field(jb, "bus", "id");
    std::string obj = "bus " + std::to_string(b.id);
    if (!jb.contains("kind") || !jb["kind"].is_string())
      throw ParseError(obj + ": missing 'kind'");
    std::string kind = jb["kind"].get<std::string>();
    if (kind == "slack")
      b.kind = BusKind::Slack;
    else if (kind == "generator")
      b.kind = BusKind::Generator;
    else if (kind == "load")
      b.kind = BusKind::Load;
    else
      throw ParseError(obj + ": unknown kind '" + kind + "'");
    b.v_min = num_field(jb, obj, "v_min");
    b.v_max = num_field(jb, obj, "v_max");
    b.p_demand = jb.value("p_demand", 0.0);
    b.q_demand = jb.value("q_demand", 0.0);
    net.buses.push_back(b);
  }
  for (const json& jb : doc["branches"]) {
    Branch br;
    br.id = int_field(jb, "branch", "id");
    std::string obj = "branch " + std::to_string(br.id);
    br.from_bus = int_field(jb, obj, "from_bus");
    br.to_bus = int_field(jb, obj, "to_bus");
    br.r = num_field(jb, obj, "r");
    br.x = num_field(jb, obj, "x");
    br.f_max = (jb.contains("f_max") && jb["f_max"].is_number())
                   ? jb["f_max"].get<double>()
                   : kUnbounded;
    net.branches.push_back(br);
  }
  for (const json& jg : doc["generators"]) {
    Generator g;
    g.bus = int_field(jg, "generator", "bus");
    std::string obj = "generator at bus " + std::to_string(g.bus);
    g.p_min = num_field(jg, obj, "p_min");
    g.p_max = num_field(jg, obj, "p_max");
    g.q_min = num_field(jg, obj, "q_min");
    g.q_max = num_field(jg, obj, "q_max");
    g.cost = num_field(jg, obj, "cost");
    net.generators.push_back(g);
  }
  net.validate();
  return net;
}

void emit_native_case(const NetworkCase& net, std::ostream& out) {
  json doc;
  doc["base_mva"] = net.base_mva;
  doc["slack"] = {{"bus", net.slack.bus},     {"v0", net.slack.v0},
                  {"p_min", net.slack.p_min}, {"p_max", net.slack.p_max},
                  {"q_min", net.slack.q_min}, {"q_max", net.slack.q_max},
                  {"cost", net.slack.cost}};
  doc["buses"] = json::array();
  for (const Bus& b : net.buses) {
    json jb = {{"id", b.id},       {"kind", to_string(b.kind)},
               {"v_min", b.v_min}, {"v_max", b.v_max},
               {"p_demand", b.p_demand}, {"q_demand", b.q_demand}};
    doc["buses"].push_back(jb);
  }
  doc["branches"] = json::array();
  for (const Branch& br : net.branches) {
    json jb = {{"id", br.id}, {"from_bus", br.from_bus},
               {"to_bus", br.to_bus}, {"r", br.r}, {"x", br.x}};
    if (br.bounded()) jb["f_max"] = br.f_max;
    doc["branches"].push_back(jb);
  }
  doc["generators"] = json::array();
  for (const Generator& g : net.generators)
    doc["generators"].push_back({{"bus", g.bus},
                                 {"p_min", g.p_min},
                                 {"p_max", g.p_max},
                                 {"q_min", g.q_min},
                                 {"q_max", g.q_max},
                                 {"cost", g.cost}});
  out << doc.dump(2) << "\n";
}

NetworkCase parse_matpower_string(const std::string& text) {
  std::istringstream in(text);
  return parse_matpower_case(in);
}

NetworkCase parse_native_string(const std::string& text) {
  std::istringstream in(text);
  return parse_native_case(in);
}

NetworkCase load_case_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open case file: " + path);
  if (path.size() > 5 && path.substr(path.size() - 5) == ".json")
    return parse_native_case(in);
  return parse_matpower_case(in);
}

// ---------------------------------------------------------------------------
// Topology
// ---------------------------------------------------------------------------

int RadialTopology::position(int bus_id) const {
  auto it = bus_pos.find(bus_id);
  if (it == bus_pos.end())
    throw ArgumentError("unknown bus id " + std::to_string(bus_id));
  return it->second;
}

RadialTopology validate_radial(const NetworkCase& net) {
  net.validate();
  RadialTopology topo;
  topo.slack_bus = net.slack.bus;
  for (const Bus& b : net.buses)
    if (b.kind != BusKind::Slack) topo.bus_ids.push_back(b.id);
  std::sort(topo.bus_ids.begin(), topo.bus_ids.end());
  topo.n = static_cast<int>(topo.bus_ids.size());
  for (int j = 0; j < topo.n; ++j) topo.bus_pos[topo.bus_ids[j]] = j;

  // adjacency over all buses; slack mapped to index n
  auto node = [&](int bus) {
    return bus == topo.slack_bus ? topo.n : topo.bus_pos.at(bus);
  };
  std::vector<std::vector<std::pair<int, int>>> adj(topo.n + 1);  // (node, branch)
  for (std::size_t k = 0; k < net.branches.size(); ++k) {
    const Branch& br = net.branches[k];
    int a = node(br.from_bus), b = node(br.to_bus);
    adj[a].push_back({b, static_cast<int>(k)});
    adj[b].push_back({a, static_cast<int>(k)});
  }

  topo.parent.assign(topo.n, -2);
  topo.children.assign(topo.n, {});
  topo.branch_index.assign(topo.n, -1);
  std::vector<int> order;  // BFS order of positions
  std::vector<bool> seen(topo.n + 1, false);
  std::vector<int> stack = {topo.n};
  seen[topo.n] = true;
  std::vector<int> parent_node(topo.n + 1, -1);
  while (!stack.empty()) {
    int u = stack.back();
    stack.pop_back();
    if (u < topo.n) order.push_back(u);
    for (auto [v, br] : adj[u]) {
      if (seen[v]) {
        if (v != parent_node[u])
          throw ValidationError("network is not radial: cycle through branch " +
                                std::to_string(net.branches[br].id));
        continue;
      }
      seen[v] = true;
      parent_node[v] = u;
      topo.parent[v] = (u == topo.n) ? -1 : u;
      if (u < topo.n) topo.children[u].push_back(v);
      topo.branch_index[v] = br;
      stack.push_back(v);
    }
  }
  for (int j = 0; j < topo.n; ++j)
    if (!seen[j])
      throw ValidationError("bus " + std::to_string(topo.bus_ids[j]) +
                            " is disconnected from the slack");
  for (auto& c : topo.children) std::sort(c.begin(), c.end());

  // H_j via reverse BFS order accumulation
  topo.downstream.assign(topo.n, {});
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    int j = *it;
    topo.downstream[j].push_back(j);
    for (int c : topo.children[j])
      topo.downstream[j].insert(topo.downstream[j].end(),
                                topo.downstream[c].begin(),
                                topo.downstream[c].end());
    std::sort(topo.downstream[j].begin(), topo.downstream[j].end());
  }

  topo.path_to_slack.assign(topo.n, {});
  for (int j = 0; j < topo.n; ++j) {
    for (int u = j; u != -1; u = topo.parent[u])
      topo.path_to_slack[j].push_back(u);
  }
  return topo;
}

// ---------------------------------------------------------------------------
// Experiment preparation
// ---------------------------------------------------------------------------

namespace {

// Rejection-sampled bound to keep the stream identical across platforms.
std::uint64_t bounded_draw(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit =
      std::numeric_limits<std::uint64_t>::max() -
      std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t v;
  do {
    v = rng();
  } while (v >= limit);
  return v % bound;
}

double uniform_draw(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

template <typename T>
void fisher_yates(std::vector<T>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i)
    std::swap(v[i - 1], v[bounded_draw(rng, i)]);
}

}  // namespace

NetworkCase augment_distributed_generation(const NetworkCase& net, int count,
                                           double p_max, double q_mag,
                                           std::pair<double, double> cost_range,
                                           std::uint64_t seed) {
  std::vector<int> load_ids;
  for (const Bus& b : net.buses)
    if (b.kind == BusKind::Load) load_ids.push_back(b.id);
  std::sort(load_ids.begin(), load_ids.end());
  if (count < 0 || count > static_cast<int>(load_ids.size()))
    throw ArgumentError("distributed-generation count " +
                        std::to_string(count) + " exceeds " +
                        std::to_string(load_ids.size()) + " load buses");
  if (count == 0) return net;

  std::mt19937_64 rng(seed);
  fisher_yates(load_ids, rng);
  NetworkCase out = net;
  double max_cost = cost_range.first;
  for (int k = 0; k < count; ++k) {
    int id = load_ids[k];
    double cost = cost_range.first +
                  (cost_range.second - cost_range.first) * uniform_draw(rng);
    max_cost = std::max(max_cost, cost);
    for (Bus& b : out.buses) {
      if (b.id != id) continue;
      b.kind = BusKind::Generator;
      b.p_demand = 0.0;
      b.q_demand = 0.0;
    }
    out.generators.push_back(Generator{id, 0.0, p_max, -q_mag, q_mag, cost});
  }
  if (out.slack.cost <= max_cost) out.slack.cost = max_cost + 1.0;
  std::sort(out.generators.begin(), out.generators.end(),
            [](const Generator& a, const Generator& b) { return a.bus < b.bus; });
  out.validate();
  return out;
}

NetworkCase set_flow_limits_from_solution(const NetworkCase& net,
                                          const RadialTopology& topo,
                                          const std::vector<BranchFlow>& flows,
                                          const std::vector<int>& branch_positions) {
  if (static_cast<int>(flows.size()) != topo.n)
    throw ArgumentError("flow vector size does not match branch count");
  NetworkCase out = net;
  for (int pos : branch_positions) {
    if (pos < 0 || pos >= topo.n)
      throw ArgumentError("unknown branch position " + std::to_string(pos));
    int k = topo.branch_index[pos];
    out.branches[k].f_max = std::hypot(flows[pos].fp, flows[pos].fq);
  }
  return out;
}

NetworkCase random_radial_case(int n, std::uint64_t seed) {
  if (n < 2) throw ArgumentError("random case needs at least 2 buses");
  std::mt19937_64 rng(seed);
  NetworkCase net;
  net.base_mva = 1.0;
  net.slack = SlackBus{0, 1.0, -50.0, 50.0, -50.0, 50.0, 2.0};
  net.buses.push_back(Bus{0, BusKind::Slack, 1.0, 1.0, 0.0, 0.0});
  int n_gen = 0;
  for (int i = 1; i < n; ++i) {
    Bus b;
    b.id = i;
    b.v_min = 0.81;
    b.v_max = 1.21;
    bool gen = uniform_draw(rng) < 0.3;
    if (gen) {
      b.kind = BusKind::Generator;
      double pmax = 0.1 + 0.4 * uniform_draw(rng);
      double qmag = 0.05 + 0.15 * uniform_draw(rng);
      double cost = uniform_draw(rng);
      net.generators.push_back(Generator{i, 0.0, pmax, -qmag, qmag, cost});
      ++n_gen;
    } else {
      b.kind = BusKind::Load;
      b.p_demand = 0.02 + 0.08 * uniform_draw(rng);
      b.q_demand = 0.3 * b.p_demand;
    }
    net.buses.push_back(b);
    Branch br;
    br.id = i;
    int parent = static_cast<int>(bounded_draw(rng, static_cast<std::uint64_t>(i)));
    br.from_bus = parent;
    br.to_bus = i;
    br.r = 0.001 + 0.004 * uniform_draw(rng);
    br.x = 2.0 * br.r;
    net.branches.push_back(br);
  }
  if (n_gen == 0) {
    // force one generator so the reduced problem has variables
    Bus& b = net.buses[1];
    b.kind = BusKind::Generator;
    b.p_demand = 0.0;
    b.q_demand = 0.0;
    net.generators.push_back(Generator{b.id, 0.0, 0.3, -0.1, 0.1, 0.5});
  }
  net.validate();
  return net;
}

}  // namespace ldfopf
