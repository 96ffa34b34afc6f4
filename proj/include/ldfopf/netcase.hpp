#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace ldfopf {

/// Thrown when a case file cannot be read (syntax, schema).
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Thrown when a structurally readable case violates model invariants.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ArgumentError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

inline constexpr double kUnbounded = std::numeric_limits<double>::infinity();

enum class BusKind { Slack, Generator, Load };

const char* to_string(BusKind kind);

struct Bus {
  int id = 0;
  BusKind kind = BusKind::Load;
  double v_min = 0.0;  // squared voltage magnitude, p.u.^2
  double v_max = 0.0;
  double p_demand = 0.0;  // positive = consumption, p.u.
  double q_demand = 0.0;
};

struct Branch {
  int id = 0;
  int from_bus = 0;
  int to_bus = 0;
  double r = 0.0;  // p.u.
  double x = 0.0;
  double f_max = kUnbounded;  // apparent-flow limit, p.u.

  bool bounded() const { return f_max != kUnbounded; }
};

struct Generator {
  int bus = 0;
  double p_min = 0.0, p_max = 0.0;
  double q_min = 0.0, q_max = 0.0;
  double cost = 0.0;  // $/p.u.
};

struct SlackBus {
  int bus = 0;
  double v0 = 1.0;  // fixed squared voltage, p.u.^2
  double p_min = -kUnbounded, p_max = kUnbounded;
  double q_min = -kUnbounded, q_max = kUnbounded;
  double cost = 0.0;
};

/// A single-phase network case in per-unit. Buses carry the slack entry too;
/// slack generation parameters live in `slack`.
struct NetworkCase {
  double base_mva = 1.0;
  SlackBus slack;
  std::vector<Bus> buses;
  std::vector<Branch> branches;
  std::vector<Generator> generators;

  const Bus* find_bus(int id) const;
  const Generator* find_generator(int bus) const;

  /// Checks the case invariants (unique slack, tri-partition, branch count,
  /// bound ordering, non-negative impedances). Throws ValidationError.
  void validate() const;
};

/// Directed tree rooted at the slack bus. Non-slack buses are assigned
/// canonical positions 0..n-1 in ascending bus-id order; branch j shares the
/// position of its downstream bus (branch number j+1 in 1-based reports).
struct RadialTopology {
  int n = 0;
  int slack_bus = 0;
  std::vector<int> bus_ids;                  // position -> bus id
  std::unordered_map<int, int> bus_pos;      // bus id -> position
  std::vector<int> parent;                   // position of parent bus, -1 = slack
  std::vector<std::vector<int>> children;    // positions of child buses
  std::vector<std::vector<int>> downstream;  // H_j, inclusive, sorted positions
  std::vector<std::vector<int>> path_to_slack;  // branch positions, bus -> slack
  std::vector<int> branch_index;             // position -> index into case.branches

  int position(int bus_id) const;
};

NetworkCase parse_matpower_case(std::istream& in);
NetworkCase parse_native_case(std::istream& in);
void emit_native_case(const NetworkCase& net, std::ostream& out);

NetworkCase parse_matpower_string(const std::string& text);
NetworkCase parse_native_string(const std::string& text);
NetworkCase load_case_file(const std::string& path);

/// Orients branches away from the slack and computes downstream sets.
/// Throws ValidationError on cycles or disconnected buses.
RadialTopology validate_radial(const NetworkCase& net);

/// Converts `count` randomly chosen load buses into generator buses.
/// Stream contract (mt19937_64 seeded with `seed`): one Fisher-Yates shuffle
/// of the load-bus list (ascending bus id) using rejection-sampled bounded
/// draws, then one uniform cost draw per selected bus in shuffled order.
/// The slack cost is raised above every drawn cost if necessary.
NetworkCase augment_distributed_generation(const NetworkCase& net, int count,
                                           double p_max, double q_mag,
                                           std::pair<double, double> cost_range,
                                           std::uint64_t seed);

struct BranchFlow {
  double fp = 0.0;
  double fq = 0.0;
};

/// Sets f_max of the selected branches (canonical positions) to the apparent
/// flow magnitude of the given setpoint. `flows` is in canonical branch order.
NetworkCase set_flow_limits_from_solution(const NetworkCase& net,
                                          const RadialTopology& topo,
                                          const std::vector<BranchFlow>& flows,
                                          const std::vector<int>& branch_positions);

/// Deterministic random radial test case: `n` total buses, mixed
/// generator/load partition, unbounded branch flows.
NetworkCase random_radial_case(int n, std::uint64_t seed);

}  // namespace ldfopf
