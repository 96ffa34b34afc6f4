#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <string>
#include <vector>

#include "ldfopf/opf_model.hpp"

namespace ldfopf {

struct AssemblyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Canonical conic program  min c'x  s.t.  Ax + s = b,  s in K,
/// where K = R_+^{nonneg} x SOC_3 x ... x SOC_3 (block order fixed).
/// Every SOC block is laid out (radius row, y row, z row).
struct ConicProgram {
  Eigen::VectorXd c;
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  int nonneg = 0;          // leading orthant rows
  int soc_count = 0;       // trailing 3-dim second-order cones
  double obj_offset = 0.0; // added to c'x when reporting the objective

  // row map: meaning of each orthant row for dual extraction
  enum class RowKind { Core, PUb, PLb, QUb, QLb };
  struct RowTag {
    RowKind kind;
    int index;  // core row index or generator axis index
  };
  std::vector<RowTag> row_tags;     // size == nonneg
  std::vector<int> cone_branch;     // SOC block -> branch position
  int n_g = 0;                      // x = [p_g; q_g]

  int rows() const { return nonneg + 3 * soc_count; }
  int vars() const { return static_cast<int>(c.size()); }
};

enum class SolveStatus { Optimal, PrimalInfeasible, DualInfeasible, MaxIterations };

const char* to_string(SolveStatus s);

struct Residuals {
  double primal = 0.0;
  double dual = 0.0;
  double gap = 0.0;  // absolute complementarity gap s'y at the scaled point
};

struct SolveResult {
  Eigen::VectorXd x;      // primal point (scaled by 1/tau)
  Eigen::VectorXd slack;  // cone slack b - Ax
  Eigen::VectorXd y;      // dual multipliers, cone-wise
  double obj = 0.0;       // c'x + obj_offset
  SolveStatus status = SolveStatus::MaxIterations;
  Residuals residuals;
  int iterations = 0;
  Eigen::VectorXd certificate;  // infeasibility ray when status says so
};

struct SolverOptions {
  double tol = 1e-8;
  int max_iter = 100;
  std::ostream* log = nullptr;  // one line per iteration when set
};

/// Lifts the reduced OPF into canonical conic form with x = [p_g; q_g].
/// Infinite bounds and infinite right-hand sides produce no rows.
ConicProgram assemble(const ReducedOpf& red);

/// Direct conic form of the full-variable OPF with x = [p; q] over all
/// non-slack buses; load injections pinned by paired rows. Used to verify
/// the reduction.
ConicProgram assemble_full(const NetworkCase& net, const RadialTopology& topo,
                           const LdfModel& ldf);

/// Primal-dual interior-point method on the homogeneous self-dual embedding
/// with Nesterov-Todd scaling and Mehrotra predictor-corrector steps.
SolveResult solve(const ConicProgram& prog, const SolverOptions& opts = {});

/// Reads the reduced-OPF dual set off the conic multipliers.
DualSolution extract_duals(const ConicProgram& prog, const ReducedOpf& red,
                           const SolveResult& result);

}  // namespace ldfopf
