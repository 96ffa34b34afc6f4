#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <vector>

#include "ldfopf/netcase.hpp"

namespace ldfopf {

/// LinDistFlow sensitivities for v = R p + X q + v0*1 and branch flows
/// f^p = F p, f^q = F q, plus the per-branch coefficient vectors of the
/// reduced OPF cone constraints. All matrices follow the canonical bus
/// ordering of RadialTopology.
struct LdfModel {
  Eigen::MatrixXd R, X;  // n x n, symmetric PSD
  Eigen::MatrixXd F;     // n x n, entries in {-1, 0}
  double v0 = 1.0;

  std::vector<int> gen_pos;   // canonical positions of generator buses
  std::vector<int> load_pos;  // canonical positions of load buses

  // per-branch cone coefficients: r over generators, s/t over the stacked
  // demand vector [p_l; q_l]
  std::vector<Eigen::VectorXd> r, s, t;
};

/// Signed branch-bus incidence, n x (n+1); column 0 is the slack bus,
/// column j+1 the canonical bus j. Row i is branch i.
Eigen::MatrixXd build_incidence_full(const RadialTopology& topo);

/// Reduced square incidence A (slack column deleted). Invertible.
Eigen::MatrixXd build_incidence(const RadialTopology& topo);

/// F = A^{-T}, built combinatorially from downstream sets: row i is -1 at
/// every bus of H_i.
Eigen::MatrixXd build_F(const RadialTopology& topo);

/// R(i,j) = 2 * sum of branch resistances on the common slack-path of buses
/// i and j; X analogous with reactances.
void build_RX(const NetworkCase& net, const RadialTopology& topo,
              Eigen::MatrixXd& R, Eigen::MatrixXd& X);

/// Fills r_j, s_j, t_j for every branch from the rows of F and the bus
/// partition. s acts on the real half of [p_l; q_l], t on the reactive half.
void branch_coefficients(const RadialTopology& topo, const NetworkCase& net,
                         LdfModel& model);

LdfModel build_ldf_model(const NetworkCase& net, const RadialTopology& topo);

/// Row-major CSV dump with 17 significant digits.
void dump_matrix_csv(const Eigen::MatrixXd& m, std::ostream& out);

}  // namespace ldfopf
