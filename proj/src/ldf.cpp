#include "ldfopf/ldf.hpp"

#include <iomanip>
#include <ostream>

namespace ldfopf {

Eigen::MatrixXd build_incidence_full(const RadialTopology& topo) {
  const int n = topo.n;
  Eigen::MatrixXd At = Eigen::MatrixXd::Zero(n, n + 1);
  for (int j = 0; j < n; ++j) {
    int from = topo.parent[j];                   // -1 = slack
    At(j, from < 0 ? 0 : from + 1) = 1.0;        // branch j starts upstream
    At(j, j + 1) = -1.0;                         // and terminates at bus j
  }
  return At;
}

Eigen::MatrixXd build_incidence(const RadialTopology& topo) {
  return build_incidence_full(topo).rightCols(topo.n);
}

Eigen::MatrixXd build_F(const RadialTopology& topo) {
  const int n = topo.n;
  Eigen::MatrixXd F = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j : topo.downstream[i]) F(i, j) = -1.0;
  return F;
}

void build_RX(const NetworkCase& net, const RadialTopology& topo,
              Eigen::MatrixXd& R, Eigen::MatrixXd& X) {
  const int n = topo.n;
  // entry (i,j) doubles the impedance sum of the common slack path of buses
  // i and j (the path down to their deepest common ancestor)
  R = Eigen::MatrixXd::Zero(n, n);
  X = Eigen::MatrixXd::Zero(n, n);
  std::vector<char> on_pj(n, 0);
  for (int j = 0; j < n; ++j) {
    for (int u : topo.path_to_slack[j]) on_pj[u] = 1;
    for (int i = 0; i <= j; ++i) {
      double r = 0.0, x = 0.0;
      for (int u : topo.path_to_slack[i]) {
        if (!on_pj[u]) continue;
        const Branch& br = net.branches[topo.branch_index[u]];
        r += br.r;
        x += br.x;
      }
      R(i, j) = R(j, i) = 2.0 * r;
      X(i, j) = X(j, i) = 2.0 * x;
    }
    for (int u : topo.path_to_slack[j]) on_pj[u] = 0;
  }
}

void branch_coefficients(const RadialTopology& topo, const NetworkCase& net,
                         LdfModel& model) {
  const int n = topo.n;
  model.gen_pos.clear();
  model.load_pos.clear();
  for (int j = 0; j < n; ++j) {
    const Bus* b = net.find_bus(topo.bus_ids[j]);
    if (b->kind == BusKind::Generator)
      model.gen_pos.push_back(j);
    else
      model.load_pos.push_back(j);
  }
  const int ng = static_cast<int>(model.gen_pos.size());
  const int nl = static_cast<int>(model.load_pos.size());
  std::vector<int> axis(n, -1);  // position -> index on its partition axis
  for (int g = 0; g < ng; ++g) axis[model.gen_pos[g]] = g;
  for (int l = 0; l < nl; ++l) axis[model.load_pos[l]] = l;

  model.r.assign(n, Eigen::VectorXd::Zero(ng));
  model.s.assign(n, Eigen::VectorXd::Zero(2 * nl));
  model.t.assign(n, Eigen::VectorXd::Zero(2 * nl));
  for (int j = 0; j < n; ++j) {
    for (int u : topo.downstream[j]) {
      const Bus* b = net.find_bus(topo.bus_ids[u]);
      if (b->kind == BusKind::Generator) {
        model.r[j](axis[u]) = -1.0;
      } else {
        model.s[j](axis[u]) = -1.0;
        model.t[j](nl + axis[u]) = -1.0;
      }
    }
  }
}

LdfModel build_ldf_model(const NetworkCase& net, const RadialTopology& topo) {
  LdfModel model;
  model.v0 = net.slack.v0;
  model.F = build_F(topo);
  build_RX(net, topo, model.R, model.X);
  branch_coefficients(topo, net, model);
  return model;
}

void dump_matrix_csv(const Eigen::MatrixXd& m, std::ostream& out) {
  out << std::setprecision(17);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      out << (j ? "," : "") << m(i, j);
    out << "\n";
  }
}

}  // namespace ldfopf
