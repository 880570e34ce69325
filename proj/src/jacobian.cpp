#include "forge/jacobian.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <vector>

#include <Eigen/SVD>
#include <fmt/format.h>

#include "forge/error.hpp"
#include "forge/trig.hpp"

namespace forge {

namespace {

struct Contribution {
  int i = 0, j = 0;
  double off = 0, diag = 0;
};

double checked_sin(double x, const char* what, int c) {
  const double s = std::sin(x);
  if (!(std::abs(s) >= kMinSine)) throw DegenerateError(fmt::format("vanishing sin {} at halfedge {}", what, c));
  return s;
}

}  // namespace

Eigen::MatrixXd assemble_jacobian(const CornerMesh& mesh, const PolytopeGeometry& g, Exec exec) {
  const int nc = mesh.num_corners();
  std::vector<Contribution> contrib(nc);
  parallel_for(nc, exec, [&](std::ptrdiff_t idx) {
    const int c = static_cast<int>(idx), d = mesh.opposite(c);
    const double a1 = g.alpha(c), a2 = g.alpha(d);
    const double cot_sum = std::cos(a1) / checked_sin(a1, "alpha", c) + std::cos(a2) / checked_sin(a2, "alpha", d);
    const double w = cot_sum / checked_sin(g.rho_tail(c), "rho", c);
    const double base = 1.0 / (mesh.length(c) * checked_sin(g.rho_tip(c), "rho", c));
    contrib[c] = {mesh.tail(c), mesh.tip(c), w * base, -w * std::cos(g.phi(c)) * base};
  });
  const int n = mesh.num_vertices();
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (const auto& k : contrib) {
    J(k.i, k.j) += k.off;
    J(k.i, k.i) += k.diag;
  }
  return J;
}

Eigen::MatrixXd assemble_jacobian(const GeneralizedPolytope& P, Exec exec) {
  return assemble_jacobian(P.mesh, curvatures(P, exec), exec);
}

RankProfile rank_profile(const Eigen::MatrixXd& J, double tol) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(J, Eigen::ComputeFullV);
  RankProfile p;
  p.singular_values = svd.singularValues();
  const int n = static_cast<int>(p.singular_values.size());
  const double smax = n > 0 ? p.singular_values[0] : 0.0;
  for (int k = 0; k < n; ++k)
    if (p.singular_values[k] > tol * smax) ++p.rank;
  p.corank = n - p.rank;
  p.kernel = svd.matrixV().rightCols(p.corank);
  const double smin = n > 0 ? p.singular_values[n - 1] : 0.0;
  p.condition = smin > 0 ? smax / smin : std::numeric_limits<double>::infinity();
  return p;
}

void write_matrix(std::ostream& os, const Eigen::MatrixXd& M) {
  os << std::setprecision(17);
  for (int i = 0; i < M.rows(); ++i) {
    for (int j = 0; j < M.cols(); ++j) os << (j ? " " : "") << M(i, j);
    os << '\n';
  }
}

}  // namespace forge
