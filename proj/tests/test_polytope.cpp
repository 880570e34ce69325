#include <doctest.h>

#include <cmath>
#include <random>

#include "forge/delaunay.hpp"
#include "forge/error.hpp"
#include "forge/generators.hpp"
#include "forge/polytope.hpp"
#include "support.hpp"

using namespace forge;
using forge::testing::mesh_of;

namespace {

// solid angle of the cone over a triangle, by the van Oosterom-Strackee formula
double solid_angle(const Eigen::Vector3d& apex, const std::array<Eigen::Vector3d, 3>& base) {
  const Eigen::Vector3d a = base[0] - apex, b = base[1] - apex, c = base[2] - apex;
  const double la = a.norm(), lb = b.norm(), lc = c.norm();
  const double num = std::abs(a.dot(b.cross(c)));
  const double den = la * lb * lc + a.dot(b) * lc + a.dot(c) * lb + b.dot(c) * la;
  return 2 * std::atan2(num, den);
}

}  // namespace

TEST_SUITE("polytope") {
  TEST_CASE("Cayley-Menger sign tracks the circumradius") {
    // unit equilateral base, circumradius^2 = 1/3
    CHECK(cayley_menger(1, 1, 1, 1.0 / 3 + 1e-6, 1.0 / 3 + 1e-6, 1.0 / 3 + 1e-6) > 0);
    CHECK(cayley_menger(1, 1, 1, 1.0 / 3 - 1e-6, 1.0 / 3 - 1e-6, 1.0 / 3 - 1e-6) < 0);
    CHECK(cayley_menger(1, 1, 1, 0, 0, 0) < 0);
    CHECK(cayley_menger(1, 1, 1, 1, 1, 1) > 0);
    // 288 V^2 for the regular tetrahedron of edge 1: V = 1/(6 sqrt 2)
    CHECK(cayley_menger(1, 1, 1, 1, 1, 1) == doctest::Approx(288.0 / 72).epsilon(1e-12));
  }

  TEST_CASE("pyramid closed forms") {
    const Pyramid p = solve_pyramid({1, 1, 1}, {1, 1, 1});
    CHECK(p.altitude == doctest::Approx(std::sqrt(2.0 / 3)).epsilon(1e-14));
    for (int k = 0; k < 3; ++k) {
      CHECK(p.rho_tail[k] == doctest::Approx(M_PI / 3).epsilon(1e-13));
      CHECK(p.rho_tip[k] == doctest::Approx(M_PI / 3).epsilon(1e-13));
      CHECK(p.phi[k] == doctest::Approx(M_PI / 3).epsilon(1e-13));
      CHECK(p.alpha[k] == doctest::Approx(std::acos(1.0 / 3)).epsilon(1e-13));
      CHECK((p.apex - p.base[k]).norm() == doctest::Approx(1).epsilon(1e-14));
    }
    CHECK(p.apex.z() < 0);

    const Pyramid tall = solve_pyramid({1, 1, 1}, {1e6, 1e6, 1e6});
    for (int k = 0; k < 3; ++k) {
      CHECK(std::abs(tall.rho_tail[k] - M_PI / 2) <= 1e-3);
      CHECK(std::abs(tall.alpha[k] - M_PI / 2) <= 1e-3);
      CHECK(tall.omega[k] == doctest::Approx(M_PI / 3).epsilon(1e-6));
    }
    CHECK_THROWS_AS(solve_pyramid({1, 1, 1}, {0.5, 0.5, 0.5}), DegenerateError);
  }

  TEST_CASE("random pyramids reproduce their radii and angles") {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(0.5, 1.5);
    for (int n = 0; n < 500; ++n) {
      const std::array<double, 3> l = {u(rng), u(rng), u(rng)};
      if (l[0] + l[1] < 1.1 * l[2] || l[1] + l[2] < 1.1 * l[0] || l[0] + l[2] < 1.1 * l[1]) continue;
      const std::array<double, 3> r = {u(rng) + 1, u(rng) + 1, u(rng) + 1};
      const std::array<double, 3> q = {r[0] * r[0], r[1] * r[1], r[2] * r[2]};
      if (cayley_menger(l[2], l[0], l[1], q[0], q[1], q[2]) <= 0) {
        CHECK_THROWS_AS(solve_pyramid(l, r), DegenerateError);
        continue;
      }
      const Pyramid p = solve_pyramid(l, r);
      for (int k = 0; k < 3; ++k) {
        CHECK((p.apex - p.base[k]).norm() == doctest::Approx(r[k]).epsilon(1e-12));
        CHECK((p.base[(k + 1) % 3] - p.base[(k + 2) % 3]).norm() == doctest::Approx(l[k]).epsilon(1e-12));
        // apex face angles close the triangle apex-tail-tip
        CHECK(p.rho_tail[k] + p.rho_tip[k] + p.phi[k] == doctest::Approx(M_PI).epsilon(1e-12));
      }
      // the three dihedrals at the radial edges bound a spherical triangle of positive area
      CHECK(p.omega[0] + p.omega[1] + p.omega[2] > M_PI);
      CHECK(p.omega[0] + p.omega[1] + p.omega[2] - M_PI ==
            doctest::Approx(solid_angle(p.apex, p.base)).epsilon(1e-10));
    }
  }

  TEST_CASE("regular tetrahedron at its circumradius") {
    const PolyhedralMetric metric = build_metric(regular_tetrahedron().development);
    const GeneralizedPolytope P = make_polytope(CornerMesh::from_metric(metric), Eigen::VectorXd::Constant(4, std::sqrt(3.0 / 8)));
    const PolytopeGeometry g = curvatures(P);
    CHECK(testing::max_abs(g.kappa) <= 1e-12);
    for (int c = 0; c < P.mesh.num_corners(); ++c) CHECK(g.theta[c] == doctest::Approx(std::acos(1.0 / 3)).epsilon(1e-12));
    CHECK(g.H == doctest::Approx(6 * (M_PI - std::acos(1.0 / 3))).epsilon(1e-12));

    const PolytopeGeometry far = evaluate(P.mesh, Eigen::VectorXd::Constant(4, 100));
    for (int v = 0; v < 4; ++v) {
      CHECK(far.kappa[v] > 0);
      CHECK(far.kappa[v] < M_PI);
    }
  }

  TEST_CASE("solid angles add up to the sphere minus the curvature") {
    for (int seed = 1; seed <= 20; ++seed) {
      const testing::RandomPolytope rp = testing::random_polytope(seed, 6 + seed % 12);
      const PolytopeGeometry g = curvatures(rp.P);
      double total = 0;
      for (const Pyramid& p : g.pyramids) total += solid_angle(p.apex, p.base);
      CHECK(std::abs(total - (4 * M_PI - g.kappa.sum())) <= 1e-8);
    }
  }

  TEST_CASE("dH/dr is the curvature") {
    for (int seed = 1; seed <= 10; ++seed) {
      const testing::RandomPolytope rp = testing::random_polytope(seed, 8);
      const PolytopeGeometry g = curvatures(rp.P);
      for (int i = 0; i < rp.P.r.size(); ++i) {
        const double h = 1e-6 * rp.P.r[i];
        Eigen::VectorXd rp_ = rp.P.r, rm = rp.P.r;
        rp_[i] += h;
        rm[i] -= h;
        const double fd = (evaluate(rp.P.mesh, rp_).H - evaluate(rp.P.mesh, rm).H) / (2 * h);
        CHECK(std::abs(fd - g.kappa[i]) <= 1e-6);
      }
    }
  }

  TEST_CASE("dihedral above pi exactly on bad edges") {
    std::mt19937_64 rng(19);
    int bad = 0, good = 0;
    for (int seed = 1; seed <= 20; ++seed) {
      const testing::RandomPolytope rp = testing::random_polytope(seed, 10);
      const Eigen::VectorXd q = rp.P.r.array().square();
      CornerMesh m = rp.P.mesh;
      for (int n = 0; n < 40; ++n) {
        std::vector<int> flippable;
        for (int c = 0; c < m.num_corners(); ++c)
          if (m.can_flip(c)) flippable.push_back(c);
        CornerMesh next = m;
        next.flip(flippable[rng() % flippable.size()]);
        PolytopeGeometry g;
        try {
          g = evaluate(next, rp.P.r);
        } catch (const DegenerateError&) {
          continue;  // some pyramid of this triangulation does not exist
        }
        m = next;
        for (int c : m.edges()) {
          if (std::abs(hinge_test(m, c, q).excess) < 1e-8) continue;
          const bool is_bad = edge_is_bad(m, c, q);
          CHECK((g.theta[c] > M_PI) == is_bad);
          (is_bad ? bad : good)++;
        }
      }
    }
    CHECK(bad > 20);
    CHECK(good > 20);
  }

  TEST_CASE("validity checks") {
    const PolyhedralMetric metric = build_metric(regular_tetrahedron().development);
    const CornerMesh m = CornerMesh::from_metric(metric);
    CHECK(check_validity({m, Eigen::VectorXd::Constant(4, 1)}).valid);
    CHECK(!check_validity({m, Eigen::VectorXd::Constant(4, 0.5)}).valid);
    CHECK(!check_validity({m, Eigen::VectorXd::Constant(3, 1)}).valid);
    Eigen::VectorXd r = Eigen::VectorXd::Constant(4, 1);
    r[2] = -1;
    CHECK(!check_validity({m, r}).valid);
    CHECK_THROWS_AS(make_polytope(m, Eigen::VectorXd::Constant(4, 0.5)), Error);
    CHECK_THROWS_AS(curvatures({m, Eigen::VectorXd::Constant(4, 0.5)}), Error);
  }

  TEST_CASE("serial and parallel evaluation agree bit for bit") {
    const testing::RandomPolytope rp = testing::random_polytope(3, 40);
    const PolytopeGeometry a = evaluate(rp.P.mesh, rp.P.r, Exec::Serial);
    const PolytopeGeometry b = evaluate(rp.P.mesh, rp.P.r, Exec::Parallel);
    CHECK(a.kappa == b.kappa);
    CHECK(a.theta == b.theta);
    CHECK(a.H == b.H);
  }
}
