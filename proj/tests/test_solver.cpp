#include <doctest.h>

#include <cmath>

#include "forge/error.hpp"
#include "forge/generators.hpp"
#include "forge/jacobian.hpp"
#include "forge/solver.hpp"
#include "support.hpp"

using namespace forge;
using forge::testing::max_abs;

namespace {

double spread(const Eigen::VectorXd& r) { return r.maxCoeff() - r.minCoeff(); }

// dihedral of the edge at corner c under radii r
double theta_at(const CornerMesh& m, int c, const Eigen::VectorXd& r) {
  const int d = m.opposite(c);
  return solve_pyramid(m, CornerMesh::face(c), r).alpha[c % 3] + solve_pyramid(m, CornerMesh::face(d), r).alpha[d % 3];
}

}  // namespace

TEST_SUITE("solver") {
  TEST_CASE("starting radius") {
    SolverOptions opt;
    const PolyhedralMetric tet = build_metric(regular_tetrahedron().development);
    const InitialState s = choose_initial_radius(tet, opt);
    for (int i = 0; i < 4; ++i) {
      CHECK(s.kappa1[i] > opt.initial_kappa_ratio * M_PI);
      CHECK(s.kappa1[i] < M_PI);
      CHECK(s.kappa1.sum() - s.kappa1[i] > 2 * M_PI);
    }
    // curvature climbs towards the deficit as R grows
    double last = 0;
    for (double R : {1.0, 2.0, 10.0, 100.0}) {
      const double k = evaluate(s.P.mesh, Eigen::VectorXd::Constant(4, R)).kappa[0];
      CHECK(k > last);
      CHECK(k < M_PI);
      last = k;
    }
    CHECK(M_PI - last < 1e-3);

    const PolyhedralMetric tri = build_metric(doubly_covered_polygon(3));
    const InitialState t = choose_initial_radius(tri, opt);
    for (int i = 0; i < 3; ++i) {
      CHECK(t.kappa1[i] > 0);
      CHECK(t.kappa1[i] < 4 * M_PI / 3);
      CHECK(t.kappa1.sum() - t.kappa1[i] > 2 * M_PI);
    }

    // the sum condition can fail where the curvatures are already inside (0, delta)
    const CornerMesh m = CornerMesh::from_metric(tri);
    double R = 0;
    for (int f = 0; f < m.num_faces(); ++f) R = std::max(R, m.circumradius(f));
    bool seen = false;
    for (double f = 1.05; f < 3 && !seen; f *= 1.05) {
      try {
        const Eigen::VectorXd k = evaluate(m, Eigen::VectorXd::Constant(3, f * R)).kappa;
        if ((k.array() > 0).all() && (k.array() < 4 * M_PI / 3).all() && k.sum() - k[0] <= 2 * M_PI) seen = true;
      } catch (const DegenerateError&) {
      }
    }
    CHECK(seen);

    SolverOptions strict = opt;
    strict.initial_kappa_ratio = 1.0;
    CHECK_THROWS_AS(choose_initial_radius(tet, strict), SolverError);
  }

  TEST_CASE("tetrahedron path keeps its symmetry and ends at the circumradius") {
    SolverOptions opt;
    // near t = 0 the map from curvatures to radii has condition ~ cond(J), so rounding in
    // kappa shows up in r at eps * cond; hold the well-conditioned states to 1e-9
    double worst = 0, worst_scaled = 0;
    opt.on_step = [&](const StepRecord& rec, const ContinuationState& S) {
      if (!rec.accepted) return;
      if (rec.cond <= 1e6) worst = std::max(worst, spread(S.P.r));
      worst_scaled = std::max(worst_scaled, spread(S.P.r) / (1e-15 * rec.cond));
    };
    const SolveResult res = solve_path(build_metric(regular_tetrahedron().development), opt);
    REQUIRE(res.converged);
    CHECK(!res.flat_limit);
    CHECK(res.state.t == opt.t_stop);
    CHECK(worst <= 1e-9);
    CHECK(worst_scaled <= 1e3);
    for (int i = 0; i < 4; ++i) CHECK(res.state.P.r[i] == doctest::Approx(std::sqrt(3.0 / 8)).epsilon(1e-6));
    CHECK(res.state.flips.empty());
  }

  TEST_CASE("cube ends at half the space diagonal") {
    const SolveResult res = solve_path(build_metric(cube().development));
    REQUIRE(res.converged);
    for (int i = 0; i < 8; ++i) CHECK(res.state.P.r[i] == doctest::Approx(std::sqrt(3.0) / 2).epsilon(1e-6));
  }

  TEST_CASE("path invariants on random hulls") {
    long total_flips = 0;
    for (int seed = 1; seed <= 8; ++seed) {
      const PolyhedralMetric metric = build_metric(random_hull(seed, 8).development);
      SolverOptions opt;
      const Eigen::VectorXd deficit = Eigen::Map<const Eigen::VectorXd>(metric.deficit.data(), metric.num_vertices);
      double last_area = -INFINITY;
      int bad_tracking = 0, bad_envelope = 0, bad_range = 0, bad_bound = 0, bad_area = 0;
      opt.on_step = [&](const StepRecord& rec, const ContinuationState& S) {
        if (!rec.accepted) return;
        const PolytopeGeometry g = curvatures(S.P);
        const double tol = opt.newton_tol * std::max(1.0, S.kappa1.lpNorm<Eigen::Infinity>());
        if ((g.kappa - S.t * S.kappa1).lpNorm<Eigen::Infinity>() > tol) ++bad_tracking;
        for (int i = 0; i < g.kappa.size(); ++i) {
          if (std::abs(g.kappa[i] / S.kappa1[i] - S.t) > tol / S.kappa1[i]) ++bad_envelope;
          if (S.t > opt.t_stop && !(g.kappa[i] > 0 && g.kappa[i] < deficit[i])) ++bad_range;
        }
        if (S.P.r.maxCoeff() > 2 * S.R_initial) ++bad_bound;
        const double area = 4 * M_PI - g.kappa.sum();
        if (area < last_area - 1e-12) ++bad_area;
        last_area = area;
      };
      const SolveResult res = solve_path(metric, opt);
      REQUIRE(res.converged);
      CHECK(bad_tracking == 0);
      CHECK(bad_envelope == 0);
      CHECK(bad_range == 0);
      CHECK(bad_bound == 0);
      CHECK(bad_area == 0);
      for (const FlipEvent& e : res.state.flips) CHECK(std::abs(e.theta - M_PI) <= opt.flip_theta_tol);
      total_flips += static_cast<long>(res.state.flips.size());
    }
    CHECK(total_flips >= 1);
  }

  TEST_CASE("Jacobian is continuous across a flip") {
    int compared = 0;
    for (int seed = 1; seed <= 20 && compared < 5; ++seed) {
      SolverOptions opt;
      ContinuationState prev;
      bool have_prev = false;
      std::size_t flips_before = 0;
      opt.on_step = [&](const StepRecord& rec, const ContinuationState& S) {
        if (!rec.accepted) return;
        if (have_prev && S.flips.size() == flips_before + 1) {
          const FlipEvent& ev = S.flips.back();
          // the flipped edge in the old triangulation, and the radii where it turns flat
          const CornerMesh& m = prev.P.mesh;
          int c = -1;
          double worst = -INFINITY;
          for (int x : m.edges()) {
            const bool same = (m.tail(x) == ev.tail && m.tip(x) == ev.tip) || (m.tail(x) == ev.tip && m.tip(x) == ev.tail);
            if (!same) continue;
            const double th = theta_at(m, x, S.P.r);
            if (th > worst) worst = th, c = x;
          }
          if (c >= 0 && worst > M_PI && theta_at(m, c, prev.P.r) < M_PI) {
            double lo = 0, hi = 1;
            auto radii = [&](double s) { return Eigen::VectorXd((1 - s) * prev.P.r + s * S.P.r); };
            for (int it = 0; it < 80; ++it) {
              const double mid = (lo + hi) / 2;
              (theta_at(m, c, radii(mid)) < M_PI ? lo : hi) = mid;
            }
            const Eigen::VectorXd r = radii(lo);
            CornerMesh flipped = m;
            flipped.flip(c);
            const Eigen::MatrixXd J1 = assemble_jacobian(m, evaluate(m, r));
            const Eigen::MatrixXd J2 = assemble_jacobian(flipped, evaluate(flipped, r));
            CHECK(max_abs(J1 - J2) <= 1e-6);
            ++compared;
          }
        }
        prev = S;
        have_prev = true;
        flips_before = S.flips.size();
      };
      solve_path(build_metric(random_hull(seed, 8).development), opt);
    }
    CHECK(compared >= 1);
  }

  TEST_CASE("an oversized step is rejected and the march recovers") {
    const PolyhedralMetric metric = build_metric(random_hull(3, 10).development);
    SolverOptions opt;
    const InitialState init = choose_initial_radius(metric, opt);
    ContinuationState S;
    S.P = init.P;
    S.kappa1 = init.kappa1;
    S.R_initial = init.R;
    S.t = 1;
    const Eigen::VectorXd r0 = S.P.r;
    const StepOutcome o = step(S, 1.0, opt);
    CHECK(!o.accepted);
    CHECK(!o.reason.empty());
    CHECK(S.t == 1);
    CHECK(S.P.r == r0);

    opt.dt_initial = 1.0;
    const SolveResult res = solve_path(metric, opt);
    CHECK(res.converged);
    CHECK(res.rejected_steps >= 1);
    CHECK(res.history.front().accepted == false);
  }

  TEST_CASE("t falls by at most max_t_drop per step and never stops just short of t_stop") {
    for (int seed = 1; seed <= 6; ++seed) {
      SolverOptions opt;
      double last = 1;
      int too_far = 0, sliver = 0;
      opt.on_step = [&](const StepRecord& rec, const ContinuationState& S) {
        if (!rec.accepted) return;
        if (S.t < last / opt.max_t_drop * (1 - 1e-12) && last > opt.max_t_drop * opt.t_stop) ++too_far;
        if (S.t > opt.t_stop && S.t < std::sqrt(opt.max_t_drop) * opt.t_stop * (1 - 1e-12)) ++sliver;
        last = S.t;
      };
      const SolveResult res = solve_path(build_metric(random_hull(seed, 10).development), opt);
      REQUIRE(res.converged);
      CHECK(res.state.t == opt.t_stop);
      CHECK(too_far == 0);
      CHECK(sliver == 0);
    }
  }

  TEST_CASE("doubly covered square stops at the flat limit") {
    const SolveResult res = solve_path(build_metric(doubly_covered_polygon(4)));
    CHECK(res.converged);
    CHECK(res.flat_limit);
    CHECK(res.state.t > SolverOptions{}.t_stop);
  }

  TEST_CASE("serial and parallel paths agree bit for bit") {
    const PolyhedralMetric metric = build_metric(random_hull(6, 9).development);
    SolverOptions a, b;
    a.exec = Exec::Serial;
    b.exec = Exec::Parallel;
    const SolveResult ra = solve_path(metric, a), rb = solve_path(metric, b);
    CHECK(ra.state.P.r == rb.state.P.r);
    CHECK(ra.history.size() == rb.history.size());
  }

  TEST_CASE("state and step records serialize") {
    const SolveResult res = solve_path(build_metric(regular_tetrahedron().development));
    const nlohmann::json j = state_to_json(res.state);
    CHECK(j["radii"].size() == 4u);
    CHECK(j["t"].get<double>() == res.state.t);
    const nlohmann::json r = to_json(res.history.back());
    CHECK(r["accepted"].get<bool>());
    CHECK(!r.contains("reason"));
  }
}
