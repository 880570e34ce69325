#include "forge/solver.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "forge/delaunay.hpp"
#include "forge/error.hpp"
#include "forge/jacobian.hpp"

namespace forge {

namespace {

constexpr int kMaxDoublings = 60;

bool starting_conditions(const PolytopeGeometry& g, const Eigen::VectorXd& deficit, double ratio, std::string& why) {
  const double total = g.kappa.sum();
  for (int i = 0; i < g.kappa.size(); ++i) {
    if (!(g.kappa[i] > 0 && g.kappa[i] < deficit[i])) {
      why = fmt::format("kappa_{} = {} outside (0, {})", i, g.kappa[i], deficit[i]);
      return false;
    }
    if (!(total - g.kappa[i] > 2 * M_PI)) {
      why = fmt::format("curvature away from vertex {} is {} <= 2pi", i, total - g.kappa[i]);
      return false;
    }
    if (g.kappa[i] < ratio * deficit[i]) {
      why = fmt::format("kappa_{} = {} below {} of its deficit", i, g.kappa[i], ratio);
      return false;
    }
  }
  return true;
}

double sigma_ratio(const Eigen::MatrixXd& J, double* cond) {
  const Eigen::VectorXd s = Eigen::JacobiSVD<Eigen::MatrixXd>(J).singularValues();
  const double smax = s[0], smin = s[s.size() - 1];
  *cond = smin > 0 ? smax / smin : INFINITY;
  return smax > 0 ? smin / smax : 0.0;
}

double edge_theta(const CornerMesh& mesh, int c, const Eigen::VectorXd& r) {
  const int d = mesh.opposite(c);
  return solve_pyramid(mesh, CornerMesh::face(c), r).alpha[c % 3] +
         solve_pyramid(mesh, CornerMesh::face(d), r).alpha[d % 3];
}

}  // namespace

InitialState choose_initial_radius(const PolyhedralMetric& metric, const SolverOptions& opt) {
  InitialState s;
  CornerMesh mesh = CornerMesh::from_metric(metric);
  s.delaunay_flips = weighted_delaunay(mesh, Eigen::VectorXd::Zero(mesh.num_vertices())).flips;
  double R = 0;
  for (int f = 0; f < mesh.num_faces(); ++f) R = std::max(R, mesh.circumradius(f));
  R *= 2;
  const Eigen::VectorXd deficit = Eigen::Map<const Eigen::VectorXd>(metric.deficit.data(), metric.num_vertices);
  std::string why;
  for (int k = 0; k <= kMaxDoublings; ++k, R *= 2) {
    const Eigen::VectorXd r = Eigen::VectorXd::Constant(mesh.num_vertices(), R);
    try {
      const PolytopeGeometry g = evaluate(mesh, r, opt.exec);
      if (!starting_conditions(g, deficit, opt.initial_kappa_ratio, why)) continue;
      s.P = {mesh, r};
      if (!check_validity(s.P).valid) {
        why = "starting polytope invalid";
        continue;
      }
      s.R = R;
      s.doublings = k;
      s.kappa1 = g.kappa;
      return s;
    } catch (const DegenerateError& e) {
      why = e.what();
    }
  }
  throw SolverError("no admissible starting radius after 60 doublings: " + why);
}

StepOutcome step(ContinuationState& S, double dt, const SolverOptions& opt) {
  StepOutcome out;
  double t_new = S.t - dt;
  if (std::abs(t_new - opt.t_stop) <= 1e-6 * opt.t_stop) t_new = opt.t_stop;
  // the last step pins the apex, which near t = 0 only shows in the residual at second order
  const bool last = t_new == opt.t_stop;
  const double scale = std::max(1.0, S.kappa1.lpNorm<Eigen::Infinity>());
  const double tol = (last ? opt.final_newton_tol : opt.newton_tol) * scale;
  const double r_bound = opt.radius_bound * S.R_initial;
  GeneralizedPolytope trial = S.P;
  std::vector<FlipEvent> events;
  double worst_flip = 0;
  const Eigen::VectorXd* hook_r = &trial.r;  // radii being triangulated
  auto hook = [&](const CornerMesh& m, int c) {
    const double theta = edge_theta(m, c, *hook_r);
    worst_flip = std::max(worst_flip, std::abs(theta - M_PI));
    const QuadDevelopment quad = m.develop_quad(c);
    events.push_back({t_new, m.tail(c), m.tip(c), theta, m.length(c), (quad.k - quad.l).norm()});
  };
  try {
    PolytopeGeometry g = evaluate(trial.mesh, trial.r, opt.exec);
    Eigen::MatrixXd J = assemble_jacobian(trial.mesh, g, opt.exec);
    trial.r -= dt * J.partialPivLu().solve(S.kappa1);  // predictor along d r / dt = J^-1 kappa(1)
    const Eigen::VectorXd target = t_new * S.kappa1;
    // on the last step the tight tolerance may sit below rounding (eps * cond(J)); fall
    // back to the best iterate if it meets the ordinary one
    struct {
      GeneralizedPolytope P;
      PolytopeGeometry g;
      std::size_t events = 0;
      double worst_flip = 0, rn = INFINITY;
      int it = 0;
    } best;
    for (int it = 0;; ++it) {
      if (!(trial.r.minCoeff() > 0) || trial.r.maxCoeff() > r_bound) {
        out.reason = "radius left its admissible range";
        return out;
      }
      weighted_delaunay(trial.mesh, trial.r.array().square(), -1, hook);
      g = evaluate(trial.mesh, trial.r, opt.exec);
      const double rn = (g.kappa - target).lpNorm<Eigen::Infinity>();
      if (rn <= tol) {
        out.newton_iters = it;
        break;
      }
      if (last && rn < best.rn) best = {trial, g, events.size(), worst_flip, rn, it};
      if (it == (last ? opt.final_max_newton : opt.max_newton)) {
        if (last && best.rn <= opt.newton_tol * scale) {
          spdlog::debug("final step: residual {:.3g} above {:.3g}, kept iterate {}", best.rn, tol, best.it);
          trial = best.P;
          g = best.g;
          events.resize(best.events);
          worst_flip = best.worst_flip;
          out.newton_iters = it;
          break;
        }
        out.reason = fmt::format("Newton residual {} after {} iterations", rn, it);
        return out;
      }
      J = assemble_jacobian(trial.mesh, g, opt.exec);
      trial.r -= J.partialPivLu().solve(g.kappa - target);
    }
    // past tolerance, damped Newton while the residual still drops tenfold
    double res = (g.kappa - target).lpNorm<Eigen::Infinity>();
    for (int extra = 0; extra < opt.polish_newton && res > 0; ++extra) {
      const Eigen::VectorXd delta = assemble_jacobian(trial.mesh, g, opt.exec).partialPivLu().solve(g.kappa - target);
      bool improved = false;
      for (double lambda = 1; lambda >= 1.0 / 1024 && !improved; lambda /= 2) {
        GeneralizedPolytope cand = trial;
        cand.r -= lambda * delta;
        if (!(cand.r.minCoeff() > 0) || cand.r.maxCoeff() > r_bound) continue;
        const std::size_t mark = events.size();
        const double mark_worst = worst_flip;
        hook_r = &cand.r;
        try {
          weighted_delaunay(cand.mesh, cand.r.array().square(), -1, hook);
          const PolytopeGeometry gc = evaluate(cand.mesh, cand.r, opt.exec);
          const double rn = (gc.kappa - target).lpNorm<Eigen::Infinity>();
          if (rn < 0.1 * res) {
            trial = std::move(cand);
            hook_r = &trial.r;
            g = gc;
            res = rn;
            improved = true;
            continue;
          }
        } catch (const Error&) {
        }
        hook_r = &trial.r;
        events.resize(mark);
        worst_flip = mark_worst;
      }
      if (!improved) break;
    }
    if (worst_flip > opt.flip_theta_tol) {
      out.reason = fmt::format("flip away from a flat edge (|theta - pi| = {})", worst_flip);
      return out;
    }
    if (g.max_theta() > M_PI + std::max(kThetaSlack, opt.flip_theta_tol)) {
      out.reason = "edge dihedral above pi";
      return out;
    }
    J = assemble_jacobian(trial.mesh, g, opt.exec);
    // the three translation directions lose stiffness in proportion to t
    if (sigma_ratio(J, &out.cond) < opt.singular_tol * std::min(1.0, t_new) && t_new > opt.t_stop) {
      out.reason = fmt::format("near-singular Jacobian (cond {:.3g})", out.cond);
      return out;
    }
    out.min_altitude = INFINITY;
    out.max_altitude = 0;
    for (const Pyramid& p : g.pyramids) {
      out.min_altitude = std::min(out.min_altitude, p.altitude);
      out.max_altitude = std::max(out.max_altitude, p.altitude);
    }
  } catch (const DegenerateError& e) {
    out.reason = e.what();
    return out;
  } catch (const FlipError& e) {
    out.reason = e.what();
    return out;
  }
  S.P = std::move(trial);
  S.t = t_new;
  S.flips.insert(S.flips.end(), events.begin(), events.end());
  out.accepted = true;
  return out;
}

SolveResult solve_path(const PolyhedralMetric& metric, const SolverOptions& opt) {
  SolveResult res;
  InitialState init = choose_initial_radius(metric, opt);
  ContinuationState& S = res.state;
  S.P = std::move(init.P);
  S.kappa1 = init.kappa1;
  S.deficit = Eigen::Map<const Eigen::VectorXd>(metric.deficit.data(), metric.num_vertices);
  S.R_initial = init.R;
  S.t = 1;
  res.initial_flips = init.delaunay_flips;
  res.doublings = init.doublings;
  spdlog::info("starting radius {} after {} doublings, {} initial flips", init.R, init.doublings, init.delaunay_flips);

  double max_length = 0;
  for (int c : S.P.mesh.edges()) max_length = std::max(max_length, S.P.mesh.length(c));
  double dt = opt.dt_initial;
  for (long n = 0; S.t > opt.t_stop; ++n) {
    if (n >= opt.max_steps) {
      res.failure = "step limit reached";
      break;
    }
    double h = std::min(dt, S.t - opt.t_stop);
    // in log t: at most max_t_drop per step, and the last two steps split what is left
    // instead of leaving a sliver in front of t_stop
    if (const double left = S.t / opt.t_stop; left > opt.max_t_drop) {
      const double t_min = left > opt.max_t_drop * opt.max_t_drop ? S.t / opt.max_t_drop : opt.t_stop * std::sqrt(left);
      h = std::min(h, S.t - t_min);
    }
    const StepOutcome o = step(S, h, opt);
    StepRecord rec;
    rec.step = n;
    rec.t = S.t;
    rec.dt = h;
    rec.kappa_inf = S.t * S.kappa1.lpNorm<Eigen::Infinity>();
    rec.flips = static_cast<long>(S.flips.size());
    rec.newton_iters = o.newton_iters;
    rec.cond = o.cond;
    rec.accepted = o.accepted;
    rec.reason = o.reason;
    res.history.push_back(rec);
    if (opt.on_step) opt.on_step(rec, S);
    if (o.accepted) {
      ++res.accepted_steps;
      if (o.max_altitude <= opt.flat_tol * max_length) {
        res.flat_limit = true;
        spdlog::info("flat limit reached at t={}: pyramid altitudes at most {}", S.t, o.max_altitude);
        break;
      }
      if (o.newton_iters <= opt.quick_newton) dt = h * opt.dt_growth;
      else dt = h;
    } else {
      ++res.rejected_steps;
      spdlog::debug("step rejected at t={} dt={}: {}", S.t, h, o.reason);
      dt = h / 2;
      if (dt < opt.dt_min) {
        res.failure = fmt::format("step size underflow at t = {}: {}", S.t, o.reason);
        break;
      }
    }
  }
  res.dt_last = dt;
  res.converged = res.failure.empty();
  if (!res.converged) spdlog::error("continuation aborted: {}", res.failure);
  return res;
}

nlohmann::json state_to_json(const ContinuationState& S) {
  nlohmann::json j;
  j["t"] = S.t;
  j["R_initial"] = S.R_initial;
  j["radii"] = std::vector<double>(S.P.r.data(), S.P.r.data() + S.P.r.size());
  j["kappa1"] = std::vector<double>(S.kappa1.data(), S.kappa1.data() + S.kappa1.size());
  j["mesh"] = S.P.mesh.to_json();
  return j;
}

nlohmann::json to_json(const StepRecord& r) {
  nlohmann::json j;
  j["step"] = r.step;
  j["t"] = r.t;
  j["dt"] = r.dt;
  j["kappa_inf"] = r.kappa_inf;
  j["flips"] = r.flips;
  j["newton_iters"] = r.newton_iters;
  j["cond"] = r.cond;
  j["accepted"] = r.accepted;
  if (!r.reason.empty()) j["reason"] = r.reason;
  return j;
}

}  // namespace forge
