#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "forge/polytope.hpp"
#include "forge/surface.hpp"

namespace forge {

struct FlipEvent {
  double t = 0;
  int tail = 0, tip = 0;  // endpoints of the edge that disappeared
  double theta = 0;       // its dihedral just before the flip
  double old_length = 0, new_length = 0;
};

struct StepRecord {
  long step = 0;
  double t = 0;  // after the step if accepted, before it otherwise
  double dt = 0;
  double kappa_inf = 0;
  long flips = 0;  // total so far
  int newton_iters = 0;
  double cond = 0;
  bool accepted = false;
  std::string reason;  // why a step was rejected
};

struct ContinuationState {
  GeneralizedPolytope P;
  double t = 1;
  Eigen::VectorXd kappa1;   // curvatures of the starting polytope
  Eigen::VectorXd deficit;  // of the metric
  double R_initial = 0;
  std::vector<FlipEvent> flips;
};

struct SolverOptions {
  double t_stop = 1e-9;
  double newton_tol = 1e-10;  // times max(1, |kappa(1)|_inf)
  int max_newton = 8;
  double final_newton_tol = 1e-13;  // on the step that lands on t_stop
  int final_max_newton = 30;
  int polish_newton = 2;  // extra Newton iterations past tolerance while the residual drops tenfold
  double dt_initial = 1.0 / 64;
  double dt_min = 1e-12;
  double dt_growth = 1.5;
  double max_t_drop = 100;  // one step divides t by at most this
  int quick_newton = 3;  // grow the step when Newton needed at most this many iterations
  long max_steps = 1000000;
  double flip_theta_tol = 1e-7;
  double radius_bound = 2.0;     // radii may not exceed this multiple of the initial radius
  double singular_tol = 1e-12;   // sigma_min / sigma_max below this times min(1, t) rejects a step
  double initial_kappa_ratio = 0.9;  // starting curvatures must reach this fraction of the deficits
  // stop once every pyramid altitude is below this multiple of the longest edge
  double flat_tol = 1e-4;
  Exec exec = Exec::Parallel;
  std::function<void(const StepRecord&, const ContinuationState&)> on_step;
};

struct InitialState {
  GeneralizedPolytope P;
  double R = 0;
  int doublings = 0;
  long delaunay_flips = 0;
  Eigen::VectorXd kappa1;
};

// Delaunay triangulation of the metric with equal radii R, doubling R until every
// pyramid exists, 0 < kappa < delta, sum_{j != i} kappa_j > 2 pi for all i and
// kappa >= initial_kappa_ratio * delta. Throws SolverError after 60 doublings.
InitialState choose_initial_radius(const PolyhedralMetric& metric, const SolverOptions& opt = {});

struct StepOutcome {
  bool accepted = false;
  int newton_iters = 0;
  double cond = 0;  // of J at the new state
  double min_altitude = 0, max_altitude = 0;
  std::string reason;
};

// One predictor-corrector step from t to t - dt. The state is left untouched on rejection.
StepOutcome step(ContinuationState& S, double dt, const SolverOptions& opt);

struct SolveResult {
  ContinuationState state;
  bool converged = false;
  bool flat_limit = false;  // stopped early: the pyramids collapsed towards a doubly covered polygon
  std::string failure;
  double dt_last = 0;
  long accepted_steps = 0;
  long rejected_steps = 0;
  long initial_flips = 0;
  int doublings = 0;
  std::vector<StepRecord> history;
};

SolveResult solve_path(const PolyhedralMetric& metric, const SolverOptions& opt = {});

nlohmann::json state_to_json(const ContinuationState& S);
nlohmann::json to_json(const StepRecord& r);

}  // namespace forge
