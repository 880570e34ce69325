#include "forge/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "forge/embed.hpp"
#include "forge/error.hpp"
#include "forge/generators.hpp"
#include "forge/solver.hpp"
#include "forge/surface.hpp"

namespace forge {

namespace fs = std::filesystem;

void configure_logging(const std::string& level) {
  static bool once = [] {
    spdlog::set_default_logger(spdlog::stderr_color_mt("forge"));
    return true;
  }();
  (void)once;
  std::string name = level;
  if (const char* env = std::getenv("FORGE_LOG"); env && *env) name = env;
  spdlog::set_level(spdlog::level::from_str(name));
}

namespace {

struct SolveConfig {
  std::string input;
  std::string out = "mesh.obj";
  std::string report;
  std::string progress;
  std::string format;  // obj or json; default from the output extension
  double kappa_stop = 1e-9;
  double newton_tol = 1e-10;
  double dt_initial = 1.0 / 64;
  long max_steps = 1000000;
  bool merge = false;
  std::string log = "warn";
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void print_issues(std::ostream& err, const ValidationError& e) {
  err << "invalid input:\n";
  for (const auto& s : e.issues()) err << "  " << s << '\n';
}

// Parses and validates; returns an exit code and fills the metric on success.
int load_metric(const std::string& path, PolyhedralMetric& metric, std::ostream& err) {
  try {
    metric = build_metric(parse_development(read_file(path)));
    return kExitOk;
  } catch (const ParseError& e) {
    err << e.what() << '\n';
    return kExitBadInput;
  } catch (const ValidationError& e) {
    print_issues(err, e);
    return kExitBadMetric;
  }
}

nlohmann::json vec_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }
nlohmann::json vec_json(const Eigen::Vector3d& v) { return {v.x(), v.y(), v.z()}; }

int cmd_validate(const std::string& path, std::ostream& out, std::ostream& err) {
  PolyhedralMetric m;
  const int code = load_metric(path, m, err);
  if (code != kExitOk) return code;
  out << "valid convex metric: " << m.num_vertices << " vertices, " << m.num_edges << " edges, " << m.num_faces
      << " faces\n";
  for (int v = 0; v < m.num_vertices; ++v)
    out << fmt::format("  vertex {}: cone angle {:.12g}, delta {:.12g} ({:.12g} pi)\n", v, m.cone_angle[v], m.deficit[v],
                       m.deficit[v] / M_PI);
  out << fmt::format("sum delta - 4pi = {:.3g}\n", m.total_deficit() - 4 * M_PI);
  return kExitOk;
}

struct Solved {
  SolveResult result;
  EmbeddedPolytope embedded;
  ApexSolution apex;
};

int run_solver(const PolyhedralMetric& metric, const SolveConfig& cfg, std::ostream* progress, Solved& s,
               std::ostream& err) {
  SolverOptions opt;
  opt.t_stop = cfg.kappa_stop;
  opt.newton_tol = cfg.newton_tol;
  opt.dt_initial = cfg.dt_initial;
  opt.max_steps = cfg.max_steps;
  if (progress)
    opt.on_step = [progress](const StepRecord& r, const ContinuationState&) {
      if (r.accepted) *progress << to_json(r).dump() << '\n';
    };
  try {
    s.result = solve_path(metric, opt);
  } catch (const SolverError& e) {
    err << e.what() << '\n';
    return kExitSolver;
  }
  if (!s.result.converged) {
    err << "solver aborted: " << s.result.failure << '\n';
    return kExitSolver;
  }
  try {
    PlaceOptions po;
    po.merge_tol = 1e-6;
    s.embedded = place_faces(s.result.state.P, po);
  } catch (const Error& e) {
    err << "embedding failed: " << e.what() << '\n';
    return kExitSolver;
  }
  s.apex = solve_apex(s.embedded.vertices, s.result.state.kappa1);
  return kExitOk;
}

nlohmann::json make_report(const PolyhedralMetric& metric, const Solved& s) {
  const ContinuationState& S = s.result.state;
  nlohmann::json j;
  j["schema"] = 1;
  j["vertices"] = metric.num_vertices;
  j["faces"] = metric.num_faces;
  j["R_initial"] = S.R_initial;
  j["doublings"] = s.result.doublings;
  j["initial_delaunay_flips"] = s.result.initial_flips;
  j["t_final"] = S.t;
  j["flat_limit"] = s.result.flat_limit;
  j["kappa_inf"] = S.t * S.kappa1.lpNorm<Eigen::Infinity>();
  j["accepted_steps"] = s.result.accepted_steps;
  j["rejected_steps"] = s.result.rejected_steps;
  j["radii"] = vec_json(S.P.r);
  j["kappa_initial"] = vec_json(S.kappa1);
  j["flip_events"] = nlohmann::json::array();
  for (const auto& f : S.flips)
    j["flip_events"].push_back({{"t", f.t},
                                {"edge", {f.tail, f.tip}},
                                {"theta", f.theta},
                                {"old_length", f.old_length},
                                {"new_length", f.new_length}});
  j["closure_residual"] = s.embedded.closure_residual;
  j["max_edge_error"] = s.embedded.max_edge_error;
  j["volume"] = s.embedded.volume;
  j["diameter"] = s.embedded.diameter;
  j["degenerate"] = s.embedded.degenerate;
  j["flat_layout"] = s.embedded.flat_layout;
  j["apex"] = vec_json(s.embedded.apex);
  j["apex_weighted_median"] = vec_json(s.apex.a);
  j["apex_median_residual"] = s.apex.residual;
  j["merged_faces"] = s.embedded.faces.size();
  return j;
}

int cmd_solve(const SolveConfig& cfg, std::ostream& out, std::ostream& err) {
  if (!(cfg.kappa_stop > 0 && cfg.kappa_stop < 1e-3) || !(cfg.newton_tol > 0) || !(cfg.dt_initial > 0)) {
    err << "tolerances must be positive and kappa-stop below 1e-3\n";
    return kExitBadInput;
  }
  PolyhedralMetric metric;
  if (const int code = load_metric(cfg.input, metric, err); code != kExitOk) return code;

  const fs::path out_path(cfg.out);
  const std::string format = !cfg.format.empty() ? cfg.format : (out_path.extension() == ".json" ? "json" : "obj");
  const fs::path progress_path = !cfg.progress.empty()
                                     ? fs::path(cfg.progress)
                                     : out_path.parent_path() / (out_path.stem().string() + ".progress.jsonl");
  std::ofstream progress(progress_path);
  if (!progress) {
    err << "cannot write " << progress_path << '\n';
    return kExitBadInput;
  }
  Solved s;
  const int code = run_solver(metric, cfg, &progress, s, err);
  if (code != kExitOk) {
    if (s.result.history.size() > 0) {
      const fs::path dump = out_path.parent_path() / (out_path.stem().string() + ".abort.json");
      std::ofstream(dump) << state_to_json(s.result.state).dump(1) << '\n';
      err << "state written to " << dump.string() << '\n';
    }
    return code;
  }
  {
    std::ofstream os(out_path);
    if (!os) {
      err << "cannot write " << out_path << '\n';
      return kExitBadInput;
    }
    if (format == "json") os << to_json(s.embedded).dump(1) << '\n';
    else write_obj(os, s.embedded, cfg.merge);
  }
  const nlohmann::json report = make_report(metric, s);
  if (!cfg.report.empty()) std::ofstream(cfg.report) << report.dump(1) << '\n';
  out << "solved: " << metric.num_vertices << " vertices, " << s.result.state.flips.size() << " flips, volume "
      << s.embedded.volume << (s.embedded.degenerate ? " (degenerate)" : "") << '\n';
  if (s.result.flat_limit)
    out << "flat limit: the surface is a doubly covered polygon (stopped at t = " << s.result.state.t << ")\n";
  return kExitOk;
}

int cmd_roundtrip(std::uint64_t seed, int points, const SolveConfig& cfg, std::ostream& out, std::ostream& err) {
  if (points < 4) {
    err << "roundtrip needs at least 4 points\n";
    return kExitBadInput;
  }
  const HullDevelopment hull = random_hull(seed, points);
  PolyhedralMetric metric;
  try {
    metric = build_metric(hull.development);
  } catch (const ValidationError& e) {
    print_issues(err, e);
    return kExitBadMetric;
  }
  Solved s;
  if (const int code = run_solver(metric, cfg, nullptr, s, err); code != kExitOk) return code;
  const auto source = metric_vertex_points(hull, metric);
  const Congruence c = congruence_check(s.embedded.vertices, source);
  const double diam = diameter(source);
  nlohmann::json j = make_report(metric, s);
  j["seed"] = seed;
  j["rms"] = c.rms;
  j["reflected"] = c.reflected;
  j["rms_over_diameter"] = c.rms / diam;
  out << j.dump(1) << '\n';
  if (!cfg.report.empty()) std::ofstream(cfg.report) << j.dump(1) << '\n';
  return c.rms <= 1e-4 * diam ? kExitOk : kExitMismatch;
}

int cmd_generate(const std::string& shape, int n, std::uint64_t seed, const std::string& out_path, std::ostream& out,
                 std::ostream& err) {
  Development d;
  if (shape == "tetrahedron") d = regular_tetrahedron().development;
  else if (shape == "cube") d = cube().development;
  else if (shape == "doubly-covered") d = doubly_covered_polygon(n);
  else if (shape == "polygon-pair") d = offset_polygon_pair(n);
  else if (shape == "random") d = random_hull(seed, n).development;
  else {
    err << "unknown shape " << shape << '\n';
    return kExitBadInput;
  }
  const std::string text = to_json(d).dump(1);
  if (out_path.empty()) out << text << '\n';
  else std::ofstream(out_path) << text << '\n';
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Reconstruct a convex polyhedron from a gluing of triangles"};
  app.require_subcommand(1);
  std::string log_level = "warn";
  app.add_option("--log", log_level, "log level: trace, debug, info, warn, error, off")->capture_default_str();

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "check that a development is a convex metric on the sphere");
  validate->add_option("input", validate_path)->required();

  SolveConfig cfg;
  auto* solve = app.add_subcommand("solve", "run the continuation and write the polytope");
  solve->add_option("input", cfg.input)->required();
  solve->add_option("--out", cfg.out, "mesh output (.obj or .json)")->capture_default_str();
  solve->add_option("--report", cfg.report, "report JSON");
  solve->add_option("--progress", cfg.progress, "progress stream, one JSON object per step");
  solve->add_option("--format", cfg.format, "obj or json")->check(CLI::IsMember({"obj", "json"}));
  solve->add_option("--kappa-stop", cfg.kappa_stop, "stop when curvature falls to this fraction")->capture_default_str();
  solve->add_option("--newton-tol", cfg.newton_tol)->capture_default_str();
  solve->add_option("--dt", cfg.dt_initial, "initial step in t")->capture_default_str();
  solve->add_option("--max-steps", cfg.max_steps)->capture_default_str();
  solve->add_flag("--merge-coplanar", cfg.merge, "write faces merged across flat edges");
  solve->add_option("--log", log_level, "log level");

  std::uint64_t seed = 1;
  int points = 10;
  auto* roundtrip = app.add_subcommand("roundtrip", "random hull -> development -> solve -> compare");
  roundtrip->add_option("--seed", seed)->capture_default_str();
  roundtrip->add_option("--points", points)->capture_default_str();
  roundtrip->add_option("--report", cfg.report);
  roundtrip->add_option("--log", log_level, "log level");

  std::string shape, gen_out;
  int gen_n = 4;
  auto* generate = app.add_subcommand("generate", "write a sample development");
  generate->add_option("shape", shape, "tetrahedron, cube, doubly-covered, polygon-pair, random")->required();
  generate->add_option("-n", gen_n, "polygon sides or point count")->capture_default_str();
  generate->add_option("--seed", seed);
  generate->add_option("--out", gen_out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitBadInput;
  }
  configure_logging(log_level);
  try {
    if (*validate) return cmd_validate(validate_path, out, err);
    if (*solve) return cmd_solve(cfg, out, err);
    if (*roundtrip) return cmd_roundtrip(seed, points, cfg, out, err);
    if (*generate) return cmd_generate(shape, gen_n, seed, gen_out, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitSolver;
  }
  return kExitBadInput;
}

}  // namespace forge
