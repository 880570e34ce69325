// Serial vs OpenMP timings of the per-face kernels on icospheres.
//   bench_kernels [max_subdivisions=5] [repeats=5]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>

#include <omp.h>

#include "forge/dual.hpp"
#include "forge/generators.hpp"
#include "forge/jacobian.hpp"
#include "forge/polytope.hpp"

using namespace forge;

namespace {

double best_of(int repeats, const std::function<void()>& f) {
  double best = 1e300;
  for (int k = 0; k < repeats; ++k) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    best = std::min(best, std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count());
  }
  return best;
}

}  // namespace

int main(int argc, char** argv) {
  const int max_sub = argc > 1 ? std::atoi(argv[1]) : 5;
  const int repeats = argc > 2 ? std::atoi(argv[2]) : 5;
  std::printf("threads %d\n", omp_get_max_threads());
  std::printf("%-10s %6s %6s  %-10s %10s %10s %8s\n", "mesh", "verts", "faces", "kernel", "serial ms", "omp ms",
              "speedup");
  for (int sub = 1; sub <= max_sub; ++sub) {
    const PolyhedralMetric metric = build_metric(icosphere(sub).development);
    const CornerMesh mesh = CornerMesh::from_metric(metric);
    Eigen::VectorXd r(metric.num_vertices);
    for (int i = 0; i < r.size(); ++i) r[i] = 1.2 + 1e-6 * std::sin(7.0 * i);
    const GeneralizedPolytope P = make_polytope(mesh, r);
    const PolytopeGeometry g = evaluate(P.mesh, P.r);
    const DualPolyhedron D = dualize(P);

    struct Kernel {
      const char* name;
      std::function<void(Exec)> run;
    };
    const Kernel kernels[] = {
        {"evaluate", [&](Exec e) { (void)evaluate(P.mesh, P.r, e); }},
        {"jacobian", [&](Exec e) { (void)assemble_jacobian(P.mesh, g, e); }},
        {"decompose", [&](Exec e) { (void)decompose(D.fan, D.data.h, e); }},
    };
    for (const Kernel& k : kernels) {
      const double s = best_of(repeats, [&] { k.run(Exec::Serial); });
      const double p = best_of(repeats, [&] { k.run(Exec::Parallel); });
      std::printf("ico%-7d %6d %6d  %-10s %10.3f %10.3f %8.2f\n", sub, metric.num_vertices, metric.num_faces, k.name,
                  s, p, s / p);
    }
  }
  return 0;
}
