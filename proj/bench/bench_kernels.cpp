// Benchmark: OpenMP curvature kernels against the serial reference, plus
// flow right-hand-side throughput. RFLAB_THREADS caps the thread count.
#include "rflab/ancient.hpp"
#include "rflab/catalog.hpp"
#include "rflab/curvature.hpp"
#include "rflab/invariant_basis.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <random>

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace rflab;

namespace
{

  Mat random_spd(int m, std::mt19937_64& rng)
  {
    std::normal_distribution<double> g;
    Mat A(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        A(i, j) = g(rng);
    return Mat::Identity(m, m) + 0.15 * symmetrize(A) + 0.02 * A * A.transpose();
  }

  template <typename F>
  double time_per_call(F&& f, int reps)
  {
    auto t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < reps; ++i)
      f();
    auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(t1 - t0).count() / reps;
  }

} // namespace

int main()
{
#ifdef _OPENMP
  if (const char* env = std::getenv("RFLAB_THREADS")) {
    int n = std::atoi(env);
    if (n > 0) omp_set_num_threads(n);
  }
  std::printf("openmp threads: %d\n", omp_get_max_threads());
#else
  std::printf("built without openmp\n");
#endif

  std::mt19937_64 rng(1);
  std::printf("%-22s %6s %14s %14s %8s\n", "space", "dim m", "ricci [us]", "reference [us]",
              "speedup");
  for (const auto& id : {"su2", "su3_group", "so4_group", "su4_full_flag", "su4_group"}) {
    CatalogEntry e = catalog_entry(id);
    const int m = e.space->dim_m();
    Mat P = random_spd(m, rng);
    volatile double sink = 0.0;
    // warmup
    sink += ricci(*e.space, P).sum();
    int reps = m <= 8 ? 400 : 100;
    double t_omp = time_per_call([&] { sink += ricci(*e.space, P).norm(); }, reps);
    double t_ref = time_per_call([&] { sink += reference::ricci(*e.space, P).norm(); },
                                 std::max(4, reps / 10));
    std::printf("%-22s %6d %14.2f %14.2f %7.1fx\n", std::string(id).c_str(), m, 1e6 * t_omp, 1e6 * t_ref,
                t_ref / t_omp);
    (void)sink;
  }

  // scan throughput: independent shots parallelize across threads
  {
    CatalogEntry e = catalog_entry("su3_group");
    InvariantBasis b = invariant_sym_basis(*e.space);
    HomogeneousSpace base = e.space->base_space();
    InvariantBasis bb = invariant_sym_basis(base);
    Vec ke = catalog_entry("su3_full_flag").find_known("ke").coefficients;
    Mat P = Mat::Zero(6, 6);
    const Frame& F = base.frame();
    for (int i = 0; i < 3; ++i)
      P.block(F.module_offset[i], F.module_offset[i], 2, 2) = ke(i) * Mat::Identity(2, 2);
    EinsteinPoint pt = find_einstein(base, bb, P);
    CollapsedFixedPoint fp = linearize_at_collapse(*e.space, b, pt);
    auto t0 = std::chrono::steady_clock::now();
    FamilyScan scan = family_scan(*e.space, b, fp, 8, 1e-6);
    double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("\nfamily_scan su3_group, 8 shots: %.2f s total, %.2f s per shot (accepted %d)\n",
                dt, dt / 8, scan.accepted);
  }

  // flow right-hand-side throughput: one projected-Ricci evaluation
  {
    CatalogEntry e = catalog_entry("su4_group");
    const Frame& F = e.space->frame();
    SubmersionMetric P{0.3 * Mat::Identity(F.t_dim, F.t_dim),
                       random_spd(F.n_dim(), rng)};
    volatile double sink = 0.0;
    double t = time_per_call([&] { sink += ricci_submersion(*e.space, P).norm(); }, 300);
    std::printf("\nprojected-flow rhs core (su4_group): %.2f us per evaluation\n", 1e6 * t);
    (void)sink;
  }
  return 0;
}
