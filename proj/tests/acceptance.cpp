// Acceptance suite: one pass/fail line per criterion, nonzero exit on failure.
#include "rflab/ancient.hpp"
#include "rflab/catalog.hpp"
#include "rflab/numdiff.hpp"
#include "rflab/trajectory_io.hpp"

#include <chrono>
#include <cstdio>
#include <cstdarg>
#include <random>

using namespace rflab;

namespace
{

  int g_failures = 0;

  struct Timer
  {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const
    {
      return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
  };

  void report(int idx, const std::string& name, bool pass, const std::string& detail)
  {
    std::printf("[%s] %2d. %s  (%s)\n", pass ? "PASS" : "FAIL", idx, name.c_str(),
                detail.c_str());
    if (!pass) ++g_failures;
  }

  Mat module_diag(const HomogeneousSpace& s, const Vec& x)
  {
    const Frame& F = s.frame();
    Mat P = Mat::Zero(F.m(), F.m());
    for (int i = 0; i < F.n_modules(); ++i)
      P.block(F.module_offset[i], F.module_offset[i], F.module_dim[i], F.module_dim[i]) =
        x(i) * Mat::Identity(F.module_dim[i], F.module_dim[i]);
    return P;
  }

  bool matches_up_to_permutation(const Vec& x, const Vec& y,
                                 const std::vector<std::vector<int>>& perms, double tol)
  {
    for (const auto& p : perms) {
      Vec xp(x.size());
      for (int i = 0; i < x.size(); ++i)
        xp(p[i]) = x(i);
      if ((xp - y).cwiseAbs().maxCoeff() < tol)
        return true;
    }
    return false;
  }

  std::string fmt(const char* f, ...)
  {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof(buf), f, ap);
    va_end(ap);
    return buf;
  }

} // namespace

int main()
{
  std::printf("rflab acceptance suite (version %s)\n", kVersion);

  // 1. SU(3)/T^2 Kaehler-Einstein reproduction
  try {
    Timer t;
    CatalogEntry e = catalog_entry("su3_full_flag");
    InvariantBasis b = invariant_sym_basis(*e.space);
    Vec seed(3);
    seed << 1.05, 0.92, 1.9;
    EinsteinPoint pt = find_einstein(*e.space, b, module_diag(*e.space, seed));
    Vec ke = std::cbrt(27.0 / 2.0) / 3.0 * Vec(Vec::Zero(3));
    ke = e.find_known("ke").coefficients;
    bool coords_ok = matches_up_to_permutation(pt.coordinates, ke, e.symmetry_permutations, 1e-7);
    bool resid_ok = pt.residual <= 1e-8;
    Vec spec = pt.spectrum.spectrum;
    bool spec_ok = spec.size() == 3 && std::abs(spec(0) + 1.0 / 3.0) <= 1e-5 &&
                   std::abs(spec(1)) <= 1e-5 && std::abs(spec(2) - 4.0 / 3.0) <= 1e-5;
    bool coin_ok = pt.spectrum.coindex == 1;
    double sec = t.seconds();
    report(1, "SU(3)/T^2 Kaehler-Einstein reproduction",
           coords_ok && resid_ok && spec_ok && coin_ok && sec < 5.0,
           fmt("residual=%.2e spectrum={%.7f,%.1e,%.7f} coindex=%d time=%.2fs",
               pt.residual, spec(0), spec(1), spec(2), pt.spectrum.coindex, sec));
  } catch (const std::exception& ex) {
    report(1, "SU(3)/T^2 Kaehler-Einstein reproduction", false, ex.what());
  }

  // 2. SU(4)/T^3 KE point
  try {
    Timer t;
    CatalogEntry e = catalog_entry("su4_full_flag");
    InvariantBasis b = invariant_sym_basis(*e.space);
    Vec ke = e.find_known("ke").coefficients;
    Vec seed = ke;
    seed(0) *= 1.04;
    seed(3) *= 0.95;
    EinsteinPoint pt = find_einstein(*e.space, b, module_diag(*e.space, seed));
    bool coords_ok = matches_up_to_permutation(pt.coordinates, ke, e.symmetry_permutations, 1e-7);
    const Vec& s = pt.spectrum.spectrum;
    bool distinct = std::abs(s(5) - s(4)) > 1e-3;
    bool ok = coords_ok && pt.spectrum.coindex == 2 && pt.spectrum.nullity == 0 && distinct;
    double sec = t.seconds();
    report(2, "SU(4)/T^3 KE: coindex 2, nullity 0, two distinct positive eigenvalues",
           ok && sec < 10.0,
           fmt("coindex=%d nullity=%d positives={%.4f,%.4f} time=%.2fs", pt.spectrum.coindex,
               pt.spectrum.nullity, s(4), s(5), sec));
  } catch (const std::exception& ex) {
    report(2, "SU(4)/T^3 KE point", false, ex.what());
  }

  // 3. G2/T^2 diagonal model at the KE point
  try {
    CatalogEntry e = catalog_entry("g2_full_flag");
    Vec ke = e.find_known("ke").coefficients;
    ScalarFn f = [&](const Vec& v) { return e.model->tscal(v); };
    Vec g = fd_gradient(f, ke, 1e-4 * (1.0 + ke.norm()));
    Vec nrm(6);
    for (int i = 0; i < 6; ++i)
      nrm(i) = e.model->module_dims()[i] / ke(i);
    nrm.normalize();
    double resid = (g - g.dot(nrm) * nrm).norm();
    SpectrumInfo s = hessian_spectrum_coindex(*e.model, ke);
    report(3, "G2/T^2 model: Einstein gradient residual and coindex 1",
           resid <= 1e-8 && s.coindex == 1,
           fmt("residual=%.2e coindex=%d", resid, s.coindex));
  } catch (const std::exception& ex) {
    report(3, "G2/T^2 model", false, ex.what());
  }

  // 4. SO(4)/T^2 normal metric and the collapsed fixed point over SO(4)
  try {
    CatalogEntry base_e = catalog_entry("so4_full_flag");
    InvariantBasis bb = invariant_sym_basis(*base_e.space);
    EinsteinPoint pt = find_einstein(*base_e.space, bb, Mat::Identity(4, 4));
    bool einstein_ok = (pt.coordinates - Vec::Ones(2)).cwiseAbs().maxCoeff() < 1e-9 &&
                       pt.spectrum.coindex == 1;
    CatalogEntry fib = catalog_entry("so4_group");
    InvariantBasis fb = invariant_sym_basis(*fib.space);
    CollapsedFixedPoint fp = linearize_at_collapse(*fib.space, fb, pt);
    bool dims_ok = fp.unstable_dim() == 4 && fp.unstable_dim() - 1 == 3;
    report(4, "SO(4)/T^2 normal metric; unstable dimension 4, family dimension 3",
           einstein_ok && dims_ok,
           fmt("coindex=%d unstable=%d family=%d", pt.spectrum.coindex, fp.unstable_dim(),
               fp.unstable_dim() - 1));
  } catch (const std::exception& ex) {
    report(4, "SO(4)/T^2 normal metric", false, ex.what());
  }

  // 5. Dual-backend scalar curvature agreement
  try {
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> u(0.3, 2.5);
    double worst = 0.0;
    for (const auto& id : {"su3_full_flag", "su4_full_flag", "so4_full_flag"}) {
      CatalogEntry e = catalog_entry(id);
      const int L = e.space->frame().n_modules();
      for (int trial = 0; trial < 100; ++trial) {
        Vec x(L);
        for (int i = 0; i < L; ++i) x(i) = u(rng);
        double engine = normalized_scal(*e.space, module_diag(*e.space, x));
        double model = e.model->tscal(x);
        worst = std::max(worst, std::abs(engine - model) / std::abs(model));
      }
    }
    report(5, "dual-backend scalar curvature agreement (3 x 100 random metrics)",
           worst <= 1e-10, fmt("worst relative deviation=%.2e", worst));
  } catch (const std::exception& ex) {
    report(5, "dual-backend agreement", false, ex.what());
  }

  // 6. O'Neill identity per catalog fibration
  try {
    std::mt19937_64 rng(103);
    std::uniform_real_distribution<double> u(0.3, 2.5);
    double worst = 0.0;
    std::string worst_id;
    for (const auto& id : {"su3_group", "aloff_wallach(1,1)", "su4_group", "su4_s1_quotient",
                           "su4_t2_quotient", "so4_group", "so4_slope(1,1)"}) {
      CatalogEntry e = catalog_entry(id);
      const int L = e.space->frame().n_modules();
      for (int trial = 0; trial < 100; ++trial) {
        Vec x(L);
        for (int i = 0; i < L; ++i) x(i) = u(rng);
        OneillDiagnostics d = oneill_diagnostics(*e.space, x);
        if (d.identity_residual > worst) {
          worst = d.identity_residual;
          worst_id = id;
        }
      }
    }
    report(6, "O'Neill identity scal_M = scal_N - |A|^2 (7 fibrations x 100)", worst <= 1e-8,
           fmt("worst residual=%.2e (%s)", worst, worst_id.c_str()));
  } catch (const std::exception& ex) {
    report(6, "O'Neill identity", false, ex.what());
  }

  // 7. Analytic vs finite-difference Ricci differential
  try {
    std::mt19937_64 rng(107);
    std::normal_distribution<double> g;
    double worst = 0.0;
    for (const auto& id : {"su3_group", "aloff_wallach(1,1)", "su4_group", "su4_s1_quotient",
                           "su4_t2_quotient", "so4_group", "so4_slope(1,1)"}) {
      CatalogEntry e = catalog_entry(id);
      const Frame& F = e.space->frame();
      const int td = F.t_dim, nd = F.n_dim();
      for (int trial = 0; trial < 50; ++trial) {
        Mat At(td, td), An(nd, nd), Bt(td, td), Bn(nd, nd);
        for (int i = 0; i < td; ++i)
          for (int j = 0; j < td; ++j) {
            At(i, j) = 0.25 * g(rng);
            Bt(i, j) = g(rng);
          }
        for (int i = 0; i < nd; ++i)
          for (int j = 0; j < nd; ++j) {
            An(i, j) = 0.25 * g(rng);
            Bn(i, j) = g(rng);
          }
        SubmersionMetric P{Mat::Identity(td, td) + symmetrize(At) * 0.5 + At * At.transpose() / 8,
                           Mat::Identity(nd, nd) + symmetrize(An) * 0.5 + An * An.transpose() / 8};
        SubmersionMetric B{symmetrize(Bt), symmetrize(Bn)};
        Mat dA = ricci_differential(*e.space, P, B);
        Mat dF = ricci_differential_fd(*e.space, P.embed(), B.embed());
        worst = std::max(worst, (dA - dF).cwiseAbs().maxCoeff() / std::max(1.0, dA.norm()));
      }
    }
    report(7, "analytic vs finite-difference Ricci differential (7 fibrations x 50)",
           worst <= 1e-5, fmt("worst relative deviation=%.2e", worst));
  } catch (const std::exception& ex) {
    report(7, "Ricci differential", false, ex.what());
  }

  // 8. Collapsed fixed-point structure on SU(3)
  try {
    CatalogEntry e = catalog_entry("su3_group");
    InvariantBasis b = invariant_sym_basis(*e.space);
    HomogeneousSpace base = e.space->base_space();
    InvariantBasis bb = invariant_sym_basis(base);
    Vec ke = catalog_entry("su3_full_flag").find_known("ke").coefficients;
    EinsteinPoint pt = find_einstein(base, bb, module_diag(base, ke));
    CollapsedFixedPoint fp = linearize_at_collapse(*e.space, b, pt);
    double lambda_engine = scal(base, pt.P) / base.dim_m();
    bool ok = fp.t_block_residual <= 1e-8 && std::abs(fp.lambda - lambda_engine) <= 1e-6 &&
              fp.nu == 3 && fp.q == 1 && fp.unstable_dim() == 4;
    report(8, "SU(3) collapsed fixed point: t-block -lambda Id, unstable count nu+q=4", ok,
           fmt("t_block_residual=%.2e lambda=%.9f unstable=%d", fp.t_block_residual, fp.lambda,
               fp.unstable_dim()));
  } catch (const std::exception& ex) {
    report(8, "collapsed fixed point", false, ex.what());
  }

  // 9. Ancient-solution shooting on SU(3)
  try {
    Timer t;
    CatalogEntry e = catalog_entry("su3_group");
    InvariantBasis b = invariant_sym_basis(*e.space);
    HomogeneousSpace base = e.space->base_space();
    InvariantBasis bb = invariant_sym_basis(base);
    Vec ke = catalog_entry("su3_full_flag").find_known("ke").coefficients;
    EinsteinPoint pt = find_einstein(base, bb, module_diag(base, ke));
    CollapsedFixedPoint fp = linearize_at_collapse(*e.space, b, pt);

    Mat idt = Mat::Zero(8, 8);
    idt.topLeftCorner(2, 2) = Mat::Identity(2, 2);
    Vec yt = b.pack(idt).head(b.sub_dim());
    Vec c = Vec::Zero(4);
    c.head(3) = yt.head(3);
    c.normalize();
    AncientCandidate cand = shoot_ancient(*e.space, b, fp, c, 1e-6);
    double slope_rel = std::abs(cand.log_sigma_slope + 2 * fp.lambda) / (2 * fp.lambda);
    double sec = t.seconds();
    bool ok = cand.accepted && cand.rate_mismatch <= 0.05 && cand.scal_limit_error <= 1e-4 &&
              cand.fiber_diameter_final <= 1e-7 && slope_rel <= 0.05 && sec < 60.0;
    report(9, "SU(3) ancient shooting: rate, scal limit, fiber diameter, log-sigma slope", ok,
           fmt("rate=%.4f (mismatch %.2f%%) scal_err=%.1e fiber=%.1e slope_rel=%.2e time=%.1fs",
               cand.backward_decay_rate, 100 * cand.rate_mismatch, cand.scal_limit_error,
               cand.fiber_diameter_final, slope_rel, sec));
  } catch (const std::exception& ex) {
    report(9, "ancient shooting", false, ex.what());
  }

  // 10. Sphere / determinant conservation over 1e4 accepted steps
  try {
    CatalogEntry e = catalog_entry("su3_group");
    InvariantBasis b = invariant_sym_basis(*e.space);
    HomogeneousSpace base = e.space->base_space();
    InvariantBasis bb = invariant_sym_basis(base);
    Vec ke = catalog_entry("su3_full_flag").find_known("ke").coefficients;
    EinsteinPoint pt = find_einstein(base, bb, module_diag(base, ke));
    ProjectedFlowContext ctx = make_projected_context(*e.space, b, pt.P);

    const Frame& F = e.space->frame();
    Vec y = b.pack(SubmersionMetric{Mat::Zero(F.t_dim, F.t_dim), ctx.base_metric}.embed())
              .head(b.sub_dim());
    y(0) += 0.03;
    y(4) += 0.02;
    y /= std::sqrt(ctx.inner_coeff(y, y));
    Mat Ps = b.unpack_sub(y);
    SubmersionMetric P1{Ps.topLeftCorner(F.t_dim, F.t_dim),
                        Ps.bottomRightCorner(F.n_dim(), F.n_dim())};
    IntegratorConfig cfg;
    cfg.max_step = 2e-3; // force >= 1e4 accepted steps over the horizon
    cfg.horizon = 20.0;
    FlowTrajectory prf = projected_flow(*e.space, b, ctx, P1, cfg, Direction::backward);
    double drift = 0.0;
    for (const auto& d : prf.diagnostics)
      drift = std::max(drift, std::abs(d.norm - 1.0));

    CatalogEntry nf = catalog_entry("su3_full_flag");
    InvariantBasis nb = invariant_sym_basis(*nf.space);
    Vec lam(3);
    lam << 1.05, 0.96, 1.0 / (1.05 * 0.96);
    IntegratorConfig cfg2;
    cfg2.max_step = 4e-4; // the run ends at the pinch; keep >= 1e4 steps before it
    cfg2.horizon = 20.0;
    FlowTrajectory nrf = normalized_flow(*nf.space, nb, module_diag(*nf.space, lam), cfg2);
    double det_drift = 0.0;
    for (const auto& st : nrf.states)
      det_drift = std::max(det_drift, std::abs(nb.unpack(st).determinant() - 1.0));

    bool steps_ok = prf.steps() >= 10000 && nrf.steps() >= 10000;
    report(10, "projected-flow norm drift <= 1e-8 and normalized-flow det drift <= 1e-7",
           drift <= 1e-8 && det_drift <= 1e-7 && steps_ok,
           fmt("norm_drift=%.2e det_drift=%.2e steps=(%d,%d)", drift, det_drift, prf.steps(),
               nrf.steps()));
  } catch (const std::exception& ex) {
    report(10, "conservation", false, ex.what());
  }

  // 11. Integrator order. On the exact Einstein-scaling solution the flow
  // right-hand side is constant in time, so the integrator reproduces it to
  // rounding at every step size; the >= 16x halving gain is then verified on
  // a squashed start against a tight-tolerance reference of the same flow.
  try {
    CatalogEntry e = catalog_entry("su2");
    InvariantBasis b = invariant_sym_basis(*e.space);
    auto run_fixed = [&](const Mat& P0, double h) {
      IntegratorConfig cfg;
      cfg.rel_tol = 1e6;
      cfg.abs_tol = 1e6;
      cfg.max_step = h;
      cfg.initial_step = h;
      cfg.horizon = 1.2;
      return ricci_flow(*e.space, b, P0, cfg, Direction::forward);
    };
    double scaling_err = 0.0;
    for (double h : {0.2, 0.1}) {
      FlowTrajectory traj = run_fixed(Mat::Identity(3, 3), h);
      Mat exact = (1.0 - 0.5 * traj.last_time()) * Mat::Identity(3, 3);
      scaling_err = std::max(scaling_err,
                             (b.unpack(traj.last_state()) - exact).cwiseAbs().maxCoeff());
    }
    Mat squashed = Mat::Zero(3, 3);
    squashed.diagonal() << 1.0, 1.0, 1.6;
    IntegratorConfig ref_cfg;
    ref_cfg.rel_tol = ref_cfg.abs_tol = 1e-13;
    ref_cfg.max_step = 0.01;
    ref_cfg.horizon = 1.2;
    Vec ref = ricci_flow(*e.space, b, squashed, ref_cfg, Direction::forward).last_state();
    double e1 = (run_fixed(squashed, 0.2).last_state() - ref).cwiseAbs().maxCoeff();
    double e2 = (run_fixed(squashed, 0.1).last_state() - ref).cwiseAbs().maxCoeff();
    double ratio = e1 / std::max(e2, 1e-300);
    report(11, "integrator order: scaling solution exact, halving gain >= 16x", 
           scaling_err <= 1e-12 && ratio >= 16.0,
           fmt("scaling_error=%.1e error(h)=%.3e error(h/2)=%.3e ratio=%.1f", scaling_err, e1,
               e2, ratio));
  } catch (const std::exception& ex) {
    report(11, "integrator order", false, ex.what());
  }

  std::printf("%d criterion(s) failed\n", g_failures);
  return g_failures == 0 ? 0 : 1;
}
