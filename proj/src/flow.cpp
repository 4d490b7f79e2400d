#include "rflab/flow.hpp"

#include <cmath>

namespace rflab
{

  const char* to_string(StopReason r)
  {
    switch (r) {
      case StopReason::horizon: return "horizon";
      case StopReason::positivity_loss: return "positivity_loss";
      case StopReason::fixed_point: return "fixed_point";
      case StopReason::step_underflow: return "step_underflow";
      case StopReason::callback: return "callback";
    }
    return "unknown";
  }

  namespace
  {
    // Dormand-Prince 5(4) tableau.
    constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                     a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                     a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                     b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    constexpr double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                     e4 = 125.0 / 192 - 393.0 / 640, e5 = -2187.0 / 6784 + 92097.0 / 339200,
                     e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;
  } // namespace

  OdeResult integrate_rk54(const std::function<Vec(double, const Vec&)>& rhs,
                           const Vec& y0, const IntegratorConfig& config,
                           const OdeHooks& hooks)
  {
    OdeResult out;
    double t = 0.0;
    Vec y = y0;
    out.t.push_back(t);
    out.y.push_back(y);

    const double T = config.horizon;
    const double hmin = std::max(1e-14 * std::max(T, 1.0), 1e-300);
    double h = std::min(config.initial_step, config.max_step);

    Vec k1;
    bool have_k1 = false;
    auto try_rhs = [&](double tt, const Vec& yy, Vec& k) -> bool {
      try {
        k = rhs(tt, yy);
        return k.allFinite();
      } catch (const input_error&) {
        return false;
      }
    };

    while (t < T) {
      h = std::min(h, T - t);
      if (h < hmin) {
        out.reason = StopReason::step_underflow;
        out.message = "step size underflow at t = " + std::to_string(t);
        return out;
      }
      if (!have_k1) {
        if (!try_rhs(t, y, k1)) {
          out.reason = StopReason::step_underflow;
          out.message = "right-hand side inadmissible at current state";
          return out;
        }
        have_k1 = true;
      }
      Vec k2, k3, k4, k5, k6, k7;
      bool ok = try_rhs(t + c2 * h, y + h * (a21 * k1), k2)
             && try_rhs(t + c3 * h, y + h * (a31 * k1 + a32 * k2), k3)
             && try_rhs(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3), k4)
             && try_rhs(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4), k5)
             && try_rhs(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5), k6);
      Vec ynew;
      double errnorm = std::numeric_limits<double>::infinity();
      if (ok) {
        ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        if (try_rhs(t + h, ynew, k7)) {
          Vec err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
          double acc = 0.0;
          for (int i = 0; i < y.size(); ++i) {
            double sc = config.abs_tol
                      + config.rel_tol * std::max(std::abs(y(i)), std::abs(ynew(i)));
            double q = err(i) / sc;
            acc += q * q;
          }
          errnorm = std::sqrt(acc / y.size());
        }
      }
      if (errnorm <= 1.0) {
        t += h;
        y = ynew;
        if (hooks.postprocess) {
          hooks.postprocess(t, y);
          have_k1 = false; // state moved; FSAL slope is stale
        } else {
          k1 = k7;
          have_k1 = true;
        }
        out.t.push_back(t);
        out.y.push_back(y);
        if (hooks.stop) {
          int code = hooks.stop(t, y);
          if (code != 0) {
            out.reason = StopReason::callback;
            out.stop_code = code;
            return out;
          }
        }
        double fac = errnorm > 0.0 ? 0.9 * std::pow(errnorm, -0.2) : 5.0;
        h = std::min(config.max_step, h * std::min(5.0, std::max(0.2, fac)));
      } else {
        double fac = std::isfinite(errnorm) ? std::max(0.2, 0.9 * std::pow(errnorm, -0.2)) : 0.25;
        h *= fac;
        have_k1 = true; // k1 still valid at unchanged state
      }
    }
    out.reason = StopReason::horizon;
    return out;
  }

  namespace
  {

    double min_eigenvalue(const Mat& A)
    {
      if (A.rows() == 0) return 0.0;
      Eigen::SelfAdjointEigenSolver<Mat> es(symmetrize(A));
      return es.eigenvalues().minCoeff();
    }

    double max_eigenvalue(const Mat& A)
    {
      if (A.rows() == 0) return 0.0;
      Eigen::SelfAdjointEigenSolver<Mat> es(symmetrize(A));
      return es.eigenvalues().maxCoeff();
    }

    StepDiagnostics diagnostics_general(const HomogeneousSpace& space,
                                        const InvariantBasis& basis, const Vec& y)
    {
      StepDiagnostics d;
      Mat P = basis.unpack(y);
      if (min_eigenvalue(P) <= 0.0) { // final state after a positivity stop
        d.norm = P.norm();
        d.scal = d.rho = std::numeric_limits<double>::quiet_NaN();
        if (space.has_toral_split()) {
          int td = space.frame().t_dim;
          d.min_eig_t = min_eigenvalue(P.topLeftCorner(td, td));
          d.fiber_diameter = std::sqrt(std::max(0.0, max_eigenvalue(P.topLeftCorner(td, td))));
        } else {
          d.min_eig_t = min_eigenvalue(P);
        }
        return d;
      }
      Mat Ric = ricci(space, P);
      d.scal = P.llt().solve(Ric).trace();
      d.norm = P.norm();
      double pp = trace_pair(P, P);
      d.rho = pp > 0 ? trace_pair(Ric, P) / pp : 0.0;
      if (space.has_toral_split()) {
        int td = space.frame().t_dim;
        d.min_eig_t = min_eigenvalue(P.topLeftCorner(td, td));
        d.fiber_diameter = std::sqrt(std::max(0.0, max_eigenvalue(P.topLeftCorner(td, td))));
      } else {
        d.min_eig_t = min_eigenvalue(P);
        d.fiber_diameter = 0.0;
      }
      return d;
    }

  } // namespace

  ProjectedFlowContext make_projected_context(const HomogeneousSpace& space,
                                              const InvariantBasis& basis,
                                              const Mat& base_metric)
  {
    if (!space.has_toral_split())
      throw input_error("make_projected_context: space has no toral split");
    const Frame& F = space.frame();
    const int m = F.m();
    const int td = F.t_dim;
    const int nd = m - td;
    if (base_metric.rows() != nd)
      throw input_error("make_projected_context: base metric has wrong size");

    ProjectedFlowContext ctx;
    ctx.base_metric = base_metric;
    ctx.dim_n = nd;
    ctx.J = Mat::Identity(m, m);
    ctx.J.bottomRightCorner(nd, nd) = base_metric.llt().solve(Mat::Identity(nd, nd));

    HomogeneousSpace base = space.base_space();
    Mat RicN = ricci(base, base_metric);
    double lam = base_metric.llt().solve(RicN).trace() / nd;
    if ((RicN - lam * base_metric).norm() > 1e-6)
      throw input_error("make_projected_context: base metric is not Einstein");
    if (std::abs(base_metric.determinant() - 1.0) > 1e-6)
      throw input_error("make_projected_context: base metric is not unit volume");
    if (lam <= 0.0)
      throw input_error("make_projected_context: Einstein constant must be positive");
    ctx.lambda = lam;

    const int sd = basis.sub_dim();
    ctx.gram.resize(sd, sd);
    for (int i = 0; i < sd; ++i)
      for (int j = i; j < sd; ++j) {
        double v = ctx.inner(basis.elements[i], basis.elements[j]);
        ctx.gram(i, j) = v;
        ctx.gram(j, i) = v;
      }
    Mat P0 = Mat::Zero(m, m);
    P0.bottomRightCorner(nd, nd) = base_metric;
    Vec full = basis.pack(P0);
    ctx.y0 = full.head(sd);
    // the fixed point must lie in the submersion sub-basis exactly
    if ((basis.unpack_sub(ctx.y0) - P0).norm() > 1e-10)
      throw input_error("make_projected_context: base metric is not Ad(K)-invariant");
    return ctx;
  }

  FlowTrajectory ricci_flow(const HomogeneousSpace& space, const InvariantBasis& basis,
                            const Mat& P0, const IntegratorConfig& config,
                            Direction dir, double t0)
  {
    if (min_eigenvalue(P0) <= 0.0)
      throw input_error("ricci_flow: initial metric must be positive definite");
    const double sgn = dir == Direction::forward ? 1.0 : -1.0;

    auto rhs = [&](double, const Vec& y) {
      Mat P = basis.unpack(y);
      return Vec(-2.0 * sgn * basis.pack(ricci(space, P)));
    };
    OdeHooks hooks;
    hooks.stop = [&](double, const Vec& y) {
      return min_eigenvalue(basis.unpack(y)) <= config.pos_tol ? 1 : 0;
    };
    OdeResult r = integrate_rk54(rhs, basis.pack(P0), config, hooks);

    FlowTrajectory traj;
    for (size_t i = 0; i < r.t.size(); ++i) {
      traj.times.push_back(t0 + sgn * r.t[i]);
      traj.states.push_back(r.y[i]);
      traj.diagnostics.push_back(diagnostics_general(space, basis, r.y[i]));
    }
    traj.stop = r.reason == StopReason::callback ? StopReason::positivity_loss : r.reason;
    traj.message = r.message;
    if (traj.stop == StopReason::positivity_loss) {
      // despite the name: the state reaching pos_tol is retained and flagged
      traj.message = "positivity loss at t = " + std::to_string(traj.times.back());
    }
    return traj;
  }

  FlowTrajectory normalized_flow(const HomogeneousSpace& space, const InvariantBasis& basis,
                                 const Mat& P0, const IntegratorConfig& config, double t0)
  {
    if (min_eigenvalue(P0) <= 0.0)
      throw input_error("normalized_flow: initial metric must be positive definite");
    if (std::abs(P0.determinant() - 1.0) > 1e-8)
      throw input_error("normalized_flow: initial metric must have unit determinant");
    const int m = space.dim_m();

    auto rhs = [&](double, const Vec& y) {
      Mat P = basis.unpack(y);
      Mat Ric = ricci(space, P);
      double sc = P.llt().solve(Ric).trace();
      return Vec(-2.0 * basis.pack(Ric - (sc / m) * P));
    };
    OdeHooks hooks;
    hooks.postprocess = [&](double, Vec& y) {
      Mat P = basis.unpack(y);
      double det = P.determinant();
      if (det > 0.0)
        y = basis.pack(P / std::pow(det, 1.0 / m));
    };
    hooks.stop = [&](double, const Vec& y) {
      return min_eigenvalue(basis.unpack(y)) <= config.pos_tol ? 1 : 0;
    };
    OdeResult r = integrate_rk54(rhs, basis.pack(P0), config, hooks);

    FlowTrajectory traj;
    for (size_t i = 0; i < r.t.size(); ++i) {
      traj.times.push_back(t0 + r.t[i]);
      traj.states.push_back(r.y[i]);
      traj.diagnostics.push_back(diagnostics_general(space, basis, r.y[i]));
    }
    traj.stop = r.reason == StopReason::callback ? StopReason::positivity_loss : r.reason;
    traj.message = r.message;
    return traj;
  }

  FlowTrajectory projected_flow(const HomogeneousSpace& space, const InvariantBasis& basis,
                                const ProjectedFlowContext& ctx, const SubmersionMetric& P0,
                                const IntegratorConfig& config, Direction dir, double t0,
                                const std::function<bool(double, const Vec&)>& extra_stop)
  {
    const Frame& F = space.frame();
    const int td = F.t_dim;
    const int nd = F.n_dim();
    const int sd = basis.sub_dim();
    const double sgn = dir == Direction::forward ? 1.0 : -1.0;

    Vec y_init = basis.pack(P0.embed()).head(sd);
    if (std::abs(ctx.inner_coeff(y_init, y_init) - 1.0) > 1e-10)
      throw input_error("projected_flow: initial metric must lie on the unit sphere");
    if (min_eigenvalue(P0.Pn) <= 0.0)
      throw input_error("projected_flow: P_n must be positive definite");

    auto unpack_sub = [&](const Vec& y) {
      Mat P = basis.unpack_sub(y);
      return SubmersionMetric{P.topLeftCorner(td, td), P.bottomRightCorner(nd, nd)};
    };
    auto rhs = [&](double, const Vec& y) -> Vec {
      SubmersionMetric P = unpack_sub(y);
      Mat Ric = ricci_submersion(space, P);
      Mat Pfull = P.embed();
      double rho = ctx.inner(Ric, Pfull) / ctx.inner(Pfull, Pfull);
      Mat R = Ric - rho * Pfull;
      return Vec(-2.0 * sgn * basis.pack(R).head(sd));
    };
    OdeHooks hooks;
    hooks.postprocess = [&](double, Vec& y) {
      double nrm = std::sqrt(ctx.inner_coeff(y, y));
      if (nrm > 0.0) y /= nrm;
    };
    hooks.stop = [&](double t, const Vec& y) -> int {
      SubmersionMetric P = unpack_sub(y);
      if (min_eigenvalue(P.Pn) <= config.pos_tol)
        return 1;
      if (extra_stop && extra_stop(t, y))
        return 2;
      if (config.fixed_point_tol > 0.0) {
        Vec d = y - ctx.y0;
        if (std::sqrt(ctx.inner_coeff(d, d)) <= config.fixed_point_tol)
          return 3;
      }
      return 0;
    };
    OdeResult r = integrate_rk54(rhs, y_init, config, hooks);

    FlowTrajectory traj;
    for (size_t i = 0; i < r.t.size(); ++i) {
      const Vec& y = r.y[i];
      traj.times.push_back(t0 + sgn * r.t[i]);
      traj.states.push_back(y);
      SubmersionMetric P = unpack_sub(y);
      StepDiagnostics d;
      d.scal = scal_submersion(space, P);
      Mat Pfull = P.embed();
      d.norm = std::sqrt(ctx.inner(Pfull, Pfull));
      d.min_eig_t = min_eigenvalue(P.Pt);
      d.fiber_diameter = std::sqrt(std::max(0.0, max_eigenvalue(P.Pt)));
      Mat Ric = ricci_submersion(space, P);
      d.rho = ctx.inner(Ric, Pfull) / ctx.inner(Pfull, Pfull);
      traj.diagnostics.push_back(d);
    }
    switch (r.stop_code) {
      case 1: traj.stop = StopReason::positivity_loss;
              traj.message = "P_n lost positivity"; break;
      case 2: traj.stop = StopReason::callback; break;
      case 3: traj.stop = StopReason::fixed_point; break;
      default: traj.stop = r.reason; traj.message = r.message; break;
    }
    return traj;
  }

  RicciTimeReconstruction reconstruct_ricci_time(const FlowTrajectory& traj)
  {
    RicciTimeReconstruction out;
    const int n = traj.steps();
    if (n == 0) return out;
    out.sigma.resize(n);
    out.s.resize(n);
    double logsig = 0.0;
    out.sigma[0] = 1.0;
    out.s[0] = 0.0;
    for (int i = 1; i < n; ++i) {
      double dt = traj.times[i] - traj.times[i - 1];
      logsig += -2.0 * 0.5 * (traj.diagnostics[i].rho + traj.diagnostics[i - 1].rho) * dt;
      out.sigma[i] = std::exp(logsig);
      out.s[i] = out.s[i - 1] + 0.5 * (out.sigma[i] + out.sigma[i - 1]) * dt;
    }
    for (int i = 1; i < n; ++i) {
      double ds = out.s[i] - out.s[i - 1];
      double dt = traj.times[i] - traj.times[i - 1];
      if (ds * dt <= 0.0) out.s_monotone = false;
    }
    // least-squares slope of log sigma over the trailing half of the samples
    int i0 = n / 2;
    double st = 0, sv = 0, stt = 0, stv = 0;
    int cnt = 0;
    for (int i = i0; i < n; ++i) {
      double tt = traj.times[i];
      double vv = std::log(out.sigma[i]);
      st += tt; sv += vv; stt += tt * tt; stv += tt * vv;
      ++cnt;
    }
    double denom = cnt * stt - st * st;
    out.log_sigma_slope = denom != 0.0 ? (cnt * stv - st * sv) / denom : 0.0;
    return out;
  }

} // namespace rflab
