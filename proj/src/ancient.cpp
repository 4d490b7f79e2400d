#include "rflab/ancient.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <algorithm>
#include <random>
#include <sstream>

namespace rflab
{

  namespace
  {
    constexpr double kUnstableTol = 1e-8;

    double min_eig(const Mat& A)
    {
      if (A.rows() == 0) return 0.0;
      Eigen::SelfAdjointEigenSolver<Mat> es(symmetrize(A));
      return es.eigenvalues().minCoeff();
    }
  } // namespace

  CollapsedFixedPoint linearize_at_collapse(const HomogeneousSpace& space,
                                            const InvariantBasis& basis,
                                            const EinsteinPoint& base_point)
  {
    if (base_point.backend != "structure_constants")
      throw input_error("linearize_at_collapse: needs an engine-backend Einstein point");
    const Frame& F = space.frame();
    const int td = F.t_dim;
    const int nd = F.n_dim();
    const int sd = basis.sub_dim();
    const int nu = basis.nu;

    CollapsedFixedPoint fp;
    fp.ctx = make_projected_context(space, basis, base_point.P);
    fp.lambda = fp.ctx.lambda;
    fp.nu = nu;
    fp.q = base_point.spectrum.coindex;

    SubmersionMetric P0{Mat::Zero(td, td), base_point.P};
    Mat P0full = P0.embed();

    {
      Mat Ric0 = ricci_submersion(space, P0);
      double rho = fp.ctx.inner(Ric0, P0full); // <<P0,P0>> = 1
      fp.fixed_point_residual = (Ric0 - rho * P0full).norm();
    }

    // Sphere tangent basis: all of Sym(t) plus the trace-free horizontal part.
    Vec cvec = Vec::Zero(sd);
    for (int j = nu; j < sd; ++j) {
      Mat En = basis.elements[j].bottomRightCorner(nd, nd);
      cvec(j) = fp.ctx.base_metric.llt().solve(En).trace();
    }
    Mat chor = cvec.tail(sd - nu);
    Eigen::HouseholderQR<Mat> qr(chor);
    Mat Qh = qr.householderQ() * Mat::Identity(sd - nu, sd - nu);
    const int tdim = nu + (sd - nu - 1);
    Mat TB = Mat::Zero(sd, tdim);
    TB.topLeftCorner(nu, nu) = Mat::Identity(nu, nu);
    TB.bottomRightCorner(sd - nu, sd - nu - 1) = Qh.rightCols(sd - nu - 1);
    fp.tangent_basis = TB;

    // A = -2 dR over the tangent basis, with
    // dR(B) = dRic(B) - <<dRic(B), P0>> P0 - lambda B.
    Mat A(tdim, tdim);
    for (int i = 0; i < tdim; ++i) {
      Vec ycol = TB.col(i);
      Mat B = basis.unpack_sub(ycol);
      SubmersionMetric Bsub{B.topLeftCorner(td, td), B.bottomRightCorner(nd, nd)};
      Mat dRic = ricci_differential(space, P0, Bsub);
      Mat dR = dRic - fp.ctx.inner(dRic, P0full) * P0full - fp.lambda * B;
      Vec coeff = basis.pack(dR).head(sd);
      A.col(i) = TB.transpose() * (-2.0 * coeff);
    }
    fp.A = A;

    fp.t_block_residual =
      (A.topLeftCorner(nu, nu) - 2.0 * fp.lambda * Mat::Identity(nu, nu)).cwiseAbs().maxCoeff() / 2.0;
    fp.triangular_residual = nu < tdim
      ? A.topRightCorner(nu, tdim - nu).cwiseAbs().maxCoeff() / 2.0
      : 0.0;

    // Horizontal block eigenstructure (A-invariant by block triangularity).
    Mat An = A.bottomRightCorner(tdim - nu, tdim - nu);
    Mat W = Mat::Zero(An.rows(), An.cols());
    Vec mu = Vec::Zero(An.rows());
    if (An.rows() > 0) {
      Eigen::EigenSolver<Mat> es(An);
      for (int i = 0; i < An.rows(); ++i)
        if (std::abs(es.eigenvalues()(i).imag()) > 1e-7)
          throw numerical_error("linearize_at_collapse: complex eigenvalue in the horizontal block");
      for (int i = 0; i < An.rows(); ++i) {
        mu(i) = es.eigenvalues()(i).real();
        W.col(i) = es.eigenvectors().col(i).real();
        W.col(i).normalize();
      }
    }

    std::vector<int> unstable_hor;
    for (int i = 0; i < mu.size(); ++i)
      if (mu(i) > kUnstableTol) unstable_hor.push_back(i);

    const int u = nu + static_cast<int>(unstable_hor.size());
    fp.unstable_eigenvalues.resize(u);
    fp.unstable_basis.resize(sd, u);
    fp.n_vertical = nu;

    // Vertical family: eigen/generalized eigenvectors for 2 lambda, with the
    // Sym(t) component prescribed to the sub-basis units.
    Mat coupling = A.bottomLeftCorner(tdim - nu, nu);
    Mat Winv = W.rows() > 0 ? Mat(W.partialPivLu().solve(Mat::Identity(W.rows(), W.cols())))
                            : Mat::Zero(0, 0);
    for (int i = 0; i < nu; ++i) {
      Vec rhs = -coupling.col(i);         // (An - 2 lambda) w = -coupling e_i
      Vec r = Winv * rhs;
      Vec cw = Vec::Zero(mu.size());
      for (int j = 0; j < mu.size(); ++j) {
        double gap = mu(j) - 2.0 * fp.lambda;
        cw(j) = std::abs(gap) > 1e-6 * (1.0 + 2.0 * fp.lambda) ? r(j) / gap : 0.0;
      }
      Vec w = W * cw;
      Vec v = Vec::Zero(tdim);
      v(i) = 1.0;
      v.tail(tdim - nu) = w;
      Vec col = TB * v;
      fp.unstable_basis.col(i) = col / col.norm();
      fp.unstable_eigenvalues(i) = 2.0 * fp.lambda;
    }
    for (size_t k = 0; k < unstable_hor.size(); ++k) {
      Vec v = Vec::Zero(tdim);
      v.tail(tdim - nu) = W.col(unstable_hor[k]);
      Vec col = TB * v;
      fp.unstable_basis.col(nu + static_cast<int>(k)) = col / col.norm();
      fp.unstable_eigenvalues(nu + static_cast<int>(k)) = mu(unstable_hor[k]);
    }

    if (u != fp.nu + fp.q) {
      std::ostringstream os;
      os << "linearize_at_collapse: unstable count " << u << " != nu + q = " << fp.nu + fp.q
         << " (wrong coindex or tolerance failure)";
      throw numerical_error(os.str());
    }
    return fp;
  }

  AncientCandidate shoot_ancient(const HomogeneousSpace& space, const InvariantBasis& basis,
                                 const CollapsedFixedPoint& fp, const Vec& c, double eps,
                                 const ShootConfig& config)
  {
    if (c.size() != fp.unstable_dim())
      throw input_error("shoot_ancient: coefficient count must match the unstable dimension");
    if (c.norm() == 0.0)
      throw input_error("shoot_ancient: zero direction");
    const bool stationary = eps == 0.0; // degenerate documented case: stays at the fixed point
    if (!stationary && (eps < 1e-8 || eps > 1e-3))
      throw input_error("shoot_ancient: eps outside [1e-8, 1e-3]");

    const Frame& F = space.frame();
    const int td = F.t_dim;
    const int nd = F.n_dim();
    const int sd = basis.sub_dim();

    AncientCandidate cand;
    cand.direction = c / c.norm();
    cand.eps = eps;

    Vec d = fp.unstable_basis * cand.direction;
    Mat B = basis.unpack_sub(d);
    Mat Bt = B.topLeftCorner(td, td);

    if (Bt.norm() < 1e-12) {
      cand.degenerate_vertical = true;
    } else if (min_eig(Bt) <= 0.0) {
      cand.rejection = "precondition: t-component of the perturbation is not positive definite";
      return cand;
    }

    Vec y_start = fp.ctx.y0 + eps * d;
    y_start /= std::sqrt(fp.ctx.inner_coeff(y_start, y_start));
    Mat Pst = basis.unpack_sub(y_start);
    SubmersionMetric P0{Pst.topLeftCorner(td, td), Pst.bottomRightCorner(nd, nd)};

    // --- backward leg ---
    struct Tracker
    {
      double min_dist = 1e300;
      double t_min = 0.0;
      bool diverged = false;
    } track;
    auto dist_of = [&](const Vec& y) {
      Vec dd = y - fp.ctx.y0;
      return std::sqrt(fp.ctx.inner_coeff(dd, dd));
    };
    auto fiber_of = [&](const Vec& y) {
      if (cand.degenerate_vertical) return 0.0;
      Mat P = basis.unpack_sub(y);
      return std::sqrt(std::max(0.0, -min_eig(-P.topLeftCorner(td, td))));
    };
    IntegratorConfig bcfg = config.ode;
    bcfg.horizon = config.backward_horizon;
    auto bstop = [&](double t, const Vec& y) -> bool {
      double dist = dist_of(y);
      if (dist < track.min_dist) {
        track.min_dist = dist;
        track.t_min = t;
      }
      bool converged = track.min_dist <= config.prox_tol;
      if (!converged && dist > config.divergence_factor * std::max(eps, 1e-12)) {
        track.diverged = true;
        return true;
      }
      // after re-convergence the quadratic transverse remainder grows again;
      // stop once it dominates rather than integrating into the blow-up
      if (converged && dist > 3e3 * std::max(track.min_dist, 1e-14))
        return true;
      return fiber_of(y) <= config.fiber_stop && converged;
    };
    cand.backward = projected_flow(space, basis, fp.ctx, P0, bcfg, Direction::backward, 0.0, bstop);

    if (track.diverged) {
      cand.rejection = "backward divergence: stable-manifold-transverse component too large or eps too big";
      cand.min_distance = track.min_dist;
      return cand;
    }
    cand.min_distance = track.min_dist;
    cand.time_of_min = -track.t_min;

    // evaluation point: deepest combined approach max(fiber, dist), so the
    // collapse certificates are read off where the trajectory is closest to
    // the collapsed metric rather than after the transverse remainder regrows
    int i_eval = cand.backward.steps() - 1;
    {
      double best = 1e300;
      for (int i = 0; i < cand.backward.steps(); ++i) {
        double score = std::max(fiber_of(cand.backward.states[i]),
                                dist_of(cand.backward.states[i]));
        if (score < best) {
          best = score;
          i_eval = i;
        }
      }
    }

    // decay-rate fit on the clean initial segment of log-distance
    {
      std::vector<double> ts, ls;
      double lo = std::max(30.0 * track.min_dist, 1e-13);
      double hi = eps / 10.0;
      for (int i = 0; i < cand.backward.steps(); ++i) {
        double tau = -cand.backward.times[i]; // backward times are negative
        // past 0.7 t_min the transverse remainder pollutes the decay
        if (tau > 0.7 * track.t_min) break;
        double dist = dist_of(cand.backward.states[i]);
        if (dist > lo && dist < hi) {
          ts.push_back(tau);
          ls.push_back(std::log(dist));
        }
      }
      if (ts.size() >= 6) {
        // plain exponential fit first
        double st = 0, sv = 0, stt = 0, stv = 0;
        for (size_t i = 0; i < ts.size(); ++i) {
          st += ts[i]; sv += ls[i]; stt += ts[i] * ts[i]; stv += ts[i] * ls[i];
        }
        double nn = static_cast<double>(ts.size());
        double rate_exp = -(nn * stv - st * sv) / (nn * stt - st * st);
        double icpt = (sv - (-rate_exp) * st) / nn;
        double sse_exp = 0.0;
        for (size_t i = 0; i < ts.size(); ++i) {
          double r = ls[i] - (icpt - rate_exp * ts[i]);
          sse_exp += 4.0 * r * r; // on 2 log d, comparable with the model below
        }
        // variable projection onto d^2 = (a + b tau + c tau^2) exp(-2 mu tau),
        // the exact squared-norm decay for a defective unstable eigenvalue
        // (Jordan chain of length two)
        const double tau_scale = ts.back();
        auto sse = [&](double mu) {
          // scaled regressors and normalized weights keep the projection
          // solve well conditioned
          Mat M = Mat::Zero(3, 3);
          Vec rhs = Vec::Zero(3);
          double zref = 0.0;
          for (size_t i = 0; i < ts.size(); ++i)
            zref += 2.0 * (ls[i] + mu * ts[i]);
          zref = std::exp(zref / ts.size());
          for (size_t i = 0; i < ts.size(); ++i) {
            double z = std::exp(2.0 * (ls[i] + mu * ts[i])) / zref;
            double w = 1.0 / (z * z);
            double u = ts[i] / tau_scale;
            Vec phi(3);
            phi << 1.0, u, u * u;
            M += w * phi * phi.transpose();
            rhs += w * z * phi;
          }
          Vec abc = (M + 1e-14 * M.trace() * Mat::Identity(3, 3)).ldlt().solve(rhs);
          double s = 0;
          for (size_t i = 0; i < ts.size(); ++i) {
            double u = ts[i] / tau_scale;
            double model = (abc(0) + abc(1) * u + abc(2) * u * u) * zref;
            if (model <= 0.0) return 1e300;
            double r = 2.0 * (ls[i] + mu * ts[i]) - std::log(model);
            s += r * r;
          }
          return s;
        };
        double mu_lo = 0.25 * fp.unstable_eigenvalues.minCoeff();
        double mu_hi = 2.5 * fp.unstable_eigenvalues.maxCoeff();
        double best_mu = mu_lo, best = 1e300;
        const int ngrid = 400;
        for (int g = 0; g <= ngrid; ++g) {
          double mu = mu_lo + (mu_hi - mu_lo) * g / ngrid;
          double v = sse(mu);
          if (v < best) {
            best = v;
            best_mu = mu;
          }
        }
        double h = (mu_hi - mu_lo) / ngrid;
        double fm = sse(best_mu - h), fp2 = sse(best_mu + h);
        double denom = fm - 2.0 * best + fp2;
        if (denom > 0.0 && std::isfinite(fm) && std::isfinite(fp2)) {
          double step = 0.5 * h * (fm - fp2) / denom;
          best_mu += std::clamp(step, -h, h);
        }
        // keep the prefactor model only on strong evidence; on short clean
        // windows the extra parameters can absorb part of the rate
        cand.backward_decay_rate = best < 0.1 * sse_exp ? best_mu : rate_exp;
      } else if (ts.size() >= 2) {
        cand.backward_decay_rate =
          -(ls.back() - ls.front()) / (ts.back() - ts.front());
      }
      cand.rate_mismatch = 1e300;
      for (int i = 0; i < fp.unstable_dim(); ++i) {
        double mu = fp.unstable_eigenvalues(i);
        double rel = std::abs(cand.backward_decay_rate - mu) / std::abs(mu);
        if (rel < cand.rate_mismatch) {
          cand.rate_mismatch = rel;
          cand.matched_eigenvalue = mu;
        }
      }
    }

    // certificates at the evaluation point
    {
      const Vec& yend = cand.backward.states[i_eval];
      Mat Pend = basis.unpack_sub(yend);
      cand.fiber_diameter_final = cand.backward.diagnostics[i_eval].fiber_diameter;
      if (cand.degenerate_vertical)
        cand.fiber_diameter_final = 0.0;
      cand.pn_deviation_final =
        (Pend.bottomRightCorner(nd, nd) - fp.ctx.base_metric).cwiseAbs().maxCoeff();
      cand.scal_limit_error =
        std::abs(cand.backward.diagnostics[i_eval].scal - fp.lambda * fp.ctx.dim_n);
      double me = 1e300;
      for (int i = 0; i <= i_eval; ++i)
        me = std::min(me, cand.backward.diagnostics[i].min_eig_t);
      cand.min_eig_t_backward = me;
    }

    FlowTrajectory bsub;
    bsub.times.assign(cand.backward.times.begin(), cand.backward.times.begin() + i_eval + 1);
    bsub.states.assign(cand.backward.states.begin(), cand.backward.states.begin() + i_eval + 1);
    bsub.diagnostics.assign(cand.backward.diagnostics.begin(),
                            cand.backward.diagnostics.begin() + i_eval + 1);
    RicciTimeReconstruction rec = reconstruct_ricci_time(bsub);
    cand.log_sigma_slope = rec.log_sigma_slope;
    cand.s_range_min = rec.s.empty() ? 0.0 : *std::min_element(rec.s.begin(), rec.s.end());

    // --- forward leg ---
    IntegratorConfig fcfg = config.ode;
    fcfg.horizon = config.forward_horizon;
    auto fstop = [&](double, const Vec& y) -> bool {
      if (cand.degenerate_vertical) return false;
      Mat P = basis.unpack_sub(y);
      return min_eig(P.topLeftCorner(td, td)) <= fcfg.pos_tol;
    };
    cand.forward = projected_flow(space, basis, fp.ctx, P0, fcfg, Direction::forward, 0.0, fstop);
    cand.positivity_time = cand.forward.last_time();

    bool converged = cand.min_distance <= config.prox_tol;
    bool rate_ok = stationary || cand.rate_mismatch <= 0.05;
    if (!converged)
      cand.rejection = "backward leg did not re-converge to the fixed point";
    else if (!rate_ok)
      cand.rejection = "backward decay rate matches no unstable eigenvalue within 5%";
    cand.accepted = converged && rate_ok;
    return cand;
  }

  CollapseReport verify_collapse(const AncientCandidate& cand, const CollapsedFixedPoint& fp)
  {
    CollapseReport rep;
    rep.degenerate_vertical = cand.degenerate_vertical;
    auto add = [&](const std::string& name, double value, double thr, bool pass) {
      rep.items.push_back({name, value, thr, pass});
    };
    add("fiber_diameter_backward_limit", cand.fiber_diameter_final, 1e-7,
        cand.fiber_diameter_final <= 1e-7);
    add("horizontal_block_converges_to_base", cand.pn_deviation_final, 1e-6,
        cand.pn_deviation_final <= 1e-6);
    double slope_rel = std::abs(cand.log_sigma_slope + 2.0 * fp.lambda) / (2.0 * fp.lambda);
    bool ancient_ok = slope_rel <= 0.05 && cand.s_range_min < -1.0;
    add("log_sigma_slope_vs_minus_2lambda", slope_rel, 0.05, slope_rel <= 0.05);
    add("s_range_extends_below", cand.s_range_min, -1.0, cand.s_range_min < -1.0);
    bool pos_ok = cand.degenerate_vertical || cand.min_eig_t_backward >= -1e-14;
    add("metric_positivity_backward", cand.min_eig_t_backward, 0.0, pos_ok);
    rep.collapsing_ancient = cand.accepted && ancient_ok && pos_ok
      && cand.fiber_diameter_final <= 1e-7 && cand.pn_deviation_final <= 1e-6;
    return rep;
  }

  FamilyScan family_scan(const HomogeneousSpace& space, const InvariantBasis& basis,
                         const CollapsedFixedPoint& fp, int n_points, double eps,
                         const ShootConfig& config, std::uint64_t rng_seed)
  {
    FamilyScan scan;
    const int u = fp.unstable_dim();
    scan.family_dimension = u - 1;

    std::mt19937_64 rng(rng_seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const int td = space.frame().t_dim;

    // sample the admissible cone: directions whose t-component is positive
    // definite (sign flips are free, indefinite draws are retried)
    std::vector<Vec> dirs;
    for (int i = 0; i < n_points; ++i) {
      Vec c(u);
      for (int attempt = 0; attempt < 200; ++attempt) {
        for (int j = 0; j < u; ++j)
          c(j) = gauss(rng);
        c.normalize();
        Mat Bt = basis.unpack_sub(fp.unstable_basis * c).topLeftCorner(td, td);
        if (min_eig(Bt) > 1e-8)
          break;
        if (min_eig(-Bt) > 1e-8) {
          c = -c;
          break;
        }
      }
      dirs.push_back(c);
    }

    scan.candidates.resize(n_points);
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < n_points; ++i) {
      try {
        scan.candidates[i] = shoot_ancient(space, basis, fp, dirs[i], eps, config);
      } catch (const std::exception& e) {
        scan.candidates[i].direction = dirs[i];
        scan.candidates[i].eps = eps;
        scan.candidates[i].rejection = std::string("error: ") + e.what();
      }
    }
    for (const auto& c : scan.candidates) {
      if (c.degenerate_vertical)
        ++scan.degenerate; // base-flow trajectory, excluded from the family count
      else if (c.accepted)
        ++scan.accepted;
      else
        ++scan.rejected;
    }
    return scan;
  }

} // namespace rflab
