#include "rflab/einstein.hpp"
#include "rflab/numdiff.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <random>

namespace rflab
{

  double l2_inner(const Mat& P, const Mat& B1, const Mat& B2)
  {
    Eigen::LLT<Mat> llt(symmetrize(P));
    if (llt.info() != Eigen::Success)
      throw input_error("l2_inner: P must be positive definite");
    double det = P.determinant();
    Mat X1 = llt.solve(B1);
    Mat X2 = llt.solve(B2);
    return std::sqrt(det) * (X1 * X2).trace();
  }

  double normalized_scal(const HomogeneousSpace& space, const Mat& P)
  {
    double det = P.determinant();
    if (det <= 0.0)
      throw input_error("normalized_scal: P must be positive definite");
    return std::pow(det, 1.0 / space.dim_m()) * scal(space, P);
  }

  namespace
  {

    // Newton driver on the unit-volume slice for a residual field r(x),
    // with user hooks for the slice normal and volume renormalization.
    struct SliceNewton
    {
      std::function<Vec(const Vec&)> residual;
      std::function<Vec(const Vec&)> slice_normal; // gradient of the volume constraint
      std::function<Vec(const Vec&)> renormalize;

      Vec solve(Vec x, int max_iter, double tol, double* best_out) const
      {
        x = renormalize(x);
        Vec r = residual(x);
        double best = r.norm();
        const int d = static_cast<int>(x.size());
        for (int it = 0; it < max_iter && best > tol; ++it) {
          // tangent frame of the slice
          Vec g = slice_normal(x);
          Eigen::HouseholderQR<Mat> qr(g);
          Mat Qfull = qr.householderQ() * Mat::Identity(d, d);
          Mat Tm = Qfull.rightCols(d - 1);

          const double h = 1e-6 * (1.0 + x.norm());
          Mat J(d, d);
          for (int i = 0; i < d; ++i) {
            Vec xp = x, xm = x;
            xp(i) += h;
            xm(i) -= h;
            J.col(i) = (residual(xp) - residual(xm)) / (2.0 * h);
          }
          Mat Jr = Tm.transpose() * J * Tm;
          Vec rr = Tm.transpose() * r;
          Eigen::JacobiSVD<Mat> svd(Jr, Eigen::ComputeFullU | Eigen::ComputeFullV);
          const Vec& sv = svd.singularValues();
          double smax = sv(0);
          Vec delta;
          if (sv(sv.size() - 1) < 1e-8 * smax) {
            // Levenberg damping against nullity directions
            double mu = 1e-8 * smax;
            Vec w = svd.matrixU().transpose() * rr;
            for (int i = 0; i < w.size(); ++i)
              w(i) *= sv(i) / (sv(i) * sv(i) + mu * mu);
            delta = -(svd.matrixV() * w);
          } else {
            delta = -svd.solve(rr);
          }
          // backtracking on the residual norm
          double step = 1.0;
          for (int bt = 0; bt < 12; ++bt) {
            Vec xn = renormalize(x + step * (Tm * delta));
            Vec rn;
            try {
              rn = residual(xn);
            } catch (const input_error&) {
              step *= 0.5;
              continue;
            }
            if (rn.norm() < best || bt == 11) {
              x = xn;
              r = rn;
              best = rn.norm();
              break;
            }
            step *= 0.5;
          }
        }
        if (best_out) *best_out = best;
        return x;
      }
    };

    int pair_scaling_direction(const Mat& H, const Vec& scale_dir, Vec& spectrum_out,
                               double& scaling_eig)
    {
      Eigen::SelfAdjointEigenSolver<Mat> es(H);
      const Vec& ev = es.eigenvalues();
      Vec dir = scale_dir.normalized();
      int idx = 0;
      double bestov = -1.0;
      for (int i = 0; i < ev.size(); ++i) {
        double ov = std::abs(es.eigenvectors().col(i).dot(dir));
        if (ov > bestov) {
          bestov = ov;
          idx = i;
        }
      }
      spectrum_out = ev;
      scaling_eig = ev(idx);
      return idx;
    }

    SpectrumInfo classify(const Mat& H, const Vec& scale_dir, double null_tol, double asym)
    {
      SpectrumInfo out;
      out.hessian_asymmetry = asym;
      int idx = pair_scaling_direction(H, scale_dir, out.spectrum, out.scaling_eigenvalue);
      for (int i = 0; i < out.spectrum.size(); ++i) {
        if (i == idx) continue;
        if (out.spectrum(i) > null_tol)
          ++out.coindex;
        else if (out.spectrum(i) < -null_tol)
          ++out.negative;
        else
          ++out.nullity;
      }
      std::sort(out.spectrum.data(), out.spectrum.data() + out.spectrum.size());
      return out;
    }

  } // namespace

  SpectrumInfo hessian_spectrum_coindex(const HomogeneousSpace& space, const InvariantBasis& basis,
                                        const Mat& P, const EinsteinConfig& config)
  {
    Vec x;
    ScalarFn f;
    if (basis.module_diagonal) {
      x = basis.lambda_from_coeff(basis.pack(P));
      f = [&](const Vec& lam) { return normalized_scal(space, basis.unpack(basis.coeff_from_lambda(lam))); };
    } else {
      x = basis.pack(P);
      f = [&](const Vec& y) { return normalized_scal(space, basis.unpack(y)); };
    }
    double asym = 0.0;
    Mat H = fd_hessian(f, x, config.hess_step * (1.0 + x.norm()), &asym);
    return classify(H, x, config.null_tol, asym);
  }

  SpectrumInfo hessian_spectrum_coindex(const DiagonalScalModel& model, const Vec& lambda,
                                        const EinsteinConfig& config)
  {
    ScalarFn f = [&](const Vec& lam) { return model.tscal(lam); };
    double asym = 0.0;
    Mat H = fd_hessian(f, lambda, config.hess_step * (1.0 + lambda.norm()), &asym);
    return classify(H, lambda, config.null_tol, asym);
  }

  EinsteinPoint find_einstein(const HomogeneousSpace& space, const InvariantBasis& basis,
                              const Mat& seed, const EinsteinConfig& config)
  {
    const int m = space.dim_m();
    Eigen::LLT<Mat> llt(symmetrize(seed));
    if (llt.info() != Eigen::Success)
      throw input_error("find_einstein: seed must be positive definite");

    SliceNewton newton;
    newton.residual = [&](const Vec& y) {
      Mat P = basis.unpack(y);
      return basis.pack(traceless_ricci(space, P));
    };
    newton.slice_normal = [&](const Vec& y) {
      Mat P = basis.unpack(y);
      Mat Pinv = P.llt().solve(Mat::Identity(m, m));
      Vec g(basis.dim());
      for (int i = 0; i < basis.dim(); ++i)
        g(i) = trace_pair(Pinv, basis.elements[i]);
      return g;
    };
    newton.renormalize = [&](const Vec& y) {
      Mat P = basis.unpack(y);
      double det = P.determinant();
      if (det <= 0.0)
        throw input_error("find_einstein: iterate left the positive cone");
      return basis.pack(P / std::pow(det, 1.0 / m));
    };

    double best = 0.0;
    Vec y;
    try {
      y = newton.solve(basis.pack(seed), config.max_iter, config.tol, &best);
    } catch (const input_error& e) {
      throw search_error(std::string("find_einstein: ") + e.what(), 1e300);
    }
    if (best > config.tol)
      throw search_error("find_einstein: no convergence within max_iter", best);

    EinsteinPoint pt;
    pt.P = basis.unpack(y);
    pt.backend = "structure_constants";
    pt.residual = best;
    pt.lambda = scal(space, pt.P) / m;
    pt.lambda_coords = basis.module_diagonal;
    pt.coordinates = basis.module_diagonal ? basis.lambda_from_coeff(y) : y;
    pt.spectrum = hessian_spectrum_coindex(space, basis, pt.P, config);
    return pt;
  }

  EinsteinPoint find_einstein(const DiagonalScalModel& model, const Vec& seed,
                              const EinsteinConfig& config)
  {
    if (seed.minCoeff() <= 0.0)
      throw input_error("find_einstein: seed must be positive");
    const double h0 = 1e-4;

    SliceNewton newton;
    newton.residual = [&](const Vec& x) {
      // project the tscal gradient onto the slice tangent
      Vec g = fd_gradient([&](const Vec& v) { return model.tscal(v); }, x, h0 * (1.0 + x.norm()));
      Vec n(model.n_coeffs());
      for (int i = 0; i < model.n_coeffs(); ++i)
        n(i) = model.module_dims()[i] / x(i);
      n.normalize();
      return Vec(g - g.dot(n) * n);
    };
    newton.slice_normal = [&](const Vec& x) {
      Vec n(model.n_coeffs());
      for (int i = 0; i < model.n_coeffs(); ++i)
        n(i) = model.module_dims()[i] / x(i);
      return n;
    };
    newton.renormalize = [&](const Vec& x) {
      if (x.minCoeff() <= 0.0)
        throw input_error("find_einstein: iterate left the positive cone");
      return model.normalize_volume(x);
    };

    double best = 0.0;
    Vec x;
    try {
      x = newton.solve(seed, config.max_iter, config.tol, &best);
    } catch (const input_error& e) {
      throw search_error(std::string("find_einstein(model): ") + e.what(), 1e300);
    }
    if (best > config.tol)
      throw search_error("find_einstein(model): no convergence within max_iter", best);

    EinsteinPoint pt;
    pt.backend = "diagonal_scalar_model";
    pt.lambda_coords = true;
    pt.coordinates = x;
    pt.residual = best;
    pt.lambda = model.tscal(x) / model.dim_n();
    pt.spectrum = hessian_spectrum_coindex(model, x, config);
    return pt;
  }

  namespace
  {

    Vec permute(const Vec& x, const std::vector<int>& p)
    {
      Vec out(x.size());
      for (int i = 0; i < x.size(); ++i)
        out(p[i]) = x(i);
      return out;
    }

    bool same_point(const EinsteinPoint& a, const EinsteinPoint& b,
                    const std::vector<std::vector<int>>& perms)
    {
      if (a.coordinates.size() != b.coordinates.size())
        return false;
      if (a.lambda_coords && !perms.empty()) {
        for (const auto& p : perms)
          if ((permute(a.coordinates, p) - b.coordinates).cwiseAbs().maxCoeff() < 1e-6)
            return true;
        return false;
      }
      return (a.coordinates - b.coordinates).cwiseAbs().maxCoeff() < 1e-6;
    }

    void sort_dedup(std::vector<EinsteinPoint>& pts, const std::vector<std::vector<int>>& perms)
    {
      std::vector<EinsteinPoint> unique;
      for (auto& p : pts) {
        bool dup = false;
        for (const auto& u : unique)
          if (same_point(p, u, perms)) {
            dup = true;
            break;
          }
        if (!dup) unique.push_back(std::move(p));
      }
      std::sort(unique.begin(), unique.end(), [](const EinsteinPoint& a, const EinsteinPoint& b) {
        double sa = a.lambda * 1.0, sb = b.lambda * 1.0;
        if (std::abs(sa - sb) > 1e-9) return sa < sb;
        for (int i = 0; i < std::min(a.coordinates.size(), b.coordinates.size()); ++i)
          if (std::abs(a.coordinates(i) - b.coordinates(i)) > 1e-9)
            return a.coordinates(i) < b.coordinates(i);
        return false;
      });
      pts = std::move(unique);
    }

  } // namespace

  std::vector<EinsteinPoint> find_einstein_multiseed(const HomogeneousSpace& space,
                                                     const InvariantBasis& basis, int n_seeds,
                                                     const EinsteinConfig& config,
                                                     const std::vector<std::vector<int>>& permutations,
                                                     std::uint64_t rng_seed)
  {
    const int m = space.dim_m();
    std::mt19937_64 rng(rng_seed);
    std::normal_distribution<double> gauss(0.0, 0.35);
    std::vector<Mat> seeds;
    seeds.push_back(Mat::Identity(m, m));
    while (static_cast<int>(seeds.size()) < n_seeds) {
      Vec y = basis.pack(Mat::Identity(m, m));
      for (int i = 0; i < y.size(); ++i)
        y(i) *= std::exp(gauss(rng));
      for (int i = 0; i < y.size(); ++i)
        y(i) += 0.1 * gauss(rng);
      Mat P = basis.unpack(y);
      Eigen::LLT<Mat> llt(symmetrize(P));
      if (llt.info() == Eigen::Success)
        seeds.push_back(P);
    }

    std::vector<EinsteinPoint> found(seeds.size());
    std::vector<char> ok(seeds.size(), 0);
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < static_cast<int>(seeds.size()); ++i) {
      try {
        found[i] = find_einstein(space, basis, seeds[i], config);
        ok[i] = 1;
      } catch (const std::exception&) {
        ok[i] = 0;
      }
    }
    std::vector<EinsteinPoint> pts;
    for (size_t i = 0; i < seeds.size(); ++i)
      if (ok[i]) pts.push_back(std::move(found[i]));
    sort_dedup(pts, permutations);
    return pts;
  }

  std::vector<EinsteinPoint> find_einstein_multiseed(const DiagonalScalModel& model, int n_seeds,
                                                     const EinsteinConfig& config,
                                                     const std::vector<std::vector<int>>& permutations,
                                                     std::uint64_t rng_seed)
  {
    std::mt19937_64 rng(rng_seed);
    std::normal_distribution<double> gauss(0.0, 0.4);
    std::vector<Vec> seeds;
    seeds.push_back(Vec::Ones(model.n_coeffs()));
    while (static_cast<int>(seeds.size()) < n_seeds) {
      Vec x(model.n_coeffs());
      for (int i = 0; i < x.size(); ++i)
        x(i) = std::exp(gauss(rng));
      seeds.push_back(x);
    }
    std::vector<EinsteinPoint> found(seeds.size());
    std::vector<char> ok(seeds.size(), 0);
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < static_cast<int>(seeds.size()); ++i) {
      try {
        found[i] = find_einstein(model, seeds[i], config);
        ok[i] = 1;
      } catch (const std::exception&) {
        ok[i] = 0;
      }
    }
    std::vector<EinsteinPoint> pts;
    for (size_t i = 0; i < seeds.size(); ++i)
      if (ok[i]) pts.push_back(std::move(found[i]));
    sort_dedup(pts, permutations);
    return pts;
  }

} // namespace rflab
