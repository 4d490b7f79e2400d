#include "rflab/curvature.hpp"

#include <Eigen/Cholesky>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace rflab
{

  namespace
  {

    void require_spd(const Mat& P, const char* who)
    {
      Eigen::LLT<Mat> llt(symmetrize(P));
      if (llt.info() != Eigen::Success)
        throw input_error(std::string(who) + ": metric is not positive definite");
    }

    void require_split(const HomogeneousSpace& space, const char* who)
    {
      if (!space.has_toral_split())
        throw input_error(std::string(who) + ": space has no toral split");
    }

  } // namespace

  Mat SubmersionMetric::embed() const
  {
    const int td = static_cast<int>(Pt.rows());
    const int nd = static_cast<int>(Pn.rows());
    Mat P = Mat::Zero(td + nd, td + nd);
    P.topLeftCorner(td, td) = Pt;
    P.bottomRightCorner(nd, nd) = Pn;
    return P;
  }

  SubmersionMetric SubmersionMetric::split(const HomogeneousSpace& space, const Mat& P)
  {
    require_split(space, "SubmersionMetric::split");
    const int td = space.frame().t_dim;
    const int nd = space.frame().n_dim();
    return {P.topLeftCorner(td, td), P.bottomRightCorner(nd, nd)};
  }

  std::vector<Mat> s_tensor(const HomogeneousSpace& space, const Mat& P)
  {
    const Frame& F = space.frame();
    const int m = F.m();
    if (P.rows() != m || P.cols() != m)
      throw input_error("s_tensor: metric has wrong shape");
    require_spd(P, "s_tensor");

    Mat Pinv = P.llt().solve(Mat::Identity(m, m));
    // G[d] = Lm[d]^T P, consumed columnwise below
    std::vector<Mat> G(m);
    for (int d = 0; d < m; ++d)
      G[d] = F.Lm[d].transpose() * P;

    std::vector<Mat> S(m);
    // worth spreading only for large algebras; catalog sizes run serial
#pragma omp parallel for schedule(static) if (m >= 24)
    for (int a = 0; a < m; ++a) {
      Mat A_a(m, m), g_a(m, m);
      for (int d = 0; d < m; ++d) {
        A_a.row(d) = F.Lm[d].col(a).transpose();
        g_a.row(d) = G[d].col(a).transpose();
      }
      S[a] = -0.5 * (F.Lm[a] + Pinv * (A_a * P) + Pinv * g_a);
    }
    return S;
  }

  std::vector<Mat> s_tensor_submersion(const HomogeneousSpace& space, const SubmersionMetric& P)
  {
    require_split(space, "s_tensor_submersion");
    const Frame& F = space.frame();
    const int m = F.m();
    const int td = F.t_dim;
    const int nd = m - td;
    if (P.Pt.rows() != td || P.Pn.rows() != nd)
      throw input_error("s_tensor_submersion: block shapes do not match the split");
    require_spd(P.Pn, "s_tensor_submersion (P_n)");

    Mat Pninv = P.Pn.llt().solve(Mat::Identity(nd, nd));
    auto n_apply_inv = [&](const Vec& v) { // P_n^{-1} acting on the n-part, t-part dropped
      Vec out = Vec::Zero(m);
      out.tail(nd) = Pninv * v.tail(nd);
      return out;
    };

    std::vector<Mat> S(m, Mat::Zero(m, m));
    for (int a = 0; a < td; ++a) {
      // ad(P_t.T) with P_t.T expressed in the frame
      Vec PtT = Vec::Zero(m);
      PtT.head(td) = P.Pt.col(a);
      Mat adPtT = F.ad_m(PtT);
      for (int b = td; b < m; ++b) {
        Vec col = -F.Lm[a].col(b) + 0.5 * n_apply_inv(adPtT.col(b));
        S[a].col(b) = col;
      }
    }
    for (int a = td; a < m; ++a) {
      for (int b = 0; b < td; ++b) {
        // S(X).Ttilde = -1/2 P_n^{-1} ad(X) P_t Ttilde
        Vec PtTt = Vec::Zero(m);
        PtTt.head(td) = P.Pt.col(b);
        S[a].col(b) = -0.5 * n_apply_inv(F.ad_m(PtTt).col(a) * -1.0);
      }
      for (int b = td; b < m; ++b) {
        // S(X).Y = -1/2 [X,Y]_m - 1/2 P_n^{-1} pi_n (ad(X)P_n - ad(P_n X)) Y
        Vec PnY = Vec::Zero(m);
        PnY.tail(nd) = P.Pn.col(b - td);
        Vec t1 = -0.5 * F.Lm[a].col(b);
        Vec adXPnY(m), adPnXY(m);
        { // ad(X)(P_n Y)
          Vec v = Vec::Zero(m);
          for (int e = 0; e < m; ++e)
            v += PnY(e) * F.Lm[a].col(e);
          adXPnY = v;
        }
        { // ad(P_n X) Y
          Vec PnX = Vec::Zero(m);
          PnX.tail(nd) = P.Pn.col(a - td);
          Vec v = Vec::Zero(m);
          for (int e = 0; e < m; ++e)
            v += PnX(e) * F.Lm[e].col(b);
          adPnXY = v;
        }
        S[a].col(b) = t1 - 0.5 * n_apply_inv(adXPnY - adPnXY);
      }
    }
    return S;
  }

  RiemannTensor riemann(const HomogeneousSpace& space, const std::vector<Mat>& S)
  {
    const Frame& F = space.frame();
    const int m = F.m();
    RiemannTensor Rm;
    Rm.m = m;
    Rm.entries.assign(static_cast<size_t>(m) * m, Mat::Zero(m, m));
#pragma omp parallel for schedule(static) if (m >= 24)
    for (int a = 0; a < m; ++a) {
      for (int c = 0; c < m; ++c) {
        Mat R = -(S[a] * S[c] - S[c] * S[a]);
        for (int j = 0; j < F.nh(); ++j)
          R += F.Lh[a](j, c) * F.adh[j];
        for (int e = 0; e < m; ++e) {
          double w = F.Lm[a](e, c);
          if (w != 0.0)
            R -= w * S[e];
        }
        Rm.entries[static_cast<size_t>(a) * m + c] = R;
      }
    }
    return Rm;
  }

  Mat ricci_from_s(const HomogeneousSpace& space, const std::vector<Mat>& S)
  {
    const Frame& F = space.frame();
    const int m = F.m();
    // Ric(a,b) = sum_c Rm(a,c)(c,b); only row c of each entry is needed.
    Mat Ric = Mat::Zero(m, m);
#pragma omp parallel for schedule(static) if (m >= 24)
    for (int a = 0; a < m; ++a) {
      Vec row = Vec::Zero(m);
      for (int j = 0; j < F.nh(); ++j)
        for (int c = 0; c < m; ++c)
          row += F.Lh[a](j, c) * F.adh[j].row(c).transpose();
      for (int c = 0; c < m; ++c) {
        // -(S_a S_c - S_c S_a)(c,b)
        row -= (S[a].row(c) * S[c]).transpose();
        row += (S[c].row(c) * S[a]).transpose();
        // -sum_e Lm[a](e,c) S[e](c,b)
        for (int e = 0; e < m; ++e) {
          double w = F.Lm[a](e, c);
          if (w != 0.0)
            row -= w * S[e].row(c).transpose();
        }
      }
      Ric.row(a) = row.transpose();
    }
    return symmetrize(Ric);
  }

  Mat ricci(const HomogeneousSpace& space, const Mat& P)
  {
    return ricci_from_s(space, s_tensor(space, P));
  }

  Mat ricci_submersion(const HomogeneousSpace& space, const SubmersionMetric& P)
  {
    return ricci_from_s(space, s_tensor_submersion(space, P));
  }

  double scal(const HomogeneousSpace& space, const Mat& P)
  {
    Mat Ric = ricci(space, P);
    return P.llt().solve(Ric).trace();
  }

  double scal_submersion(const HomogeneousSpace& space, const SubmersionMetric& P)
  {
    const Frame& F = space.frame();
    Mat Ric = ricci_submersion(space, P);
    const int td = F.t_dim;
    const int nd = F.n_dim();
    double s = P.Pn.llt().solve(Ric.bottomRightCorner(nd, nd)).trace();
    if (td > 0) {
      // Tr(P_t^{-1} Ric_t) through the eigenbasis; vanishing eigenvalues carry
      // vanishing Ricci entries by the analytic extension, so they are skipped.
      Eigen::SelfAdjointEigenSolver<Mat> es(symmetrize(P.Pt));
      Mat Rt = Ric.topLeftCorner(td, td);
      for (int i = 0; i < td; ++i) {
        double ev = es.eigenvalues()(i);
        if (ev > 0.0)
          s += es.eigenvectors().col(i).dot(Rt * es.eigenvectors().col(i)) / ev;
      }
    }
    return s;
  }

  Mat traceless_ricci(const HomogeneousSpace& space, const Mat& P)
  {
    const int m = space.dim_m();
    Mat Ric = ricci(space, P);
    double sc = P.llt().solve(Ric).trace();
    return Ric - (sc / m) * P;
  }

  Mat ricci_differential(const HomogeneousSpace& space,
                         const SubmersionMetric& P,
                         const SubmersionMetric& B)
  {
    require_split(space, "ricci_differential");
    const Frame& F = space.frame();
    const int m = F.m();
    const int td = F.t_dim;
    const int nd = m - td;
    require_spd(P.Pn, "ricci_differential (P_n)");

    Mat Pninv = P.Pn.llt().solve(Mat::Identity(nd, nd));
    Mat K = Pninv * B.Pn * Pninv; // d(P_n^{-1}) = -K
    auto n_apply = [&](const Mat& Op, const Vec& v) {
      Vec out = Vec::Zero(m);
      out.tail(nd) = Op * v.tail(nd);
      return out;
    };
    auto ad_vec = [&](const Vec& v) { return F.ad_m(v); };

    std::vector<Mat> S = s_tensor_submersion(space, P);
    std::vector<Mat> dS(m, Mat::Zero(m, m));
    for (int a = 0; a < td; ++a) {
      Vec PtT = Vec::Zero(m);
      PtT.head(td) = P.Pt.col(a);
      Vec BtT = Vec::Zero(m);
      BtT.head(td) = B.Pt.col(a);
      Mat adPtT = ad_vec(PtT);
      Mat adBtT = ad_vec(BtT);
      for (int b = td; b < m; ++b)
        dS[a].col(b) = -0.5 * n_apply(K, adPtT.col(b)) + 0.5 * n_apply(Pninv, adBtT.col(b));
    }
    for (int a = td; a < m; ++a) {
      for (int b = 0; b < td; ++b) {
        Vec PtTt = Vec::Zero(m);
        PtTt.head(td) = P.Pt.col(b);
        Vec BtTt = Vec::Zero(m);
        BtTt.head(td) = B.Pt.col(b);
        Vec adX_Pt = -ad_vec(PtTt).col(a); // ad(X).(P_t Ttilde) = -ad(P_t Ttilde).X
        Vec adX_Bt = -ad_vec(BtTt).col(a);
        dS[a].col(b) = 0.5 * n_apply(K, adX_Pt) - 0.5 * n_apply(Pninv, adX_Bt);
      }
      for (int b = td; b < m; ++b) {
        Vec PnY = Vec::Zero(m), BnY = Vec::Zero(m), PnX = Vec::Zero(m), BnX = Vec::Zero(m);
        PnY.tail(nd) = P.Pn.col(b - td);
        BnY.tail(nd) = B.Pn.col(b - td);
        PnX.tail(nd) = P.Pn.col(a - td);
        BnX.tail(nd) = B.Pn.col(a - td);
        Vec adXPnY = Vec::Zero(m), adPnXY = Vec::Zero(m);
        Vec adXBnY = Vec::Zero(m), adBnXY = Vec::Zero(m);
        for (int e = 0; e < m; ++e) {
          adXPnY += PnY(e) * F.Lm[a].col(e);
          adXBnY += BnY(e) * F.Lm[a].col(e);
          adPnXY += PnX(e) * F.Lm[e].col(b);
          adBnXY += BnX(e) * F.Lm[e].col(b);
        }
        dS[a].col(b) = 0.5 * n_apply(K, adXPnY - adPnXY) - 0.5 * n_apply(Pninv, adXBnY - adBnXY);
      }
    }

    // dRic(a,b) = sum_c dRm(a,c)(c,b) with
    // dRm(a,c) = -[dS_a,S_c] - [S_a,dS_c] - sum_e Lm[a](e,c) dS_e.
    Mat dRic = Mat::Zero(m, m);
#pragma omp parallel for schedule(static) if (m >= 24)
    for (int a = 0; a < m; ++a) {
      Vec row = Vec::Zero(m);
      for (int c = 0; c < m; ++c) {
        row -= (dS[a].row(c) * S[c]).transpose();
        row += (S[c].row(c) * dS[a]).transpose();
        row -= (S[a].row(c) * dS[c]).transpose();
        row += (dS[c].row(c) * S[a]).transpose();
        for (int e = 0; e < m; ++e) {
          double w = F.Lm[a](e, c);
          if (w != 0.0)
            row -= w * dS[e].row(c).transpose();
        }
      }
      dRic.row(a) = row.transpose();
    }
    return symmetrize(dRic);
  }

  Mat ricci_differential_fd(const HomogeneousSpace& space, const Mat& P, const Mat& B)
  {
    double bn = B.norm();
    if (bn == 0.0)
      return Mat::Zero(P.rows(), P.cols());
    double h = 1e-5 * (1.0 + P.norm()) / bn;
    Mat Rp, Rmn;
    if (space.has_toral_split()) {
      SubmersionMetric Pp = SubmersionMetric::split(space, P + h * B);
      SubmersionMetric Pm = SubmersionMetric::split(space, P - h * B);
      // fall back to the general tensor when the metric is not block-diagonal
      Mat off = P - SubmersionMetric::split(space, P).embed();
      if (off.cwiseAbs().maxCoeff() < 1e-14 && (B - SubmersionMetric::split(space, B).embed()).cwiseAbs().maxCoeff() < 1e-14) {
        Rp = ricci_submersion(space, Pp);
        Rmn = ricci_submersion(space, Pm);
        return (Rp - Rmn) / (2.0 * h);
      }
    }
    Rp = ricci(space, P + h * B);
    Rmn = ricci(space, P - h * B);
    return (Rp - Rmn) / (2.0 * h);
  }

  OneillDiagnostics oneill_diagnostics(const HomogeneousSpace& space, const Vec& x)
  {
    require_split(space, "oneill_diagnostics");
    const Frame& F = space.frame();
    if (x.size() != F.n_modules())
      throw input_error("oneill_diagnostics: one coefficient per module required");
    if (x.minCoeff() <= 0.0)
      throw input_error("oneill_diagnostics: coefficients must be positive");

    const int L = F.n_modules();
    const int r = F.toral_modules;
    std::vector<Mat> T = triple_coefficients(space);

    double a2 = 0.0;
    for (int i = 0; i < r; ++i)
      for (int j = r; j < L; ++j)
        for (int jp = r; jp < L; ++jp)
          a2 += 0.25 * T[i](j, jp) * x(i) / (x(j) * x(jp));

    Mat P = Mat::Zero(F.m(), F.m());
    for (int i = 0; i < L; ++i)
      P.block(F.module_offset[i], F.module_offset[i], F.module_dim[i], F.module_dim[i]) =
        x(i) * Mat::Identity(F.module_dim[i], F.module_dim[i]);
    double sM = scal(space, P);

    HomogeneousSpace base = space.base_space();
    Mat Pn = P.bottomRightCorner(F.n_dim(), F.n_dim());
    double sN = scal(base, Pn);

    OneillDiagnostics out;
    out.a_norm_sq = a2;
    out.scal_total = sM;
    out.scal_base = sN;
    out.identity_residual = std::abs(sM - sN + a2);
    return out;
  }

  namespace reference
  {

    std::vector<Mat> s_tensor(const HomogeneousSpace& space, const Mat& P)
    {
      const Frame& F = space.frame();
      const int m = F.m();
      Mat Pinv = P.inverse();
      std::vector<Mat> S(m, Mat::Zero(m, m));
      // solve -2<S(a)b, c> = <[a,b]_m, c> + <[P^-1 c, a]_m, P b> + <[P^-1 c, b]_m, P a>
      for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b)
          for (int c = 0; c < m; ++c) {
            double rhs = F.Lm[a](c, b);
            for (int d = 0; d < m; ++d)
              for (int e = 0; e < m; ++e) {
                rhs += Pinv(d, c) * F.Lm[d](e, a) * P(e, b);
                rhs += Pinv(d, c) * F.Lm[d](e, b) * P(e, a);
              }
            S[a](c, b) = -0.5 * rhs;
          }
      return S;
    }

    Mat ricci(const HomogeneousSpace& space, const Mat& P)
    {
      const Frame& F = space.frame();
      const int m = F.m();
      std::vector<Mat> S = reference::s_tensor(space, P);
      Mat Ric = Mat::Zero(m, m);
      for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) {
          double s = 0.0;
          for (int c = 0; c < m; ++c) {
            Mat Rm = Mat::Zero(m, m);
            for (int j = 0; j < F.nh(); ++j)
              Rm += F.Lh[a](j, c) * F.adh[j];
            Rm -= S[a] * S[c] - S[c] * S[a];
            for (int e = 0; e < m; ++e)
              Rm -= F.Lm[a](e, c) * S[e];
            s += Rm(c, b);
          }
          Ric(a, b) = s;
        }
      return Ric;
    }

  } // namespace reference

} // namespace rflab
