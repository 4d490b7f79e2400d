#ifndef RFLAB_CURVATURE_HPP
#define RFLAB_CURVATURE_HPP

#include "rflab/homogeneous_space.hpp"

namespace rflab
{

  /// Generalized submersion metric P = P_t (+) P_n w.r.t. m = t + n.
  /// P_t may be degenerate or zero; P_n must be positive definite.
  struct SubmersionMetric
  {
    Mat Pt;
    Mat Pn;

    Mat embed() const;
    static SubmersionMetric split(const HomogeneousSpace& space, const Mat& P);
  };

  /// Rank-4 curvature array; entry(a,c) is the endomorphism Rm(f_a, f_c).
  struct RiemannTensor
  {
    int m = 0;
    std::vector<Mat> entries; // row-major (a, c)
    const Mat& operator()(int a, int c) const { return entries[a * m + c]; }
  };

  /// S-tensor of eq-type -2Q(S(V1)V2,V3) = Q([V1,V2]_m,V3)
  ///   + Q([P^-1 V3,V1]_m, P V2) + Q([P^-1 V3,V2]_m, P V1).
  /// Returned as S[a] = matrix of S(f_a). Requires P positive definite.
  std::vector<Mat> s_tensor(const HomogeneousSpace& space, const Mat& P);

  /// Closed-form S-tensor for generalized submersion metrics; analytic in P
  /// and defined at P_t = 0. Requires a toral split and P_n positive definite.
  std::vector<Mat> s_tensor_submersion(const HomogeneousSpace& space, const SubmersionMetric& P);

  /// Rm(V1,V2) = ad([V1,V2]_h) - [S(V1),S(V2)] - S([V1,V2]_m).
  RiemannTensor riemann(const HomogeneousSpace& space, const std::vector<Mat>& S);

  /// Ricci endomorphism (index raised by Q) by tracing the Riemann array.
  Mat ricci_from_s(const HomogeneousSpace& space, const std::vector<Mat>& S);

  Mat ricci(const HomogeneousSpace& space, const Mat& P);
  Mat ricci_submersion(const HomogeneousSpace& space, const SubmersionMetric& P);

  double scal(const HomogeneousSpace& space, const Mat& P);
  double scal_submersion(const HomogeneousSpace& space, const SubmersionMetric& P);

  /// Ric - (scal/m) P.
  Mat traceless_ricci(const HomogeneousSpace& space, const Mat& P);

  /// Analytic directional derivative of Ric at a generalized submersion metric
  /// along a submersion direction, via the differentiated S-tensor blocks.
  Mat ricci_differential(const HomogeneousSpace& space,
                         const SubmersionMetric& P,
                         const SubmersionMetric& B);

  /// Central finite differences with step 1e-5 (1 + |P|); the generic fallback.
  Mat ricci_differential_fd(const HomogeneousSpace& space, const Mat& P, const Mat& B);

  struct OneillDiagnostics
  {
    double a_norm_sq = 0.0;
    double identity_residual = 0.0;
    double scal_total = 0.0;
    double scal_base = 0.0;
  };

  /// For a metric diagonal over the modules (coefficients x, one per module),
  /// computes  |A|^2 = 1/4 sum_{i vert} sum_{j,j' hor} [i j j'] x_i/(x_j x_j')
  /// and the O'Neill residual |scal_M(P) - scal_N(P_n) + |A|^2|.
  OneillDiagnostics oneill_diagnostics(const HomogeneousSpace& space, const Vec& x);

  namespace reference
  {
    /// Entrywise serial implementations straight from the defining identities.
    /// Kept independent of the optimized kernels; used by tests and benchmarks.
    std::vector<Mat> s_tensor(const HomogeneousSpace& space, const Mat& P);
    Mat ricci(const HomogeneousSpace& space, const Mat& P);
  }

} // namespace rflab

#endif
