#include <doctest.h>

#include "rflab/catalog.hpp"
#include "rflab/curvature.hpp"
#include "rflab/invariant_basis.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <random>

using namespace rflab;

namespace
{

  Mat random_spd(int m, std::mt19937_64& rng, double spread = 0.35)
  {
    std::normal_distribution<double> g;
    Mat A(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        A(i, j) = g(rng);
    return Mat::Identity(m, m) + spread * symmetrize(A) * 0.5 +
           spread * spread * 0.25 * A * A.transpose() / m;
  }

  Mat random_invariant_spd(const InvariantBasis& b, std::mt19937_64& rng, double spread = 0.3)
  {
    std::normal_distribution<double> g;
    for (;;) {
      Vec y = b.pack(Mat::Identity(b.ambient(), b.ambient()));
      for (int i = 0; i < y.size(); ++i)
        y(i) += spread * g(rng);
      Mat P = b.unpack(y);
      Eigen::LLT<Mat> llt(symmetrize(P));
      if (llt.info() == Eigen::Success)
        return P;
    }
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

  // draw a random Ad(K)-invariant submersion metric through the sub-basis
  SubmersionMetric random_submersion(const HomogeneousSpace& space, const InvariantBasis& b,
                                     std::mt19937_64& rng, double spread = 0.3)
  {
    std::normal_distribution<double> g;
    const Frame& F = space.frame();
    for (;;) {
      Vec y = b.pack(Mat::Identity(F.m(), F.m())).head(b.sub_dim());
      for (int i = 0; i < y.size(); ++i)
        y(i) += spread * g(rng);
      Mat P = b.unpack_sub(y);
      Eigen::LLT<Mat> t(symmetrize(Mat(P.topLeftCorner(F.t_dim, F.t_dim))));
      Eigen::LLT<Mat> n(symmetrize(Mat(P.bottomRightCorner(F.n_dim(), F.n_dim()))));
      if (t.info() == Eigen::Success && n.info() == Eigen::Success)
        return SubmersionMetric::split(space, P);
    }
  }

  SubmersionMetric random_submersion_direction(const HomogeneousSpace& space,
                                               const InvariantBasis& b, std::mt19937_64& rng)
  {
    std::normal_distribution<double> g;
    Vec y = Vec::Zero(b.sub_dim());
    for (int i = 0; i < y.size(); ++i)
      y(i) = g(rng);
    return SubmersionMetric::split(space, b.unpack_sub(y));
  }

  // the su3 full-flag closed-form normalized scalar curvature
  double su3_scal_formula(const Vec& lam)
  {
    return 1 / lam(0) + 1 / lam(1) + 1 / lam(2) -
           (lam(0) / (lam(1) * lam(2)) + lam(1) / (lam(0) * lam(2)) +
            lam(2) / (lam(0) * lam(1))) / 6.0;
  }

} // namespace

TEST_CASE("bi-invariant metrics: S(X)Y = -[X,Y]/2 and Ric = Id/4")
{
  for (const auto& id : {"su2", "su3_group", "so4_group"}) {
    CatalogEntry e = catalog_entry(id);
    const int m = e.space->dim_m();
    auto S = s_tensor(*e.space, Mat::Identity(m, m));
    const Frame& F = e.space->frame();
    for (int a = 0; a < m; ++a)
      CHECK((S[a] + 0.5 * F.Lm[a]).cwiseAbs().maxCoeff() < 1e-13);
    Mat Ric = ricci(*e.space, Mat::Identity(m, m));
    INFO(id);
    CHECK((Ric - 0.25 * Mat::Identity(m, m)).cwiseAbs().maxCoeff() < 1e-13);
  }
}

TEST_CASE("s_tensor satisfies its defining identity")
{
  CatalogEntry e = catalog_entry("su3_full_flag");
  const Frame& F = e.space->frame();
  const int m = F.m();
  std::mt19937_64 rng(5);
  Mat P = random_spd(m, rng);
  auto S = s_tensor(*e.space, P);
  Mat Pinv = P.inverse();
  double resid = 0.0;
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      for (int c = 0; c < m; ++c) {
        double lhs = -2.0 * S[a](c, b);
        double rhs = F.Lm[a](c, b);
        for (int d = 0; d < m; ++d)
          for (int ee = 0; ee < m; ++ee)
            rhs += Pinv(d, c) * (F.Lm[d](ee, a) * P(ee, b) + F.Lm[d](ee, b) * P(ee, a));
        resid = std::max(resid, std::abs(lhs - rhs));
      }
  CHECK(resid < 1e-12);
}

TEST_CASE("optimized kernels match the serial reference")
{
  std::mt19937_64 rng(17);
  for (const auto& id : {"su3_group", "su4_full_flag", "aloff_wallach(1,2)"}) {
    CatalogEntry e = catalog_entry(id);
    const int m = e.space->dim_m();
    Mat P = random_spd(m, rng);
    auto S1 = s_tensor(*e.space, P);
    auto S2 = reference::s_tensor(*e.space, P);
    double ds = 0.0;
    for (int a = 0; a < m; ++a)
      ds = std::max(ds, (S1[a] - S2[a]).cwiseAbs().maxCoeff());
    INFO(id);
    CHECK(ds < 1e-12);
    Mat R1 = ricci(*e.space, P);
    Mat R2 = reference::ricci(*e.space, P);
    CHECK((R1 - R2).cwiseAbs().maxCoeff() < 1e-11);
    // the reference Ricci is symmetric on its own
    CHECK((R2 - R2.transpose()).cwiseAbs().maxCoeff() < 1e-11);
  }
}

TEST_CASE("ricci equals the trace of the materialized Riemann array")
{
  CatalogEntry e = catalog_entry("su3_group");
  const int m = e.space->dim_m();
  std::mt19937_64 rng(23);
  Mat P = random_spd(m, rng);
  auto S = s_tensor(*e.space, P);
  RiemannTensor Rm = riemann(*e.space, S);
  Mat Ric = Mat::Zero(m, m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      double s = 0.0;
      for (int c = 0; c < m; ++c)
        s += Rm(a, c)(c, b);
      Ric(a, b) = s;
    }
  CHECK((symmetrize(Ric) - ricci_from_s(*e.space, S)).cwiseAbs().maxCoeff() < 1e-12);
  // antisymmetry of the array in its two slots
  for (int a = 0; a < m; ++a)
    for (int c = 0; c < m; ++c)
      CHECK((Rm(a, c) + Rm(c, a)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("submersion S-tensor agrees with the general formula and its limits")
{
  for (const auto& id : {"su3_group", "so4_group", "su4_t2_quotient"}) {
    CatalogEntry e = catalog_entry(id);
    const Frame& F = e.space->frame();
    const int td = F.t_dim, nd = F.n_dim(), m = F.m();
    std::mt19937_64 rng(31);
    InvariantBasis b = invariant_sym_basis(*e.space);
    SubmersionMetric P = random_submersion(*e.space, b, rng);
    auto Ssub = s_tensor_submersion(*e.space, P);
    auto Sfull = s_tensor(*e.space, P.embed());
    double d = 0.0;
    for (int a = 0; a < m; ++a)
      d = std::max(d, (Ssub[a] - Sfull[a]).cwiseAbs().maxCoeff());
    INFO(id);
    CHECK(d < 1e-12);

    // degenerate vertical part: S(T)Ttilde = 0, S(T)Y = -ad(T)Y, S(X)Ttilde = 0
    SubmersionMetric P0{Mat::Zero(td, td), P.Pn};
    auto S0 = s_tensor_submersion(*e.space, P0);
    for (int a = 0; a < td; ++a) {
      CHECK(S0[a].leftCols(td).cwiseAbs().maxCoeff() == 0.0);
      CHECK((S0[a].rightCols(nd) + F.Lm[a].rightCols(nd)).cwiseAbs().maxCoeff() < 1e-13);
    }
    for (int a = td; a < m; ++a)
      CHECK(S0[a].leftCols(td).cwiseAbs().maxCoeff() == 0.0);
    // S(T).Ttilde = 0 for every submersion metric
    for (int a = 0; a < td; ++a)
      CHECK(Ssub[a].leftCols(td).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("su3 scal matches the closed form on random diagonal metrics")
{
  CatalogEntry e = catalog_entry("su3_full_flag");
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(0.3, 2.5);
  for (int trial = 0; trial < 100; ++trial) {
    Vec lam(3);
    lam << u(rng), u(rng), u(rng);
    double s_engine = scal(*e.space, module_diag(*e.space, lam));
    double s_formula = su3_scal_formula(lam);
    CHECK(std::abs(s_engine - s_formula) < 1e-10 * std::abs(s_formula));
  }
}

TEST_CASE("su3 Kaehler-Einstein point: Ric0 = 0 and lambda = 2^(4/3)/6")
{
  CatalogEntry e = catalog_entry("su3_full_flag");
  Vec lam = e.find_known("ke").coefficients;
  Mat P = module_diag(*e.space, lam);
  Mat ric0 = traceless_ricci(*e.space, P);
  CHECK(ric0.norm() < 1e-9);
  double lambda = scal(*e.space, P) / 6.0;
  CHECK(lambda == doctest::Approx(std::pow(2.0, 4.0 / 3.0) / 6.0).epsilon(1e-12));
  CHECK(lambda == doctest::Approx(0.4199737).epsilon(1e-6));
}

TEST_CASE("Ricci block structure and the collapsed-limit identities")
{
  CatalogEntry e = catalog_entry("su3_group");
  const Frame& F = e.space->frame();
  const int td = F.t_dim, nd = F.n_dim();
  std::mt19937_64 rng(43);
  InvariantBasis b = invariant_sym_basis(*e.space);
  SubmersionMetric P = random_submersion(*e.space, b, rng);

  // splittingRic: no t-n coupling
  Mat Ric = ricci_submersion(*e.space, P);
  CHECK(Ric.topRightCorner(td, nd).cwiseAbs().maxCoeff() < 1e-10);

  // Ric(0 + P_n) = 0 + Ric_N(P_n)
  SubmersionMetric Pc{Mat::Zero(td, td), P.Pn};
  Mat Ric0 = ricci_submersion(*e.space, Pc);
  CHECK(Ric0.topLeftCorner(td, td).cwiseAbs().maxCoeff() < 1e-13);
  CHECK(Ric0.topRightCorner(td, nd).cwiseAbs().maxCoeff() < 1e-13);
  HomogeneousSpace base = e.space->base_space();
  Mat RicN = ricci(base, P.Pn);
  CHECK((Ric0.bottomRightCorner(nd, nd) - RicN).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("Ricci endomorphism is scale invariant")
{
  CatalogEntry e = catalog_entry("so4_full_flag");
  std::mt19937_64 rng(47);
  Mat P = random_spd(e.space->dim_m(), rng);
  Mat R1 = ricci(*e.space, P);
  Mat R2 = ricci(*e.space, Mat(3.7 * P));
  CHECK((R1 - R2).cwiseAbs().maxCoeff() < 1e-10 * R1.norm());
}

TEST_CASE("curvature is equivariant under inner automorphisms")
{
  CatalogEntry e = catalog_entry("su3_group");
  const Frame& F = e.space->frame();
  const int m = F.m();
  std::mt19937_64 rng(53);
  Mat P = random_spd(m, rng);
  // orthogonal map exp(ad v) restricted to m = g
  Vec v = Vec::Zero(m);
  v(0) = 0.4; v(3) = -0.2; v(6) = 0.15;
  Mat G = F.ad_m(v).exp();
  Mat Pg = G * P * G.transpose();
  Mat lhs = ricci(*e.space, Pg);
  Mat rhs = G * ricci(*e.space, P) * G.transpose();
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("analytic Ricci differential matches finite differences")
{
  std::mt19937_64 rng(59);
  for (const auto& id : {"su3_group", "so4_group", "aloff_wallach(1,1)"}) {
    CatalogEntry e = catalog_entry(id);
    const Frame& F = e.space->frame();
    InvariantBasis b = invariant_sym_basis(*e.space);
    for (int trial = 0; trial < 10; ++trial) {
      SubmersionMetric P = random_submersion(*e.space, b, rng);
      SubmersionMetric B = random_submersion_direction(*e.space, b, rng);
      Mat dA = ricci_differential(*e.space, P, B);
      Mat dF = ricci_differential_fd(*e.space, P.embed(), B.embed());
      INFO(id);
      CHECK((dA - dF).cwiseAbs().maxCoeff() < 1e-5 * std::max(1.0, dA.norm()));
    }
  }
}

TEST_CASE("Ricci differential identities at the collapsed metric")
{
  CatalogEntry e = catalog_entry("su3_group");
  const Frame& F = e.space->frame();
  const int td = F.t_dim, nd = F.n_dim();
  std::mt19937_64 rng(61);
  InvariantBasis b = invariant_sym_basis(*e.space);
  SubmersionMetric Pr = random_submersion(*e.space, b, rng);
  SubmersionMetric P0{Mat::Zero(td, td), Pr.Pn};

  // dRic(B_t + 0) annihilates t
  SubmersionMetric Bt{random_spd(td, rng, 0.8), Mat::Zero(nd, nd)};
  Mat dV = ricci_differential(*e.space, P0, Bt);
  CHECK(dV.topLeftCorner(td, td).cwiseAbs().maxCoeff() < 1e-12);

  // dRic(0 + B_n) = 0 + dRic_N(B_n)
  SubmersionMetric Bd = random_submersion_direction(*e.space, b, rng);
  SubmersionMetric Bn{Mat::Zero(td, td), Bd.Pn};
  Mat dH = ricci_differential(*e.space, P0, Bn);
  CHECK(dH.topLeftCorner(td, td).cwiseAbs().maxCoeff() < 1e-12);
  HomogeneousSpace base = e.space->base_space();
  Mat dN = ricci_differential_fd(base, P0.Pn, Bn.Pn);
  CHECK((dH.bottomRightCorner(nd, nd) - dN).cwiseAbs().maxCoeff() < 1e-6);

  // linearity: B = 0 gives 0
  SubmersionMetric Z{Mat::Zero(td, td), Mat::Zero(nd, nd)};
  CHECK(ricci_differential(*e.space, P0, Z).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("singular P_n is rejected")
{
  CatalogEntry e = catalog_entry("su3_group");
  const Frame& F = e.space->frame();
  SubmersionMetric P{Mat::Identity(F.t_dim, F.t_dim), Mat::Zero(F.n_dim(), F.n_dim())};
  CHECK_THROWS_AS(s_tensor_submersion(*e.space, P), input_error);
  CHECK_THROWS_AS(ricci_differential(*e.space, P, P), input_error);
  CHECK_THROWS_AS(s_tensor(*e.space, Mat::Zero(8, 8)), input_error);
}

TEST_CASE("O'Neill identity holds on random diagonal submersion metrics")
{
  std::mt19937_64 rng(67);
  std::uniform_real_distribution<double> u(0.3, 2.5);
  for (const auto& id : {"su3_group", "so4_group", "aloff_wallach(1,1)"}) {
    CatalogEntry e = catalog_entry(id);
    const int L = e.space->frame().n_modules();
    for (int trial = 0; trial < 100; ++trial) {
      Vec x(L);
      for (int i = 0; i < L; ++i) x(i) = u(rng);
      OneillDiagnostics d = oneill_diagnostics(*e.space, x);
      INFO(id, " trial ", trial);
      CHECK(d.identity_residual < 1e-8);
    }
  }
}

TEST_CASE("O'Neill: bi-invariant SO(4) and the vertical-scaling limit")
{
  CatalogEntry e = catalog_entry("so4_group");
  Vec ones = Vec::Ones(4);
  OneillDiagnostics d = oneill_diagnostics(*e.space, ones);
  CHECK(d.identity_residual < 1e-8);

  // A_norm_sq scales linearly in the vertical coefficients
  Vec x(4);
  x << 0.8, 1.3, 1.1, 0.9;
  OneillDiagnostics d1 = oneill_diagnostics(*e.space, x);
  Vec xs = x;
  xs(0) *= 0.01;
  xs(1) *= 0.01;
  OneillDiagnostics d2 = oneill_diagnostics(*e.space, xs);
  CHECK(d2.a_norm_sq == doctest::Approx(0.01 * d1.a_norm_sq).epsilon(1e-10));
  // nonpositive coefficients are rejected
  Vec bad = x;
  bad(2) = -1.0;
  CHECK_THROWS_AS(oneill_diagnostics(*e.space, bad), input_error);
}
