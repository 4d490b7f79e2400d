#include <doctest.h>

#include "rflab/catalog.hpp"
#include "rflab/invariant_basis.hpp"

#include <unsupported/Eigen/MatrixFunctions>

using namespace rflab;

TEST_CASE("full flag bases are the module identities")
{
  for (const auto& [id, count] : {std::pair{"su3_full_flag", 3}, {"so4_full_flag", 2},
                                  {"su4_full_flag", 6}}) {
    CatalogEntry e = catalog_entry(id);
    InvariantBasis b = invariant_sym_basis(*e.space);
    INFO(id);
    CHECK(b.dim() == count);
    CHECK(b.module_diagonal);
    const Frame& F = e.space->frame();
    for (int i = 0; i < b.dim(); ++i) {
      Mat expect = Mat::Zero(F.m(), F.m());
      int o = F.module_offset[i], d = F.module_dim[i];
      expect.block(o, o, d, d) = Mat::Identity(d, d) / std::sqrt(double(d));
      CHECK((b.elements[i] - expect).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("group fibration bases are block organized with nu = d(d+1)/2")
{
  CatalogEntry e = catalog_entry("su3_group");
  InvariantBasis b = invariant_sym_basis(*e.space);
  CHECK(b.nu == 3);      // d = 2, trivial H action on t
  CHECK(b.n_sub == 3);   // Ad(K)-invariant metrics on n are module-diagonal
  CHECK(b.dim() == 36);  // all of Sym(8)
  const int td = e.space->frame().t_dim;
  for (int i = 0; i < b.nu; ++i) {
    Mat E = b.elements[i];
    E.topLeftCorner(td, td).setZero();
    CHECK(E.cwiseAbs().maxCoeff() < 1e-12);
  }
  for (int i = b.nu; i < b.nu + b.n_sub; ++i) {
    Mat E = b.elements[i];
    E.bottomRightCorner(8 - td, 8 - td).setZero();
    CHECK(E.cwiseAbs().maxCoeff() < 1e-12);
  }
  for (int i = 0; i < b.dim(); ++i)
    for (int j = 0; j < b.dim(); ++j)
      CHECK(trace_pair(b.elements[i], b.elements[j]) ==
            doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-10));

  CatalogEntry e4 = catalog_entry("su4_group");
  InvariantBasis b4 = invariant_sym_basis(*e4.space);
  CHECK(b4.nu == 6); // d = 3
  CHECK(b4.n_sub == 6);
}

TEST_CASE("aloff-wallach fiber has nu = 1")
{
  CatalogEntry e = catalog_entry("aloff_wallach(1,1)");
  InvariantBasis b = invariant_sym_basis(*e.space);
  CHECK(b.nu == 1);
  CHECK(b.n_sub == 3);
}

TEST_CASE("pack and unpack are mutually inverse on the invariant span")
{
  CatalogEntry e = catalog_entry("su3_group");
  InvariantBasis b = invariant_sym_basis(*e.space);
  Vec y = Vec::LinSpaced(b.dim(), -1.0, 2.0);
  CHECK((b.pack(b.unpack(y)) - y).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("elements commute with the isotropy action")
{
  CatalogEntry e = catalog_entry("su3_full_flag");
  InvariantBasis b = invariant_sym_basis(*e.space);
  const Frame& F = e.space->frame();
  for (const auto& E : b.elements)
    for (const auto& A : F.adh)
      CHECK((E * A - A * E).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("finite isotropy generators cut the basis down")
{
  // SU(3)/T^2 with the cyclic Weyl element adjoined: the three root modules
  // get identified, leaving a single coarse module and a 1-dim basis
  CatalogEntry e = catalog_entry("su3_full_flag");
  const LieAlgebraSpec& alg = e.space->algebra();
  const int n = alg.dim();

  using CMat = Eigen::MatrixXcd;
  const std::complex<double> I(0.0, 1.0);
  CMat Pg = CMat::Zero(3, 3);
  Pg(1, 0) = 1; Pg(2, 1) = 1; Pg(0, 2) = 1; // even permutation, det = 1
  std::vector<CMat> basis;
  {
    Eigen::VectorXd d1(3), d2(3);
    d1 << 1, -1, 0; d2 << 1, 1, -2;
    for (const auto& d : {d1, d2}) {
      CMat T = CMat::Zero(3, 3);
      for (int i = 0; i < 3; ++i) T(i, i) = I * d(i);
      basis.push_back(T);
    }
    for (int a = 0; a < 3; ++a)
      for (int c = a + 1; c < 3; ++c) {
        CMat X = CMat::Zero(3, 3), Y = CMat::Zero(3, 3);
        X(a, c) = 1; X(c, a) = -1; Y(a, c) = I; Y(c, a) = I;
        basis.push_back(X);
        basis.push_back(Y);
      }
  }
  Mat Ad = Mat::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    CMat img = Pg * basis[j] * Pg.adjoint();
    for (int i = 0; i < n; ++i) {
      double ni = -(basis[i] * basis[i]).trace().real();
      Ad(i, j) = -(img * basis[i]).trace().real() / ni;
    }
  }

  std::vector<std::vector<int>> coarse = {{2, 3, 4, 5, 6, 7}};
  HomogeneousSpace space(alg, e.space->h_basis(), {Ad}, coarse, std::nullopt,
                         "su3_weyl_extended");
  CHECK(space.validate().passed());
  InvariantBasis b = invariant_sym_basis(space);
  CHECK(b.dim() == 1);

  // conjugating the generator by a fixed orthogonal map commuting with the
  // decomposition keeps the dimension
  Mat adT = alg.ad(0.3 * Vec::Unit(n, 0) + 0.1 * Vec::Unit(n, 1));
  Mat G = adT.exp();
  HomogeneousSpace space2(alg, e.space->h_basis(), {Mat(G * Ad * G.inverse())}, coarse,
                          std::nullopt, "su3_weyl_conj");
  InvariantBasis b2 = invariant_sym_basis(space2);
  CHECK(b2.dim() == b.dim());
}
