#ifndef RFLAB_LIE_ALGEBRA_HPP
#define RFLAB_LIE_ALGEBRA_HPP

#include "rflab/types.hpp"

namespace rflab
{

  /// A compact Lie algebra given by structure constants in a fixed basis,
  /// together with an Ad-invariant Euclidean inner product Q on it.
  ///
  /// The basis need not be Q-orthonormal; downstream code orthonormalizes
  /// once and caches the result (see HomogeneousSpace).
  class LieAlgebraSpec
  {
  public:
    LieAlgebraSpec() = default;

    /// c[k](i,j) = c_{ij}^k, i.e. [e_i, e_j] = sum_k c_{ij}^k e_k.
    LieAlgebraSpec(std::vector<Mat> structure_constants, Mat Q);

    int dim() const { return m_dim; }
    const std::vector<Mat>& c() const { return m_c; }
    const Mat& Q() const { return m_Q; }

    /// [X, Y] by contraction of the structure tensor.
    Vec bracket(const Vec& X, const Vec& Y) const;

    /// ad(X) as a matrix in the defining basis.
    Mat ad(const Vec& X) const;

    /// Max residual of c_{ij}^k + c_{ji}^k over all entries.
    double antisymmetry_residual() const;

    /// Max residual of the Jacobi identity over all basis triples.
    double jacobi_residual() const;

    /// Max residual of Q([X,Y],Z) + Q(Y,[X,Z]) over all basis triples.
    double ad_invariance_residual() const;

  private:
    int m_dim = 0;
    std::vector<Mat> m_c;
    Mat m_Q;
  };

} // namespace rflab

#endif
