#ifndef RFLAB_DIAGONAL_MODEL_HPP
#define RFLAB_DIAGONAL_MODEL_HPP

#include "rflab/types.hpp"

namespace rflab
{

  /// Closed-form normalized scalar curvature of a diagonal invariant metric,
  ///   scal(x) = sum_i linear_i / x_i - sum_terms coeff * x_i / (x_j x_k),
  /// in the per-module coefficients x. Backs spaces that ship without
  /// structure constants and cross-checks the curvature engine elsewhere.
  class DiagonalScalModel
  {
  public:
    struct TripleTerm
    {
      int i, j, k;
      double coeff;
    };

    DiagonalScalModel() = default;
    DiagonalScalModel(std::vector<int> module_dims, Vec linear, std::vector<TripleTerm> triples);

    /// Convenience builder: each triangle {i,j,k} with full coefficient t
    /// expands to the three cyclic terms with coefficient t/2.
    static DiagonalScalModel from_triangles(std::vector<int> module_dims, Vec linear,
                                            const std::vector<std::pair<std::array<int, 3>, double>>& triangles);

    int n_coeffs() const { return static_cast<int>(m_dims.size()); }
    int dim_n() const { return m_dim_n; }
    const std::vector<int>& module_dims() const { return m_dims; }

    double det(const Vec& x) const;
    double scal(const Vec& x) const;
    /// det(x)^{1/dim} * scal(x); scale invariant.
    double tscal(const Vec& x) const;

    /// Rescales x to the unit-volume slice det = 1.
    Vec normalize_volume(const Vec& x) const;

  private:
    std::vector<int> m_dims;
    Vec m_linear;
    std::vector<TripleTerm> m_triples;
    int m_dim_n = 0;
  };

} // namespace rflab

#endif
