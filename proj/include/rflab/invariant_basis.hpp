#ifndef RFLAB_INVARIANT_BASIS_HPP
#define RFLAB_INVARIANT_BASIS_HPP

#include "rflab/homogeneous_space.hpp"

namespace rflab
{

  /// Trace-orthonormal basis of Sym(m, Q_m)^{Ad(H)} in frame coordinates.
  ///
  /// With a toral split the basis is block-organized:
  ///   elements[0 .. nu)            span  Sym(t)^{Ad(H)} + 0,
  ///   elements[nu .. nu + n_sub)   span  0 + Sym(n)^{Ad(K)},
  ///   elements[nu + n_sub .. )     span the trace-orthogonal complement.
  /// The first two groups together parametrize the generalized submersion
  /// metrics; the flow integrator keeps submersion states inside them.
  struct InvariantBasis
  {
    std::vector<Mat> elements;
    int nu = 0;     ///< dim Sym(t)^{Ad(H)} when a split is present
    int n_sub = 0;  ///< dim Sym(n)^{Ad(K)} when a split is present

    /// True when the invariant metrics are exactly the module-diagonal ones;
    /// then elements[i] = Id on module i (normalized) in module order, and
    /// the natural coordinates are the per-module scalings lambda_i.
    bool module_diagonal = false;
    std::vector<int> module_dims; ///< copied from the frame, for lambda coords

    int dim() const { return static_cast<int>(elements.size()); }
    int sub_dim() const { return nu + n_sub; }
    int ambient() const { return elements.empty() ? 0 : static_cast<int>(elements[0].rows()); }

    Vec pack(const Mat& B) const;
    Mat unpack(const Vec& y) const;

    /// Coefficient vector of the first sub_dim() elements only.
    Mat unpack_sub(const Vec& y_sub) const;

    Vec lambda_from_coeff(const Vec& y) const;
    Vec coeff_from_lambda(const Vec& lambda) const;
  };

  /// Solves {E symmetric, [E, ad(z)|_m] = 0 for z spanning h, g E g^T = E for
  /// isotropy generators} by null-space extraction and returns an orthonormal,
  /// block-organized basis.
  InvariantBasis invariant_sym_basis(const HomogeneousSpace& space);

} // namespace rflab

#endif
