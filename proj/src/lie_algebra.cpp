#include "rflab/lie_algebra.hpp"

namespace rflab
{

  LieAlgebraSpec::LieAlgebraSpec(std::vector<Mat> structure_constants, Mat Q)
    : m_dim(static_cast<int>(structure_constants.size())),
      m_c(std::move(structure_constants)),
      m_Q(std::move(Q))
  {
    if (m_dim == 0)
      throw input_error("LieAlgebraSpec: empty structure tensor");
    for (const Mat& ck : m_c)
      if (ck.rows() != m_dim || ck.cols() != m_dim)
        throw input_error("LieAlgebraSpec: structure tensor slice has wrong shape");
    if (m_Q.rows() != m_dim || m_Q.cols() != m_dim)
      throw input_error("LieAlgebraSpec: Q has wrong shape");
    Eigen::SelfAdjointEigenSolver<Mat> es(symmetrize(m_Q));
    if (es.eigenvalues().minCoeff() <= 0.0)
      throw input_error("LieAlgebraSpec: Q is not positive definite");
  }

  Vec LieAlgebraSpec::bracket(const Vec& X, const Vec& Y) const
  {
    if (X.size() != m_dim || Y.size() != m_dim)
      throw input_error("bracket: dimension mismatch");
    Vec out(m_dim);
    for (int k = 0; k < m_dim; ++k)
      out(k) = X.dot(m_c[k] * Y);
    return out;
  }

  Mat LieAlgebraSpec::ad(const Vec& X) const
  {
    if (X.size() != m_dim)
      throw input_error("ad: dimension mismatch");
    Mat A(m_dim, m_dim);
    for (int k = 0; k < m_dim; ++k)
      A.row(k) = X.transpose() * m_c[k];
    return A;
  }

  double LieAlgebraSpec::antisymmetry_residual() const
  {
    double r = 0.0;
    for (const Mat& ck : m_c)
      r = std::max(r, (ck + ck.transpose()).cwiseAbs().maxCoeff());
    return r;
  }

  double LieAlgebraSpec::jacobi_residual() const
  {
    // sum_m (c_ij^m c_mk^l + c_jk^m c_mi^l + c_ki^m c_mj^l) = 0
    double r = 0.0;
    const int n = m_dim;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l) {
            double s = 0.0;
            for (int m = 0; m < n; ++m)
              s += m_c[m](i, j) * m_c[l](m, k)
                 + m_c[m](j, k) * m_c[l](m, i)
                 + m_c[m](k, i) * m_c[l](m, j);
            r = std::max(r, std::abs(s));
          }
    return r;
  }

  double LieAlgebraSpec::ad_invariance_residual() const
  {
    double r = 0.0;
    const int n = m_dim;
    for (int i = 0; i < n; ++i) {
      Mat adi(n, n);
      for (int k = 0; k < n; ++k)
        adi.row(k) = m_c[k].row(i);
      Mat viol = adi.transpose() * m_Q + m_Q * adi;
      r = std::max(r, viol.cwiseAbs().maxCoeff());
    }
    return r;
  }

} // namespace rflab
