#include "rflab/diagonal_model.hpp"

#include <array>
#include <cmath>

namespace rflab
{

  DiagonalScalModel::DiagonalScalModel(std::vector<int> module_dims, Vec linear,
                                       std::vector<TripleTerm> triples)
    : m_dims(std::move(module_dims)), m_linear(std::move(linear)), m_triples(std::move(triples))
  {
    if (m_linear.size() != static_cast<int>(m_dims.size()))
      throw input_error("DiagonalScalModel: linear coefficient count mismatch");
    for (int d : m_dims) m_dim_n += d;
    for (const auto& t : m_triples)
      if (t.i < 0 || t.i >= n_coeffs() || t.j < 0 || t.j >= n_coeffs() || t.k < 0 || t.k >= n_coeffs())
        throw input_error("DiagonalScalModel: triple index out of range");
  }

  DiagonalScalModel DiagonalScalModel::from_triangles(
    std::vector<int> module_dims, Vec linear,
    const std::vector<std::pair<std::array<int, 3>, double>>& triangles)
  {
    std::vector<TripleTerm> terms;
    for (const auto& [tri, t] : triangles) {
      terms.push_back({tri[0], tri[1], tri[2], t / 2.0});
      terms.push_back({tri[1], tri[0], tri[2], t / 2.0});
      terms.push_back({tri[2], tri[0], tri[1], t / 2.0});
    }
    return DiagonalScalModel(std::move(module_dims), std::move(linear), std::move(terms));
  }

  double DiagonalScalModel::det(const Vec& x) const
  {
    double d = 1.0;
    for (int i = 0; i < n_coeffs(); ++i)
      d *= std::pow(x(i), m_dims[i]);
    return d;
  }

  double DiagonalScalModel::scal(const Vec& x) const
  {
    if (x.size() != n_coeffs())
      throw input_error("DiagonalScalModel: wrong coefficient count");
    if (x.minCoeff() <= 0.0)
      throw input_error("DiagonalScalModel: coefficients must be positive");
    double s = 0.0;
    for (int i = 0; i < n_coeffs(); ++i)
      s += m_linear(i) / x(i);
    for (const auto& t : m_triples)
      s -= t.coeff * x(t.i) / (x(t.j) * x(t.k));
    return s;
  }

  double DiagonalScalModel::tscal(const Vec& x) const
  {
    return std::pow(det(x), 1.0 / m_dim_n) * scal(x);
  }

  Vec DiagonalScalModel::normalize_volume(const Vec& x) const
  {
    return x / std::pow(det(x), 1.0 / m_dim_n);
  }

} // namespace rflab
