#ifndef RFLAB_NUMDIFF_HPP
#define RFLAB_NUMDIFF_HPP

#include "rflab/types.hpp"

#include <functional>

namespace rflab
{

  using ScalarFn = std::function<double(const Vec&)>;

  /// Central-difference gradient with one Richardson extrapolation step.
  inline Vec fd_gradient(const ScalarFn& f, const Vec& x, double h)
  {
    const int n = static_cast<int>(x.size());
    Vec g(n);
    for (int i = 0; i < n; ++i) {
      auto central = [&](double hh) {
        Vec xp = x, xm = x;
        xp(i) += hh;
        xm(i) -= hh;
        return (f(xp) - f(xm)) / (2.0 * hh);
      };
      g(i) = (4.0 * central(h) - central(2.0 * h)) / 3.0;
    }
    return g;
  }

  /// Richardson-extrapolated central-difference Hessian, symmetrized.
  /// max_asym receives the largest asymmetry found before symmetrization.
  inline Mat fd_hessian(const ScalarFn& f, const Vec& x, double h, double* max_asym = nullptr)
  {
    const int n = static_cast<int>(x.size());
    auto plain = [&](double hh) {
      Mat H(n, n);
      double f0 = f(x);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          if (i == j) {
            Vec xp = x, xm = x;
            xp(i) += hh;
            xm(i) -= hh;
            H(i, i) = (f(xp) - 2.0 * f0 + f(xm)) / (hh * hh);
          } else {
            Vec xpp = x, xpm = x, xmp = x, xmm = x;
            xpp(i) += hh; xpp(j) += hh;
            xpm(i) += hh; xpm(j) -= hh;
            xmp(i) -= hh; xmp(j) += hh;
            xmm(i) -= hh; xmm(j) -= hh;
            H(i, j) = (f(xpp) - f(xpm) - f(xmp) + f(xmm)) / (4.0 * hh * hh);
          }
        }
      return H;
    };
    Mat H = (4.0 * plain(h) - plain(2.0 * h)) / 3.0;
    if (max_asym)
      *max_asym = (H - H.transpose()).cwiseAbs().maxCoeff();
    return symmetrize(H);
  }

} // namespace rflab

#endif
