#ifndef RFLAB_TYPES_HPP
#define RFLAB_TYPES_HPP

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

namespace rflab
{

  using Vec = Eigen::VectorXd;
  using Mat = Eigen::MatrixXd;

  constexpr const char* kVersion = "0.1.0";

  /// Absolute tolerance for algebraic identity checks (Jacobi, Ad-invariance, ...).
  constexpr double kTolAlg = 1e-9;

  /// Bad user input (dimension mismatch, singular metric where SPD is required, ...).
  class input_error : public std::invalid_argument
  {
  public:
    explicit input_error(const std::string& what) : std::invalid_argument(what) {}
  };

  /// Numerical failure with a condition report (rank-deficient solves, ...).
  class numerical_error : public std::runtime_error
  {
  public:
    explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
  };

  /// Search failure; carries the best residual reached.
  class search_error : public std::runtime_error
  {
  public:
    search_error(const std::string& what, double best_residual)
      : std::runtime_error(what), best_residual(best_residual) {}
    double best_residual;
  };

  /// Integration failure; the last valid state is kept by the caller's trajectory.
  class integration_error : public std::runtime_error
  {
  public:
    explicit integration_error(const std::string& what) : std::runtime_error(what) {}
  };

  inline Mat symmetrize(const Mat& A) { return 0.5 * (A + A.transpose()); }

  /// Frobenius pairing Tr(A.B) of two symmetric matrices.
  inline double trace_pair(const Mat& A, const Mat& B) { return (A * B).trace(); }

  /// FNV-1a 64-bit hash, used for config fingerprints in run manifests.
  inline std::uint64_t fnv1a(const std::string& data)
  {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : data) {
      h ^= c;
      h *= 1099511628211ull;
    }
    return h;
  }

} // namespace rflab

#endif
