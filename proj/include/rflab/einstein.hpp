#ifndef RFLAB_EINSTEIN_HPP
#define RFLAB_EINSTEIN_HPP

#include "rflab/diagonal_model.hpp"
#include "rflab/flow.hpp"

namespace rflab
{

  /// The natural L2 pairing det(P)^{1/2} Tr(P^{-1} B1 P^{-1} B2).
  double l2_inner(const Mat& P, const Mat& B1, const Mat& B2);

  /// det(P)^{1/m} scal(P); critical points are the Einstein metrics.
  double normalized_scal(const HomogeneousSpace& space, const Mat& P);

  struct EinsteinConfig
  {
    int max_iter = 200;
    double tol = 1e-10;      ///< Einstein residual target
    double null_tol = 1e-6;  ///< Hessian eigenvalues inside (-null_tol, null_tol) count as nullity
    double hess_step = 1e-3; ///< relative FD step for the tscal Hessian
  };

  struct SpectrumInfo
  {
    Vec spectrum;                    ///< all Hessian eigenvalues, sorted ascending
    double scaling_eigenvalue = 0.0; ///< eigenvalue paired to the scaling direction
    int coindex = 0;                 ///< positive eigenvalues off the scaling direction
    int negative = 0;
    int nullity = 0;                 ///< near-zero eigenvalues beyond scaling
    double hessian_asymmetry = 0.0;
  };

  struct EinsteinPoint
  {
    Vec coordinates;     ///< lambda coordinates when available, else basis coefficients
    bool lambda_coords = false;
    Mat P;               ///< metric in frame coordinates (engine backend only)
    double lambda = 0.0; ///< Einstein constant
    double residual = 0.0;
    SpectrumInfo spectrum;
    std::string backend; ///< "structure_constants" or "diagonal_scalar_model"
  };

  /// Newton iteration on the unit-volume slice driving Ric0 to zero.
  /// Throws search_error with the best residual after max_iter iterations.
  EinsteinPoint find_einstein(const HomogeneousSpace& space, const InvariantBasis& basis,
                              const Mat& seed, const EinsteinConfig& config = {});

  /// Critical-point search for a diagonal scalar model (gradient Newton).
  EinsteinPoint find_einstein(const DiagonalScalModel& model, const Vec& seed,
                              const EinsteinConfig& config = {});

  /// Hessian of tscal at P by Richardson finite differences, eigenvalues and
  /// coindex. Coordinates are the per-module scalings for module-diagonal
  /// spaces (the per-module scaling parametrization) and the trace-orthonormal
  /// basis coefficients otherwise. The scaling direction is identified by
  /// eigenvector overlap and reported separately; the coindex counts the
  /// remaining eigenvalues above null_tol, which by the first-variation
  /// formula equals the number of negative eigenvalues of dRic0.
  SpectrumInfo hessian_spectrum_coindex(const HomogeneousSpace& space, const InvariantBasis& basis,
                                        const Mat& P, const EinsteinConfig& config = {});

  SpectrumInfo hessian_spectrum_coindex(const DiagonalScalModel& model, const Vec& lambda,
                                        const EinsteinConfig& config = {});

  /// Multi-seed wrapper; deduplicates up to the supplied module relabelings
  /// and returns points sorted by tscal, then lexicographically.
  std::vector<EinsteinPoint> find_einstein_multiseed(const HomogeneousSpace& space,
                                                     const InvariantBasis& basis, int n_seeds,
                                                     const EinsteinConfig& config,
                                                     const std::vector<std::vector<int>>& permutations,
                                                     std::uint64_t rng_seed = 20260809ull);

  std::vector<EinsteinPoint> find_einstein_multiseed(const DiagonalScalModel& model, int n_seeds,
                                                     const EinsteinConfig& config,
                                                     const std::vector<std::vector<int>>& permutations,
                                                     std::uint64_t rng_seed = 20260809ull);

} // namespace rflab

#endif
