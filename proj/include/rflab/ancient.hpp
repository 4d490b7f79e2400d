#ifndef RFLAB_ANCIENT_HPP
#define RFLAB_ANCIENT_HPP

#include "rflab/einstein.hpp"

namespace rflab
{

  /// Linearization data of the projected flow at the collapsed fixed point
  /// 0 (+) P_n-bar, restricted to the sphere tangent.
  struct CollapsedFixedPoint
  {
    ProjectedFlowContext ctx;
    int nu = 0;              ///< dim Sym(t)^{Ad(H)}
    int q = 0;               ///< coindex of the base Einstein metric
    double lambda = 0.0;

    Mat tangent_basis;       ///< sub-coeff space -> sphere tangent, orthonormal columns
    Mat A;                   ///< -2 dR in tangent coordinates (block lower triangular)

    Vec unstable_eigenvalues;///< one per unstable mode; first nu are 2*lambda
    Mat unstable_basis;      ///< sub-coeff columns spanning the unstable subspace
    int n_vertical = 0;      ///< leading columns with prescribed Sym(t) component

    double fixed_point_residual = 0.0; ///< |R(0+P_n-bar)|
    double t_block_residual = 0.0;     ///< |dR_t + lambda Id|
    double triangular_residual = 0.0;  ///< |t-rows of dR over horizontal inputs|

    int unstable_dim() const { return static_cast<int>(unstable_eigenvalues.size()); }
  };

  /// Assembles dR = dRic - <<dRic, P0>> P0 - lambda B from the analytic Ricci
  /// differential, verifies the block identities and extracts the unstable
  /// spectrum. Throws numerical_error when the unstable count is not nu + q.
  CollapsedFixedPoint linearize_at_collapse(const HomogeneousSpace& space,
                                            const InvariantBasis& basis,
                                            const EinsteinPoint& base_point);

  struct ShootConfig
  {
    double eps = 1e-6;            ///< perturbation size, in [1e-8, 1e-3]
    double backward_horizon = 40.0;
    double forward_horizon = 50.0;
    double prox_tol = 1e-9;       ///< backward re-convergence certificate
    double fiber_stop = 1e-8;     ///< stop backward once the fiber is this thin
    double divergence_factor = 20.0;
    IntegratorConfig ode{1e-12, 1e-12, 0.25, 1e-3, 0.0, 1e-10, 0.0};
  };

  struct AncientCandidate
  {
    Vec direction;          ///< unit coefficients over the unstable basis
    double eps = 0.0;
    bool accepted = false;
    bool degenerate_vertical = false; ///< P_t identically zero (base flow only)
    std::string rejection;  ///< set when not accepted

    FlowTrajectory backward;
    FlowTrajectory forward;

    double min_distance = 0.0;       ///< closest backward approach to the fixed point
    double time_of_min = 0.0;
    double backward_decay_rate = 0.0;
    double matched_eigenvalue = 0.0;
    double rate_mismatch = 1.0;      ///< relative, against the nearest unstable eigenvalue
    double scal_limit_error = 0.0;   ///< |scal_M(end) - lambda dim N|
    double fiber_diameter_final = 0.0;
    double pn_deviation_final = 0.0;
    double min_eig_t_backward = 0.0; ///< smallest P_t eigenvalue seen backward
    double log_sigma_slope = 0.0;
    double s_range_min = 0.0;
    double positivity_time = 0.0;    ///< forward time of positivity loss (horizon if none)
  };

  /// Shoots from P0 = renormalize(0 + P_n-bar + eps * sum c_i v_i): backward
  /// until re-convergence and fiber collapse (or horizon), forward until
  /// positivity loss (or horizon). Rejects when the t-component of the
  /// perturbation is not positive semidefinite or the backward run diverges.
  AncientCandidate shoot_ancient(const HomogeneousSpace& space, const InvariantBasis& basis,
                                 const CollapsedFixedPoint& fp, const Vec& c, double eps,
                                 const ShootConfig& config = {});

  struct CertificateItem
  {
    std::string name;
    double value = 0.0;
    double threshold = 0.0;
    bool passed = false;
  };

  struct CollapseReport
  {
    std::vector<CertificateItem> items;
    bool collapsing_ancient = false;
    bool degenerate_vertical = false;
  };

  /// Evaluates the four collapse certificates on an accepted candidate.
  CollapseReport verify_collapse(const AncientCandidate& candidate,
                                 const CollapsedFixedPoint& fp);

  struct FamilyScan
  {
    std::vector<AncientCandidate> candidates;
    int accepted = 0;
    int rejected = 0;
    int degenerate = 0;
    int family_dimension = 0; ///< unstable dim - 1 (time translation removed)
  };

  /// Shoots a deterministic sample of directions on the unit sphere of the
  /// unstable space; per-point failures are recorded, never thrown.
  FamilyScan family_scan(const HomogeneousSpace& space, const InvariantBasis& basis,
                         const CollapsedFixedPoint& fp, int n_points, double eps,
                         const ShootConfig& config = {}, std::uint64_t rng_seed = 20260809ull);

} // namespace rflab

#endif
