#ifndef RFLAB_FLOW_HPP
#define RFLAB_FLOW_HPP

#include "rflab/curvature.hpp"
#include "rflab/invariant_basis.hpp"

#include <functional>

namespace rflab
{

  struct IntegratorConfig
  {
    double rel_tol = 1e-10;
    double abs_tol = 1e-10;
    double max_step = 0.1;
    double initial_step = 1e-3;
    double horizon = 10.0;   ///< integration span (always positive)
    double pos_tol = 1e-10;  ///< positivity-loss stop threshold
    double fixed_point_tol = 0.0; ///< stop when the state stalls; 0 disables
  };

  enum class StopReason
  {
    horizon,
    positivity_loss,
    fixed_point,
    step_underflow,
    callback
  };

  const char* to_string(StopReason r);

  struct StepDiagnostics
  {
    double scal = 0.0;
    double norm = 0.0;
    double min_eig_t = 0.0;
    double fiber_diameter = 0.0;
    double rho = 0.0;
  };

  struct FlowTrajectory
  {
    std::vector<double> times;
    std::vector<Vec> states;
    std::vector<StepDiagnostics> diagnostics;
    StopReason stop = StopReason::horizon;
    std::string message;

    int steps() const { return static_cast<int>(times.size()); }
    const Vec& last_state() const { return states.back(); }
    double last_time() const { return times.back(); }
  };

  enum class Direction { forward, backward };

  /// Background data of the projected flow: the unit-volume Einstein base
  /// metric, its Einstein constant and the inner product it induces on the
  /// generalized submersion space.
  struct ProjectedFlowContext
  {
    Mat base_metric;  ///< P_n-bar on n, frame coordinates
    double lambda = 0.0;
    int dim_n = 0;
    Mat J;            ///< Id_t (+) base_metric^{-1}, embedded m x m
    Mat gram;         ///< <<E_i, E_j>> over the submersion sub-basis
    Vec y0;           ///< sub-coefficients of 0 (+) P_n-bar

    double inner(const Mat& B1, const Mat& B2) const
    {
      return (J * B1 * J * B2).trace() / dim_n;
    }
    double inner_coeff(const Vec& a, const Vec& b) const { return a.dot(gram * b); }
  };

  /// Builds the context and verifies that base_metric is unit-volume Einstein.
  ProjectedFlowContext make_projected_context(const HomogeneousSpace& space,
                                              const InvariantBasis& basis,
                                              const Mat& base_metric);

  /// P' = -2 Ric(P). States are coefficient vectors in the full basis.
  FlowTrajectory ricci_flow(const HomogeneousSpace& space, const InvariantBasis& basis,
                            const Mat& P0, const IntegratorConfig& config,
                            Direction dir, double t0 = 0.0);

  /// P' = -2 Ric0(P) on the unit-determinant slice (renormalized each step).
  FlowTrajectory normalized_flow(const HomogeneousSpace& space, const InvariantBasis& basis,
                                 const Mat& P0, const IntegratorConfig& config,
                                 double t0 = 0.0);

  /// P' = -2 R(P) with R = Ric - (<<Ric,P>>/<<P,P>>) P, on the unit sphere of
  /// the context inner product. States are submersion sub-coefficients.
  /// extra_stop, if set, is polled after each accepted step.
  FlowTrajectory projected_flow(const HomogeneousSpace& space, const InvariantBasis& basis,
                                const ProjectedFlowContext& ctx, const SubmersionMetric& P0,
                                const IntegratorConfig& config, Direction dir, double t0 = 0.0,
                                const std::function<bool(double, const Vec&)>& extra_stop = {});

  struct RicciTimeReconstruction
  {
    std::vector<double> sigma;   ///< sigma(t) = exp(-2 int rho)
    std::vector<double> s;       ///< s(t) = int sigma
    double log_sigma_slope = 0.0;///< fitted d(log sigma)/dt on the far tail
    bool s_monotone = true;
  };

  /// Converts a projected-flow trajectory back to Ricci-flow time:
  /// Q(s) = sigma(t) P(t) solves Q' = -2 Ric(Q) in the reparametrized time s.
  RicciTimeReconstruction reconstruct_ricci_time(const FlowTrajectory& traj);

  /// Generic embedded Runge-Kutta 5(4) driver (Dormand-Prince pair), exposed
  /// for the exact-solution order checks. rhs may throw input_error to signal
  /// an inadmissible state; the step is then rejected and retried smaller.
  struct OdeHooks
  {
    std::function<void(double, Vec&)> postprocess;
    std::function<int(double, const Vec&)> stop; ///< nonzero = stop code
  };

  struct OdeResult
  {
    std::vector<double> t;
    std::vector<Vec> y;
    StopReason reason = StopReason::horizon;
    int stop_code = 0;
    std::string message;
  };

  OdeResult integrate_rk54(const std::function<Vec(double, const Vec&)>& rhs,
                           const Vec& y0, const IntegratorConfig& config,
                           const OdeHooks& hooks = {});

} // namespace rflab

#endif
