#ifndef RFLAB_HOMOGENEOUS_SPACE_HPP
#define RFLAB_HOMOGENEOUS_SPACE_HPP

#include "rflab/lie_algebra.hpp"

#include <memory>
#include <optional>
#include <string>

namespace rflab
{

  /// One line of a validation report.
  struct ValidationCheck
  {
    std::string name;
    double residual = 0.0;
    double tolerance = kTolAlg;
    bool passed() const { return residual <= tolerance; }
  };

  struct ValidationReport
  {
    std::vector<ValidationCheck> checks;
    bool passed() const
    {
      for (const auto& c : checks)
        if (!c.passed()) return false;
      return true;
    }
    double max_residual() const
    {
      double r = 0.0;
      for (const auto& c : checks) r = std::max(r, c.residual);
      return r;
    }
  };

  /// Q-orthonormal working basis adapted to g = h + m and to the module
  /// decomposition of m, with the bracket tensor cached in frame coordinates.
  ///
  /// All curvature code works in this frame, where Q = Id and the projected
  /// bracket coefficients are totally antisymmetric.
  struct Frame
  {
    Mat h_cols;                    ///< dim x nh, Q-orthonormal basis of h
    Mat m_cols;                    ///< dim x m, Q-orthonormal basis of m
    std::vector<int> module_offset;///< offsets of the modules inside the m-frame
    std::vector<int> module_dim;
    int toral_modules = 0;         ///< first r modules span t (0 = no split)
    int t_dim = 0;                 ///< dim t (0 = no split)

    int nh() const { return static_cast<int>(h_cols.cols()); }
    int m() const { return static_cast<int>(m_cols.cols()); }
    int n_modules() const { return static_cast<int>(module_dim.size()); }
    int n_dim() const { return m() - t_dim; }

    /// Lm[a](c,b) = Q([f_a, f_b]_m, f_c), all indices in the m-frame.
    std::vector<Mat> Lm;
    /// Lh[a](j,b) = Q([f_a, f_b], h_j).
    std::vector<Mat> Lh;
    /// adh[j](c,b) = Q([h_j, f_b], f_c), the representation of h on m.
    std::vector<Mat> adh;
    /// Isotropy generators restricted to the m-frame (orthogonal matrices).
    std::vector<Mat> gens_m;

    /// ad(v)|_m projected to m, for v given in m-frame coordinates.
    Mat ad_m(const Vec& v) const;
  };

  /// A homogeneous space G/H described by algebra data: isotropy subalgebra,
  /// reductive complement modules and an optional toral split m = t + n.
  ///
  /// Immutable after construction; every member function is const.
  class HomogeneousSpace
  {
  public:
    /// modules: groups of indices into the defining basis; their union spans m.
    /// toral_split r: the first r modules span t, the rest span n.
    HomogeneousSpace(LieAlgebraSpec algebra,
                     Mat h_basis,
                     std::vector<Mat> isotropy_generators,
                     std::vector<std::vector<int>> modules,
                     std::optional<int> toral_split,
                     std::string id = "");

    const LieAlgebraSpec& algebra() const { return m_algebra; }
    const Mat& h_basis() const { return m_h_basis; }
    const std::vector<Mat>& isotropy_generators() const { return m_generators; }
    const std::vector<std::vector<int>>& modules() const { return m_modules; }
    std::optional<int> toral_split() const { return m_toral_split; }
    const std::string& id() const { return m_id; }

    const Frame& frame() const { return m_frame; }
    int dim_m() const { return m_frame.m(); }
    bool has_toral_split() const { return m_toral_split.has_value(); }

    /// Runs every invariance check on the data; failures are report entries.
    ValidationReport validate() const;

    /// The base N = G/K of the torus fibration, K generated by H and t.
    /// Requires a toral split.
    HomogeneousSpace base_space() const;

  private:
    LieAlgebraSpec m_algebra;
    Mat m_h_basis;
    std::vector<Mat> m_generators;
    std::vector<std::vector<int>> m_modules;
    std::optional<int> m_toral_split;
    std::string m_id;
    Frame m_frame;

    void build_frame();
  };

  /// [ijk] = sum over adapted-basis triples of Q([e_a,e_b],e_c)^2, one value
  /// per (module,module,module); fully symmetric and basis independent.
  std::vector<Mat> triple_coefficients(const HomogeneousSpace& space);

} // namespace rflab

#endif
