#include "rflab/homogeneous_space.hpp"

#include <Eigen/SVD>

namespace rflab
{

  Mat Frame::ad_m(const Vec& v) const
  {
    Mat A = Mat::Zero(m(), m());
    for (int a = 0; a < m(); ++a)
      A += v(a) * Lm[a];
    return A;
  }

  HomogeneousSpace::HomogeneousSpace(LieAlgebraSpec algebra,
                                     Mat h_basis,
                                     std::vector<Mat> isotropy_generators,
                                     std::vector<std::vector<int>> modules,
                                     std::optional<int> toral_split,
                                     std::string id)
    : m_algebra(std::move(algebra)),
      m_h_basis(std::move(h_basis)),
      m_generators(std::move(isotropy_generators)),
      m_modules(std::move(modules)),
      m_toral_split(toral_split),
      m_id(std::move(id))
  {
    const int n = m_algebra.dim();
    if (m_h_basis.size() == 0)
      m_h_basis = Mat::Zero(n, 0);
    if (m_h_basis.rows() != n)
      throw input_error("HomogeneousSpace: h_basis has wrong row count");
    int m_count = 0;
    for (const auto& mod : m_modules) {
      if (mod.empty())
        throw input_error("HomogeneousSpace: empty module");
      for (int idx : mod)
        if (idx < 0 || idx >= n)
          throw input_error("HomogeneousSpace: module index out of range");
      m_count += static_cast<int>(mod.size());
    }
    if (m_count + m_h_basis.cols() != n)
      throw input_error("HomogeneousSpace: h_basis and modules do not fill the algebra");
    if (m_toral_split && (*m_toral_split < 1 || *m_toral_split >= static_cast<int>(m_modules.size())))
      throw input_error("HomogeneousSpace: toral_split out of range");
    for (const Mat& g : m_generators)
      if (g.rows() != n || g.cols() != n)
        throw input_error("HomogeneousSpace: isotropy generator has wrong shape");
    build_frame();
  }

  void HomogeneousSpace::build_frame()
  {
    const int n = m_algebra.dim();
    const Mat& Q = m_algebra.Q();

    // Modified Gram-Schmidt under Q over [h_basis | module vectors].
    std::vector<Vec> raw;
    for (int j = 0; j < m_h_basis.cols(); ++j)
      raw.push_back(m_h_basis.col(j));
    std::vector<int> mod_sizes;
    for (const auto& mod : m_modules) {
      mod_sizes.push_back(static_cast<int>(mod.size()));
      for (int idx : mod)
        raw.push_back(Vec::Unit(n, idx));
    }
    std::vector<Vec> ortho;
    ortho.reserve(raw.size());
    for (const Vec& v0 : raw) {
      Vec v = v0;
      for (const Vec& u : ortho)
        v -= (u.transpose() * Q * v)(0) * u;
      double nrm = std::sqrt((v.transpose() * Q * v)(0));
      if (nrm < 1e-12)
        throw input_error("HomogeneousSpace: h_basis/module vectors are linearly dependent");
      ortho.push_back(v / nrm);
    }

    const int nh = static_cast<int>(m_h_basis.cols());
    const int m = n - nh;
    m_frame.h_cols.resize(n, nh);
    for (int j = 0; j < nh; ++j)
      m_frame.h_cols.col(j) = ortho[j];
    m_frame.m_cols.resize(n, m);
    for (int a = 0; a < m; ++a)
      m_frame.m_cols.col(a) = ortho[nh + a];

    m_frame.module_offset.clear();
    m_frame.module_dim = mod_sizes;
    int off = 0;
    for (int d : mod_sizes) {
      m_frame.module_offset.push_back(off);
      off += d;
    }
    if (m_toral_split) {
      m_frame.toral_modules = *m_toral_split;
      m_frame.t_dim = 0;
      for (int i = 0; i < *m_toral_split; ++i)
        m_frame.t_dim += mod_sizes[i];
    }

    // Bracket tensor in the frame.
    const Mat& H = m_frame.h_cols;
    const Mat& M = m_frame.m_cols;
    m_frame.Lm.assign(m, Mat::Zero(m, m));
    m_frame.Lh.assign(m, Mat::Zero(nh, m));
    for (int a = 0; a < m; ++a) {
      Mat adfa = m_algebra.ad(M.col(a)); // in defining basis
      Mat brm = adfa * M;                // [f_a, f_b] columns
      Mat Qbrm = Q * brm;
      m_frame.Lm[a] = M.transpose() * Qbrm;
      if (nh > 0)
        m_frame.Lh[a] = H.transpose() * Qbrm;
    }
    m_frame.adh.assign(nh, Mat::Zero(m, m));
    for (int j = 0; j < nh; ++j) {
      Mat adj = m_algebra.ad(H.col(j));
      m_frame.adh[j] = M.transpose() * Q * adj * M;
    }
    m_frame.gens_m.clear();
    for (const Mat& g : m_generators)
      m_frame.gens_m.push_back(M.transpose() * Q * g * M);
  }

  ValidationReport HomogeneousSpace::validate() const
  {
    ValidationReport rep;
    const int n = m_algebra.dim();
    const Mat& Q = m_algebra.Q();

    rep.checks.push_back({"algebra.antisymmetry", m_algebra.antisymmetry_residual(), kTolAlg});
    rep.checks.push_back({"algebra.jacobi", m_algebra.jacobi_residual(), kTolAlg});
    rep.checks.push_back({"algebra.Q_ad_invariance", m_algebra.ad_invariance_residual(), kTolAlg});

    // m is the Q-orthogonal complement of h (raw module vectors vs raw h).
    double r_orth = 0.0;
    for (const auto& mod : m_modules)
      for (int idx : mod)
        for (int j = 0; j < m_h_basis.cols(); ++j)
          r_orth = std::max(r_orth, std::abs((m_h_basis.col(j).transpose() * Q * Vec::Unit(n, idx))(0)));
    rep.checks.push_back({"space.m_orthogonal_to_h", r_orth, kTolAlg});

    // Each module is ad(h)-invariant and generator-invariant. Work in the frame:
    // a module is invariant iff the image of its columns has no component in
    // the other m-blocks or in h.
    const Frame& F = m_frame;
    const int m = F.m();
    double r_adh = 0.0, r_gen = 0.0;
    for (int i = 0; i < F.n_modules(); ++i) {
      int o = F.module_offset[i], d = F.module_dim[i];
      for (int j = 0; j < F.nh(); ++j) {
        Mat img = F.adh[j].middleCols(o, d);
        for (int row = 0; row < m; ++row)
          if (row < o || row >= o + d)
            r_adh = std::max(r_adh, img.row(row).cwiseAbs().maxCoeff());
      }
      for (const Mat& g : F.gens_m) {
        Mat img = g.middleCols(o, d);
        for (int row = 0; row < m; ++row)
          if (row < o || row >= o + d)
            r_gen = std::max(r_gen, img.row(row).cwiseAbs().maxCoeff());
      }
    }
    rep.checks.push_back({"space.modules_ad_h_invariant", r_adh, kTolAlg});
    if (!F.gens_m.empty())
      rep.checks.push_back({"space.modules_generator_invariant", r_gen, kTolAlg});

    // Generators must be Q-orthogonal and preserve h.
    double r_go = 0.0;
    for (const Mat& g : m_generators) {
      r_go = std::max(r_go, (g.transpose() * Q * g - Q).cwiseAbs().maxCoeff());
      for (int j = 0; j < m_h_basis.cols(); ++j) {
        Vec img = g * m_h_basis.col(j);
        Vec coords_m = F.m_cols.transpose() * Q * img;
        r_go = std::max(r_go, coords_m.cwiseAbs().maxCoeff());
      }
    }
    if (!m_generators.empty())
      rep.checks.push_back({"space.generators_orthogonal_preserve_h", r_go, kTolAlg});

    if (m_toral_split) {
      // [t,t] in h and [h+t, t] in h (toral H-subalgebra conditions).
      const int td = F.t_dim;
      double r_tt = 0.0;
      for (int a = 0; a < td; ++a)
        for (int b = 0; b < td; ++b)
          r_tt = std::max(r_tt, F.Lm[a].col(b).cwiseAbs().maxCoeff());
      rep.checks.push_back({"space.toral_t_t_in_h", r_tt, kTolAlg});

      double r_kt = 0.0;
      for (int j = 0; j < F.nh(); ++j)
        r_kt = std::max(r_kt, F.adh[j].middleCols(0, td).cwiseAbs().maxCoeff());
      // [t,t]_m already covered; [t,n] components landing in t would violate
      // ad(k)-invariance of n:
      for (int a = 0; a < td; ++a)
        r_kt = std::max(r_kt, F.Lm[a].block(0, td, td, m - td).cwiseAbs().maxCoeff());
      rep.checks.push_back({"space.toral_k_t_in_h", std::max(r_kt, r_tt), kTolAlg});

      // Maximality: no vector of n is killed by all of ad(k).
      const int nd = m - td;
      Mat stacked((F.nh() + td) * nd, nd);
      int row = 0;
      for (int j = 0; j < F.nh(); ++j) {
        stacked.middleRows(row, nd) = F.adh[j].bottomRightCorner(nd, nd);
        row += nd;
      }
      for (int a = 0; a < td; ++a) {
        stacked.middleRows(row, nd) = F.Lm[a].bottomRightCorner(nd, nd);
        row += nd;
      }
      Eigen::JacobiSVD<Mat> svd(stacked);
      int kernel = 0;
      for (int i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()(i) < 1e-8) ++kernel;
      if (stacked.rows() == 0) kernel = nd;
      rep.checks.push_back({"space.toral_maximality_kernel_dim", static_cast<double>(kernel), kTolAlg});
    }
    return rep;
  }

  HomogeneousSpace HomogeneousSpace::base_space() const
  {
    if (!m_toral_split)
      throw input_error("base_space: no toral split");
    const int n = m_algebra.dim();
    const int r = *m_toral_split;

    Mat k_basis(n, 0);
    std::vector<Vec> kcols;
    for (int j = 0; j < m_h_basis.cols(); ++j)
      kcols.push_back(m_h_basis.col(j));
    for (int i = 0; i < r; ++i)
      for (int idx : m_modules[i])
        kcols.push_back(Vec::Unit(n, idx));
    k_basis.resize(n, static_cast<int>(kcols.size()));
    for (size_t j = 0; j < kcols.size(); ++j)
      k_basis.col(static_cast<int>(j)) = kcols[j];

    std::vector<std::vector<int>> n_modules(m_modules.begin() + r, m_modules.end());
    return HomogeneousSpace(m_algebra, k_basis, m_generators, n_modules, std::nullopt,
                            m_id.empty() ? "" : m_id + ".base");
  }

  std::vector<Mat> triple_coefficients(const HomogeneousSpace& space)
  {
    const Frame& F = space.frame();
    const int L = F.n_modules();
    std::vector<Mat> T(L, Mat::Zero(L, L));
    auto module_of = [&](int a) {
      for (int i = 0; i < L; ++i)
        if (a >= F.module_offset[i] && a < F.module_offset[i] + F.module_dim[i])
          return i;
      return -1;
    };
    for (int a = 0; a < F.m(); ++a) {
      int i = module_of(a);
      for (int b = 0; b < F.m(); ++b) {
        int j = module_of(b);
        for (int c = 0; c < F.m(); ++c) {
          double v = F.Lm[a](c, b);
          T[i](j, module_of(c)) += v * v;
        }
      }
    }
    return T;
  }

} // namespace rflab
