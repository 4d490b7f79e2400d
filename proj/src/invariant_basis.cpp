#include "rflab/invariant_basis.hpp"

#include <Eigen/SVD>
#include <sstream>

namespace rflab
{

  Vec InvariantBasis::pack(const Mat& B) const
  {
    Vec y(dim());
    for (int i = 0; i < dim(); ++i)
      y(i) = trace_pair(B, elements[i]);
    return y;
  }

  Mat InvariantBasis::unpack(const Vec& y) const
  {
    Mat B = Mat::Zero(ambient(), ambient());
    for (int i = 0; i < dim(); ++i)
      B += y(i) * elements[i];
    return B;
  }

  Mat InvariantBasis::unpack_sub(const Vec& y_sub) const
  {
    Mat B = Mat::Zero(ambient(), ambient());
    for (int i = 0; i < sub_dim(); ++i)
      B += y_sub(i) * elements[i];
    return B;
  }

  Vec InvariantBasis::lambda_from_coeff(const Vec& y) const
  {
    if (!module_diagonal)
      throw input_error("lambda coordinates require a module-diagonal basis");
    Vec lam(dim());
    for (int i = 0; i < dim(); ++i)
      lam(i) = y(i) / std::sqrt(static_cast<double>(module_dims[i]));
    return lam;
  }

  Vec InvariantBasis::coeff_from_lambda(const Vec& lambda) const
  {
    if (!module_diagonal)
      throw input_error("lambda coordinates require a module-diagonal basis");
    Vec y(dim());
    for (int i = 0; i < dim(); ++i)
      y(i) = lambda(i) * std::sqrt(static_cast<double>(module_dims[i]));
    return y;
  }

  namespace
  {

    // Orthonormal basis of symmetric k x k matrices under the trace pairing.
    std::vector<Mat> sym_units(int k)
    {
      std::vector<Mat> out;
      for (int i = 0; i < k; ++i)
        for (int j = i; j < k; ++j) {
          Mat E = Mat::Zero(k, k);
          if (i == j)
            E(i, i) = 1.0;
          else
            E(i, j) = E(j, i) = 1.0 / std::sqrt(2.0);
          out.push_back(E);
        }
      return out;
    }

    // Null space of the commutation/conjugation constraints on Sym(k), where
    // ops_comm act by commutator and ops_conj by g . E . g^T - E.
    std::vector<Mat> invariant_null_space(int k,
                                          const std::vector<Mat>& ops_comm,
                                          const std::vector<Mat>& ops_conj)
    {
      const auto units = sym_units(k);
      const int s = static_cast<int>(units.size());
      const int rows = static_cast<int>(ops_comm.size() + ops_conj.size()) * k * k;
      if (rows == 0)
        return units;
      Mat C(rows, s);
      for (int col = 0; col < s; ++col) {
        int r = 0;
        for (const Mat& A : ops_comm) {
          Mat v = units[col] * A - A * units[col];
          C.block(r, col, k * k, 1) = Eigen::Map<Vec>(v.data(), k * k);
          r += k * k;
        }
        for (const Mat& g : ops_conj) {
          Mat v = g * units[col] * g.transpose() - units[col];
          C.block(r, col, k * k, 1) = Eigen::Map<Vec>(v.data(), k * k);
          r += k * k;
        }
      }
      Eigen::JacobiSVD<Mat> svd(C, Eigen::ComputeFullV);
      const Vec sv = svd.singularValues();
      const double scale = std::max(1.0, sv.size() > 0 ? sv(0) : 1.0);
      const double thr = 1e-9 * scale;
      for (int i = 0; i < sv.size(); ++i)
        if (sv(i) > 0.1 * thr && sv(i) < 10.0 * thr) {
          std::ostringstream os;
          os << "invariant_sym_basis: ambiguous rank, singular value " << sv(i)
             << " near threshold " << thr;
          throw numerical_error(os.str());
        }
      std::vector<Mat> out;
      for (int i = 0; i < sv.size(); ++i)
        if (sv(i) <= thr) {
          Vec ycol = svd.matrixV().col(i);
          Mat E = Mat::Zero(k, k);
          for (int j = 0; j < s; ++j)
            E += ycol(j) * units[j];
          out.push_back(E);
        }
      // account for columns beyond the number of singular values (thin SVD)
      for (int i = static_cast<int>(sv.size()); i < s; ++i) {
        Vec ycol = svd.matrixV().col(i);
        Mat E = Mat::Zero(k, k);
        for (int j = 0; j < s; ++j)
          E += ycol(j) * units[j];
        out.push_back(E);
      }
      return out;
    }

    double constraint_residual(const Mat& E,
                               const std::vector<Mat>& ops_comm,
                               const std::vector<Mat>& ops_conj)
    {
      double r = 0.0;
      for (const Mat& A : ops_comm)
        r = std::max(r, (E * A - A * E).cwiseAbs().maxCoeff());
      for (const Mat& g : ops_conj)
        r = std::max(r, (g * E * g.transpose() - E).cwiseAbs().maxCoeff());
      return r;
    }

    // Gram-Schmidt under the trace pairing; drops near-dependent vectors.
    std::vector<Mat> trace_orthonormalize(const std::vector<Mat>& in)
    {
      std::vector<Mat> out;
      for (Mat E : in) {
        for (const Mat& U : out)
          E -= trace_pair(E, U) * U;
        double nrm = std::sqrt(trace_pair(E, E));
        if (nrm > 1e-9)
          out.push_back(E / nrm);
      }
      return out;
    }

  } // namespace

  InvariantBasis invariant_sym_basis(const HomogeneousSpace& space)
  {
    const Frame& F = space.frame();
    const int m = F.m();

    std::vector<Mat> comm = F.adh;
    const std::vector<Mat>& conj = F.gens_m;
    std::vector<Mat> full = invariant_null_space(m, comm, conj);
    const int D = static_cast<int>(full.size());

    InvariantBasis basis;
    basis.module_dims = F.module_dim;

    // Module-diagonal shortcut: the natural per-module scaling coordinates.
    // Used whenever the module identities exhaust the invariant space.
    if (D == F.n_modules()) {
      std::vector<Mat> cand;
      bool ok = true;
      for (int i = 0; i < F.n_modules() && ok; ++i) {
        Mat E = Mat::Zero(m, m);
        int o = F.module_offset[i], d = F.module_dim[i];
        E.block(o, o, d, d) = Mat::Identity(d, d) / std::sqrt(static_cast<double>(d));
        if (constraint_residual(E, comm, conj) > 1e-9)
          ok = false;
        cand.push_back(E);
      }
      if (ok) {
        basis.elements = cand;
        basis.module_diagonal = true;
        if (space.has_toral_split()) {
          basis.nu = F.toral_modules;
          basis.n_sub = F.n_modules() - F.toral_modules;
        }
        return basis;
      }
    }

    if (!space.has_toral_split()) {
      basis.elements = trace_orthonormalize(full);
      return basis;
    }

    // Block organization for split spaces.
    const int td = F.t_dim;
    const int nd = m - td;

    std::vector<Mat> comm_t, conj_t;
    for (const Mat& A : F.adh) comm_t.push_back(A.topLeftCorner(td, td));
    for (const Mat& g : conj) conj_t.push_back(g.topLeftCorner(td, td));
    std::vector<Mat> t_block = invariant_null_space(td, comm_t, conj_t);

    std::vector<Mat> comm_n, conj_n;
    for (const Mat& A : F.adh) comm_n.push_back(A.bottomRightCorner(nd, nd));
    for (int a = 0; a < td; ++a)
      comm_n.push_back(F.Lm[a].bottomRightCorner(nd, nd)); // ad(t)|_n
    for (const Mat& g : conj) conj_n.push_back(g.bottomRightCorner(nd, nd));
    std::vector<Mat> n_block = invariant_null_space(nd, comm_n, conj_n);

    // Prefer module-identity representatives inside each block when they span it.
    auto prefer_identities = [&](std::vector<Mat>& blk, int first_mod, int last_mod, int off0) {
      if (static_cast<int>(blk.size()) != last_mod - first_mod) return;
      std::vector<Mat> cand;
      for (int i = first_mod; i < last_mod; ++i) {
        int o = F.module_offset[i] - off0, d = F.module_dim[i];
        Mat E = Mat::Zero(blk[0].rows(), blk[0].cols());
        E.block(o, o, d, d) = Mat::Identity(d, d) / std::sqrt(static_cast<double>(d));
        cand.push_back(E);
      }
      // candidates must lie in the computed span
      for (const Mat& E : cand) {
        Mat res = E;
        for (const Mat& U : blk)
          res -= trace_pair(E, U) / trace_pair(U, U) * U;
        if (res.cwiseAbs().maxCoeff() > 1e-8) return;
      }
      blk = cand;
    };
    prefer_identities(n_block, F.toral_modules, F.n_modules(), td);

    basis.nu = static_cast<int>(t_block.size());
    basis.n_sub = static_cast<int>(n_block.size());

    std::vector<Mat> ordered;
    for (const Mat& Et : trace_orthonormalize(t_block)) {
      Mat E = Mat::Zero(m, m);
      E.topLeftCorner(td, td) = Et;
      ordered.push_back(E);
    }
    for (const Mat& En : trace_orthonormalize(n_block)) {
      Mat E = Mat::Zero(m, m);
      E.bottomRightCorner(nd, nd) = En;
      ordered.push_back(E);
    }
    // complement inside the full invariant space
    for (const Mat& E : full) {
      Mat res = E;
      for (const Mat& U : ordered)
        res -= trace_pair(res, U) * U;
      double nrm = std::sqrt(trace_pair(res, res));
      if (nrm > 1e-8)
        ordered.push_back(res / nrm);
    }
    basis.elements = ordered;

    // consistency: the block elements must be invariant for the full action
    for (const Mat& E : basis.elements)
      if (constraint_residual(E, comm, conj) > 1e-7)
        throw numerical_error("invariant_sym_basis: block element violates invariance");
    if (static_cast<int>(basis.elements.size()) != D)
      throw numerical_error("invariant_sym_basis: block organization lost dimensions");
    return basis;
  }

} // namespace rflab
