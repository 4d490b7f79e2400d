#include "rflab/catalog.hpp"

#include <algorithm>
#include <array>
#include <complex>
#include <numeric>
#include <sstream>

namespace rflab
{

  namespace
  {

    using CMat = Eigen::MatrixXcd;

    // Structure constants and Q = -Killing from a matrix realization of the
    // algebra. The basis must be orthogonal w.r.t. the trace form.
    LieAlgebraSpec from_matrices(const std::vector<CMat>& basis, double killing_factor)
    {
      const int n = static_cast<int>(basis.size());
      auto tr = [](const CMat& X, const CMat& Y) { return (X * Y).trace().real(); };
      Vec gram(n);
      for (int i = 0; i < n; ++i)
        gram(i) = -tr(basis[i], basis[i]);
      std::vector<Mat> c(n, Mat::Zero(n, n));
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          CMat br = basis[i] * basis[j] - basis[j] * basis[i];
          for (int k = 0; k < n; ++k)
            c[k](i, j) = -tr(br, basis[k]) / gram(k);
        }
      Mat Q = Mat::Zero(n, n);
      for (int i = 0; i < n; ++i)
        Q(i, i) = killing_factor * gram(i);
      return LieAlgebraSpec(std::move(c), std::move(Q));
    }

    std::vector<CMat> su_basis(int n, const std::vector<Eigen::VectorXd>& torus_dirs)
    {
      std::vector<CMat> basis;
      const std::complex<double> I(0.0, 1.0);
      for (const auto& d : torus_dirs) {
        CMat T = CMat::Zero(n, n);
        for (int i = 0; i < n; ++i)
          T(i, i) = I * d(i);
        basis.push_back(T);
      }
      for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) {
          CMat X = CMat::Zero(n, n), Y = CMat::Zero(n, n);
          X(a, b) = 1.0;
          X(b, a) = -1.0;
          Y(a, b) = I;
          Y(b, a) = I;
          basis.push_back(X);
          basis.push_back(Y);
        }
      return basis;
    }

    std::vector<Eigen::VectorXd> standard_torus(int n)
    {
      std::vector<Eigen::VectorXd> dirs;
      for (int k = 0; k < n - 1; ++k) {
        Eigen::VectorXd d = Eigen::VectorXd::Zero(n);
        for (int i = 0; i <= k; ++i) d(i) = 1.0;
        d(k + 1) = -(k + 1);
        dirs.push_back(d);
      }
      return dirs;
    }

    // --- algebras -----------------------------------------------------------

    LieAlgebraSpec make_su2()
    {
      const std::complex<double> I(0.0, 1.0);
      CMat e1 = CMat::Zero(2, 2), e2 = CMat::Zero(2, 2), e3 = CMat::Zero(2, 2);
      e1 << 0, 1, -1, 0;
      e2 << 0, I, I, 0;
      e3 << I, 0, 0, -I;
      // halved so that [e1,e2] = e3 cyclically
      return from_matrices({e1 / 2.0, e2 / 2.0, e3 / 2.0}, 2.0 * 2.0);
    }

    LieAlgebraSpec make_sun(int n, const std::vector<Eigen::VectorXd>& torus_dirs)
    {
      return from_matrices(su_basis(n, torus_dirs), 2.0 * n);
    }

    LieAlgebraSpec make_so4()
    {
      auto L = [](int a, int b) {
        CMat M = CMat::Zero(4, 4);
        M(a, b) = 1.0;
        M(b, a) = -1.0;
        return M;
      };
      std::vector<CMat> basis = {
        L(0, 1), L(2, 3),
        L(0, 2) - L(1, 3), L(0, 3) + L(1, 2),  // n1
        L(0, 2) + L(1, 3), L(0, 3) - L(1, 2)}; // n2
      return from_matrices(basis, 4.0 - 2.0);
    }

    // --- diagonal models ----------------------------------------------------

    using Triangle = std::pair<std::array<int, 3>, double>;

    DiagonalScalModel model_su3()
    {
      return DiagonalScalModel::from_triangles({2, 2, 2}, Vec::Ones(3), {{{0, 1, 2}, 1.0 / 3.0}});
    }

    DiagonalScalModel model_su4()
    {
      std::vector<Triangle> tri = {
        {{0, 1, 3}, 0.25}, {{0, 2, 4}, 0.25}, {{1, 2, 5}, 0.25}, {{3, 4, 5}, 0.25}};
      return DiagonalScalModel::from_triangles({2, 2, 2, 2, 2, 2}, Vec::Ones(6), tri);
    }

    DiagonalScalModel model_g2()
    {
      std::vector<Triangle> tri = {
        {{0, 2, 3}, 1.0 / 3.0},
        {{0, 1, 2}, 0.25}, {{0, 3, 4}, 0.25}, {{1, 4, 5}, 0.25}, {{2, 3, 5}, 0.25}};
      return DiagonalScalModel::from_triangles({2, 2, 2, 2, 2, 2}, Vec::Ones(6), tri);
    }

    DiagonalScalModel model_so4()
    {
      return DiagonalScalModel::from_triangles({2, 2}, Vec::Ones(2), {});
    }

    DiagonalScalModel model_sun_flag(int n)
    {
      const int L = n * (n - 1) / 2;
      auto pair_index = [n](int a, int b) {
        int idx = 0;
        for (int i = 0; i < n; ++i)
          for (int j = i + 1; j < n; ++j) {
            if (i == a && j == b) return idx;
            ++idx;
          }
        return -1;
      };
      std::vector<Triangle> tri;
      for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
          for (int c = b + 1; c < n; ++c)
            tri.push_back({{pair_index(a, b), pair_index(a, c), pair_index(b, c)}, 1.0 / n});
      return DiagonalScalModel::from_triangles(std::vector<int>(L, 2), Vec::Ones(L), tri);
    }

    // --- permutation groups -------------------------------------------------

    std::vector<std::vector<int>> sym_group(int n)
    {
      std::vector<int> p(n);
      std::iota(p.begin(), p.end(), 0);
      std::vector<std::vector<int>> out;
      do
        out.push_back(p);
      while (std::next_permutation(p.begin(), p.end()));
      return out;
    }

    // S_n acting on the lexicographic pair modules of a full flag.
    std::vector<std::vector<int>> pair_perms(int n)
    {
      std::vector<std::pair<int, int>> pairs;
      for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
          pairs.push_back({a, b});
      auto pair_index = [&](int a, int b) {
        if (a > b) std::swap(a, b);
        for (size_t i = 0; i < pairs.size(); ++i)
          if (pairs[i].first == a && pairs[i].second == b) return static_cast<int>(i);
        return -1;
      };
      std::vector<std::vector<int>> out;
      for (const auto& sigma : sym_group(n)) {
        std::vector<int> p(pairs.size());
        for (size_t i = 0; i < pairs.size(); ++i)
          p[i] = pair_index(sigma[pairs[i].first], sigma[pairs[i].second]);
        out.push_back(p);
      }
      std::sort(out.begin(), out.end());
      out.erase(std::unique(out.begin(), out.end()), out.end());
      return out;
    }

    // --- entry builders -----------------------------------------------------

    Vec vec3(double a, double b, double c)
    {
      Vec v(3);
      v << a, b, c;
      return v;
    }

    CatalogEntry entry_su2()
    {
      CatalogEntry e;
      e.id = "su2";
      e.description = "SU(2) as a homogeneous space, H = {e}";
      e.representation = "structure_constants";
      e.space = std::make_shared<HomogeneousSpace>(
        make_su2(), Mat(), std::vector<Mat>{},
        std::vector<std::vector<int>>{{0}, {1}, {2}}, std::nullopt, e.id);
      e.known_einstein.push_back({"round", Vec::Ones(3), "bi-invariant metric", 0});
      e.symmetry_permutations = {{0, 1, 2}};
      return e;
    }

    std::shared_ptr<const HomogeneousSpace> su3_space(bool with_torus_isotropy,
                                                      std::optional<int> split,
                                                      const std::string& id)
    {
      LieAlgebraSpec alg = make_sun(3, standard_torus(3));
      Mat h;
      std::vector<std::vector<int>> modules;
      if (with_torus_isotropy) {
        h = Mat::Zero(8, 2);
        h(0, 0) = 1.0;
        h(1, 1) = 1.0;
        modules = {{2, 3}, {4, 5}, {6, 7}};
      } else {
        modules = {{0}, {1}, {2, 3}, {4, 5}, {6, 7}};
      }
      return std::make_shared<HomogeneousSpace>(alg, h, std::vector<Mat>{}, modules, split, id);
    }

    CatalogEntry entry_su3_full_flag()
    {
      CatalogEntry e;
      e.id = "su3_full_flag";
      e.description = "full flag manifold SU(3)/T^2";
      e.representation = "structure_constants";
      e.space = su3_space(true, std::nullopt, e.id);
      e.model = std::make_shared<DiagonalScalModel>(model_su3());
      double c = std::cbrt(27.0 / 2.0) / 3.0;
      e.known_einstein.push_back({"ke", c * vec3(1, 1, 2), "Kaehler-Einstein metric", 1});
      e.known_einstein.push_back({"normal", vec3(1, 1, 1), "normal metric, coindex n-1", 2});
      e.symmetry_permutations = sym_group(3);
      return e;
    }

    CatalogEntry entry_su3_group()
    {
      CatalogEntry e;
      e.id = "su3_group";
      e.description = "torus fibration T^2 -> SU(3) -> SU(3)/T^2";
      e.representation = "structure_constants";
      e.space = su3_space(false, 2, e.id);
      e.symmetry_permutations = {{0, 1, 2, 3, 4}};
      e.family_dimension = 3;
      return e;
    }

    CatalogEntry entry_aloff_wallach(long p, long q)
    {
      CatalogEntry e;
      std::ostringstream os;
      os << "aloff_wallach(" << p << "," << q << ")";
      e.id = os.str();
      e.description = "Aloff-Wallach space SU(3)/S^1_{p,q} fibered over SU(3)/T^2";
      e.representation = "structure_constants";
      if (p == 0 && q == 0)
        throw input_error("aloff_wallach: (p,q) must be nonzero");

      LieAlgebraSpec alg = make_sun(3, {
        [&] { Eigen::VectorXd d(3); d << double(p), double(q), double(-p - q); return d; }(),
        [&] { Eigen::VectorXd d(3); d << double(p) + 2.0 * q, -(2.0 * p + q), double(p) - q; return d; }()});
      Mat h = Mat::Zero(8, 1);
      h(0, 0) = 1.0;
      std::vector<std::vector<int>> modules = {{1}, {2, 3}, {4, 5}, {6, 7}};
      e.space = std::make_shared<HomogeneousSpace>(alg, h, std::vector<Mat>{}, modules, 1, e.id);
      e.symmetry_permutations = {{0, 1, 2, 3}};
      e.family_dimension = 1;
      return e;
    }

    std::shared_ptr<const HomogeneousSpace> su4_space(int n_isotropy_torus,
                                                      std::optional<int> split,
                                                      const std::string& id,
                                                      const std::vector<Eigen::VectorXd>& torus)
    {
      LieAlgebraSpec alg = make_sun(4, torus);
      Mat h = Mat::Zero(15, n_isotropy_torus);
      for (int j = 0; j < n_isotropy_torus; ++j)
        h(j, j) = 1.0;
      std::vector<std::vector<int>> modules;
      for (int j = n_isotropy_torus; j < 3; ++j)
        modules.push_back({j});
      for (int k = 0; k < 6; ++k)
        modules.push_back({3 + 2 * k, 3 + 2 * k + 1});
      return std::make_shared<HomogeneousSpace>(alg, h, std::vector<Mat>{}, modules, split, id);
    }

    CatalogEntry entry_su4_full_flag()
    {
      CatalogEntry e;
      e.id = "su4_full_flag";
      e.description = "full flag manifold SU(4)/T^3";
      e.representation = "structure_constants";
      e.space = su4_space(3, std::nullopt, e.id, standard_torus(4));
      e.model = std::make_shared<DiagonalScalModel>(model_su4());
      double c = std::pow(1024.0 / 3.0, 1.0 / 6.0) / 4.0;
      Vec ke(6);
      ke << 3, 2, 1, 1, 2, 1;
      e.known_einstein.push_back({"ke", c * ke, "Kaehler-Einstein metric", 2});
      e.known_einstein.push_back({"normal", Vec::Ones(6), "normal metric, coindex n-1", 3});
      e.symmetry_permutations = pair_perms(4);
      return e;
    }

    CatalogEntry entry_su4_group()
    {
      CatalogEntry e;
      e.id = "su4_group";
      e.description = "torus fibration T^3 -> SU(4) -> SU(4)/T^3";
      e.representation = "structure_constants";
      e.space = su4_space(0, 3, e.id, standard_torus(4));
      e.symmetry_permutations = {{0, 1, 2, 3, 4, 5, 6, 7, 8}};
      e.family_dimension = 7;
      return e;
    }

    CatalogEntry entry_su4_s1_quotient()
    {
      CatalogEntry e;
      e.id = "su4_s1_quotient";
      e.description = "fibration T^2 -> SU(4)/S^1 -> SU(4)/T^3, slope (1,2,3,-6)";
      e.representation = "structure_constants";
      Eigen::VectorXd h(4);
      h << 1, 2, 3, -6;
      // orthogonalize the standard torus against h to get the T^2 directions
      std::vector<Eigen::VectorXd> dirs = {h};
      for (const auto& d0 : standard_torus(4)) {
        Eigen::VectorXd d = d0;
        for (const auto& u : dirs)
          d -= (u.dot(d) / u.dot(u)) * u;
        if (d.norm() > 1e-9)
          dirs.push_back(d);
      }
      e.space = su4_space(1, 2, e.id, dirs);
      e.symmetry_permutations = {{0, 1, 2, 3, 4, 5, 6, 7}};
      e.family_dimension = 4;
      return e;
    }

    CatalogEntry entry_su4_t2_quotient()
    {
      CatalogEntry e;
      e.id = "su4_t2_quotient";
      e.description = "fibration S^1 -> SU(4)/T^2 -> SU(4)/T^3";
      e.representation = "structure_constants";
      std::vector<Eigen::VectorXd> dirs(3, Eigen::VectorXd::Zero(4));
      dirs[0] << 1, -1, 0, 0;
      dirs[1] << 0, 0, 1, -1;
      dirs[2] << 1, 1, -1, -1;
      e.space = su4_space(2, 1, e.id, dirs);
      e.symmetry_permutations = {{0, 1, 2, 3, 4, 5, 6}};
      e.family_dimension = 2;
      return e;
    }

    CatalogEntry entry_g2_full_flag()
    {
      CatalogEntry e;
      e.id = "g2_full_flag";
      e.description = "full flag manifold G2/T^2 (diagonal scalar model)";
      e.representation = "diagonal_scalar_model";
      e.model = std::make_shared<DiagonalScalModel>(model_g2());
      double c = std::pow(4608.0 / 5.0, 1.0 / 6.0) / 12.0;
      Vec ke(6);
      ke << 1, 3, 4, 5, 6, 9;
      e.known_einstein.push_back({"ke", c * ke, "Kaehler-Einstein metric", 1});
      e.symmetry_permutations = {{0, 1, 2, 3, 4, 5}};
      return e;
    }

    std::shared_ptr<const HomogeneousSpace> so4_space(int n_isotropy_torus,
                                                      std::optional<int> split,
                                                      const std::string& id)
    {
      LieAlgebraSpec alg = make_so4();
      Mat h = Mat::Zero(6, n_isotropy_torus);
      for (int j = 0; j < n_isotropy_torus; ++j)
        h(j, j) = 1.0;
      std::vector<std::vector<int>> modules;
      for (int j = n_isotropy_torus; j < 2; ++j)
        modules.push_back({j});
      modules.push_back({2, 3});
      modules.push_back({4, 5});
      return std::make_shared<HomogeneousSpace>(alg, h, std::vector<Mat>{}, modules, split, id);
    }

    CatalogEntry entry_so4_full_flag()
    {
      CatalogEntry e;
      e.id = "so4_full_flag";
      e.description = "SO(4)/T^2 = S^2 x S^2";
      e.representation = "structure_constants";
      e.space = so4_space(2, std::nullopt, e.id);
      e.model = std::make_shared<DiagonalScalModel>(model_so4());
      Vec x(2);
      x << 1, 1;
      e.known_einstein.push_back({"normal", x, "normal metric", 1});
      e.symmetry_permutations = {{0, 1}, {1, 0}};
      return e;
    }

    CatalogEntry entry_so4_group()
    {
      CatalogEntry e;
      e.id = "so4_group";
      e.description = "torus fibration T^2 -> SO(4) -> SO(4)/T^2";
      e.representation = "structure_constants";
      e.space = so4_space(0, 2, e.id);
      e.symmetry_permutations = {{0, 1, 2, 3}};
      e.family_dimension = 3;
      return e;
    }

    CatalogEntry entry_so4_slope(long p, long q)
    {
      CatalogEntry e;
      std::ostringstream os;
      os << "so4_slope(" << p << "," << q << ")";
      e.id = os.str();
      e.description = "fibration S^1 -> SO(4)/S^1_{p,q} -> SO(4)/T^2";
      e.representation = "structure_constants";
      if (p == 0 && q == 0)
        throw input_error("so4_slope: (p,q) must be nonzero");
      // rotate the torus plane of the defining basis so that the isotropy
      // circle and its complement are basis vectors
      std::vector<CMat> raw;
      {
        auto L = [](int a, int b) {
          CMat M = CMat::Zero(4, 4);
          M(a, b) = 1.0;
          M(b, a) = -1.0;
          return M;
        };
        double nrm = std::sqrt(double(p * p + q * q));
        raw = {
          (double(p) * L(0, 1) + double(q) * L(2, 3)) / nrm,
          (double(q) * L(0, 1) - double(p) * L(2, 3)) / nrm,
          L(0, 2) - L(1, 3), L(0, 3) + L(1, 2),
          L(0, 2) + L(1, 3), L(0, 3) - L(1, 2)};
      }
      LieAlgebraSpec alg2 = from_matrices(raw, 2.0);
      Mat h2 = Mat::Zero(6, 1);
      h2(0, 0) = 1.0;
      std::vector<std::vector<int>> modules = {{1}, {2, 3}, {4, 5}};
      e.space = std::make_shared<HomogeneousSpace>(alg2, h2, std::vector<Mat>{}, modules, 1, e.id);
      e.symmetry_permutations = {{0, 1, 2}};
      e.family_dimension = 1;
      return e;
    }

    CatalogEntry entry_sun_flag(long n, long k)
    {
      CatalogEntry e;
      std::ostringstream os;
      os << "sun_flag(" << n << "," << k << ")";
      e.id = os.str();
      e.description = "SU(n)/T^{n-1} diagonal model; fibration parameter k";
      e.representation = "diagonal_scalar_model";
      if (n < 3)
        throw input_error("sun_flag: n >= 3 required");
      if (k < 1 || k > n - 1)
        throw input_error("sun_flag: 1 <= k <= n-1 required");
      e.model = std::make_shared<DiagonalScalModel>(model_sun_flag(static_cast<int>(n)));
      Vec ones = Vec::Ones(n * (n - 1) / 2);
      e.known_einstein.push_back(
        {"normal", ones, "normal metric; coindex n-1 recorded as external ground truth",
         static_cast<int>(n - 1)});
      e.symmetry_permutations = pair_perms(static_cast<int>(n));
      e.family_dimension = static_cast<int>(k * (k + 1) / 2 + n - 2);
      return e;
    }

  } // namespace

  const CatalogEntry::KnownEinstein& CatalogEntry::find_known(const std::string& tag) const
  {
    for (const auto& k : known_einstein)
      if (k.tag == tag) return k;
    throw input_error("catalog entry '" + id + "' has no known Einstein point tagged '" + tag + "'");
  }

  std::vector<std::string> catalog_ids()
  {
    return {"su2",
            "su3_full_flag", "su3_group", "aloff_wallach(1,1)",
            "su4_full_flag", "su4_group", "su4_s1_quotient", "su4_t2_quotient",
            "g2_full_flag",
            "so4_full_flag", "so4_group", "so4_slope(1,1)",
            "sun_flag(3,1)", "sun_flag(4,2)", "sun_flag(5,2)"};
  }

  std::vector<CatalogEntry> catalog()
  {
    std::vector<CatalogEntry> out;
    for (const auto& id : catalog_ids())
      out.push_back(catalog_entry(id));
    return out;
  }

  CatalogEntry catalog_entry(const std::string& id)
  {
    auto parse_params = [&](const std::string& prefix, long& a, long& b) -> bool {
      if (id.rfind(prefix + "(", 0) != 0 || id.back() != ')')
        return false;
      std::string inner = id.substr(prefix.size() + 1, id.size() - prefix.size() - 2);
      auto comma = inner.find(',');
      if (comma == std::string::npos)
        return false;
      try {
        a = std::stol(inner.substr(0, comma));
        b = std::stol(inner.substr(comma + 1));
      } catch (...) {
        return false;
      }
      return true;
    };

    if (id == "su2") return entry_su2();
    if (id == "su3_full_flag") return entry_su3_full_flag();
    if (id == "su3_group") return entry_su3_group();
    if (id == "su4_full_flag") return entry_su4_full_flag();
    if (id == "su4_group") return entry_su4_group();
    if (id == "su4_s1_quotient") return entry_su4_s1_quotient();
    if (id == "su4_t2_quotient") return entry_su4_t2_quotient();
    if (id == "g2_full_flag") return entry_g2_full_flag();
    if (id == "so4_full_flag") return entry_so4_full_flag();
    if (id == "so4_group") return entry_so4_group();
    long a = 0, b = 0;
    if (parse_params("aloff_wallach", a, b)) return entry_aloff_wallach(a, b);
    if (parse_params("so4_slope", a, b)) return entry_so4_slope(a, b);
    if (parse_params("sun_flag", a, b)) return entry_sun_flag(a, b);
    throw input_error("unknown catalog id '" + id + "'");
  }

  HomogeneousSpace space_from_json(const nlohmann::json& j, const std::string& id)
  {
    if (!j.contains("dim"))
      throw input_error("space json: missing 'dim'");
    const int n = j.at("dim").get<int>();
    std::vector<Mat> c(n, Mat::Zero(n, n));
    std::vector<std::vector<bool>> given(n, std::vector<bool>(n * n, false));
    for (const auto& row : j.at("structure_constants")) {
      int i = row.at(0).get<int>();
      int jj = row.at(1).get<int>();
      int k = row.at(2).get<int>();
      double v = row.at(3).get<double>();
      if (i < 0 || i >= n || jj < 0 || jj >= n || k < 0 || k >= n)
        throw input_error("space json: structure constant index out of range");
      c[k](i, jj) = v;
      given[k][i * n + jj] = true;
    }
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int jj = 0; jj < n; ++jj)
          if (given[k][i * n + jj] && !given[k][jj * n + i])
            c[k](jj, i) = -c[k](i, jj);

    Mat Q(n, n);
    {
      const auto& qj = j.at("Q");
      for (int i = 0; i < n; ++i)
        for (int jj = 0; jj < n; ++jj)
          Q(i, jj) = qj.at(i).at(jj).get<double>();
    }
    Mat h(n, 0);
    if (j.contains("h_basis") && !j.at("h_basis").empty()) {
      const auto& hb = j.at("h_basis");
      h.resize(n, static_cast<int>(hb.size()));
      for (int col = 0; col < static_cast<int>(hb.size()); ++col)
        for (int i = 0; i < n; ++i)
          h(i, col) = hb.at(col).at(i).get<double>();
    }
    std::vector<Mat> gens;
    if (j.contains("isotropy_generators")) {
      for (const auto& gj : j.at("isotropy_generators")) {
        Mat g(n, n);
        for (int i = 0; i < n; ++i)
          for (int jj = 0; jj < n; ++jj)
            g(i, jj) = gj.at(i).at(jj).get<double>();
        gens.push_back(g);
      }
    }
    std::vector<std::vector<int>> modules;
    for (const auto& mj : j.at("modules"))
      modules.push_back(mj.get<std::vector<int>>());
    std::optional<int> split;
    if (j.contains("toral_split") && !j.at("toral_split").is_null())
      split = j.at("toral_split").get<int>();
    return HomogeneousSpace(LieAlgebraSpec(std::move(c), std::move(Q)), h, gens, modules, split, id);
  }

  nlohmann::json space_to_json(const HomogeneousSpace& space)
  {
    nlohmann::json j;
    const int n = space.algebra().dim();
    j["dim"] = n;
    nlohmann::json sc = nlohmann::json::array();
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int jj = i + 1; jj < n; ++jj)
          if (space.algebra().c()[k](i, jj) != 0.0)
            sc.push_back({i, jj, k, space.algebra().c()[k](i, jj)});
    j["structure_constants"] = sc;
    nlohmann::json qj = nlohmann::json::array();
    for (int i = 0; i < n; ++i) {
      nlohmann::json row = nlohmann::json::array();
      for (int jj = 0; jj < n; ++jj)
        row.push_back(space.algebra().Q()(i, jj));
      qj.push_back(row);
    }
    j["Q"] = qj;
    nlohmann::json hb = nlohmann::json::array();
    for (int col = 0; col < space.h_basis().cols(); ++col) {
      nlohmann::json v = nlohmann::json::array();
      for (int i = 0; i < n; ++i)
        v.push_back(space.h_basis()(i, col));
      hb.push_back(v);
    }
    j["h_basis"] = hb;
    nlohmann::json gj = nlohmann::json::array();
    for (const auto& g : space.isotropy_generators()) {
      nlohmann::json gm = nlohmann::json::array();
      for (int i = 0; i < n; ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (int jj = 0; jj < n; ++jj)
          row.push_back(g(i, jj));
        gm.push_back(row);
      }
      gj.push_back(gm);
    }
    j["isotropy_generators"] = gj;
    j["modules"] = space.modules();
    if (space.toral_split())
      j["toral_split"] = *space.toral_split();
    return j;
  }

} // namespace rflab
