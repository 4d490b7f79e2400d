#ifndef RFLAB_CATALOG_HPP
#define RFLAB_CATALOG_HPP

#include "rflab/diagonal_model.hpp"
#include "rflab/homogeneous_space.hpp"

#include <json.hpp>

#include <memory>
#include <optional>

namespace rflab
{

  /// One catalog space: structure-constant data and/or a diagonal scalar
  /// model, together with the known Einstein points and their provenance.
  struct CatalogEntry
  {
    std::string id;
    std::string description;
    std::string representation; ///< "structure_constants" or "diagonal_scalar_model"

    std::shared_ptr<const HomogeneousSpace> space; ///< null for model-only entries
    std::shared_ptr<const DiagonalScalModel> model;///< null when no closed form is known

    struct KnownEinstein
    {
      std::string tag;        ///< "ke", "normal", ...
      Vec coefficients;       ///< per-module scalings (unit volume)
      std::string provenance;
      std::optional<int> coindex;
    };
    std::vector<KnownEinstein> known_einstein;

    /// Module relabelings preserving the space, used to deduplicate searches.
    std::vector<std::vector<int>> symmetry_permutations;

    /// Recorded ancient-family dimension for fibration entries (nu + q - 1).
    std::optional<int> family_dimension;

    bool has_fibration() const { return space && space->has_toral_split(); }
    const KnownEinstein& find_known(const std::string& tag) const;
  };

  /// Ids of the default catalog instantiations.
  std::vector<std::string> catalog_ids();

  /// Full default catalog.
  std::vector<CatalogEntry> catalog();

  /// Resolves an id, including parameterized forms aloff_wallach(p,q),
  /// so4_slope(p,q) and sun_flag(n,k). Throws input_error for unknown ids.
  CatalogEntry catalog_entry(const std::string& id);

  /// JSON space-definition format (field names normative):
  /// {"dim": n, "structure_constants": [[i,j,k,value],...], "Q": [[..]],
  ///  "h_basis": [[..],..], "isotropy_generators": [[[..]],..],
  ///  "modules": [[indices],..], "toral_split": r}
  /// Antisymmetric partner entries may be omitted. Indices are 0-based.
  HomogeneousSpace space_from_json(const nlohmann::json& j, const std::string& id = "json");
  nlohmann::json space_to_json(const HomogeneousSpace& space);

} // namespace rflab

#endif
