#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "mmc/clone_structure.hpp"
#include "mmc/io.hpp"

namespace fixtures {

inline std::string path(const std::string& name) { return std::string(MMC_DATA_DIR) + "/" + name + ".json"; }

inline mmc::CloneStructure load(const std::string& name) { return mmc::io::read_structure(path(name)); }

inline mmc::StructureDefinition definition(const std::string& name) {
  return mmc::io::read_structure_definition(path(name));
}

/// Structures with an irreducible count matrix.
inline const std::vector<std::string> irreducible = {"middle_third", "figure_matrix", "figure_irreducible",
                                                     "planar_multi", "symmetric_rank1", "middle_third_lifted"};
inline const std::vector<std::string> all = {"middle_third",    "figure_matrix",       "figure_irreducible",
                                             "figure_reducible", "planar_multi",       "symmetric_rank1",
                                             "middle_third_lifted"};

/// One model, `scales.size()` self-similar clones; scales as "p/q" strings.
inline mmc::CloneStructure moran(const std::vector<std::string>& scales, std::string diameter = "1") {
  mmc::io::json j{{"models", {{{"id", 1}, {"diameter", diameter}}}}, {"clones", mmc::io::json::array()}};
  for (std::size_t i = 0; i < scales.size(); ++i) {
    j["clones"].push_back({{"id", i + 1}, {"container", 1}, {"target", 1}, {"inverse_scale", scales[i]}});
  }
  return mmc::CloneStructure(mmc::io::parse_structure(j));
}

inline bool close(double a, double b, double rel) { return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b)); }

}  // namespace fixtures
