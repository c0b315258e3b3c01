#pragma once

#include <string>
#include <vector>

#include "mmc/clone_structure.hpp"
#include "mmc/kernels.hpp"
#include "mmc/similarity.hpp"

namespace mmc {

/// Checks the planar realisation carried by `s`: every model has a region,
/// every clone a placement whose scale equals its inverse scale, image discs
/// lie inside their container disc and sibling discs are disjoint with a gap.
ValidationReport validate_embedding(const CloneStructure& s);

/// Throws ValidationError with the embedding violations, if any.
void require_valid_embedding(const CloneStructure& s);

/// The same structure with every region and placement conjugated by `g`
/// (P -> g P g^-1) and diameters multiplied by g.scale.
CloneStructure transform_embedding(const CloneStructure& s, const PlanarSimilarity& g);

/// One disc-centre sample per level-k clone. Level cap 24.
kernels::PointCloud sample_points(const CloneStructure& s, int level);

struct SeparationEntry {
  CloneAddress address;
  double sep = 0.0;     ///< minimum sample distance to the outside
  double sep_lo = 0.0;  ///< certified: sep_lo <= true sep <= sep
  double diameter = 0.0;
  double rel = 0.0;     ///< sep / diameter
  double rel_lo = 0.0;
  double rel_hi = 0.0;
};

struct SeparationReport {
  int level = 0;        ///< sampling level
  int clone_level = 0;  ///< deepest reported clone level
  double error_radius = 0.0;
  std::vector<SeparationEntry> entries;  ///< depth-first, levels 0..clone_level
  double alpha = 0.0;  ///< min sep over level-1 clones
  double alpha_lo = 0.0;
  double set_diameter = 0.0;  ///< largest sample distance; true value in [this, this + 2 error_radius]
  double beta = 0.0;          ///< set_diameter / alpha
  double beta_lo = 0.0;
  double beta_hi = 0.0;
  double xi_bound = 0.0;  ///< max(rel, 1/rel) over clones of level >= 1
};

/// Separation statistics from Cantor-set samples (fixed points of clone
/// chains), so each sep is realised by actual points and over-estimates the
/// true separation by at most 2 error_radius.
SeparationReport separation_report(const CloneStructure& s, int level, int clone_level);
inline SeparationReport separation_report(const CloneStructure& s, int level) {
  return separation_report(s, level, std::min(level, 6));
}

struct BoxCountResult {
  double estimate = 0.0;
  double intercept = 0.0;
  int level = 0;
  double error_radius = 0.0;
  std::vector<double> scales;
  std::vector<std::size_t> counts;
  /// Level 0 or a single sample per model: the slope carries no information.
  bool degenerate = false;
};

/// Halving scales from the sample spread down to twice the error radius.
std::vector<double> default_box_scales(const kernels::PointCloud& cloud);

/// Least-squares slope of log N(s) against log(1/s). Scales must be
/// decreasing and not finer than 2 * error_radius.
BoxCountResult box_counting_dimension(const CloneStructure& s, int level, std::vector<double> scales = {});

/// Nested model outlines (or discs) for levels 0..levels, one group per level.
std::string render_svg(const CloneStructure& s, int levels);

}  // namespace mmc
