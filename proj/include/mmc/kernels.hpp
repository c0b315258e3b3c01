#pragma once

// Data-parallel inner loops. Each kernel has a plain serial reference used by
// the tests and an OpenMP version that splits work into a fixed, thread-count
// independent set of blocks and combines block results in order. Sampling,
// separation and box counts match the serial output exactly; floating sums
// match up to rounding and do not depend on the thread count.

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "mmc/clone_structure.hpp"
#include "mmc/numeric.hpp"
#include "mmc/similarity.hpp"

namespace mmc::kernels {

/// Number of clones in the k-fold subdivision of `coll`, computed from the
/// count matrix. Saturates at SIZE_MAX.
std::size_t subdivision_count(const CloneStructure& s, std::span<const CloneAddress> coll, int k);

/// Per-type sum of diam^d over the k-fold subdivision of `coll`, by walking
/// every clone.
Eigen::VectorXd level_quantities_serial(const CloneStructure& s, std::span<const CloneAddress> coll,
                                        double d, int k);
Eigen::VectorXd level_quantities_parallel(const CloneStructure& s, std::span<const CloneAddress> coll,
                                          double d, int k);
std::vector<PowerSum> level_quantities_exact(const CloneStructure& s,
                                             std::span<const CloneAddress> coll, int k);

enum class SampleMode {
  /// Image of the model disc centre; every point of the clone lies within
  /// cumulative_scale * radius of it.
  DiscCenter,
  /// A genuine point of the Cantor set (fixed point of the first-child
  /// chain), so distances between samples are realised distances.
  Anchor,
};

/// One sample per level-k clone, in depth-first (lexicographic) order.
struct PointCloud {
  int level = 0;
  SampleMode mode = SampleMode::DiscCenter;
  std::vector<Point> points;
  std::vector<int> roots;  ///< model id per point
  std::vector<int> words;  ///< `level` clone ids per point, row-major
  /// Per-point bound on the distance from the sample to any point of its clone.
  std::vector<double> reach;
  double error_radius = 0.0;

  std::size_t size() const { return points.size(); }
  CloneAddress address(std::size_t i) const;
  std::span<const int> word(std::size_t i) const {
    return {words.data() + i * static_cast<std::size_t>(level), static_cast<std::size_t>(level)};
  }
};

/// Per-model sampling data derived from an embedded structure.
struct SamplingFrame {
  std::vector<Point> base;     ///< point sampled in each model (by type slot)
  std::vector<double> reach;   ///< bound on |x - base| for x in C within the model
};

SamplingFrame sampling_frame(const CloneStructure& s, SampleMode mode);

PointCloud sample_serial(const CloneStructure& s, int level, SampleMode mode);
PointCloud sample_parallel(const CloneStructure& s, int level, SampleMode mode);

/// For every clone at levels 0..clone_level, the minimum distance between its
/// samples and samples outside it (infinite for a lone model). Returned in
/// depth-first order.
struct ClonePointSeparation {
  CloneAddress address;
  double point_sep = 0.0;
};

std::vector<ClonePointSeparation> separation_brute_force(const CloneStructure& s,
                                                         const PointCloud& cloud, int clone_level);
std::vector<ClonePointSeparation> separation_tree(const CloneStructure& s, const PointCloud& cloud,
                                                  int clone_level);

/// Occupied axis-aligned boxes of side `scale` (grid anchored at the origin).
std::vector<std::size_t> box_counts_serial(std::span<const Point> points, std::span<const double> scales);
std::vector<std::size_t> box_counts_parallel(std::span<const Point> points, std::span<const double> scales);

}  // namespace mmc::kernels
