#pragma once

#include <optional>
#include <vector>

#include <Eigen/Core>

#include "mmc/clone_structure.hpp"
#include "mmc/dimension.hpp"

namespace mmc {

/// A structure together with its dimension and model measure direction.
struct SolvedStructure {
  CloneStructure structure;
  DimensionResult dimension;
  /// H_d(A_i) / H_d(C): left Frobenius eigenvector at d*, summing to 1.
  Eigen::VectorXd relative_measures;

  double d() const { return dimension.dimension; }
};

SolvedStructure solve(CloneStructure s, double tol = 1e-12);

Eigen::VectorXd relative_measures(const CloneStructure& s);

/// ||M_{d*}^T v - v||_1 / ||v||_1 for the relative measure vector.
double transpose_fixed_point_residual(const SolvedStructure& s);

/// Measure of a clone relative to H_d(C): cumulative_scale^d * v_type.
double clone_measure(const SolvedStructure& s, const CloneAddress& addr);

struct CoverSums {
  /// level_sums[k] = sum of diam^d over all level-k clones of C.
  std::vector<double> level_sums;
  /// First k after which three consecutive changes are below 1e-10 relative.
  int converged_level = -1;
};

CoverSums cover_sum_sequence(const SolvedStructure& s, int max_level = 60);

struct UpperBounds {
  /// U_i = lim_k sum of diam^d over level-k clones inside model i.
  Eigen::VectorXd per_model;
  double k_prime = 0.0;
  CoverSums sums;
};

UpperBounds measure_upper_bounds(const SolvedStructure& s);

struct LowerBounds {
  Eigen::VectorXd per_model;
  double global = 0.0;
  double q = 0.0;
  double beta = 1.0;
  /// No embedding was supplied: the bound holds for covers by clones only.
  bool clone_covers_only = true;
};

/// beta^{-d} * Q^{-1} * K'/2, split across models along the relative measures.
LowerBounds measure_lower_bounds(const SolvedStructure& s, std::optional<double> beta = std::nullopt);

struct MeasureReport {
  double dimension = 0.0;
  Eigen::VectorXd relative_measures;
  Eigen::VectorXd upper_bounds;
  Eigen::VectorXd lower_bounds;
  double k_prime = 0.0;
  double q = 0.0;
  std::optional<double> beta;
  bool clone_covers_only = true;
  double fixed_point_residual = 0.0;
  int cover_converged_level = -1;
};

MeasureReport measure_report(const SolvedStructure& s, std::optional<double> beta = std::nullopt);

}  // namespace mmc
