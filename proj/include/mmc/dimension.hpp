#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "mmc/clone_structure.hpp"
#include "mmc/spectral.hpp"

namespace mmc {

struct DimensionResult {
  double dimension = 0.0;
  double eigenvalue_at_solution = 0.0;
  /// lambda(bracket_lo) >= 1 >= lambda(bracket_hi).
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  int iterations = 0;
  /// Left Frobenius eigenvector at the solution (L1-normalised).
  Eigen::VectorXd left_eigenvector;
  FrobeniusData frobenius;
};

/// The unique d > 0 with lambda_d = 1, by bisection. Throws ComputeError when
/// the type graph is not strongly connected or lambda_0 <= 1.
DimensionResult solve_dimension(const CloneStructure& s, double tol = 1e-12);

/// Frobenius eigenvalue of M_d.
double frobenius_eigenvalue(const CloneStructure& s, double d, double tol = 1e-14);

struct CurvePoint {
  double d = 0.0;
  double lambda = 0.0;
};

/// lambda_d on a grid. Grid points are evaluated concurrently.
std::vector<CurvePoint> eigenvalue_curve(const CloneStructure& s, std::span<const double> grid);

/// n + 1 evenly spaced points on [d0, d1].
std::vector<double> linear_grid(double d0, double d1, int steps);

}  // namespace mmc
