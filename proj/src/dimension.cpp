#include "mmc/dimension.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <sstream>

#include "mmc/error.hpp"

namespace mmc {

namespace {

void require_strongly_connected(const CloneStructure& s) {
  const auto rep = is_irreducible(build_matrix(s, 0.0));
  if (!rep.strongly_connected) throw ComputeError("matrix not irreducible");
}

}  // namespace

double frobenius_eigenvalue(const CloneStructure& s, double d, double tol) {
  FrobeniusOptions opts;
  opts.tolerance = tol;
  return frobenius(build_matrix(s, d), opts).eigenvalue;
}

DimensionResult solve_dimension(const CloneStructure& s, double tol) {
  if (!(tol > 0.0)) throw ValidationError("tolerance must be positive");
  require_strongly_connected(s);

  const double lambda0 = frobenius_eigenvalue(s, 0.0);
  if (!(lambda0 > 1.0)) throw ComputeError("structure violates m >= 2n premise (lambda_0 <= 1)");

  DimensionResult r;
  double lo = 0.0;
  double hi = 1.0;
  while (frobenius_eigenvalue(s, hi) >= 1.0 - 1e-9) {
    lo = hi;
    hi *= 2.0;
    if (hi > 64.0) throw ComputeError("no upper bracket for the dimension below d = 64");
  }

  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double inner_tol = std::max(1e-3 * (hi - lo), 1e-14);
    if (frobenius_eigenvalue(s, mid, inner_tol) > 1.0) {
      lo = mid;
    } else {
      hi = mid;
    }
    ++r.iterations;
  }

  r.bracket_lo = lo;
  r.bracket_hi = hi;
  r.dimension = 0.5 * (lo + hi);
  r.frobenius = frobenius(build_matrix(s, r.dimension));
  r.eigenvalue_at_solution = r.frobenius.eigenvalue;
  r.left_eigenvector = r.frobenius.left;
  return r;
}

std::vector<CurvePoint> eigenvalue_curve(const CloneStructure& s, std::span<const double> grid) {
  require_strongly_connected(s);
  std::vector<CurvePoint> out(grid.size());
  std::exception_ptr failure;
  const auto count = static_cast<long>(grid.size());
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < count; ++i) {
    const auto k = static_cast<std::size_t>(i);
    try {
      out[k] = {grid[k], frobenius_eigenvalue(s, grid[k])};
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

std::vector<double> linear_grid(double d0, double d1, int steps) {
  if (steps < 1) throw ValidationError("grid needs at least one step");
  std::vector<double> grid;
  for (int i = 0; i <= steps; ++i) grid.push_back(d0 + (d1 - d0) * i / steps);
  return grid;
}

}  // namespace mmc
