#pragma once

// Brute-force reference computations. Each one uses a different algorithm
// from the main path it checks (scalar root finding, explicit enumeration),
// so agreement between the two is evidence rather than repetition.

#include <span>
#include <string>
#include <vector>

#include "mmc/clone_structure.hpp"

namespace mmc::oracle {

struct OracleResult {
  std::string quantity;
  double value = 0.0;
  std::string method;
  double tolerance = 0.0;
};

/// Root of sum a_i^d = 1 by scalar bisection. Needs at least two scales in (0,1).
OracleResult moran_solve(std::span<const double> scales, double tol = 1e-13);

/// For a two-model structure: the d at which 1 is the larger root of the
/// characteristic polynomial of M_d, by bisection on that predicate.
OracleResult char_poly_root_2x2(const CloneStructure& s, double tol = 1e-13);

inline constexpr std::size_t kMaxEnumeratedClones = 1'000'000;

/// d-quantity of the k-fold subdivision of `coll` by listing every clone.
DQuantity exhaustive_subdivision_sum(const CloneStructure& s, std::span<const CloneAddress> coll, double d, int k);
std::vector<PowerSum> exhaustive_subdivision_sum_exact(const CloneStructure& s,
                                                       std::span<const CloneAddress> coll, int k);

}  // namespace mmc::oracle
