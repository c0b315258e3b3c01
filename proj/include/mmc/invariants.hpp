#pragma once

#include <string>
#include <utility>
#include <vector>

#include "mmc/measure.hpp"

namespace mmc {

/// Measures (relative to H_d(C)) of unions of at most `union_cap` disjoint
/// clones of level <= `level_cap` inside one model.
struct TruncatedClopenInvariant {
  TypeId base_model;
  int level_cap = 0;
  int union_cap = 0;
  double dimension = 0.0;
  double dedup_tolerance = 1e-10;
  std::vector<double> values;  ///< strictly increasing
  std::vector<int> depths;     ///< shallowest clone level realising each value
};

inline constexpr int kMaxInvariantLevel = 8;
inline constexpr int kMaxInvariantUnion = 4;

TruncatedClopenInvariant clopen_invariant(const SolvedStructure& s, TypeId model, int level_cap, int union_cap,
                                          double dedup_tolerance = 1e-10);

enum class Verdict { ConsistentWithSimilar, NotSimilarAtTruncation, Incomparable };

std::string to_string(Verdict v);

/// Result of looking for c with c * X contained in Y (up to the frontier).
struct ScalarSearch {
  bool found = false;
  double scalar = 0.0;
  int candidates = 0;
  /// Values of X tested for the chosen candidate (the rest are frontier values).
  int tested = 0;
  /// When not found: the best candidate and the first value it fails on.
  double best_candidate = 0.0;
  double witness = 0.0;
  int witness_depth = 0;
};

/// Truncation frontier h = ceil(L / 2). Candidates are c = y / max(X) for every
/// y in Y realised at depth <= h; only values of X realised at depth <= L - h
/// must have a partner, since their images under a level-h clone embedding
/// stay within level L.
int frontier_shift(int level_cap);

ScalarSearch find_embedding_scalar(const TruncatedClopenInvariant& x, const TruncatedClopenInvariant& y,
                                   double tol);

/// True iff every non-frontier value of x, times c, lies in y.
bool scalar_embeds(const TruncatedClopenInvariant& x, const TruncatedClopenInvariant& y, double c, int shift,
                   double tol);

struct Comparison {
  Verdict verdict = Verdict::Incomparable;
  double dimension_a = 0.0;
  double dimension_b = 0.0;
  ScalarSearch a_into_b;  ///< alpha A in B
  ScalarSearch b_into_a;  ///< beta B in A
};

Comparison compare_invariants(const TruncatedClopenInvariant& a, const TruncatedClopenInvariant& b,
                              double tol = 1e-9);

/// Clone pairing between two solved structures.
class MassRatioMap {
 public:
  using Pair = std::pair<CloneAddress, CloneAddress>;

  /// Throws ValidationError for invalid addresses, repeated sources or pairs
  /// whose nesting differs between source and target; ComputeError when the
  /// dimensions differ by more than 1e-9.
  MassRatioMap(const SolvedStructure& source, const SolvedStructure& target, std::vector<Pair> pairs);

  /// Every clone of `s` up to `level` paired with itself.
  static MassRatioMap identity(const SolvedStructure& s, int level);

  const std::vector<Pair>& pairs() const { return pairs_; }
  const SolvedStructure& source() const { return *source_; }
  const SolvedStructure& target() const { return *target_; }

 private:
  const SolvedStructure* source_;
  const SolvedStructure* target_;
  std::vector<Pair> pairs_;
};

/// clone_measure(target) / clone_measure(source).
double mass_ratio(const MassRatioMap& map, std::size_t pair_index);

/// Sorted distinct MR(child) / MR(parent) over source pairs one level apart.
/// Throws ValidationError when no such pair exists.
std::vector<double> mass_ratio_spectrum(const MassRatioMap& map, double tol = 1e-10);

/// Measure-weighted mean of the mass ratios of the children of a source
/// clone, or nullopt unless every child is paired.
std::optional<double> child_weighted_mass_ratio(const MassRatioMap& map, std::size_t pair_index);

}  // namespace mmc
