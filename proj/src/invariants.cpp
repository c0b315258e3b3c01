#include "mmc/invariants.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mmc/error.hpp"
#include "mmc/kernels.hpp"

namespace mmc {

namespace {

constexpr std::size_t kMaxValues = 20'000'000;

struct Entry {
  double value;
  int depth;
};
using Bag = std::vector<Entry>;

void dedup(Bag& bag, double tol) {
  std::ranges::sort(bag, [](const Entry& a, const Entry& b) {
    return a.value < b.value || (a.value == b.value && a.depth < b.depth);
  });
  std::size_t out = 0;
  for (std::size_t i = 0; i < bag.size();) {
    Entry run = bag[i];
    std::size_t j = i + 1;
    while (j < bag.size() && bag[j].value - run.value <= tol * run.value) {
      run.depth = std::min(run.depth, bag[j].depth);
      ++j;
    }
    bag[out++] = run;
    i = j;
  }
  bag.resize(out);
}

void check_size(std::size_t n) {
  if (n > kMaxValues) {
    throw ComputeError("clopen enumeration too large: about " + std::to_string(n) +
                       " values; lower the level or union cap");
  }
}

// bags[c] for c = 0..S: unions of exactly c clones. bags[0] = {0}.
using CountBags = std::vector<Bag>;

CountBags combine(const CountBags& a, const CountBags& b, int cap, double tol) {
  CountBags out(static_cast<std::size_t>(cap) + 1);
  for (int ca = 0; ca <= cap; ++ca) {
    for (int cb = 0; ca + cb <= cap; ++cb) {
      const auto& xa = a[static_cast<std::size_t>(ca)];
      const auto& xb = b[static_cast<std::size_t>(cb)];
      check_size(xa.size() * xb.size());
      auto& dst = out[static_cast<std::size_t>(ca + cb)];
      for (const auto& ea : xa) {
        for (const auto& eb : xb) dst.push_back({ea.value + eb.value, std::max(ea.depth, eb.depth)});
      }
    }
  }
  for (auto& bag : out) dedup(bag, tol);
  return out;
}

}  // namespace

TruncatedClopenInvariant clopen_invariant(const SolvedStructure& s, TypeId model, int level_cap, int union_cap,
                                          double dedup_tolerance) {
  const auto& cs = s.structure;
  if (model.value() < 1 || model.value() > cs.model_count()) throw ValidationError("unknown model");
  if (level_cap < 0 || union_cap < 1 || level_cap > kMaxInvariantLevel || union_cap > kMaxInvariantUnion) {
    const CloneAddress root(model);
    std::size_t clones = 0;
    for (int k = 0; k <= std::max(level_cap, 0); ++k) clones += kernels::subdivision_count(cs, std::span(&root, 1), k);
    double estimate = 0.0, term = 1.0;
    for (int c = 1; c <= std::max(union_cap, 1); ++c) {
      term *= static_cast<double>(clones - static_cast<std::size_t>(c) + 1) / c;
      estimate += term;
    }
    throw ComputeError("clopen invariant caps are L <= " + std::to_string(kMaxInvariantLevel) + ", S <= " +
                       std::to_string(kMaxInvariantUnion) + " (requested L=" + std::to_string(level_cap) +
                       ", S=" + std::to_string(union_cap) + ": up to " + std::to_string(clones) +
                       " clones and about " + std::to_string(static_cast<long double>(estimate)) + " unions)");
  }
  if (!(dedup_tolerance > 0.0)) throw ValidationError("dedup tolerance must be positive");

  const int n = cs.model_count();
  const double d = s.d();
  const auto cap = static_cast<std::size_t>(union_cap);
  // f[t]: unions inside a copy of model t using clones of relative level
  // <= h, measured relative to H_d(C).
  std::vector<CountBags> f(static_cast<std::size_t>(n));
  for (int t = 0; t < n; ++t) {
    f[static_cast<std::size_t>(t)].assign(cap + 1, {});
    f[static_cast<std::size_t>(t)][0] = {{0.0, 0}};
    f[static_cast<std::size_t>(t)][1] = {{s.relative_measures(t), 0}};
  }
  for (int h = 1; h <= level_cap; ++h) {
    std::vector<CountBags> next(static_cast<std::size_t>(n));
    for (int t = 0; t < n; ++t) {
      CountBags acc(cap + 1);
      acc[0] = {{0.0, 0}};
      for (int id : cs.clones_in(TypeId(t + 1))) {
        const auto& c = cs.clone(id);
        const double w = std::pow(c.inverse_scale.value, d);
        CountBags child = f[c.target.slot()];
        for (std::size_t k = 1; k <= cap; ++k) {
          for (auto& e : child[k]) e = {w * e.value, e.depth + 1};
        }
        acc = combine(acc, child, union_cap, dedup_tolerance);
      }
      acc[1].push_back({s.relative_measures(t), 0});
      dedup(acc[1], dedup_tolerance);
      next[static_cast<std::size_t>(t)] = std::move(acc);
    }
    f = std::move(next);
  }

  Bag all;
  for (std::size_t k = 1; k <= cap; ++k) {
    const auto& bag = f[model.slot()][k];
    all.insert(all.end(), bag.begin(), bag.end());
  }
  dedup(all, dedup_tolerance);

  TruncatedClopenInvariant inv;
  inv.base_model = model;
  inv.level_cap = level_cap;
  inv.union_cap = union_cap;
  inv.dimension = d;
  inv.dedup_tolerance = dedup_tolerance;
  for (const auto& e : all) {
    inv.values.push_back(e.value);
    inv.depths.push_back(e.depth);
  }
  return inv;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::ConsistentWithSimilar:
      return "CONSISTENT_WITH_SIMILAR";
    case Verdict::NotSimilarAtTruncation:
      return "NOT_SIMILAR_AT_TRUNCATION";
    case Verdict::Incomparable:
      return "INCOMPARABLE";
  }
  return "?";
}

namespace {

bool contains_value(const std::vector<double>& sorted, double v, double tol) {
  auto it = std::ranges::lower_bound(sorted, v * (1.0 - tol));
  return it != sorted.end() && *it <= v * (1.0 + tol);
}

// Index of the first non-frontier value of x (largest first) with no partner,
// or -1.
long first_failure(const TruncatedClopenInvariant& x, const TruncatedClopenInvariant& y, double c, int shift,
                   double tol, int* tested) {
  const int limit = x.level_cap - shift;
  int count = 0;
  for (std::size_t k = x.values.size(); k-- > 0;) {
    if (x.depths[k] > limit) continue;
    ++count;
    if (!contains_value(y.values, c * x.values[k], tol)) {
      if (tested) *tested = count;
      return static_cast<long>(k);
    }
  }
  if (tested) *tested = count;
  return -1;
}

}  // namespace

bool scalar_embeds(const TruncatedClopenInvariant& x, const TruncatedClopenInvariant& y, double c, int shift,
                   double tol) {
  return first_failure(x, y, c, shift, tol, nullptr) < 0;
}

int frontier_shift(int level_cap) { return (level_cap + 1) / 2; }

ScalarSearch find_embedding_scalar(const TruncatedClopenInvariant& x, const TruncatedClopenInvariant& y,
                                   double tol) {
  ScalarSearch out;
  if (x.values.empty() || y.values.empty()) return out;
  const double top = x.values.back();
  const int shift = frontier_shift(x.level_cap);
  int best_tested = -1;
  for (std::size_t i = y.values.size(); i-- > 0;) {
    if (y.depths[i] > shift) continue;
    const double c = y.values[i] / top;
    ++out.candidates;
    int tested = 0;
    const long fail = first_failure(x, y, c, shift, tol, &tested);
    if (fail < 0) {
      out.found = true;
      out.scalar = c;
      out.tested = tested;
      return out;
    }
    if (tested > best_tested) {
      best_tested = tested;
      out.best_candidate = c;
      out.witness = x.values[static_cast<std::size_t>(fail)];
      out.witness_depth = x.depths[static_cast<std::size_t>(fail)];
      out.tested = tested;
    }
  }
  return out;
}

Comparison compare_invariants(const TruncatedClopenInvariant& a, const TruncatedClopenInvariant& b, double tol) {
  if (a.level_cap != b.level_cap || a.union_cap != b.union_cap) {
    throw ValidationError("invariants were truncated with different caps");
  }
  if (!(tol > 0.0)) throw ValidationError("tolerance must be positive");
  Comparison out;
  out.dimension_a = a.dimension;
  out.dimension_b = b.dimension;
  if (std::abs(a.dimension - b.dimension) > 1e-9) {
    out.verdict = Verdict::Incomparable;
    return out;
  }
  out.a_into_b = find_embedding_scalar(a, b, tol);
  out.b_into_a = find_embedding_scalar(b, a, tol);
  out.verdict = out.a_into_b.found && out.b_into_a.found ? Verdict::ConsistentWithSimilar
                                                         : Verdict::NotSimilarAtTruncation;
  return out;
}

MassRatioMap::MassRatioMap(const SolvedStructure& source, const SolvedStructure& target, std::vector<Pair> pairs)
    : source_(&source), target_(&target), pairs_(std::move(pairs)) {
  if (std::abs(source.d() - target.d()) > 1e-9) {
    throw ComputeError("mass ratio needs equal dimensions (source " + std::to_string(source.d()) + ", target " +
                       std::to_string(target.d()) + ")");
  }
  for (std::size_t i = 0; i < pairs_.size(); ++i) {
    const auto& [src, dst] = pairs_[i];
    if (!check_address(source.structure, src) || !check_address(target.structure, dst)) {
      throw ValidationError("pair " + std::to_string(i) + ": invalid clone address");
    }
  }
  for (std::size_t i = 0; i < pairs_.size(); ++i) {
    for (std::size_t j = 0; j < pairs_.size(); ++j) {
      if (i == j) continue;
      const auto& [si, ti] = pairs_[i];
      const auto& [sj, tj] = pairs_[j];
      const std::string where = "pairs " + std::to_string(i) + " and " + std::to_string(j);
      if (si == sj) throw ValidationError(where + " share a source clone");
      if (si.contains(sj) && !ti.contains(tj)) {
        throw ValidationError(where + ": nested sources need nested targets");
      }
      if (!si.contains(sj) && !sj.contains(si) && (ti.contains(tj) || tj.contains(ti))) {
        throw ValidationError(where + ": disjoint sources need disjoint targets");
      }
    }
  }
}

MassRatioMap MassRatioMap::identity(const SolvedStructure& s, int level) {
  std::vector<Pair> pairs;
  std::vector<CloneAddress> layer = model_collection(s.structure);
  for (int k = 0; k <= level; ++k) {
    for (const auto& a : layer) pairs.emplace_back(a, a);
    layer = subdivide(s.structure, layer, 1);
  }
  return MassRatioMap(s, s, std::move(pairs));
}

double mass_ratio(const MassRatioMap& map, std::size_t pair_index) {
  if (pair_index >= map.pairs().size()) throw ValidationError("pair index out of range");
  const auto& [src, dst] = map.pairs()[pair_index];
  return clone_measure(map.target(), dst) / clone_measure(map.source(), src);
}

std::vector<double> mass_ratio_spectrum(const MassRatioMap& map, double tol) {
  const auto& pairs = map.pairs();
  std::vector<double> q;
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    for (std::size_t c = 0; c < pairs.size(); ++c) {
      const auto& parent = pairs[p].first;
      const auto& child = pairs[c].first;
      if (child.level() == parent.level() + 1 && parent.contains(child)) {
        q.push_back(mass_ratio(map, c) / mass_ratio(map, p));
      }
    }
  }
  if (q.empty()) throw ValidationError("mass ratio spectrum needs parent/child source pairs");
  std::ranges::sort(q);
  std::vector<double> out;
  for (double v : q) {
    if (out.empty() || v - out.back() > tol * std::abs(out.back())) out.push_back(v);
  }
  return out;
}

std::optional<double> child_weighted_mass_ratio(const MassRatioMap& map, std::size_t pair_index) {
  const auto& pairs = map.pairs();
  if (pair_index >= pairs.size()) throw ValidationError("pair index out of range");
  const auto& parent = pairs[pair_index].first;
  const auto kids = children(map.source().structure, parent);
  double num = 0.0, den = 0.0;
  for (const auto& k : kids) {
    auto it = std::ranges::find_if(pairs, [&](const auto& p) { return p.first == k; });
    if (it == pairs.end()) return std::nullopt;
    const double mu = clone_measure(map.source(), k);
    num += mu * mass_ratio(map, static_cast<std::size_t>(it - pairs.begin()));
    den += mu;
  }
  return num / den;
}

}  // namespace mmc
