#include "mmc/oracle.hpp"

#include <cmath>
#include <array>
#include <functional>

#include "mmc/error.hpp"

namespace mmc::oracle {

namespace {

// Bisection for a predicate that holds on [0, d*) and fails beyond.
double bisect(const std::function<bool(double)>& above, double tol) {
  double lo = 0.0, hi = 1.0;
  while (above(hi)) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e6) throw ComputeError("root not bracketed");
  }
  for (int i = 0; i < 400 && hi - lo > tol; ++i) {
    const double mid = 0.5 * (lo + hi);
    (above(mid) ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

OracleResult moran_solve(std::span<const double> scales, double tol) {
  if (scales.size() < 2) throw ValidationError("moran_solve needs at least two scales");
  for (double a : scales) {
    if (!(a > 0.0 && a < 1.0)) throw ValidationError("moran_solve scales must lie in (0,1)");
  }
  auto above = [&](double d) {
    double sum = 0.0;
    for (double a : scales) sum += std::pow(a, d);
    return sum > 1.0;
  };
  return {"dimension", bisect(above, tol), "bisection on sum a_i^d - 1", tol};
}

OracleResult char_poly_root_2x2(const CloneStructure& s, double tol) {
  if (s.model_count() != 2) throw ValidationError("char_poly_root_2x2 needs exactly two models");
  auto entries = [&](double d) {
    double m[2][2] = {{0, 0}, {0, 0}};
    for (const auto& c : s.clones()) {
      m[c.target.value() - 1][c.container.value() - 1] += std::pow(c.inverse_scale.value, d);
    }
    return std::array<double, 4>{m[0][0], m[0][1], m[1][0], m[1][1]};
  };
  const auto zero = entries(0.0);
  if (zero[1] == 0.0 || zero[2] == 0.0) throw ComputeError("matrix not irreducible");
  // Larger root of x^2 - tr x + det exceeds 1 iff p(1) < 0, or p(1) >= 0 with
  // both roots to the right of 1.
  auto above = [&](double d) {
    const auto m = entries(d);
    const double tr = m[0] + m[3];
    const double p1 = 1.0 - tr + (m[0] * m[3] - m[1] * m[2]);
    return p1 < 0.0 || tr > 2.0;
  };
  if (!above(0.0)) throw ComputeError("root not bracketed: largest root at d = 0 is not above 1");
  return {"dimension", bisect(above, tol), "bisection on 1 - trace(M_d) + det(M_d)", tol};
}

namespace {

struct Frame {
  TypeId type;
  int depth;
  double scale;
  Rational exact;
};

template <class Leaf>
void enumerate(const CloneStructure& s, std::span<const CloneAddress> coll, int k, bool exact, Leaf leaf) {
  if (k < 0) throw ValidationError("subdivision depth must be non-negative");
  std::size_t visited = 0;
  for (const auto& a : coll) {
    if (!check_address(s, a)) throw ValidationError("invalid clone address " + to_string(a));
    Frame root{a.root(), 0, 1.0, Rational(1)};
    for (int id : a.word()) {
      const auto& c = s.clone(id);
      root.scale *= c.inverse_scale.value;
      if (exact) root.exact *= *c.inverse_scale.exact;
      root.type = c.target;
    }
    std::vector<Frame> stack{root};
    while (!stack.empty()) {
      Frame f = stack.back();
      stack.pop_back();
      if (f.depth == k) {
        if (++visited > kMaxEnumeratedClones) {
          throw ComputeError("exhaustive enumeration exceeds " + std::to_string(kMaxEnumeratedClones) + " clones");
        }
        leaf(f);
        continue;
      }
      for (const auto& c : s.clones()) {
        if (c.container != f.type) continue;
        Frame g{c.target, f.depth + 1, f.scale * c.inverse_scale.value, Rational(0)};
        if (exact) g.exact = f.exact * *c.inverse_scale.exact;
        stack.push_back(std::move(g));
      }
    }
  }
}

}  // namespace

DQuantity exhaustive_subdivision_sum(const CloneStructure& s, std::span<const CloneAddress> coll, double d, int k) {
  DQuantity q{d, Eigen::VectorXd::Zero(s.model_count())};
  enumerate(s, coll, k, false, [&](const Frame& f) {
    q.components(f.type.value() - 1) += std::pow(f.scale * s.model(f.type).diameter.value, d);
  });
  return q;
}

std::vector<PowerSum> exhaustive_subdivision_sum_exact(const CloneStructure& s,
                                                       std::span<const CloneAddress> coll, int k) {
  if (!s.is_exact()) throw ValidationError("exact enumeration needs rational scales and diameters");
  std::vector<PowerSum> q(static_cast<std::size_t>(s.model_count()));
  enumerate(s, coll, k, true, [&](const Frame& f) {
    q[static_cast<std::size_t>(f.type.value() - 1)] += PowerSum::term(f.exact * *s.model(f.type).diameter.exact);
  });
  return q;
}

}  // namespace mmc::oracle
