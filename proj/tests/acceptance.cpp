// Acceptance checks: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "mmc/dimension.hpp"
#include "mmc/geometry.hpp"
#include "mmc/invariants.hpp"
#include "mmc/io.hpp"
#include "mmc/measure.hpp"
#include "mmc/oracle.hpp"
#include "mmc/spectral.hpp"

using namespace mmc;

namespace {

CloneStructure load(const std::string& name) {
  return io::read_structure(std::string(MMC_DATA_DIR) + "/" + name + ".json");
}

const std::vector<std::string> bundled = {"middle_third",   "figure_matrix",   "figure_irreducible",
                                          "figure_reducible", "planar_multi",   "symmetric_rank1",
                                          "middle_third_lifted", "moran_fifth",    "thirds3",
                                          "halves"};

bool irreducible(const CloneStructure& s) { return is_irreducible(build_matrix(s, 0.0)).irreducible; }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Check {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

std::string f(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

Check criterion1() {
  Check c;
  const auto t0 = std::chrono::steady_clock::now();
  const double d = solve_dimension(load("middle_third")).dimension;
  const double secs = seconds_since(t0);
  const std::vector<double> scales{1.0 / 3, 1.0 / 3};
  const double oracle = oracle::moran_solve(scales).value;
  c.require(std::abs(d - oracle) <= 1e-9, "solve vs moran_solve " + f("%.3g", std::abs(d - oracle)));
  c.require(std::abs(d - std::log(2.0) / std::log(3.0)) <= 1e-9, "closed form");
  c.require(secs < 1.0, "runtime " + f("%.3f s", secs));
  if (c.ok) c.detail = "d* = " + f("%.15f", d) + ", oracle " + f("%.15f", oracle) + ", " + f("%.4f s", secs);
  return c;
}

Check criterion2() {
  Check c;
  const auto s = load("figure_matrix");
  const auto t0 = std::chrono::steady_clock::now();
  const double d = solve_dimension(s).dimension;
  const double lambda0 = frobenius_eigenvalue(s, 0.0);
  const double secs = seconds_since(t0);
  const double oracle = oracle::char_poly_root_2x2(s).value;
  const double golden = (3 + std::sqrt(5.0)) / 2;
  c.require(std::abs(d - oracle) <= 1e-9, "solve vs char_poly " + f("%.3g", std::abs(d - oracle)));
  c.require(std::abs(lambda0 - golden) <= 1e-10, "lambda_0 " + f("%.17g", lambda0));
  c.require(secs < 1.0, "runtime " + f("%.3f s", secs));
  if (c.ok) c.detail = "d* = " + f("%.12f", d) + ", lambda_0 = " + f("%.12f", lambda0) + ", " + f("%.4f s", secs);
  return c;
}

Check criterion3() {
  Check c;
  int exact_checks = 0, float_checks = 0;
  double worst = 0;
  for (const auto& name : bundled) {
    const auto s = load(name);
    std::vector<double> ds{0.25, 0.5, 1.0};
    if (irreducible(s)) {
      const double dstar = solve_dimension(s).dimension;
      ds = {dstar / 2, dstar, 1.0};
    }
    std::vector<std::vector<CloneAddress>> collections{model_collection(s),
                                                       children(s, CloneAddress(TypeId(1)))};
    const auto m_exact = build_matrix_exact(s);
    for (const auto& coll : collections) {
      auto predicted = d_quantity_exact(s, coll);
      for (int k = 0; k <= 8; ++k) {
        if (k > 0) predicted = m_exact.apply(predicted);
        const auto enumerated = oracle::exhaustive_subdivision_sum_exact(s, coll, k);
        c.require(predicted == enumerated, name + " exact k=" + std::to_string(k));
        ++exact_checks;
      }
      for (double d : ds) {
        const Eigen::MatrixXd m = build_matrix(s, d).entries;
        Eigen::VectorXd v = d_quantity(s, coll, d).components;
        for (int k = 0; k <= 8; ++k) {
          if (k > 0) v = m * v;
          const auto e = oracle::exhaustive_subdivision_sum(s, coll, d, k).components;
          for (Eigen::Index i = 0; i < v.size(); ++i) {
            const double scale = std::max(std::abs(v(i)), std::abs(e(i)));
            const double rel = scale == 0 ? 0 : std::abs(v(i) - e(i)) / scale;
            worst = std::max(worst, rel);
          }
          ++float_checks;
        }
      }
    }
  }
  c.require(worst <= 1e-12, "float relative error " + f("%.3g", worst));
  if (c.ok) {
    c.detail = std::to_string(exact_checks) + " exact identities, " + std::to_string(float_checks) +
               " float checks, worst relative error " + f("%.2g", worst);
  }
  return c;
}

Check criterion4() {
  Check c;
  int checks = 0;
  for (const auto& name : bundled) {
    const auto s = load(name);
    const auto m = build_matrix_exact(s);
    for (int k = 1; k <= 4; ++k) {
      c.require(build_matrix_exact(power_structure(s, k)) == m.pow(k), name + " k=" + std::to_string(k));
      ++checks;
    }
  }
  if (c.ok) c.detail = std::to_string(checks) + " exact matrix identities";
  return c;
}

Check criterion5() {
  Check c;
  double worst_residual = 0, worst_add = 0;
  for (const auto& name : bundled) {
    const auto cs = load(name);
    if (!irreducible(cs)) continue;
    const auto s = solve(cs);
    worst_residual = std::max(worst_residual, transpose_fixed_point_residual(s));
    std::vector<CloneAddress> layer = model_collection(s.structure);
    for (int level = 0; level <= 6; ++level) {
      for (const auto& a : layer) {
        double sum = 0;
        for (const auto& k : children(s.structure, a)) sum += clone_measure(s, k);
        worst_add = std::max(worst_add, std::abs(sum - clone_measure(s, a)));
      }
      if (level < 6) layer = subdivide(s.structure, layer, 1);
    }
  }
  c.require(worst_residual <= 1e-10, "fixed-point residual " + f("%.3g", worst_residual));
  c.require(worst_add <= 1e-12, "additivity defect " + f("%.3g", worst_add));
  if (c.ok) {
    c.detail = "worst residual " + f("%.2g", worst_residual) + ", worst additivity defect " + f("%.2g", worst_add);
  }
  return c;
}

Check criterion6() {
  Check c;
  const auto irr = is_irreducible(build_matrix(load("figure_irreducible"), 0.0));
  c.require(irr.irreducible && irr.witness_k.has_value(), "figure_irreducible not classified irreducible");
  const auto red = is_irreducible(build_matrix(load("figure_reducible"), 0.0));
  c.require(!red.irreducible, "figure_reducible classified irreducible");
  c.require(red.persistent_zeros == std::vector<std::pair<int, int>>{{3, 1}, {3, 2}}, "zero pattern");
  if (c.ok) c.detail = "irreducible with k = " + std::to_string(*irr.witness_k) + "; reducible with zeros (3,1),(3,2)";
  return c;
}

Check criterion7() {
  Check c;
  int structures = 0;
  for (const auto& name : bundled) {
    const auto s = load(name);
    if (!irreducible(s)) continue;
    ++structures;
    const double dstar = solve_dimension(s).dimension;
    const auto curve = eigenvalue_curve(s, linear_grid(0.0, 2 * dstar, 99));
    c.require(curve.size() == 100, name + " grid size");
    c.require(curve.front().lambda > 1.0, name + " lambda_0 <= 1");
    for (std::size_t i = 1; i < curve.size(); ++i) {
      if (!(curve[i].lambda < curve[i - 1].lambda)) {
        c.require(false, name + " not decreasing at " + f("%.6f", curve[i].d));
        break;
      }
    }
  }
  if (c.ok) c.detail = std::to_string(structures) + " irreducible structures, 100-point grids";
  return c;
}

Check criterion8() {
  Check c;
  const auto cs = load("middle_third");
  const auto s = solve(cs);
  const auto whole = model_collection(cs);
  for (int k = 0; k <= 12; ++k) {
    const auto exact = oracle::exhaustive_subdivision_sum_exact(cs, whole, k)[0];
    const Rational base = Rational(1) / boost::multiprecision::pow(Integer(3), static_cast<unsigned>(k));
    c.require(exact == PowerSum::term(base, Integer(1) << k), "level " + std::to_string(k) + " is not 2^k (3^-k)^d");
  }
  const auto upper = measure_upper_bounds(s);
  double worst = std::abs(upper.k_prime - 1.0);
  for (double v : upper.sums.level_sums) worst = std::max(worst, std::abs(v - 1.0));
  c.require(worst <= 1e-12, "K' deviation " + f("%.3g", worst));
  const auto lower = measure_lower_bounds(s, 3.0);
  c.require(std::abs(lower.q - 1.0) <= 1e-12, "Q = " + f("%.17g", lower.q));
  c.require(std::abs(lower.global - 0.25) <= 1e-12, "L = " + f("%.17g", lower.global));
  if (c.ok) {
    c.detail = "level sums exactly 2^k (3^-k)^d for k <= 12; K' = " + f("%.15f", upper.k_prime) + " over " + std::to_string(upper.sums.level_sums.size()) +
               " levels, Q = " + f("%.15f", lower.q) + ", L = " + f("%.15f", lower.global);
  }
  return c;
}

Check criterion9() {
  Check c;
  const auto s = load("middle_third");
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = separation_report(s, 12);
  const auto box = box_counting_dimension(s, 10);
  const double secs = seconds_since(t0);
  const double er = r.error_radius;
  const double third = 1.0 / 3;

  const SeparationEntry* a1 = nullptr;
  for (const auto& e : r.entries) {
    if (e.address.word() == std::vector<int>{1}) a1 = &e;
  }
  if (a1 == nullptr) {
    c.require(false, "no entry for A1");
    return c;
  }
  c.require(a1->sep_lo <= third && third <= a1->sep, "sep(A1) interval misses 1/3");
  c.require(a1->sep - a1->sep_lo <= 2 * er, "sep(A1) interval wider than 2 error_radius");
  c.require(a1->rel_lo <= 1.0 && 1.0 <= a1->rel_hi, "rel(A1) interval misses 1");
  // rel = sep / diam: its interval is the sep interval divided by diam(A1).
  c.require(a1->rel_hi - a1->rel_lo <= 2 * er / a1->diameter * (1 + 1e-12), "rel(A1) interval");
  c.require(r.alpha_lo <= third && third <= r.alpha, "alpha interval misses 1/3");
  c.require(r.alpha - r.alpha_lo <= 2 * er, "alpha interval wider than 2 error_radius");
  c.require(r.set_diameter <= 1.0 && 1.0 <= r.set_diameter + 2 * er, "diam(C) interval misses 1");
  c.require(r.beta_lo <= 3.0 && 3.0 <= r.beta_hi, "beta interval misses 3");
  const double ln = std::log(2.0) / std::log(3.0);
  c.require(std::abs(box.estimate - ln) <= 0.05, "box-counting estimate " + f("%.4f", box.estimate));
  c.require(secs < 10.0, "runtime " + f("%.2f s", secs));
  if (c.ok) {
    c.detail = "error_radius " + f("%.3g", er) + "; sep(A1) in [" + f("%.10f", a1->sep_lo) + ", " +
               f("%.10f", a1->sep) + "]; rel(A1) in [" + f("%.8f", a1->rel_lo) + ", " + f("%.8f", a1->rel_hi) +
               "]; alpha in [" + f("%.10f", r.alpha_lo) + ", " + f("%.10f", r.alpha) + "]; beta in [" +
               f("%.8f", r.beta_lo) + ", " + f("%.8f", r.beta_hi) + "]; box dim " + f("%.4f", box.estimate) + "; " +
               f("%.3f s", secs);
  }
  return c;
}

Check criterion10() {
  Check c;
  const auto mt = solve(load("middle_third"));
  const auto inv_mt = clopen_invariant(mt, TypeId(1), 6, 3);
  c.require(compare_invariants(inv_mt, inv_mt).verdict == Verdict::ConsistentWithSimilar, "middle third vs itself");

  io::json j{{"models", {{{"id", 1}}}},
             {"clones",
              {{{"id", 1}, {"container", 1}, {"target", 1}, {"inverse_scale", "1/5"}},
               {{"id", 2}, {"container", 1}, {"target", 1}, {"inverse_scale", "1/5"}}}}};
  const auto fifth = solve(CloneStructure(io::parse_structure(j)));
  const std::vector<double> thirds{1.0 / 3, 1.0 / 3}, fifths{0.2, 0.2};
  c.require(std::abs(mt.d() - oracle::moran_solve(thirds).value) <= 1e-9, "ln2/ln3 not pinned");
  c.require(std::abs(fifth.d() - oracle::moran_solve(fifths).value) <= 1e-9, "ln2/ln5 not pinned");
  const auto cmp = compare_invariants(inv_mt, clopen_invariant(fifth, TypeId(1), 6, 3));
  c.require(cmp.verdict == Verdict::Incomparable, "middle third vs fifths: " + to_string(cmp.verdict));

  const auto fm = solve(load("figure_matrix"));
  const auto a = clopen_invariant(fm, TypeId(1), 6, 3);
  const auto b = clopen_invariant(fm, TypeId(2), 6, 3);
  const auto ab = compare_invariants(a, b), ba = compare_invariants(b, a);
  c.require(ab.verdict == Verdict::ConsistentWithSimilar && ba.verdict == Verdict::ConsistentWithSimilar,
            "figure matrix models 1 and 2: " + to_string(ab.verdict));
  if (c.ok) {
    c.detail = "self CONSISTENT_WITH_SIMILAR; vs {1/5,1/5} INCOMPARABLE (" + f("%.6f", mt.d()) + " vs " +
               f("%.6f", fifth.d()) + "); figure matrix models CONSISTENT_WITH_SIMILAR, alpha = " +
               f("%.6f", ab.a_into_b.scalar) + ", beta = " + f("%.6f", ab.b_into_a.scalar) + " (" +
               std::to_string(a.values.size()) + " and " + std::to_string(b.values.size()) + " values)";
  }
  return c;
}

Check criterion11() {
  Check c;
  const auto mt = solve(load("middle_third"));
  const auto id = MassRatioMap::identity(mt, 4);
  double worst_id = 0;
  for (std::size_t i = 0; i < id.pairs().size(); ++i) worst_id = std::max(worst_id, std::abs(mass_ratio(id, i) - 1));
  c.require(worst_id <= 1e-12, "identity MR deviation " + f("%.3g", worst_id));
  c.require(mass_ratio_spectrum(id) == std::vector<double>{1.0}, "identity spectrum is not {1}");

  // Tree-shaped pairings: each source clone goes to a deeper clone of the
  // same type, children to the corresponding children.
  double worst_add = 0;
  int parents = 0;
  for (const char* name : {"middle_third", "figure_matrix", "planar_multi"}) {
    const auto s = solve(load(name));
    const auto& cs = s.structure;
    // Prefix for each source model: a level-2 clone of the same type.
    for (const auto& m : cs.models()) {
      std::vector<int> prefix;
      for (const auto& a : subdivide(cs, model_collection(cs), 2)) {
        if (a.type(cs) == m.id) {
          prefix = a.word();
          break;
        }
      }
      if (prefix.empty()) continue;
      const TypeId target_root = cs.clone(prefix.front()).container;
      std::vector<MassRatioMap::Pair> pairs;
      std::vector<CloneAddress> layer{CloneAddress(m.id)};
      for (int k = 0; k <= 3; ++k) {
        for (const auto& a : layer) {
          std::vector<int> w = prefix;
          w.insert(w.end(), a.word().begin(), a.word().end());
          pairs.emplace_back(a, CloneAddress(target_root, w));
        }
        layer = subdivide(cs, layer, 1);
      }
      const MassRatioMap map(s, s, pairs);
      for (std::size_t i = 0; i < pairs.size(); ++i) {
        if (const auto avg = child_weighted_mass_ratio(map, i)) {
          worst_add = std::max(worst_add, std::abs(*avg - mass_ratio(map, i)));
          ++parents;
        }
      }
    }
  }
  c.require(parents > 0, "no parents checked");
  c.require(worst_add <= 1e-12, "MR additivity defect " + f("%.3g", worst_add));
  if (c.ok) {
    c.detail = std::to_string(id.pairs().size()) + " identity pairs, spectrum {1}; " + std::to_string(parents) +
               " parents, worst additivity defect " + f("%.2g", worst_add);
  }
  return c;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Check()>>> criteria{
      {"middle-third dimension", criterion1},
      {"figure-matrix dimension and lambda_0", criterion2},
      {"subdivision identity", criterion3},
      {"matrix power consistency", criterion4},
      {"transpose fixed point and sigma-additivity", criterion5},
      {"irreducibility classification", criterion6},
      {"eigenvalue curve monotonicity", criterion7},
      {"covering constants", criterion8},
      {"middle-third geometry", criterion9},
      {"clopen invariant comparisons", criterion10},
      {"mass ratios", criterion11},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Check c;
    try {
      c = criteria[i].second();
    } catch (const std::exception& e) {
      c.ok = false;
      c.detail = std::string("exception: ") + e.what();
    }
    std::printf("%s criterion %zu (%s): %s\n", c.ok ? "PASS" : "FAIL", i + 1, criteria[i].first, c.detail.c_str());
    if (!c.ok) ++failed;
  }
  return failed;
}
