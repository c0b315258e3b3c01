#include "mmc/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "mmc/dimension.hpp"
#include "mmc/error.hpp"
#include "mmc/geometry.hpp"
#include "mmc/invariants.hpp"
#include "mmc/io.hpp"
#include "mmc/measure.hpp"
#include "mmc/oracle.hpp"
#include "mmc/spectral.hpp"

namespace mmc::cli {

namespace {

using io::json;

struct Options {
  std::vector<std::string> files;
  std::optional<double> tol;
  std::optional<int> level;
  std::optional<int> clone_level;
  int L = 6;
  int S = 3;
  int levels = 3;
  std::optional<int> model;
  std::optional<int> k;
  std::string curve;
  std::string out_path;
  std::string d_text;
  std::string pairs_path;
  bool json = false;
  bool exact = false;
};

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string g17(double v) { return fmt("%.17g", v); }

json vector_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

json matrix_json(const Eigen::MatrixXd& m) {
  json a = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    a.push_back(row);
  }
  return a;
}

std::string vector_text(const Eigen::VectorXd& v) {
  std::string s = "[";
  for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? ", " : "") + g17(v(i));
  return s + "]";
}

void require_files(const Options& o, std::size_t lo, std::size_t hi, const std::string& usage) {
  if (o.files.size() < lo || o.files.size() > hi) throw ValidationError("usage: " + usage);
}

double tolerance(const Options& o, double fallback) {
  const double t = o.tol.value_or(fallback);
  if (!(t > 0.0)) throw ValidationError("--tol must be positive");
  return t;
}

int level_option(const Options& o, int fallback, int cap) {
  const int l = o.level.value_or(fallback);
  if (l < 0 || l > cap) throw ValidationError("--level must lie in 0.." + std::to_string(cap));
  return l;
}

void check_invariant_caps(const Options& o) {
  if (o.L < 0 || o.L > kMaxInvariantLevel) throw ValidationError("--L must lie in 0.." + std::to_string(kMaxInvariantLevel));
  if (o.S < 1 || o.S > kMaxInvariantUnion) throw ValidationError("--S must lie in 1.." + std::to_string(kMaxInvariantUnion));
}

TypeId model_option(const CloneStructure& s, const Options& o) {
  const int m = o.model.value_or(1);
  if (m < 1 || m > s.model_count()) throw ValidationError("--model out of range");
  return TypeId(m);
}

// --d: a number, "p/q", or "dstar" (the default) for the solved dimension.
double exponent_option(const CloneStructure& s, const Options& o, const std::string& fallback) {
  const std::string text = o.d_text.empty() ? fallback : o.d_text;
  if (text == "dstar") return solve_dimension(s, tolerance(o, 1e-12)).dimension;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception&) {
    j = text;
  }
  const double d = io::parse_scalar(j, "--d").value;
  if (!(d >= 0.0) || !std::isfinite(d)) throw ValidationError("--d must be a non-negative number");
  return d;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ValidationError("cannot write " + path);
  f << text;
}

void emit(const Options& o, std::ostream& out, const json& j, const std::string& text) {
  if (o.json) {
    out << j.dump(2) << "\n";
  } else {
    out << text;
  }
}

int cmd_validate(const Options& o, std::ostream& out, std::ostream& err) {
  require_files(o, 1, 1, "validate FILE");
  const StructureDefinition def = io::read_structure_definition(o.files[0]);
  ValidationReport report = validate_structure(def);
  std::string embedding = "none";
  if (report.ok()) {
    const CloneStructure s(def);
    const bool any = std::ranges::any_of(s.models(), [](const Model& m) { return m.region.has_value(); }) ||
                     std::ranges::any_of(s.clones(), [](const CloneMapSpec& c) { return c.placement.has_value(); });
    if (any) {
      const auto er = validate_embedding(s);
      embedding = er.ok() ? "valid" : "invalid";
      report.violations.insert(report.violations.end(), er.violations.begin(), er.violations.end());
    }
  }
  json j{{"valid", report.ok()},
         {"models", def.models.size()},
         {"clones", def.clones.size()},
         {"embedding", embedding},
         {"violations", report.violations}};
  std::ostringstream text;
  text << (report.ok() ? "valid" : "invalid") << ": " << def.models.size() << " models, " << def.clones.size()
       << " clones, embedding " << embedding << "\n";
  for (const auto& v : report.violations) text << "  " << v << "\n";
  if (report.ok()) {
    json counts = json::array();
    text << "counts (row = type, column = model):\n";
    for (Eigen::Index i = 0; i < report.counts.rows(); ++i) {
      json row = json::array();
      text << " ";
      for (Eigen::Index jj = 0; jj < report.counts.cols(); ++jj) {
        row.push_back(report.counts(i, jj));
        text << " " << report.counts(i, jj);
      }
      counts.push_back(row);
      text << "\n";
    }
    j["counts"] = counts;
  }
  emit(o, out, j, text.str());
  if (!report.ok()) {
    err << json{{"error", "validation"}, {"message", "structure is invalid"}, {"violations", report.violations}}.dump()
        << "\n";
    return 1;
  }
  return 0;
}

int cmd_matrix(const Options& o, std::ostream& out) {
  require_files(o, 1, 1, "matrix FILE");
  const json input = io::read_json_file(o.files[0]);
  SpectralMatrix m;
  std::optional<ExactMatrix> exact;
  if (input.is_object() && input.contains("entries")) {
    const json& e = input["entries"];
    if (!e.is_array() || e.empty()) throw ValidationError("/entries: expected a non-empty array");
    const auto n = static_cast<Eigen::Index>(e.size());
    Eigen::MatrixXd entries(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const json& row = e[static_cast<std::size_t>(i)];
      if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) {
        throw ValidationError("/entries/" + std::to_string(i) + ": expected a row of " + std::to_string(n) + " numbers");
      }
      for (Eigen::Index j = 0; j < n; ++j) {
        const json& x = row[static_cast<std::size_t>(j)];
        if (!x.is_number() || x.get<double>() < 0.0) {
          throw ValidationError("/entries/" + std::to_string(i) + "/" + std::to_string(j) +
                                ": expected a non-negative number");
        }
        entries(i, j) = x.get<double>();
      }
    }
    double d = 0.0;
    if (input.contains("d")) d = io::parse_scalar(input["d"], "/d").value;
    m = SpectralMatrix::from_entries(entries, d);
    if (o.exact) throw ValidationError("--exact needs a structure file, not a matrix dump");
  } else {
    const CloneStructure s(io::parse_structure(input));
    m = build_matrix(s, exponent_option(s, o, "0"));
    if (o.exact) {
      if (!s.is_exact()) throw ValidationError("--exact needs rational scales and diameters");
      exact = build_matrix_exact(s);
    }
  }
  const auto irr = is_irreducible(m);
  json j{{"d", m.exponent}, {"entries", matrix_json(m.entries)}, {"irreducible", irr.irreducible},
         {"strongly_connected", irr.strongly_connected}, {"period", irr.period}};
  j["witness_k"] = irr.witness_k ? json(*irr.witness_k) : json(nullptr);
  json zeros = json::array();
  for (auto [r, c] : irr.persistent_zeros) zeros.push_back({r, c});
  j["persistent_zeros"] = zeros;

  std::ostringstream text;
  text << "M_d at d = " << g17(m.exponent) << "\n";
  for (Eigen::Index r = 0; r < m.entries.rows(); ++r) {
    text << " ";
    for (Eigen::Index c = 0; c < m.entries.cols(); ++c) text << " " << fmt("%.12g", m.entries(r, c));
    text << "\n";
  }
  if (exact) {
    json ex = json::array();
    text << "exact entries:\n";
    for (int r = 0; r < exact->size(); ++r) {
      json row = json::array();
      for (int c = 0; c < exact->size(); ++c) {
        row.push_back((*exact)(r, c).to_string());
        text << "  (" << r + 1 << "," << c + 1 << ") " << (*exact)(r, c).to_string() << "\n";
      }
      ex.push_back(row);
    }
    j["exact_entries"] = ex;
  }
  text << "irreducible: " << (irr.irreducible ? "yes" : "no");
  if (irr.witness_k) text << " (all entries of M^" << *irr.witness_k << " positive)";
  text << "\nstrongly connected: " << (irr.strongly_connected ? "yes" : "no") << ", period " << irr.period << "\n";
  if (!irr.persistent_zeros.empty()) {
    text << "zero in every power at:";
    for (auto [r, c] : irr.persistent_zeros) text << " (" << r << "," << c << ")";
    text << "\n";
  }
  if (irr.strongly_connected) {
    const auto f = frobenius(m);
    j["eigenvalue"] = f.eigenvalue;
    j["right"] = vector_json(f.right);
    j["left"] = vector_json(f.left);
    j["residual"] = f.residual;
    text << "eigenvalue: " << g17(f.eigenvalue) << "\nright: " << vector_text(f.right)
         << "\nleft: " << vector_text(f.left) << "\n";
  } else {
    j["eigenvalue"] = nullptr;
  }
  emit(o, out, j, text.str());
  return 0;
}

int cmd_dim(const Options& o, std::ostream& out) {
  require_files(o, 1, 1, "dim FILE");
  const CloneStructure s = io::read_structure(o.files[0]);
  const auto r = solve_dimension(s, tolerance(o, 1e-12));
  json j{{"dimension", r.dimension},
         {"bracket", {r.bracket_lo, r.bracket_hi}},
         {"eigenvalue_at_solution", r.eigenvalue_at_solution},
         {"iterations", r.iterations},
         {"relative_measures", vector_json(r.left_eigenvector)}};
  std::ostringstream text;
  text << "d* = " << fmt("%.16g", r.dimension) << "\nbracket = [" << g17(r.bracket_lo) << ", " << g17(r.bracket_hi)
       << "]\nlambda(d*) = " << g17(r.eigenvalue_at_solution) << "\niterations = " << r.iterations << "\n";
  if (!o.curve.empty()) {
    double d0 = 0, d1 = 0;
    int steps = 0;
    char tail = 0;
    if (std::sscanf(o.curve.c_str(), "%lf:%lf:%d%c", &d0, &d1, &steps, &tail) != 3 || steps < 1 || !(d1 > d0) ||
        d0 < 0) {
      throw ValidationError("--curve expects d0:d1:steps with 0 <= d0 < d1 and steps >= 1");
    }
    const auto grid = linear_grid(d0, d1, steps);
    const auto curve = eigenvalue_curve(s, grid);
    std::string csv = "d,lambda\n";
    json jc = json::array();
    for (const auto& p : curve) {
      csv += g17(p.d) + "," + g17(p.lambda) + "\n";
      jc.push_back({{"d", p.d}, {"lambda", p.lambda}});
    }
    if (!o.out_path.empty()) {
      write_file(o.out_path, csv);
      text << "curve written to " << o.out_path << "\n";
    } else {
      text << csv;
    }
    j["curve"] = jc;
  }
  emit(o, out, j, text.str());
  return 0;
}

// Certified upper bound on beta from the embedding, when there is one.
std::optional<double> embedding_beta(const CloneStructure& s, const Options& o) {
  if (!s.has_embedding() || !validate_embedding(s).ok()) return std::nullopt;
  const auto rep = separation_report(s, level_option(o, 8, 24), 1);
  return std::max(1.0, rep.beta_hi);
}

int cmd_measure(const Options& o, std::ostream& out) {
  require_files(o, 1, 1, "measure FILE");
  CloneStructure s = io::read_structure(o.files[0]);
  const auto beta = embedding_beta(s, o);
  const SolvedStructure solved = solve(std::move(s), tolerance(o, 1e-12));
  const auto r = measure_report(solved, beta);
  json j{{"dimension", r.dimension},
         {"relative_measures", vector_json(r.relative_measures)},
         {"upper_bounds", vector_json(r.upper_bounds)},
         {"lower_bounds", vector_json(r.lower_bounds)},
         {"k_prime", r.k_prime},
         {"q", r.q},
         {"beta", r.beta ? json(*r.beta) : json(nullptr)},
         {"clone_covers_only", r.clone_covers_only},
         {"fixed_point_residual", r.fixed_point_residual},
         {"cover_converged_level", r.cover_converged_level}};
  std::ostringstream text;
  text << "d* = " << fmt("%.16g", r.dimension) << "\nrelative measures: " << vector_text(r.relative_measures)
       << "\nupper bounds U_i: " << vector_text(r.upper_bounds) << "\nlower bounds L_i: "
       << vector_text(r.lower_bounds) << "\nK' = " << g17(r.k_prime) << "\nQ = " << g17(r.q) << "\nbeta = "
       << (r.beta ? g17(*r.beta) : std::string("1 (clone covers only)")) << "\ntranspose fixed-point residual = "
       << g17(r.fixed_point_residual) << "\n";
  emit(o, out, j, text.str());
  return 0;
}

// Without --model: every model, i.e. the whole set.
std::vector<CloneAddress> collection_option(const CloneStructure& s, const Options& o) {
  if (!o.model) return model_collection(s);
  return {CloneAddress(model_option(s, o))};
}

json power_sums_json(const std::vector<PowerSum>& v) {
  json a = json::array();
  for (const auto& p : v) a.push_back(p.to_string());
  return a;
}

int cmd_subdivide(const Options& o, std::ostream& out) {
  require_files(o, 1, 1, "subdivide FILE --k K");
  const CloneStructure s = io::read_structure(o.files[0]);
  const int k = o.k.value_or(1);
  if (k < 0 || k > 64) throw ValidationError("--k must lie in 0..64");
  const auto coll = collection_option(s, o);
  json j{{"k", k}, {"clones", kernels::subdivision_count(s, coll, k)}};
  std::ostringstream text;
  text << "level-" << k << " subdivision: " << kernels::subdivision_count(s, coll, k) << " clones\n";
  if (o.exact) {
    if (!s.is_exact()) throw ValidationError("--exact needs rational scales and diameters");
    if (k > 12) throw ValidationError("--exact supports --k up to 12");
    const auto v = build_matrix_exact(s).pow(k).apply(d_quantity_exact(s, coll));
    j["exact"] = power_sums_json(v);
    for (std::size_t i = 0; i < v.size(); ++i) text << "  model " << i + 1 << ": " << v[i].to_string() << "\n";
  } else {
    const double d = exponent_option(s, o, "dstar");
    Eigen::VectorXd v = d_quantity(s, coll, d).components;
    const Eigen::MatrixXd M = build_matrix(s, d).entries;
    for (int i = 0; i < k; ++i) v = M * v;
    j["d"] = d;
    j["components"] = vector_json(v);
    text << "d = " << g17(d) << "\n";
    for (Eigen::Index i = 0; i < v.size(); ++i) text << "  model " << i + 1 << ": " << g17(v(i)) << "\n";
  }
  emit(o, out, j, text.str());
  return 0;
}

std::string address_text(const CloneAddress& a) { return to_string(a); }

int cmd_separation(const Options& o, std::ostream& out) {
  require_files(o, 1, 1, "separation FILE --level K");
  const CloneStructure s = io::read_structure(o.files[0]);
  const int level = level_option(o, 10, 24);
  const int clone_level = o.clone_level.value_or(std::min(level, 6));
  const auto r = separation_report(s, level, clone_level);
  json entries = json::array();
  std::ostringstream text;
  text << "sampling level " << r.level << ", error radius " << g17(r.error_radius) << "\n";
  text << "address                  level  sep                  sep_lo               diam                 rel\n";
  for (const auto& e : r.entries) {
    entries.push_back({{"address", io::address_to_json(e.address)},
                       {"level", e.address.level()},
                       {"sep", std::isfinite(e.sep) ? json(e.sep) : json("inf")},
                       {"sep_lo", std::isfinite(e.sep_lo) ? json(e.sep_lo) : json("inf")},
                       {"diameter", e.diameter},
                       {"rel", std::isfinite(e.rel) ? json(e.rel) : json("inf")}});
    char line[256];
    std::snprintf(line, sizeof line, "%-24s %5d  %-20.14g %-20.14g %-20.14g %.14g\n", address_text(e.address).c_str(),
                  e.address.level(), e.sep, e.sep_lo, e.diameter, e.rel);
    text << line;
  }
  json j{{"level", r.level},
         {"clone_level", r.clone_level},
         {"error_radius", r.error_radius},
         {"entries", entries},
         {"alpha", r.alpha},
         {"alpha_interval", {r.alpha_lo, r.alpha}},
         {"set_diameter_interval", {r.set_diameter, r.set_diameter + 2 * r.error_radius}},
         {"beta", r.beta},
         {"beta_interval", {r.beta_lo, r.beta_hi}},
         {"xi_bound", r.xi_bound}};
  text << "alpha = " << g17(r.alpha) << " in [" << g17(r.alpha_lo) << ", " << g17(r.alpha) << "]\n";
  text << "diam(C) in [" << g17(r.set_diameter) << ", " << g17(r.set_diameter + 2 * r.error_radius) << "]\n";
  text << "beta = " << g17(r.beta) << " in [" << g17(r.beta_lo) << ", " << g17(r.beta_hi) << "]\n";
  text << "xi >= " << g17(r.xi_bound) << "\n";
  emit(o, out, j, text.str());
  return 0;
}

int cmd_boxdim(const Options& o, std::ostream& out) {
  require_files(o, 1, 1, "boxdim FILE --level K");
  const CloneStructure s = io::read_structure(o.files[0]);
  const auto r = box_counting_dimension(s, level_option(o, 10, 24));
  json rows = json::array();
  std::ostringstream text;
  text << "estimate = " << fmt("%.6f", r.estimate) << (r.degenerate ? " (degenerate: one sample per model)" : "")
       << "\nlevel " << r.level << ", error radius " << g17(r.error_radius) << "\nscale                 boxes\n";
  for (std::size_t i = 0; i < r.scales.size(); ++i) {
    rows.push_back({{"scale", r.scales[i]}, {"count", r.counts[i]}});
    text << fmt("%-21.14g", r.scales[i]) << " " << r.counts[i] << "\n";
  }
  json j{{"estimate", r.estimate}, {"intercept", r.intercept}, {"level", r.level},
         {"error_radius", r.error_radius}, {"degenerate", r.degenerate}, {"regression", rows}};
  emit(o, out, j, text.str());
  return 0;
}

int cmd_render(const Options& o, std::ostream& out) {
  require_files(o, 1, 1, "render FILE --levels K --out FILE.svg");
  const CloneStructure s = io::read_structure(o.files[0]);
  if (o.levels < 0 || o.levels > 10) throw ValidationError("--levels must lie in 0..10");
  const std::string svg = render_svg(s, o.levels);
  if (o.out_path.empty()) {
    out << svg;
    return 0;
  }
  write_file(o.out_path, svg);
  emit(o, out, json{{"written", o.out_path}, {"levels", o.levels}}, "wrote " + o.out_path + "\n");
  return 0;
}

json invariant_json(const TruncatedClopenInvariant& inv) {
  return json{{"base_model", inv.base_model.value()}, {"level_cap", inv.level_cap},
              {"union_cap", inv.union_cap},           {"dimension", inv.dimension},
              {"dedup_tolerance", inv.dedup_tolerance}, {"values", inv.values},
              {"depths", inv.depths}};
}

int cmd_invariant(const Options& o, std::ostream& out) {
  require_files(o, 1, 1, "invariant FILE --model J --L L --S S");
  check_invariant_caps(o);
  CloneStructure s = io::read_structure(o.files[0]);
  const TypeId model = model_option(s, o);
  const SolvedStructure solved = solve(std::move(s));
  const auto inv = clopen_invariant(solved, model, o.L, o.S);
  if (o.json) {
    out << invariant_json(inv).dump(2) << "\n";
  } else {
    out << json(inv.values).dump() << "\n";
  }
  return 0;
}

json search_json(const ScalarSearch& r) {
  json j{{"found", r.found}, {"candidates", r.candidates}, {"tested", r.tested}};
  if (r.found) {
    j["scalar"] = r.scalar;
  } else {
    j["best_candidate"] = r.best_candidate;
    j["witness"] = r.witness;
    j["witness_depth"] = r.witness_depth;
  }
  return j;
}

int cmd_compare(const Options& o, std::ostream& out) {
  require_files(o, 2, 2, "compare A.json B.json --L L --S S");
  check_invariant_caps(o);
  const double tol = tolerance(o, 1e-9);
  CloneStructure a = io::read_structure(o.files[0]);
  CloneStructure b = io::read_structure(o.files[1]);
  const TypeId ma = model_option(a, o), mb = model_option(b, o);
  const SolvedStructure sa = solve(std::move(a)), sb = solve(std::move(b));
  const auto ia = clopen_invariant(sa, ma, o.L, o.S);
  const auto ib = clopen_invariant(sb, mb, o.L, o.S);
  const auto c = compare_invariants(ia, ib, tol);
  json j{{"verdict", to_string(c.verdict)},
         {"dimension_a", c.dimension_a},
         {"dimension_b", c.dimension_b},
         {"L", o.L},
         {"S", o.S},
         {"values_a", ia.values.size()},
         {"values_b", ib.values.size()}};
  if (c.verdict != Verdict::Incomparable) {
    j["alpha"] = search_json(c.a_into_b);
    j["beta"] = search_json(c.b_into_a);
  }
  if (o.json) {
    out << j.dump(2) << "\n";
  } else {
    out << to_string(c.verdict) << "\n" << j.dump() << "\n";
  }
  return 0;
}

int cmd_massratio(const Options& o, std::ostream& out) {
  require_files(o, 1, 2, "massratio SOURCE [TARGET] [--pairs PAIRS.json | --level K]");
  CloneStructure a = io::read_structure(o.files[0]);
  const SolvedStructure src = solve(std::move(a));
  std::optional<SolvedStructure> tgt_storage;
  if (o.files.size() == 2) tgt_storage.emplace(solve(io::read_structure(o.files[1])));
  const SolvedStructure& tgt = tgt_storage ? *tgt_storage : src;

  std::optional<MassRatioMap> map;
  if (o.pairs_path.empty()) {
    if (o.files.size() == 2) throw ValidationError("--pairs is required for two structures");
    map.emplace(MassRatioMap::identity(src, level_option(o, 2, 8)));
  } else {
    json pj = io::read_json_file(o.pairs_path);
    if (pj.is_object() && pj.contains("pairs")) pj = pj["pairs"];
    if (!pj.is_array()) throw ValidationError(o.pairs_path + ": expected an array of [source, target] pairs");
    std::vector<MassRatioMap::Pair> pairs;
    for (std::size_t i = 0; i < pj.size(); ++i) {
      const json& p = pj[i];
      if (!p.is_array() || p.size() != 2) {
        throw ValidationError(o.pairs_path + ": /" + std::to_string(i) + ": expected [source, target]");
      }
      pairs.emplace_back(io::parse_address(src.structure, p[0]), io::parse_address(tgt.structure, p[1]));
    }
    map.emplace(src, tgt, std::move(pairs));
  }

  json rows = json::array();
  std::ostringstream text;
  text << "source                   target                   MR\n";
  for (std::size_t i = 0; i < map->pairs().size(); ++i) {
    const auto& [s_addr, t_addr] = map->pairs()[i];
    const double mr = mass_ratio(*map, i);
    json row{{"source", io::address_to_json(s_addr)}, {"target", io::address_to_json(t_addr)}, {"mass_ratio", mr}};
    if (const auto avg = child_weighted_mass_ratio(*map, i)) row["children_weighted"] = *avg;
    rows.push_back(row);
    char line[256];
    std::snprintf(line, sizeof line, "%-24s %-24s %.15g\n", to_string(s_addr).c_str(), to_string(t_addr).c_str(), mr);
    text << line;
  }
  json j{{"pairs", rows}};
  try {
    const auto spectrum = mass_ratio_spectrum(*map);
    j["spectrum"] = spectrum;
    text << "spectrum: " << json(spectrum).dump() << "\n";
  } catch (const ValidationError&) {
    j["spectrum"] = nullptr;
    text << "spectrum: no parent/child pairs\n";
  }
  emit(o, out, j, text.str());
  return 0;
}

int cmd_oracle(const Options& o, std::ostream& out) {
  if (o.files.empty()) throw ValidationError("usage: oracle moran A1 A2 ... | charpoly FILE | enumerate FILE --k K");
  const std::string op = o.files[0];
  json j;
  std::ostringstream text;
  if (op == "moran") {
    std::vector<double> scales;
    for (std::size_t i = 1; i < o.files.size(); ++i) {
      json x;
      try {
        x = json::parse(o.files[i]);
      } catch (const json::exception&) {
        x = o.files[i];
      }
      scales.push_back(io::parse_scalar(x, "scale " + std::to_string(i)).value);
    }
    const auto r = oracle::moran_solve(scales, tolerance(o, 1e-13));
    j = {{"quantity", r.quantity}, {"value", r.value}, {"method", r.method}, {"tolerance", r.tolerance}};
    text << r.quantity << " = " << fmt("%.16g", r.value) << " (" << r.method << ")\n";
  } else if (op == "charpoly") {
    if (o.files.size() != 2) throw ValidationError("usage: oracle charpoly FILE");
    const auto r = oracle::char_poly_root_2x2(io::read_structure(o.files[1]), tolerance(o, 1e-13));
    j = {{"quantity", r.quantity}, {"value", r.value}, {"method", r.method}, {"tolerance", r.tolerance}};
    text << r.quantity << " = " << fmt("%.16g", r.value) << " (" << r.method << ")\n";
  } else if (op == "enumerate") {
    if (o.files.size() != 2) throw ValidationError("usage: oracle enumerate FILE --k K");
    const CloneStructure s = io::read_structure(o.files[1]);
    const int k = o.k.value_or(1);
    const auto coll = collection_option(s, o);
    j = {{"k", k}, {"method", "explicit enumeration of level-k clones"}};
    if (o.exact) {
      const auto v = oracle::exhaustive_subdivision_sum_exact(s, coll, k);
      j["exact"] = power_sums_json(v);
      for (std::size_t i = 0; i < v.size(); ++i) text << "  model " << i + 1 << ": " << v[i].to_string() << "\n";
    } else {
      const double d = exponent_option(s, o, "dstar");
      const auto q = oracle::exhaustive_subdivision_sum(s, coll, d, k);
      j["d"] = d;
      j["components"] = vector_json(q.components);
      text << "d = " << g17(d) << "\n";
      for (Eigen::Index i = 0; i < q.components.size(); ++i) {
        text << "  model " << i + 1 << ": " << g17(q.components(i)) << "\n";
      }
    }
  } else {
    throw ValidationError("unknown oracle '" + op + "' (expected moran, charpoly or enumerate)");
  }
  emit(o, out, j, text.str());
  return 0;
}

void error_line(std::ostream& err, const std::string& kind, const std::string& message) {
  err << json{{"error", kind}, {"message", message}}.dump() << "\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dimension, measure and invariants of graph-directed Cantor sets", "mmcantor"};
  app.fallthrough();
  app.require_subcommand(1, 1);
  Options o;
  app.add_option("--tol", o.tol, "numeric tolerance");
  app.add_option("--level", o.level, "sampling level (geometry) or pairing depth (massratio)");
  app.add_option("--clone-level", o.clone_level, "deepest clone level in separation reports");
  app.add_option("--L", o.L, "clopen invariant level cap")->capture_default_str();
  app.add_option("--S", o.S, "clopen invariant union cap")->capture_default_str();
  app.add_option("--levels", o.levels, "render depth")->capture_default_str();
  app.add_option("--model", o.model, "model id (default: model 1, or all models for subdivide/enumerate)");
  app.add_option("--k", o.k, "subdivision depth");
  app.add_option("--d", o.d_text, "exponent: number, p/q or dstar");
  app.add_option("--curve", o.curve, "eigenvalue curve d0:d1:steps");
  app.add_option("--out", o.out_path, "output file");
  app.add_option("--pairs", o.pairs_path, "clone pairing JSON");
  app.add_flag("--json", o.json, "machine-readable output");
  app.add_flag("--exact", o.exact, "rational arithmetic where available");

  struct Command {
    const char* name;
    const char* help;
  };
  const Command commands[] = {
      {"validate", "check a structure file"},
      {"matrix", "M_d, irreducibility and Frobenius data"},
      {"dim", "Hausdorff dimension d*"},
      {"measure", "relative measures and measure bounds"},
      {"subdivide", "d-quantities of the k-fold subdivision"},
      {"separation", "separation report of an embedding"},
      {"boxdim", "box-counting estimate of an embedding"},
      {"render", "SVG of the construction levels"},
      {"invariant", "truncated clopen invariant"},
      {"compare", "compare two truncated clopen invariants"},
      {"massratio", "mass ratios of a clone pairing"},
      {"oracle", "brute-force reference computations"},
  };
  for (const auto& c : commands) app.add_subcommand(c.name, c.help)->add_option("args", o.files, "input files");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    error_line(err, "usage", e.what());
    return 1;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    if (name == "validate") return cmd_validate(o, out, err);
    if (name == "matrix") return cmd_matrix(o, out);
    if (name == "dim") return cmd_dim(o, out);
    if (name == "measure") return cmd_measure(o, out);
    if (name == "subdivide") return cmd_subdivide(o, out);
    if (name == "separation") return cmd_separation(o, out);
    if (name == "boxdim") return cmd_boxdim(o, out);
    if (name == "render") return cmd_render(o, out);
    if (name == "invariant") return cmd_invariant(o, out);
    if (name == "compare") return cmd_compare(o, out);
    if (name == "massratio") return cmd_massratio(o, out);
    return cmd_oracle(o, out);
  } catch (const ValidationError& e) {
    error_line(err, "validation", e.what());
    return 1;
  } catch (const ComputeError& e) {
    error_line(err, "compute", e.what());
    return 2;
  } catch (const std::exception& e) {
    error_line(err, "compute", e.what());
    return 2;
  }
}

}  // namespace mmc::cli
