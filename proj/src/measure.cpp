#include "mmc/measure.hpp"

#include <cmath>

#include "mmc/error.hpp"
#include "mmc/spectral.hpp"

namespace mmc {

SolvedStructure solve(CloneStructure s, double tol) {
  DimensionResult dim = solve_dimension(s, tol);
  Eigen::VectorXd rel = dim.left_eigenvector / dim.left_eigenvector.sum();
  return SolvedStructure{std::move(s), std::move(dim), std::move(rel)};
}

Eigen::VectorXd relative_measures(const CloneStructure& s) { return solve(s).relative_measures; }

double transpose_fixed_point_residual(const SolvedStructure& s) {
  const auto m = build_matrix(s.structure, s.d());
  const auto& v = s.relative_measures;
  return (m.entries.transpose() * v - v).lpNorm<1>() / v.lpNorm<1>();
}

double clone_measure(const SolvedStructure& s, const CloneAddress& addr) {
  if (!check_address(s.structure, addr)) {
    throw ValidationError("address " + to_string(addr) + " violates the chaining rule");
  }
  const double scale = addr.cumulative_inverse_scale(s.structure).value;
  return std::pow(scale, s.d()) * s.relative_measures(static_cast<Eigen::Index>(addr.type(s.structure).slot()));
}

namespace {

Eigen::VectorXd model_quantities(const CloneStructure& s, double d) {
  Eigen::VectorXd w(s.model_count());
  for (const auto& m : s.models()) w(static_cast<Eigen::Index>(m.id.slot())) = std::pow(m.diameter.value, d);
  return w;
}

}  // namespace

CoverSums cover_sum_sequence(const SolvedStructure& s, int max_level) {
  const auto m = build_matrix(s.structure, s.d());
  Eigen::VectorXd v = model_quantities(s.structure, s.d());
  CoverSums out;
  out.level_sums.push_back(v.sum());
  int quiet = 0;
  for (int k = 1; k <= max_level; ++k) {
    v = m.entries * v;
    const double sum = v.sum();
    const double prev = out.level_sums.back();
    out.level_sums.push_back(sum);
    quiet = std::abs(sum - prev) < 1e-10 * std::abs(sum) ? quiet + 1 : 0;
    if (quiet == 3 && out.converged_level < 0) {
      out.converged_level = k;
      break;
    }
  }
  return out;
}

UpperBounds measure_upper_bounds(const SolvedStructure& s) {
  const auto m = build_matrix(s.structure, s.d());
  const Eigen::MatrixXd limit = power_limit(m, s.dimension.frobenius);
  const Eigen::VectorXd w = model_quantities(s.structure, s.d());
  UpperBounds out;
  out.per_model = (limit.colwise().sum().transpose().array() * w.array()).matrix();
  out.k_prime = out.per_model.sum();
  out.sums = cover_sum_sequence(s);
  return out;
}

LowerBounds measure_lower_bounds(const SolvedStructure& s, std::optional<double> beta) {
  if (beta && !(*beta >= 1.0)) throw ValidationError("beta must be at least 1");
  const auto m = build_matrix(s.structure, s.d());
  const UpperBounds upper = measure_upper_bounds(s);
  LowerBounds out;
  out.q = uniform_power_bound(m, s.dimension.frobenius);
  out.beta = beta.value_or(1.0);
  out.clone_covers_only = !beta.has_value();
  out.global = std::pow(out.beta, -s.d()) * upper.k_prime / (2.0 * out.q);
  out.per_model = out.global * s.relative_measures;
  return out;
}

MeasureReport measure_report(const SolvedStructure& s, std::optional<double> beta) {
  const UpperBounds upper = measure_upper_bounds(s);
  const LowerBounds lower = measure_lower_bounds(s, beta);
  MeasureReport r;
  r.dimension = s.d();
  r.relative_measures = s.relative_measures;
  r.upper_bounds = upper.per_model;
  r.lower_bounds = lower.per_model;
  r.k_prime = upper.k_prime;
  r.q = lower.q;
  r.beta = beta;
  r.clone_covers_only = lower.clone_covers_only;
  r.fixed_point_residual = transpose_fixed_point_residual(s);
  r.cover_converged_level = upper.sums.converged_level;
  return r;
}

}  // namespace mmc
