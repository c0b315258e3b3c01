#include "mmc/spectral.hpp"

#include <cmath>
#include <deque>
#include <numeric>
#include <sstream>

#include "mmc/error.hpp"

namespace mmc {

SpectralMatrix SpectralMatrix::from_entries(Eigen::MatrixXd entries, double exponent) {
  if (entries.rows() != entries.cols() || entries.rows() == 0) {
    throw ValidationError("spectral matrix must be square and non-empty");
  }
  if ((entries.array() < 0.0).any() || !entries.allFinite()) {
    throw ValidationError("spectral matrix entries must be finite and non-negative");
  }
  SpectralMatrix m;
  m.exponent = exponent;
  m.support = (entries.array() > 0.0).matrix();
  m.entries = std::move(entries);
  return m;
}

SpectralMatrix build_matrix(const CloneStructure& s, double d) {
  if (!(d >= 0.0)) throw ValidationError("exponent d must be non-negative");
  const int n = s.model_count();
  SpectralMatrix m;
  m.exponent = d;
  m.entries = Eigen::MatrixXd::Zero(n, n);
  for (const auto& c : s.clones()) {
    m.entries(static_cast<Eigen::Index>(c.target.slot()), static_cast<Eigen::Index>(c.container.slot())) +=
        std::pow(c.inverse_scale.value, d);
  }
  m.support = (s.counts().array() > 0).matrix();
  return m;
}

ExactMatrix ExactMatrix::identity(int n) {
  ExactMatrix out(n);
  for (int i = 0; i < n; ++i) out(i, i) = PowerSum::term(1);
  return out;
}

ExactMatrix operator*(const ExactMatrix& a, const ExactMatrix& b) {
  const int n = a.size();
  ExactMatrix out(n);
  for (int i = 0; i < n; ++i) {
    for (int l = 0; l < n; ++l) {
      if (a(i, l).is_zero()) continue;
      for (int j = 0; j < n; ++j) {
        if (!b(l, j).is_zero()) out(i, j) += a(i, l) * b(l, j);
      }
    }
  }
  return out;
}

std::vector<PowerSum> ExactMatrix::apply(const std::vector<PowerSum>& v) const {
  std::vector<PowerSum> out(static_cast<std::size_t>(n_));
  for (int i = 0; i < n_; ++i) {
    for (int j = 0; j < n_; ++j) out[static_cast<std::size_t>(i)] += (*this)(i, j) * v[static_cast<std::size_t>(j)];
  }
  return out;
}

ExactMatrix ExactMatrix::pow(int k) const {
  ExactMatrix out = identity(n_);
  for (int i = 0; i < k; ++i) out = out * *this;
  return out;
}

Eigen::MatrixXd ExactMatrix::evaluate(double d) const {
  Eigen::MatrixXd out(n_, n_);
  for (int i = 0; i < n_; ++i) {
    for (int j = 0; j < n_; ++j) out(i, j) = (*this)(i, j).evaluate(d);
  }
  return out;
}

ExactMatrix build_matrix_exact(const CloneStructure& s) {
  if (!s.is_exact()) throw ValidationError("exact matrix needs rational inverse scales");
  ExactMatrix m(s.model_count());
  for (const auto& c : s.clones()) {
    m(static_cast<int>(c.target.slot()), static_cast<int>(c.container.slot())) +=
        PowerSum::term(*c.inverse_scale.exact);
  }
  return m;
}

namespace {

SupportMatrix bool_product(const SupportMatrix& a, const SupportMatrix& b) {
  const auto n = a.rows();
  SupportMatrix out = SupportMatrix::Constant(n, n, false);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index l = 0; l < n; ++l) {
      if (!a(i, l)) continue;
      for (Eigen::Index j = 0; j < n; ++j) out(i, j) = out(i, j) || b(l, j);
    }
  }
  return out;
}

// Period of a strongly connected digraph with edges i -> j whenever
// support(i, j): gcd over edges of (level(i) + 1 - level(j)) for BFS levels.
int graph_period(const SupportMatrix& support) {
  const auto n = support.rows();
  std::vector<long> level(static_cast<std::size_t>(n), -1);
  std::deque<Eigen::Index> queue{0};
  level[0] = 0;
  while (!queue.empty()) {
    const auto u = queue.front();
    queue.pop_front();
    for (Eigen::Index v = 0; v < n; ++v) {
      if (support(u, v) && level[static_cast<std::size_t>(v)] < 0) {
        level[static_cast<std::size_t>(v)] = level[static_cast<std::size_t>(u)] + 1;
        queue.push_back(v);
      }
    }
  }
  long g = 0;
  for (Eigen::Index u = 0; u < n; ++u) {
    for (Eigen::Index v = 0; v < n; ++v) {
      if (support(u, v)) {
        g = std::gcd(g, std::abs(level[static_cast<std::size_t>(u)] + 1 - level[static_cast<std::size_t>(v)]));
      }
    }
  }
  return static_cast<int>(g);
}

}  // namespace

IrreducibilityReport is_irreducible(const SupportMatrix& support) {
  const auto n = support.rows();
  IrreducibilityReport rep;

  SupportMatrix power = support;
  SupportMatrix reach = support;  // union of supports of M^1..M^k
  for (int k = 1; k <= n * n; ++k) {
    if (k > 1) {
      power = bool_product(power, support);
      reach = reach.array() || power.array();
    }
    if (power.all()) {
      rep.witness_k = k;
      break;
    }
  }
  rep.irreducible = rep.witness_k.has_value();
  rep.strongly_connected = rep.irreducible || reach.all();
  if (rep.irreducible) {
    rep.period = 1;
  } else if (rep.strongly_connected) {
    rep.period = graph_period(support);
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!reach(i, j)) rep.persistent_zeros.emplace_back(static_cast<int>(i) + 1, static_cast<int>(j) + 1);
    }
  }
  return rep;
}

namespace {

struct PowerIterate {
  Eigen::VectorXd vector;
  int iterations = 0;
  bool converged = false;
};

// L1-normalised power iteration on a non-negative primitive operator. When
// progress stalls the operator is squared, which squares the ratio of the
// two leading eigenvalue moduli.
PowerIterate power_iterate(Eigen::MatrixXd op, double tol, int budget) {
  const auto n = op.rows();
  PowerIterate out;
  out.vector = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
  int squarings = 0;
  for (int it = 1; it <= budget; ++it) {
    Eigen::VectorXd w = op * out.vector;
    const double mass = w.sum();
    if (!(mass > 0.0) || !std::isfinite(mass)) break;
    w /= mass;
    const double delta = (w - out.vector).lpNorm<1>();
    out.vector = std::move(w);
    out.iterations = it;
    if (delta <= tol) {
      out.converged = true;
      return out;
    }
    if (it % 128 == 0 && squarings < 40) {
      op = op * op;
      op /= op.lpNorm<Eigen::Infinity>();
      ++squarings;
    }
  }
  return out;
}

}  // namespace

FrobeniusData frobenius(const SpectralMatrix& m, const FrobeniusOptions& opts) {
  const IrreducibilityReport rep = is_irreducible(m.support);
  if (!rep.strongly_connected) throw ComputeError("matrix not irreducible");

  const auto n = m.entries.rows();
  Eigen::MatrixXd op = m.entries;
  const double scale = op.lpNorm<Eigen::Infinity>();
  if (!(scale > 0.0)) throw ComputeError("matrix underflowed to zero at d = " + std::to_string(m.exponent));
  op /= scale;
  if (!rep.irreducible) op += Eigen::MatrixXd::Identity(n, n);

  const PowerIterate right = power_iterate(op, opts.tolerance, opts.max_iterations);
  const PowerIterate left = power_iterate(op.transpose(), opts.tolerance, opts.max_iterations);

  FrobeniusData f;
  f.right = right.vector;
  f.left = left.vector;
  f.witness_k = rep.witness_k.value_or(0);
  f.iterations = std::max(right.iterations, left.iterations);

  const Eigen::VectorXd mr = m.entries * f.right;
  f.eigenvalue = mr.sum();
  const double res_right = (mr - f.eigenvalue * f.right).lpNorm<1>();
  const double res_left = (m.entries.transpose() * f.left - f.eigenvalue * f.left).lpNorm<1>();
  f.residual = std::max(res_right, res_left);

  if (!right.converged || !left.converged) {
    std::ostringstream os;
    os.precision(17);
    os << "power iteration did not converge within " << opts.max_iterations
       << " iterations (best eigenvalue estimate " << f.eigenvalue << ", residual " << f.residual
       << ")";
    throw ComputeError(os.str());
  }
  return f;
}

namespace {

void require_unit_eigenvalue(const FrobeniusData& f, const char* what) {
  if (std::abs(f.eigenvalue - 1.0) > 1e-9) {
    std::ostringstream os;
    os.precision(17);
    os << what << " needs Frobenius eigenvalue 1, got " << f.eigenvalue;
    throw ComputeError(os.str());
  }
}

void require_primitive(const SpectralMatrix& m, const FrobeniusData& f, const char* what) {
  if (f.witness_k == 0 && !is_irreducible(m.support).irreducible) {
    throw ComputeError(std::string(what) + " needs a primitive matrix (powers do not converge)");
  }
}

}  // namespace

Eigen::MatrixXd power_limit(const SpectralMatrix& m) { return power_limit(m, frobenius(m)); }

Eigen::MatrixXd power_limit(const SpectralMatrix& m, const FrobeniusData& f) {
  require_primitive(m, f, "power limit");
  require_unit_eigenvalue(f, "power limit");
  Eigen::MatrixXd limit = f.right * f.left.transpose() / f.left.dot(f.right);
  const double residual = (m.entries * limit - limit).lpNorm<Eigen::Infinity>();
  if (residual > 1e-10) {
    throw ComputeError("power limit residual " + std::to_string(residual) + " exceeds 1e-10");
  }
  return limit;
}

double uniform_power_bound(const SpectralMatrix& m) { return uniform_power_bound(m, frobenius(m)); }

double uniform_power_bound(const SpectralMatrix& m, const FrobeniusData& f) {
  const Eigen::MatrixXd limit = power_limit(m, f);
  const auto n = m.entries.rows();
  // Divide out the residual eigenvalue error so the sweep is bounded.
  const Eigen::MatrixXd a = m.entries / f.eigenvalue;
  Eigen::MatrixXd power = Eigen::MatrixXd::Identity(n, n);
  double bound = 1.0;
  const double target = 1e-13 * limit.lpNorm<Eigen::Infinity>();
  int settled = 0;
  for (int p = 1; p <= 100000 && settled < 3; ++p) {
    power = a * power;
    bound = std::max(bound, power.colwise().sum().maxCoeff());
    settled = (power - limit).lpNorm<Eigen::Infinity>() <= target ? settled + 1 : 0;
  }
  return std::max(bound, limit.colwise().sum().maxCoeff());
}

CloneStructure power_structure(const CloneStructure& s, int k) {
  if (k < 1) throw ValidationError("power_structure needs k >= 1");
  StructureDefinition def;
  def.models = s.models();
  const bool placed = s.has_embedding();
  int next_id = 1;
  for (int j = 1; j <= s.model_count(); ++j) {
    const auto words = subdivide(s, std::vector<CloneAddress>{CloneAddress(TypeId(j))}, k);
    for (const auto& w : words) {
      CloneMapSpec c;
      c.id = next_id++;
      c.container = TypeId(j);
      c.target = w.type(s);
      c.inverse_scale = w.cumulative_inverse_scale(s);
      if (placed) {
        PlanarSimilarity p = PlanarSimilarity::identity();
        for (int id : w.word()) p = p.compose(*s.clone(id).placement);
        c.placement = p;
      }
      def.clones.push_back(std::move(c));
    }
  }
  return CloneStructure(std::move(def));
}

}  // namespace mmc
