#include "mmc/clone_structure.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <sstream>

#include "mmc/error.hpp"

namespace mmc {

namespace {

std::string join_violations(const std::vector<std::string>& v) {
  std::ostringstream os;
  os << "invalid clone structure:";
  for (const auto& s : v) os << "\n  - " << s;
  return os.str();
}

}  // namespace

ValidationReport validate_structure(const StructureDefinition& def) {
  ValidationReport report;
  auto& out = report.violations;
  const int n = static_cast<int>(def.models.size());
  const int m = static_cast<int>(def.clones.size());

  if (n == 0) out.emplace_back("structure has no models");

  std::set<int> model_ids;
  for (const auto& model : def.models) {
    const int id = model.id.value();
    if (!model_ids.insert(id).second) out.push_back("duplicate model id " + std::to_string(id));
    if (id < 1 || id > n) {
      out.push_back("model id " + std::to_string(id) + " outside 1.." + std::to_string(n));
    }
    if (!(model.diameter.value > 0.0) || !std::isfinite(model.diameter.value)) {
      out.push_back("model " + std::to_string(id) + " has non-positive diameter");
    }
  }

  std::set<int> clone_ids;
  report.counts = CountMatrix::Zero(n, n);
  for (const auto& clone : def.clones) {
    const std::string name = "clone " + std::to_string(clone.id);
    if (!clone_ids.insert(clone.id).second) out.push_back("duplicate clone id " + std::to_string(clone.id));
    if (clone.id < 1 || clone.id > m) {
      out.push_back(name + " id outside 1.." + std::to_string(m));
    }
    const bool container_ok = clone.container.value() >= 1 && clone.container.value() <= n;
    const bool target_ok = clone.target.value() >= 1 && clone.target.value() <= n;
    if (!container_ok) out.push_back(name + " has unknown container " + std::to_string(clone.container.value()));
    if (!target_ok) out.push_back(name + " has unknown target " + std::to_string(clone.target.value()));
    const double a = clone.inverse_scale.value;
    if (!(a > 0.0 && a < 1.0)) {
      out.push_back(name + " inverse scale " + std::to_string(a) + " not in (0,1)");
    }
    if (clone.placement && std::abs(clone.placement->scale - a) > 1e-12 * std::max(1.0, a)) {
      out.push_back(name + " placement scale differs from inverse scale");
    }
    if (container_ok && target_ok) {
      report.counts(static_cast<Eigen::Index>(clone.target.slot()),
                    static_cast<Eigen::Index>(clone.container.slot())) += 1;
    }
  }

  for (int j = 0; j < n; ++j) {
    if (report.counts.col(j).sum() < 2) {
      out.push_back("model " + std::to_string(j + 1) + " has < 2 clones");
    }
  }
  return report;
}

CloneStructure::CloneStructure(StructureDefinition def) {
  ValidationReport report = validate_structure(def);
  if (!report.ok()) throw ValidationError(join_violations(report.violations));

  models_ = std::move(def.models);
  clones_ = std::move(def.clones);
  std::ranges::sort(models_, {}, [](const Model& m) { return m.id; });
  std::ranges::sort(clones_, {}, &CloneMapSpec::id);
  counts_ = std::move(report.counts);

  members_.assign(models_.size(), {});
  for (const auto& clone : clones_) members_[clone.container.slot()].push_back(clone.id);

  exact_ = std::ranges::all_of(clones_, [](const auto& c) { return c.inverse_scale.is_exact(); }) &&
           std::ranges::all_of(models_, [](const auto& m) { return m.diameter.is_exact(); });
}

const Model& CloneStructure::model(TypeId id) const {
  if (id.value() < 1 || id.value() > model_count()) {
    throw ValidationError("unknown model id " + std::to_string(id.value()));
  }
  return models_[id.slot()];
}

const CloneMapSpec& CloneStructure::clone(int id) const {
  if (id < 1 || id > clone_count()) throw ValidationError("unknown clone id " + std::to_string(id));
  return clones_[static_cast<std::size_t>(id - 1)];
}

std::span<const int> CloneStructure::clones_in(TypeId container) const {
  return members_.at(container.slot());
}

bool CloneStructure::has_embedding() const {
  return std::ranges::all_of(models_, [](const Model& m) { return m.region.has_value(); }) &&
         std::ranges::all_of(clones_, [](const CloneMapSpec& c) { return c.placement.has_value(); });
}

CloneAddress CloneAddress::from_word(const CloneStructure& s, std::vector<int> word) {
  if (word.empty()) throw ValidationError("empty word needs an explicit model");
  const TypeId root = s.clone(word.front()).container;
  return CloneAddress(root, std::move(word));
}

TypeId CloneAddress::type(const CloneStructure& s) const {
  return word_.empty() ? root_ : s.clone(word_.back()).target;
}

Scalar CloneAddress::cumulative_inverse_scale(const CloneStructure& s) const {
  Scalar out = Scalar::from_rational(1);
  for (int id : word_) out = out * s.clone(id).inverse_scale;
  return out;
}

Scalar CloneAddress::diameter(const CloneStructure& s) const {
  return cumulative_inverse_scale(s) * s.model(type(s)).diameter;
}

CloneAddress CloneAddress::child(int clone_id) const {
  std::vector<int> w = word_;
  w.push_back(clone_id);
  return CloneAddress(root_, std::move(w));
}

bool CloneAddress::contains(const CloneAddress& other) const {
  return root_ == other.root_ && word_.size() <= other.word_.size() &&
         std::equal(word_.begin(), word_.end(), other.word_.begin());
}

std::string to_string(const CloneAddress& addr) {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < addr.word().size(); ++i) os << (i ? "," : "") << addr.word()[i];
  os << "]";
  if (addr.word().empty()) os << "@" << addr.root().value();
  return os.str();
}

bool check_address(const CloneStructure& s, const CloneAddress& addr) {
  for (int id : addr.word()) s.clone(id);
  if (addr.root().value() < 1 || addr.root().value() > s.model_count()) {
    throw ValidationError("unknown model id " + std::to_string(addr.root().value()));
  }
  TypeId current = addr.root();
  for (int id : addr.word()) {
    const auto& c = s.clone(id);
    if (c.container != current) return false;
    current = c.target;
  }
  return true;
}

namespace {

void require_valid(const CloneStructure& s, const CloneAddress& addr) {
  if (!check_address(s, addr)) {
    throw ValidationError("address " + to_string(addr) + " violates the chaining rule");
  }
}

}  // namespace

std::vector<CloneAddress> children(const CloneStructure& s, const CloneAddress& addr) {
  require_valid(s, addr);
  std::vector<CloneAddress> out;
  for (int id : s.clones_in(addr.type(s))) out.push_back(addr.child(id));
  return out;
}

void require_disjoint(std::span<const CloneAddress> coll) {
  std::vector<const CloneAddress*> sorted;
  for (const auto& a : coll) sorted.push_back(&a);
  std::ranges::sort(sorted, [](const auto* a, const auto* b) { return *a < *b; });
  // In lexicographic order a prefix precedes everything it contains, so
  // checking neighbours suffices.
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i - 1]->contains(*sorted[i])) {
      throw ValidationError("collection is not disjoint: " + to_string(*sorted[i - 1]) +
                            " contains " + to_string(*sorted[i]));
    }
  }
}

std::vector<CloneAddress> subdivide(const CloneStructure& s, std::span<const CloneAddress> coll,
                                    int k) {
  if (k < 0) throw ValidationError("subdivision depth must be non-negative");
  for (const auto& a : coll) require_valid(s, a);
  require_disjoint(coll);

  std::vector<CloneAddress> current(coll.begin(), coll.end());
  for (int step = 0; step < k; ++step) {
    std::vector<CloneAddress> next;
    for (const auto& a : current) {
      for (int id : s.clones_in(a.type(s))) next.push_back(a.child(id));
    }
    current = std::move(next);
  }
  return current;
}

DQuantity d_quantity(const CloneStructure& s, std::span<const CloneAddress> coll, double d) {
  DQuantity q{d, Eigen::VectorXd::Zero(s.model_count())};
  for (const auto& a : coll) {
    require_valid(s, a);
    q.components(static_cast<Eigen::Index>(a.type(s).slot())) += std::pow(a.diameter(s).value, d);
  }
  return q;
}

std::vector<PowerSum> d_quantity_exact(const CloneStructure& s,
                                       std::span<const CloneAddress> coll) {
  if (!s.is_exact()) throw ValidationError("exact d-quantities need rational scales and diameters");
  std::vector<PowerSum> q(static_cast<std::size_t>(s.model_count()));
  for (const auto& a : coll) {
    require_valid(s, a);
    q[a.type(s).slot()] += PowerSum::term(*a.diameter(s).exact);
  }
  return q;
}

std::vector<CloneAddress> model_collection(const CloneStructure& s) {
  std::vector<CloneAddress> out;
  for (int j = 1; j <= s.model_count(); ++j) out.emplace_back(TypeId(j));
  return out;
}

}  // namespace mmc
