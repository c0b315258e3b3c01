#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "mmc/numeric.hpp"
#include "mmc/similarity.hpp"

namespace mmc {

/// 1-based model/type index.
class TypeId {
 public:
  constexpr TypeId() = default;
  constexpr explicit TypeId(int value) : value_(value) {}

  constexpr int value() const { return value_; }
  constexpr std::size_t slot() const { return static_cast<std::size_t>(value_ - 1); }

  friend constexpr auto operator<=>(TypeId, TypeId) = default;

 private:
  int value_ = 0;
};

struct Model {
  TypeId id;
  Scalar diameter = Scalar::from_rational(1);
  std::string label;
  std::optional<ModelRegion> region;
};

/// Level-1 clone E_i sitting in model `container` and mapped onto model
/// `target` by a similarity with expansion 1/inverse_scale.
struct CloneMapSpec {
  int id = 0;
  TypeId container;
  TypeId target;
  Scalar inverse_scale;
  std::optional<PlanarSimilarity> placement;
};

/// Unchecked definition as read from a file.
struct StructureDefinition {
  std::vector<Model> models;
  std::vector<CloneMapSpec> clones;
};

/// R(i, j) = number of level-1 clones of type i inside model j (0-based).
using CountMatrix = Eigen::MatrixXi;

struct ValidationReport {
  std::vector<std::string> violations;
  CountMatrix counts;

  bool ok() const { return violations.empty(); }
};

ValidationReport validate_structure(const StructureDefinition& def);

/// A validated clone structure. Immutable; models sorted by id, clones by id.
class CloneStructure {
 public:
  /// Throws ValidationError listing every violation when `def` is invalid.
  explicit CloneStructure(StructureDefinition def);

  int model_count() const { return static_cast<int>(models_.size()); }
  int clone_count() const { return static_cast<int>(clones_.size()); }

  const std::vector<Model>& models() const { return models_; }
  const std::vector<CloneMapSpec>& clones() const { return clones_; }

  const Model& model(TypeId id) const;
  /// Throws ValidationError for an unknown id.
  const CloneMapSpec& clone(int id) const;

  /// Ids of the level-1 clones contained in `container`, ascending.
  std::span<const int> clones_in(TypeId container) const;

  const CountMatrix& counts() const { return counts_; }

  /// True when every inverse scale and every diameter is rational.
  bool is_exact() const { return exact_; }

  bool has_embedding() const;

 private:
  std::vector<Model> models_;
  std::vector<CloneMapSpec> clones_;
  std::vector<std::vector<int>> members_;
  CountMatrix counts_;
  bool exact_ = false;
};

/// A clone named by the word of level-1 clone ids leading to it from the
/// model `root`. For non-empty words root is container(word[0]).
class CloneAddress {
 public:
  CloneAddress() = default;
  explicit CloneAddress(TypeId root, std::vector<int> word = {})
      : root_(root), word_(std::move(word)) {}

  /// Root inferred from the first id; throws ValidationError for empty words
  /// or unknown ids.
  static CloneAddress from_word(const CloneStructure& s, std::vector<int> word);

  TypeId root() const { return root_; }
  const std::vector<int>& word() const { return word_; }
  int level() const { return static_cast<int>(word_.size()); }

  /// Model the clone is similar to.
  TypeId type(const CloneStructure& s) const;
  Scalar cumulative_inverse_scale(const CloneStructure& s) const;
  Scalar diameter(const CloneStructure& s) const;

  CloneAddress child(int clone_id) const;
  /// Non-strict: an address contains itself.
  bool contains(const CloneAddress& other) const;

  friend auto operator<=>(const CloneAddress&, const CloneAddress&) = default;

 private:
  TypeId root_;
  std::vector<int> word_;
};

std::string to_string(const CloneAddress& addr);

/// True iff consecutive ids chain (container of each id equals the target of
/// the previous one) and the root matches the first container. Throws
/// ValidationError on unknown clone ids.
bool check_address(const CloneStructure& s, const CloneAddress& addr);

/// addr extended by every clone inside the model addr is similar to.
std::vector<CloneAddress> children(const CloneStructure& s, const CloneAddress& addr);

/// Replace each clone of `coll` by its k-fold subdivision. The collection must
/// be prefix-free (pairwise disjoint clones).
std::vector<CloneAddress> subdivide(const CloneStructure& s,
                                    std::span<const CloneAddress> coll, int k);

/// Throws ValidationError when some address contains another.
void require_disjoint(std::span<const CloneAddress> coll);

struct DQuantity {
  double exponent = 0.0;
  Eigen::VectorXd components;
};

DQuantity d_quantity(const CloneStructure& s, std::span<const CloneAddress> coll, double d);

/// The same quantity as a vector of formal power sums in d. Requires
/// s.is_exact().
std::vector<PowerSum> d_quantity_exact(const CloneStructure& s,
                                       std::span<const CloneAddress> coll);

/// One empty-word address per model: the whole set as a collection.
std::vector<CloneAddress> model_collection(const CloneStructure& s);

}  // namespace mmc
