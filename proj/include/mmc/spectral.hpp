#pragma once

#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "mmc/clone_structure.hpp"

namespace mmc {

using SupportMatrix = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// M_d: entry (i, j) sums a^d over the level-1 clones of type i in model j.
struct SpectralMatrix {
  double exponent = 0.0;
  Eigen::MatrixXd entries;
  /// Nonzero pattern, taken from the clone counts rather than from `entries`
  /// so that underflow of a^d at large d cannot change it.
  SupportMatrix support;

  int size() const { return static_cast<int>(entries.rows()); }

  /// For matrices that do not come from a structure (e.g. a JSON dump).
  static SpectralMatrix from_entries(Eigen::MatrixXd entries, double exponent);
};

SpectralMatrix build_matrix(const CloneStructure& s, double d);

/// Square matrix of PowerSum entries: M_d for all d at once.
class ExactMatrix {
 public:
  ExactMatrix() = default;
  explicit ExactMatrix(int n) : n_(n), entries_(static_cast<std::size_t>(n * n)) {}

  int size() const { return n_; }
  PowerSum& operator()(int i, int j) { return entries_[static_cast<std::size_t>(i * n_ + j)]; }
  const PowerSum& operator()(int i, int j) const {
    return entries_[static_cast<std::size_t>(i * n_ + j)];
  }

  static ExactMatrix identity(int n);
  friend ExactMatrix operator*(const ExactMatrix& a, const ExactMatrix& b);
  friend bool operator==(const ExactMatrix&, const ExactMatrix&) = default;

  std::vector<PowerSum> apply(const std::vector<PowerSum>& v) const;
  ExactMatrix pow(int k) const;
  Eigen::MatrixXd evaluate(double d) const;

 private:
  int n_ = 0;
  std::vector<PowerSum> entries_;
};

/// Requires s.is_exact().
ExactMatrix build_matrix_exact(const CloneStructure& s);

struct IrreducibilityReport {
  /// Some power is strictly positive (the primitive sense used throughout).
  bool irreducible = false;
  /// Smallest k <= n^2 with an all-positive k-th power.
  std::optional<int> witness_k;
  bool strongly_connected = false;
  /// gcd of cycle lengths of the type graph; 0 when not strongly connected.
  int period = 0;
  /// 1-based (row, column) positions that vanish in every power M^k, k >= 1.
  std::vector<std::pair<int, int>> persistent_zeros;
};

IrreducibilityReport is_irreducible(const SupportMatrix& support);
inline IrreducibilityReport is_irreducible(const SpectralMatrix& m) { return is_irreducible(m.support); }

struct FrobeniusOptions {
  /// Stop when successive normalised iterates differ by at most this (L1).
  double tolerance = 1e-14;
  int max_iterations = 100000;
};

struct FrobeniusData {
  double eigenvalue = 0.0;
  Eigen::VectorXd right;  ///< L1-normalised, positive
  Eigen::VectorXd left;   ///< eigenvector of the transpose, L1-normalised
  int witness_k = 0;      ///< 0 when the support is irreducible but periodic
  double residual = 0.0;  ///< max of the right and left L1 residuals
  int iterations = 0;
};

/// Perron-Frobenius eigenpair by power iteration. Strongly connected but
/// periodic supports are handled by iterating on M + cI. Throws ComputeError
/// for reducible input or when the iteration budget runs out.
FrobeniusData frobenius(const SpectralMatrix& m, const FrobeniusOptions& opts = {});

/// lim M^k for primitive M with Frobenius eigenvalue 1 (within 1e-9), as the
/// rank-one projector r l^T / (l . r).
Eigen::MatrixXd power_limit(const SpectralMatrix& m);
Eigen::MatrixXd power_limit(const SpectralMatrix& m, const FrobeniusData& f);

/// sup_p ||M^p||_1 (max column sum) for M with Frobenius eigenvalue 1. The
/// sweep stops once M^p has converged to M^inf.
double uniform_power_bound(const SpectralMatrix& m);
double uniform_power_bound(const SpectralMatrix& m, const FrobeniusData& f);

/// The structure of tau^k: every level-k clone of s becomes a level-1 clone
/// (container = root model, target = type, scale = cumulative scale).
CloneStructure power_structure(const CloneStructure& s, int k);

}  // namespace mmc
