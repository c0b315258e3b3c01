#pragma once

#include <map>
#include <optional>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace mmc {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

double to_double(const Rational& r);
std::string to_string(const Rational& r);

/// A positive real that may also carry its exact rational value. Every
/// length-like input (inverse scales, diameters) is a Scalar so that
/// identities can be checked exactly when the whole structure is rational.
struct Scalar {
  double value = 0.0;
  std::optional<Rational> exact;

  static Scalar from_double(double v) { return Scalar{v, std::nullopt}; }
  static Scalar from_rational(const Rational& r) { return Scalar{to_double(r), r}; }

  bool is_exact() const { return exact.has_value(); }

  friend Scalar operator*(const Scalar& a, const Scalar& b);
};

/// Finite formal sum  sum_b c_b * b^d  over positive rational bases b with
/// integer coefficients, viewed as a function of the exponent d.
///
/// Products use (b1 b2)^d = b1^d b2^d, so entries of M_d, their powers and
/// d-quantities of rational structures are all representable without ever
/// fixing d. Two PowerSums compare equal iff they agree for every d, since
/// distinct exponentials b^d are linearly independent.
class PowerSum {
 public:
  PowerSum() = default;

  static PowerSum term(const Rational& base, const Integer& coeff = 1);

  bool is_zero() const { return terms_.empty(); }
  const std::map<Rational, Integer>& terms() const { return terms_; }

  /// Value at exponent d. d == 0 gives the sum of coefficients.
  double evaluate(double d) const;

  PowerSum& operator+=(const PowerSum& other);
  friend PowerSum operator+(PowerSum a, const PowerSum& b) { return a += b; }
  friend PowerSum operator*(const PowerSum& a, const PowerSum& b);
  friend bool operator==(const PowerSum& a, const PowerSum& b) = default;

  /// Human readable form, e.g. "(1/6)^d + (1/7)^d" or "2*(1/3)^d".
  std::string to_string() const;

 private:
  std::map<Rational, Integer> terms_;
};

}  // namespace mmc
