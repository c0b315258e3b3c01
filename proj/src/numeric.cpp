#include "mmc/numeric.hpp"

#include <cmath>
#include <sstream>

namespace mmc {

double to_double(const Rational& r) { return r.convert_to<double>(); }

std::string to_string(const Rational& r) {
  std::ostringstream os;
  os << numerator(r);
  if (denominator(r) != 1) os << "/" << denominator(r);
  return os.str();
}

Scalar operator*(const Scalar& a, const Scalar& b) {
  Scalar out{a.value * b.value, std::nullopt};
  if (a.exact && b.exact) out.exact = *a.exact * *b.exact;
  return out;
}

PowerSum PowerSum::term(const Rational& base, const Integer& coeff) {
  PowerSum out;
  if (coeff != 0) out.terms_.emplace(base, coeff);
  return out;
}

double PowerSum::evaluate(double d) const {
  double sum = 0.0;
  for (const auto& [base, coeff] : terms_) {
    const double log_base = std::log(static_cast<double>(numerator(base))) -
                            std::log(static_cast<double>(denominator(base)));
    sum += static_cast<double>(coeff) * std::exp(d * log_base);
  }
  return sum;
}

PowerSum& PowerSum::operator+=(const PowerSum& other) {
  for (const auto& [base, coeff] : other.terms_) {
    auto [it, inserted] = terms_.emplace(base, coeff);
    if (!inserted) {
      it->second += coeff;
      if (it->second == 0) terms_.erase(it);
    }
  }
  return *this;
}

PowerSum operator*(const PowerSum& a, const PowerSum& b) {
  PowerSum out;
  for (const auto& [ba, ca] : a.terms_) {
    for (const auto& [bb, cb] : b.terms_) {
      out += PowerSum::term(ba * bb, ca * cb);
    }
  }
  return out;
}

std::string PowerSum::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  // Largest base first reads naturally: (1/3)^d + (1/5)^d.
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    if (!first) os << " + ";
    first = false;
    if (it->second != 1) os << it->second << "*";
    if (it->first == 1) {
      os << "1";
    } else {
      os << "(" << mmc::to_string(it->first) << ")^d";
    }
  }
  return os.str();
}

}  // namespace mmc
