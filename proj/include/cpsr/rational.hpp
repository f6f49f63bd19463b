#ifndef CPSR_RATIONAL_HPP
#define CPSR_RATIONAL_HPP

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace cpsr {

/// Exact rational number. All probabilities, weights, degrees and LoS values
/// in the engine are carried as Rational; there is no binary floating point
/// anywhere in the model layer.
class Rational {
 public:
  Rational() = default;
  Rational(std::int64_t n) : v_(n) {}  // NOLINT(google-explicit-constructor)
  Rational(std::int64_t num, std::int64_t den);

  /// Parses "3", "-2", "0.42", ".5", "3/5". Returns nullopt on malformed text
  /// or a zero denominator.
  static std::optional<Rational> parse(std::string_view text);

  [[nodiscard]] std::string numerator_string() const;
  [[nodiscard]] std::string denominator_string() const;
  /// Fits in int64? Used by the wire encoding.
  [[nodiscard]] std::optional<std::int64_t> numerator_i64() const;
  [[nodiscard]] std::optional<std::int64_t> denominator_i64() const;

  /// "n" when integral, "n/d" otherwise. Round-trips through parse().
  [[nodiscard]] std::string str() const;
  /// Convenience decimal rendering, rounded half-up to `places` digits with
  /// trailing zeros stripped. Never use it for equality.
  [[nodiscard]] std::string decimal(int places = 6) const;

  [[nodiscard]] bool is_zero() const { return v_ == 0; }
  [[nodiscard]] int sign() const { return v_.sign(); }

  Rational& operator+=(const Rational& o) { v_ += o.v_; return *this; }
  Rational& operator-=(const Rational& o) { v_ -= o.v_; return *this; }
  Rational& operator*=(const Rational& o) { v_ *= o.v_; return *this; }
  Rational& operator/=(const Rational& o);

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

  friend bool operator==(const Rational& a, const Rational& b) { return a.v_ == b.v_; }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    if (a.v_ < b.v_) return std::strong_ordering::less;
    if (b.v_ < a.v_) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

 private:
  using Value = boost::multiprecision::cpp_rational;
  explicit Rational(Value v) : v_(std::move(v)) {}
  Value v_{0};
};

}  // namespace cpsr

#endif  // CPSR_RATIONAL_HPP
