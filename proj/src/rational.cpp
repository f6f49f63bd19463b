#include "cpsr/rational.hpp"

#include <cctype>
#include <stdexcept>

namespace cpsr {

namespace {

using boost::multiprecision::cpp_int;

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

// cpp_int reads a leading 0 as an octal prefix.
cpp_int decimal_int(std::string_view digits) {
  auto first = digits.find_first_not_of('0');
  if (first == std::string_view::npos) return cpp_int{0};
  return cpp_int{std::string(digits.substr(first))};
}

template <typename I>
std::optional<std::int64_t> to_i64(const I& v) {
  if (v > std::numeric_limits<std::int64_t>::max() || v < std::numeric_limits<std::int64_t>::min()) {
    return std::nullopt;
  }
  return static_cast<std::int64_t>(v);
}

}  // namespace

Rational::Rational(std::int64_t num, std::int64_t den) {
  if (den == 0) throw std::domain_error("rational with zero denominator");
  v_ = Value(cpp_int(num), cpp_int(den));
}

Rational& Rational::operator/=(const Rational& o) {
  if (o.v_ == 0) throw std::domain_error("rational division by zero");
  v_ /= o.v_;
  return *this;
}

std::optional<Rational> Rational::parse(std::string_view text) {
  bool negative = false;
  if (!text.empty() && (text.front() == '-' || text.front() == '+')) {
    negative = text.front() == '-';
    text.remove_prefix(1);
  }
  if (text.empty()) return std::nullopt;

  Value result;
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    auto num = text.substr(0, slash);
    auto den = text.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den)) return std::nullopt;
    cpp_int d = decimal_int(den);
    if (d == 0) return std::nullopt;
    result = Value(decimal_int(num), d);
  } else if (auto dot = text.find('.'); dot != std::string_view::npos) {
    auto whole = text.substr(0, dot);
    auto frac = text.substr(dot + 1);
    if (whole.empty() && frac.empty()) return std::nullopt;
    if ((!whole.empty() && !all_digits(whole)) || (!frac.empty() && !all_digits(frac))) {
      return std::nullopt;
    }
    cpp_int scale = boost::multiprecision::pow(cpp_int(10), static_cast<unsigned>(frac.size()));
    cpp_int digits = decimal_int(std::string(whole) + std::string(frac));
    result = Value(digits, scale);
  } else {
    if (!all_digits(text)) return std::nullopt;
    result = Value(decimal_int(text));
  }
  if (negative) result = -result;
  return Rational(result);
}

std::string Rational::numerator_string() const {
  return boost::multiprecision::numerator(v_).str();
}

std::string Rational::denominator_string() const {
  return boost::multiprecision::denominator(v_).str();
}

std::optional<std::int64_t> Rational::numerator_i64() const {
  return to_i64(boost::multiprecision::numerator(v_));
}

std::optional<std::int64_t> Rational::denominator_i64() const {
  return to_i64(boost::multiprecision::denominator(v_));
}

std::string Rational::str() const {
  auto den = boost::multiprecision::denominator(v_);
  if (den == 1) return numerator_string();
  return numerator_string() + "/" + den.str();
}

std::string Rational::decimal(int places) const {
  cpp_int num = boost::multiprecision::numerator(v_);
  cpp_int den = boost::multiprecision::denominator(v_);
  bool negative = num < 0;
  if (negative) num = -num;
  cpp_int scale = boost::multiprecision::pow(cpp_int(10), static_cast<unsigned>(places));
  cpp_int scaled = (num * scale * 2 + den) / (den * 2);
  cpp_int whole = scaled / scale;
  cpp_int frac = scaled % scale;

  std::string out = whole.str();
  if (places > 0 && frac != 0) {
    std::string f = frac.str();
    f.insert(0, static_cast<std::size_t>(places) - f.size(), '0');
    while (!f.empty() && f.back() == '0') f.pop_back();
    out += "." + f;
  }
  if (negative && scaled != 0) out.insert(0, "-");
  return out;
}

}  // namespace cpsr
