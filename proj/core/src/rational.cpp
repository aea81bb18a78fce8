#include "rewrite_arena/rational.hpp"

#include <charconv>
#include <cstdlib>
#include <limits>
#include <numeric>

#include "rewrite_arena/error.hpp"

namespace rewrite_arena {

namespace {

using Wide = __int128;

constexpr Wide kMax = std::numeric_limits<std::int64_t>::max();
constexpr Wide kMin = std::numeric_limits<std::int64_t>::min();

Wide gcd_wide(Wide a, Wide b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    Wide t = a % b;
    a = b;
    b = t;
  }
  return a;
}

std::optional<Rational> normalize(Wide num, Wide den) {
  if (den == 0) return std::nullopt;
  if (den < 0) {
    num = -num;
    den = -den;
  }
  Wide g = gcd_wide(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  if (num > kMax || num < kMin || den > kMax) return std::nullopt;
  return Rational::make(static_cast<std::int64_t>(num), static_cast<std::int64_t>(den));
}

}  // namespace

ParseError::ParseError(std::size_t offset, const std::string& message)
    : Error("offset " + std::to_string(offset) + ": " + message), offset_(offset) {}

ArityError::ArityError(std::string symbol, std::size_t expected, std::size_t actual)
    : Error("arity mismatch for '" + symbol + "': expected " + std::to_string(expected) + " children, got " +
            std::to_string(actual)),
      symbol_(std::move(symbol)) {}

std::optional<Rational> Rational::make(std::int64_t num, std::int64_t den) {
  if (den == 0) return std::nullopt;
  if (den < 0) {
    if (num == std::numeric_limits<std::int64_t>::min() || den == std::numeric_limits<std::int64_t>::min()) {
      return std::nullopt;
    }
    num = -num;
    den = -den;
  }
  std::int64_t g = std::gcd(num, den);
  Rational r;
  r.num_ = g > 1 ? num / g : num;
  r.den_ = g > 1 ? den / g : den;
  return r;
}

std::optional<Rational> Rational::parse(std::string_view text) {
  if (text.empty()) return std::nullopt;
  auto parse_int = [](std::string_view s, std::int64_t& out) {
    if (s.empty()) return false;
    if (s.front() == '+') return false;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
  };

  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    std::int64_t num = 0;
    std::int64_t den = 0;
    std::string_view den_text = text.substr(slash + 1);
    if (!den_text.empty() && den_text.front() == '-') return std::nullopt;
    if (!parse_int(text.substr(0, slash), num) || !parse_int(den_text, den)) return std::nullopt;
    return make(num, den);
  }
  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    std::string_view whole = text.substr(0, dot);
    std::string_view frac = text.substr(dot + 1);
    if (frac.empty() || frac.size() > 18) return std::nullopt;
    for (char c : frac) {
      if (c < '0' || c > '9') return std::nullopt;
    }
    bool negative = !whole.empty() && whole.front() == '-';
    std::int64_t whole_value = 0;
    if (whole == "-" || whole.empty()) {
      return std::nullopt;
    }
    if (!parse_int(whole, whole_value)) return std::nullopt;
    std::int64_t frac_value = 0;
    parse_int(frac, frac_value);
    Wide scale = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
    Wide magnitude = static_cast<Wide>(negative ? -whole_value : whole_value) * scale + frac_value;
    return normalize(negative ? -magnitude : magnitude, scale);
  }
  std::int64_t value = 0;
  if (!parse_int(text, value)) return std::nullopt;
  return Rational(value);
}

std::string Rational::to_string() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
  Wide lhs = static_cast<Wide>(a.num_) * b.den_;
  Wide rhs = static_cast<Wide>(b.num_) * a.den_;
  if (lhs < rhs) return std::strong_ordering::less;
  if (lhs > rhs) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

std::optional<Rational> add(const Rational& a, const Rational& b) {
  return normalize(static_cast<Wide>(a.num_) * b.den_ + static_cast<Wide>(b.num_) * a.den_,
                   static_cast<Wide>(a.den_) * b.den_);
}

std::optional<Rational> sub(const Rational& a, const Rational& b) {
  return normalize(static_cast<Wide>(a.num_) * b.den_ - static_cast<Wide>(b.num_) * a.den_,
                   static_cast<Wide>(a.den_) * b.den_);
}

std::optional<Rational> mul(const Rational& a, const Rational& b) {
  return normalize(static_cast<Wide>(a.num_) * b.num_, static_cast<Wide>(a.den_) * b.den_);
}

std::optional<Rational> div(const Rational& a, const Rational& b) {
  if (b.num_ == 0) return std::nullopt;
  return normalize(static_cast<Wide>(a.num_) * b.den_, static_cast<Wide>(a.den_) * b.num_);
}

std::optional<Rational> pow(const Rational& base, std::int64_t exponent) {
  if (exponent < 0) {
    if (base.is_zero()) return std::nullopt;
    auto inverse = div(Rational(1), base);
    if (!inverse) return std::nullopt;
    if (exponent == std::numeric_limits<std::int64_t>::min()) return std::nullopt;
    return pow(*inverse, -exponent);
  }
  if (exponent > 64 && base != Rational(0) && base != Rational(1) && base != Rational(-1)) return std::nullopt;
  std::optional<Rational> result = Rational(1);
  for (std::int64_t i = 0; i < exponent && result; ++i) result = mul(*result, base);
  return result;
}

std::string to_string(const Constant& c) {
  if (const auto* b = std::get_if<bool>(&c)) return *b ? "true" : "false";
  return std::get<Rational>(c).to_string();
}

bool is_zero(const Constant& c) {
  const auto* r = std::get_if<Rational>(&c);
  return r != nullptr && r->is_zero();
}

}  // namespace rewrite_arena
