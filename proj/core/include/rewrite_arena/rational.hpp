#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

namespace rewrite_arena {

/// Exact rational with 64-bit numerator/denominator, always normalized
/// (gcd 1, positive denominator). Arithmetic is checked: an operation whose
/// result does not fit returns nullopt instead of wrapping.
class Rational {
 public:
  constexpr Rational() = default;
  constexpr Rational(std::int64_t value) : num_(value) {}  // NOLINT(implicit)

  static std::optional<Rational> make(std::int64_t num, std::int64_t den);
  /// Accepts "12", "-3", "0.25", "-7/2".
  static std::optional<Rational> parse(std::string_view text);

  std::int64_t num() const noexcept { return num_; }
  std::int64_t den() const noexcept { return den_; }
  bool is_zero() const noexcept { return num_ == 0; }
  bool is_integer() const noexcept { return den_ == 1; }
  double to_double() const noexcept { return static_cast<double>(num_) / static_cast<double>(den_); }
  std::string to_string() const;

  friend bool operator==(const Rational&, const Rational&) = default;
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

  friend std::optional<Rational> add(const Rational& a, const Rational& b);
  friend std::optional<Rational> sub(const Rational& a, const Rational& b);
  friend std::optional<Rational> mul(const Rational& a, const Rational& b);
  friend std::optional<Rational> div(const Rational& a, const Rational& b);
  friend std::optional<Rational> pow(const Rational& base, std::int64_t exponent);

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

/// Value of a closed subterm after exact folding: a number or a boolean.
using Constant = std::variant<Rational, bool>;

std::string to_string(const Constant& c);
bool is_zero(const Constant& c);

}  // namespace rewrite_arena
