#pragma once

// Scalar backends: an exact rational type backed by GMP and IEEE binary64,
// plus the conversions between them.

#include <gmpxx.h>

#include <compare>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>

#include "irm/errors.hpp"

namespace irm {

/// Arbitrary-precision fraction, always kept in lowest terms with a positive
/// denominator. Zero is 0/1.
class Rational {
public:
    Rational() = default;

    template <std::integral I>
    Rational(I value) { // NOLINT(google-explicit-constructor)
        if constexpr (std::is_signed_v<I>) {
            value_ = mpq_class(mpz_class(static_cast<long>(value)));
        } else {
            value_ = mpq_class(mpz_class(static_cast<unsigned long>(value)));
        }
    }

    /// num/den reduced to canonical form; den == 0 throws DivisionByZero.
    Rational(const mpz_class& num, const mpz_class& den);

    static Rational from_mpq(mpq_class q);

    const mpz_class& num() const { return value_.get_num(); }
    const mpz_class& den() const { return value_.get_den(); }
    const mpq_class& mpq() const { return value_; }

    int sign() const { return sgn(value_); }
    bool is_zero() const { return sign() == 0; }
    bool is_integer() const { return den() == 1; }

    /// Largest bit length of numerator and denominator.
    std::size_t bit_length() const;

    /// Always "num/den", e.g. "0/1", "-36/25".
    std::string str() const;
    /// Shortest literal: integers without the "/1" suffix.
    std::string literal() const;

    Rational operator-() const { return from_mpq(-value_); }
    Rational& operator+=(const Rational& rhs);
    Rational& operator-=(const Rational& rhs);
    Rational& operator*=(const Rational& rhs);
    Rational& operator/=(const Rational& rhs);

    friend Rational operator+(Rational a, const Rational& b) { return a += b; }
    friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
    friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
    friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

    friend bool operator==(const Rational& a, const Rational& b) { return a.value_ == b.value_; }
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
        const int c = cmp(a.value_, b.value_);
        return c < 0 ? std::strong_ordering::less
                     : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
    }

    friend std::ostream& operator<<(std::ostream& os, const Rational& q);

private:
    mpq_class value_;
};

Rational abs(const Rational& q);

/// Guard on integer growth during exact runs.
struct BitBudget {
    static constexpr std::size_t kDefaultBits = 1'000'000;
    static constexpr std::size_t kMinBits = 64;

    std::size_t max_bits = kDefaultBits;

    /// Throws InvalidScalar when max_bits < kMinBits.
    void validate() const;
    /// Throws BudgetExceeded when q's numerator or denominator is too long.
    void check(const Rational& q) const;
};

/// Exact value of a finite binary64 datum. Non-finite input throws InvalidScalar.
Rational rationalize(double x);

/// 0/1 when |q| <= threshold, q otherwise. threshold must be nonnegative.
Rational snap_zero(const Rational& q, const Rational& threshold);

/// Nearest binary64 value, ties to even. Out-of-range magnitudes throw ScalarOverflow.
double demote(const Rational& q);

/// Rational literal: optional sign, digits, optional "/" and positive digits.
Rational parse_rational(std::string_view text);

/// Rational literal or decimal with optional fraction and exponent
/// ("1e-10", "-2.5", "0.125E2"), converted without rounding.
Rational parse_decimal(std::string_view text);

/// Shortest decimal string that round-trips to the same double.
std::string format_double(double x);

/// Parses a decimal produced by format_double (or any strtod-style literal).
double parse_double(std::string_view text);

template <class T>
struct ScalarTraits;

template <>
struct ScalarTraits<Rational> {
    static constexpr bool exact = true;
    static constexpr std::string_view tag = "E";

    static Rational from_rational(const Rational& q) { return q; }
    static double to_double(const Rational& q) { return demote(q); }
    static void validate(const Rational&) {}
    static std::string format(const Rational& q) { return q.str(); }
    static Rational parse(std::string_view text) { return parse_rational(text); }
    static bool is_zero(const Rational& q) { return q.is_zero(); }
};

template <>
struct ScalarTraits<double> {
    static constexpr bool exact = false;
    static constexpr std::string_view tag = "DP";

    static double from_rational(const Rational& q) { return demote(q); }
    static double to_double(double x) { return x; }
    static void validate(double x);
    static std::string format(double x) { return format_double(x); }
    static double parse(std::string_view text) { return parse_double(text); }
    static bool is_zero(double x) { return x == 0.0; }
};

/// The two supported scalar backends.
template <class T>
concept Scalar = std::same_as<T, Rational> || std::same_as<T, double>;

template <Scalar T>
inline constexpr bool is_exact_v = ScalarTraits<T>::exact;

} // namespace irm
