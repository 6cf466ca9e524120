#include "irm/arithmetic.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>

namespace irm {

namespace {

constexpr long kMaxDecimalExponent = 100'000;

bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s) {
        if (c < '0' || c > '9') return false;
    }
    return true;
}

mpz_class pow2(unsigned long e) {
    mpz_class out;
    mpz_ui_pow_ui(out.get_mpz_t(), 2, e);
    return out;
}

mpz_class pow10(unsigned long e) {
    mpz_class out;
    mpz_ui_pow_ui(out.get_mpz_t(), 10, e);
    return out;
}

std::size_t bits_of(const mpz_class& z) {
    return z == 0 ? 0 : mpz_sizeinbase(z.get_mpz_t(), 2);
}

} // namespace

Rational::Rational(const mpz_class& num, const mpz_class& den) {
    if (den == 0) throw DivisionByZero("rational with zero denominator");
    value_ = mpq_class(num, den);
    value_.canonicalize();
}

Rational Rational::from_mpq(mpq_class q) {
    Rational out;
    out.value_ = std::move(q);
    return out;
}

std::size_t Rational::bit_length() const {
    return std::max(bits_of(num()), bits_of(den()));
}

std::string Rational::str() const {
    return num().get_str() + "/" + den().get_str();
}

std::string Rational::literal() const {
    return is_integer() ? num().get_str() : str();
}

Rational& Rational::operator+=(const Rational& rhs) {
    value_ += rhs.value_;
    return *this;
}

Rational& Rational::operator-=(const Rational& rhs) {
    value_ -= rhs.value_;
    return *this;
}

Rational& Rational::operator*=(const Rational& rhs) {
    value_ *= rhs.value_;
    return *this;
}

Rational& Rational::operator/=(const Rational& rhs) {
    if (rhs.is_zero()) throw DivisionByZero("rational division by zero");
    value_ /= rhs.value_;
    return *this;
}

std::ostream& operator<<(std::ostream& os, const Rational& q) {
    return os << q.str();
}

Rational abs(const Rational& q) {
    return q.sign() < 0 ? -q : q;
}

void BitBudget::validate() const {
    if (max_bits < kMinBits) {
        throw InvalidScalar("bit budget must be at least " + std::to_string(kMinBits) + " bits");
    }
}

void BitBudget::check(const Rational& q) const {
    if (q.bit_length() > max_bits) {
        throw BudgetExceeded("rational of " + std::to_string(q.bit_length()) +
                             " bits exceeds budget of " + std::to_string(max_bits));
    }
}

Rational rationalize(double x) {
    if (!std::isfinite(x)) throw InvalidScalar("cannot rationalize a non-finite double");
    if (x == 0.0) return Rational{};

    int exponent = 0;
    const double fraction = std::frexp(x, &exponent); // x = fraction * 2^exponent, 0.5 <= |fraction| < 1
    const auto mantissa = static_cast<std::int64_t>(std::ldexp(fraction, 53));
    exponent -= 53;

    mpz_class num(static_cast<long>(mantissa));
    if (exponent >= 0) {
        num *= pow2(static_cast<unsigned long>(exponent));
        return Rational(num, mpz_class(1));
    }
    return Rational(num, pow2(static_cast<unsigned long>(-exponent)));
}

Rational snap_zero(const Rational& q, const Rational& threshold) {
    if (threshold.sign() < 0) throw InvalidScalar("snap threshold must be nonnegative");
    return abs(q) <= threshold ? Rational{} : q;
}

double demote(const Rational& q) {
    if (q.is_zero()) return 0.0;

    const mpz_class num = ::abs(q.num());
    const mpz_class& den = q.den();

    // Choose e so that num / (den * 2^e) lands in [2^52, 2^53).
    long e = static_cast<long>(bits_of(num)) - static_cast<long>(bits_of(den)) - 53;
    constexpr long kMinExponent = -1074; // exponent of the smallest subnormal

    mpz_class quotient;
    mpz_class remainder;
    mpz_class divisor;
    for (;;) {
        const long used = std::max(e, kMinExponent);
        mpz_class scaled = num;
        divisor = den;
        if (used < 0) {
            scaled <<= static_cast<mp_bitcnt_t>(-used);
        } else {
            divisor <<= static_cast<mp_bitcnt_t>(used);
        }
        mpz_fdiv_qr(quotient.get_mpz_t(), remainder.get_mpz_t(), scaled.get_mpz_t(), divisor.get_mpz_t());
        if (used == e && bits_of(quotient) > 53) {
            ++e;
            continue;
        }
        e = used;
        break;
    }

    // Round half to even.
    const int half = cmp(remainder * 2, divisor);
    if (half > 0 || (half == 0 && mpz_odd_p(quotient.get_mpz_t()))) {
        quotient += 1;
    }

    const auto mantissa = static_cast<double>(quotient.get_ui());
    if (e + static_cast<long>(bits_of(quotient)) > 1024) {
        throw ScalarOverflow("rational magnitude exceeds the double range");
    }
    const double magnitude = std::ldexp(mantissa, static_cast<int>(e));
    if (!std::isfinite(magnitude)) throw ScalarOverflow("rational magnitude exceeds the double range");
    return q.sign() < 0 ? -magnitude : magnitude;
}

Rational parse_rational(std::string_view text) {
    std::string_view body = text;
    bool negative = false;
    if (!body.empty() && (body.front() == '+' || body.front() == '-')) {
        negative = body.front() == '-';
        body.remove_prefix(1);
    }
    const auto slash = body.find('/');
    const std::string_view num_text = body.substr(0, slash);
    const std::string_view den_text = slash == std::string_view::npos ? std::string_view("1") : body.substr(slash + 1);
    if (!all_digits(num_text) || !all_digits(den_text)) {
        throw ParseError("malformed rational literal '" + std::string(text) + "'");
    }
    mpz_class num(std::string(num_text), 10);
    const mpz_class den(std::string(den_text), 10);
    if (den == 0) throw ParseError("zero denominator in '" + std::string(text) + "'");
    if (negative) num = -num;
    return Rational(num, den);
}

Rational parse_decimal(std::string_view text) {
    if (text.find('/') != std::string_view::npos) return parse_rational(text);

    std::string_view body = text;
    bool negative = false;
    if (!body.empty() && (body.front() == '+' || body.front() == '-')) {
        negative = body.front() == '-';
        body.remove_prefix(1);
    }

    long exponent = 0;
    const auto epos = body.find_first_of("eE");
    if (epos != std::string_view::npos) {
        std::string_view exp_text = body.substr(epos + 1);
        bool exp_negative = false;
        if (!exp_text.empty() && (exp_text.front() == '+' || exp_text.front() == '-')) {
            exp_negative = exp_text.front() == '-';
            exp_text.remove_prefix(1);
        }
        if (!all_digits(exp_text) || exp_text.size() > 7) {
            throw ParseError("malformed exponent in '" + std::string(text) + "'");
        }
        exponent = std::stol(std::string(exp_text));
        if (exp_negative) exponent = -exponent;
        body = body.substr(0, epos);
    }

    const auto dot = body.find('.');
    std::string_view int_part = body.substr(0, dot);
    std::string_view frac_part = dot == std::string_view::npos ? std::string_view{} : body.substr(dot + 1);
    if ((int_part.empty() && frac_part.empty()) || (!int_part.empty() && !all_digits(int_part)) ||
        (!frac_part.empty() && !all_digits(frac_part))) {
        throw ParseError("malformed decimal literal '" + std::string(text) + "'");
    }
    exponent -= static_cast<long>(frac_part.size());
    if (exponent > kMaxDecimalExponent || exponent < -kMaxDecimalExponent) {
        throw ParseError("decimal exponent out of range in '" + std::string(text) + "'");
    }

    mpz_class digits(std::string(int_part) + std::string(frac_part), 10);
    if (negative) digits = -digits;
    if (exponent >= 0) return Rational(digits * pow10(static_cast<unsigned long>(exponent)), mpz_class(1));
    return Rational(digits, pow10(static_cast<unsigned long>(-exponent)));
}

std::string format_double(double x) {
    char buffer[64];
    const auto result = std::to_chars(buffer, buffer + sizeof(buffer), x);
    return std::string(buffer, result.ptr);
}

double parse_double(std::string_view text) {
    double value = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    if (first != last && *first == '+') ++first;
    const auto result = std::from_chars(first, last, value);
    if (result.ec != std::errc{} || result.ptr != last) {
        throw ParseError("malformed double literal '" + std::string(text) + "'");
    }
    ScalarTraits<double>::validate(value);
    return value;
}

void ScalarTraits<double>::validate(double x) {
    if (!std::isfinite(x)) throw InvalidScalar("non-finite double rejected");
}

} // namespace irm
