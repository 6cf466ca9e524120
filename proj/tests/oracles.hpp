#pragma once

// Reference computations used by the tests. Everything here works on raw
// mpq_class / std::vector and shares no code with the library.

#include <gmpxx.h>

#include <cmath>
#include <cstdint>
#include <cstring>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

namespace oracle {

using Q = mpq_class;
using QVec = std::vector<Q>;
using QMat = std::vector<QVec>;

/// Exact value of a finite double from its IEEE bit pattern.
inline Q exact_value(double x) {
    std::uint64_t bits = 0;
    static_assert(sizeof bits == sizeof x);
    std::memcpy(&bits, &x, sizeof x);
    const bool negative = bits >> 63;
    const int biased = static_cast<int>((bits >> 52) & 0x7ff);
    std::uint64_t mantissa = bits & ((std::uint64_t{1} << 52) - 1);
    int exponent = biased - 1075;
    if (biased == 0) {
        exponent = -1074;
    } else {
        mantissa |= std::uint64_t{1} << 52;
    }
    mpz_class m;
    mpz_import(m.get_mpz_t(), 1, 1, sizeof mantissa, 0, 0, &mantissa);
    Q q(m);
    mpz_class pow2;
    mpz_ui_pow_ui(pow2.get_mpz_t(), 2, static_cast<unsigned long>(std::abs(exponent)));
    if (exponent >= 0) {
        q *= pow2;
    } else {
        q /= pow2;
    }
    q.canonicalize();
    return negative ? Q(-q) : q;
}

/// Nearest double by bracketing with nextafter, ties to the even significand.
inline double nearest_double(const Q& q) {
    double d = q.get_d(); // truncates toward zero
    double lo = d, hi = d;
    if (exact_value(d) < q) {
        hi = std::nextafter(d, INFINITY);
    } else if (exact_value(d) > q) {
        lo = std::nextafter(d, -INFINITY);
    } else {
        return d;
    }
    const Q dl = q - exact_value(lo);
    const Q dh = exact_value(hi) - q;
    if (dl < dh) return lo;
    if (dh < dl) return hi;
    std::uint64_t bits = 0;
    std::memcpy(&bits, &lo, sizeof lo);
    return (bits & 1) == 0 ? lo : hi;
}

inline QVec matvec(const QMat& a, const QVec& v) {
    QVec out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < v.size(); ++j) out[i] += a[i][j] * v[j];
    }
    return out;
}

inline Q dot(const QVec& u, const QVec& v) {
    Q s = 0;
    for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * v[i];
    return s;
}

/// Gauss-Jordan on rationals with first-nonzero pivoting. nullopt if singular.
inline std::optional<QVec> solve(QMat a, QVec b) {
    const std::size_t n = a.size();
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        while (p < n && a[p][c] == 0) ++p;
        if (p == n) return std::nullopt;
        std::swap(a[p], a[c]);
        std::swap(b[p], b[c]);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == c || a[r][c] == 0) continue;
            const Q f = a[r][c] / a[c][c];
            for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
            b[r] -= f * b[c];
        }
    }
    for (std::size_t i = 0; i < n; ++i) b[i] /= a[i][i];
    return b;
}

/// Cofactor expansion along the first row.
inline Q det(const QMat& a) {
    const std::size_t n = a.size();
    if (n == 1) return a[0][0];
    Q total = 0;
    for (std::size_t j = 0; j < n; ++j) {
        QMat minor;
        for (std::size_t r = 1; r < n; ++r) {
            QVec row;
            for (std::size_t c = 0; c < n; ++c) {
                if (c != j) row.push_back(a[r][c]);
            }
            minor.push_back(row);
        }
        const Q term = a[0][j] * det(minor);
        total += (j % 2 == 0) ? term : Q(-term);
    }
    return total;
}

/// Sylvester: all leading principal minors positive.
inline bool is_spd(const QMat& a) {
    for (std::size_t k = 1; k <= a.size(); ++k) {
        QMat lead(k, QVec(k));
        for (std::size_t i = 0; i < k; ++i) {
            for (std::size_t j = 0; j < k; ++j) lead[i][j] = a[i][j];
        }
        if (det(lead) <= 0) return false;
    }
    return true;
}

inline Q trace(const QMat& a) {
    Q t = 0;
    for (std::size_t i = 0; i < a.size(); ++i) t += a[i][i];
    return t;
}

/// Random small rational in [-range, range] with denominator up to max_den.
inline Q random_rational(std::mt19937_64& rng, long range, long max_den) {
    const long den = static_cast<long>(rng() % static_cast<unsigned long>(max_den)) + 1;
    const long num = static_cast<long>(rng() % static_cast<unsigned long>(2 * range * den + 1)) - range * den;
    Q q(num, den);
    q.canonicalize();
    return q;
}

/// B^T B + I with small rational B: SPD by construction.
inline QMat random_spd(std::mt19937_64& rng, std::size_t n) {
    QMat b(n, QVec(n));
    for (auto& row : b) {
        for (auto& v : row) v = random_rational(rng, 3, 3);
    }
    QMat a(n, QVec(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t k = 0; k < n; ++k) a[i][j] += b[k][i] * b[k][j];
        }
        a[i][i] += 1;
    }
    return a;
}

/// Plain exact CG on dense rationals: returns r^T r after each step (entry 0 = initial).
inline std::vector<Q> cg_residuals(const QMat& a, const QVec& b, std::size_t max_steps) {
    QVec x(b.size());
    QVec r = b;
    QVec d = r;
    Q rr = dot(r, r);
    std::vector<Q> out{rr};
    for (std::size_t k = 0; k < max_steps && rr != 0; ++k) {
        const QVec ad = matvec(a, d);
        const Q step = rr / dot(d, ad);
        for (std::size_t i = 0; i < x.size(); ++i) {
            x[i] += step * d[i];
            r[i] -= step * ad[i];
        }
        const Q rr_next = dot(r, r);
        const Q conj = rr_next / rr;
        for (std::size_t i = 0; i < d.size(); ++i) d[i] = r[i] + conj * d[i];
        rr = rr_next;
        out.push_back(rr);
    }
    return out;
}

} // namespace oracle
