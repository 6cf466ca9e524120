#include "irm/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>

namespace irm {

namespace {

std::size_t packed_index(std::size_t i, std::size_t j) {
    if (i < j) std::swap(i, j);
    return i * (i + 1) / 2 + j;
}

void require_same_size(std::size_t a, std::size_t b, const char* what) {
    if (a != b) {
        throw DimensionError(std::string(what) + ": dimension mismatch (" + std::to_string(a) + " vs " +
                             std::to_string(b) + ")");
    }
}

// Rows scaled by the lcm of their denominators; solutions and leading-minor
// signs are unchanged by positive row scaling.
std::vector<std::vector<mpz_class>> integer_rows(const std::vector<std::vector<Rational>>& rows) {
    std::vector<std::vector<mpz_class>> out;
    out.reserve(rows.size());
    for (const auto& row : rows) {
        mpz_class scale = 1;
        for (const auto& q : row) mpz_lcm(scale.get_mpz_t(), scale.get_mpz_t(), q.den().get_mpz_t());
        std::vector<mpz_class> scaled;
        scaled.reserve(row.size());
        for (const auto& q : row) scaled.push_back(q.num() * (scale / q.den()));
        out.push_back(std::move(scaled));
    }
    return out;
}

// One Bareiss elimination step on rows below k, columns after k.
void bareiss_eliminate(std::vector<std::vector<mpz_class>>& m, std::size_t k, const mpz_class& previous) {
    const std::size_t cols = m[k].size();
    for (std::size_t i = k + 1; i < m.size(); ++i) {
        for (std::size_t j = k + 1; j < cols; ++j) {
            mpz_class t = m[i][j] * m[k][k] - m[i][k] * m[k][j];
            mpz_divexact(m[i][j].get_mpz_t(), t.get_mpz_t(), previous.get_mpz_t());
        }
        m[i][k] = 0;
    }
}

std::vector<std::vector<double>> dense_doubles(const SymmetricMatrix<double>& a) {
    const std::size_t n = a.order();
    std::vector<std::vector<double>> out(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) out[i][j] = a.at(i, j);
    }
    return out;
}

// Lower Cholesky factor in place; false if a nonpositive pivot shows up.
bool cholesky(std::vector<std::vector<double>>& l) {
    const std::size_t n = l.size();
    for (std::size_t k = 0; k < n; ++k) {
        double d = l[k][k];
        for (std::size_t j = 0; j < k; ++j) d -= l[k][j] * l[k][j];
        if (!(d > 0.0) || !std::isfinite(d)) return false;
        l[k][k] = std::sqrt(d);
        for (std::size_t i = k + 1; i < n; ++i) {
            double s = l[i][k];
            for (std::size_t j = 0; j < k; ++j) s -= l[i][j] * l[k][j];
            l[i][k] = s / l[k][k];
        }
        for (std::size_t j = k + 1; j < n; ++j) l[k][j] = 0.0;
    }
    return true;
}

std::vector<double> cholesky_solve(const std::vector<std::vector<double>>& l, std::vector<double> v) {
    const std::size_t n = l.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < i; ++j) v[i] -= l[i][j] * v[j];
        v[i] /= l[i][i];
    }
    for (std::size_t i = n; i-- > 0;) {
        for (std::size_t j = i + 1; j < n; ++j) v[i] -= l[j][i] * v[j];
        v[i] /= l[i][i];
    }
    return v;
}

double normalize(std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    s = std::sqrt(s);
    for (double& x : v) x /= s;
    return s;
}

std::vector<double> start_vector(std::size_t n) {
    // splitmix64 with a fixed seed; avoids accidental eigenvector starts like all-ones.
    std::uint64_t state = 0x9e3779b97f4a7c15ULL;
    std::vector<double> v(n);
    for (auto& x : v) {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        z ^= z >> 31;
        x = 0.5 + static_cast<double>(z >> 11) / static_cast<double>(1ULL << 53);
    }
    normalize(v);
    return v;
}

template <class Apply>
double rayleigh_iteration(std::size_t n, Apply apply) {
    constexpr int kMaxIterations = 20000;
    constexpr double kTolerance = 1e-15;
    std::vector<double> v = start_vector(n);
    double lambda = 0.0;
    for (int it = 0; it < kMaxIterations; ++it) {
        std::vector<double> w = apply(v);
        double next = 0.0;
        for (std::size_t i = 0; i < n; ++i) next += v[i] * w[i];
        normalize(w);
        v = std::move(w);
        if (it > 0 && std::abs(next - lambda) <= kTolerance * std::abs(next)) return next;
        lambda = next;
    }
    return lambda;
}

} // namespace

// ---------------------------------------------------------------- Vector

template <Scalar T>
Vector<T>::Vector(std::size_t n) : entries_(n, T(0)) {
    if (n == 0) throw DimensionError("vector length must be at least 1");
}

template <Scalar T>
Vector<T>::Vector(std::vector<T> entries) : entries_(std::move(entries)) {
    if (entries_.empty()) throw DimensionError("vector length must be at least 1");
    for (const auto& x : entries_) ScalarTraits<T>::validate(x);
}

template <Scalar T>
bool Vector<T>::is_zero() const {
    return std::all_of(entries_.begin(), entries_.end(), [](const T& x) { return ScalarTraits<T>::is_zero(x); });
}

template <Scalar T>
T dot(const Vector<T>& u, const Vector<T>& v) {
    require_same_size(u.size(), v.size(), "dot");
    T s(0);
    for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * v[i];
    return s;
}

template <Scalar T>
Vector<T> combine(const T& a, const Vector<T>& u, const T& b, const Vector<T>& v) {
    require_same_size(u.size(), v.size(), "combine");
    std::vector<T> out(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) out[i] = a * u[i] + b * v[i];
    return Vector<T>(std::move(out));
}

template <Scalar T>
Vector<T> operator+(const Vector<T>& u, const Vector<T>& v) {
    require_same_size(u.size(), v.size(), "add");
    std::vector<T> out(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) out[i] = u[i] + v[i];
    return Vector<T>(std::move(out));
}

template <Scalar T>
Vector<T> operator-(const Vector<T>& u, const Vector<T>& v) {
    require_same_size(u.size(), v.size(), "subtract");
    std::vector<T> out(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) out[i] = u[i] - v[i];
    return Vector<T>(std::move(out));
}

template <Scalar T>
Vector<T> operator*(const T& s, const Vector<T>& v) {
    std::vector<T> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = s * v[i];
    return Vector<T>(std::move(out));
}

// ------------------------------------------------------- SymmetricMatrix

template <Scalar T>
SymmetricMatrix<T>::SymmetricMatrix(std::size_t order, Storage storage, std::vector<T> data)
    : order_(order), storage_(storage), data_(std::move(data)) {
    if (order_ == 0) throw DimensionError("matrix order must be at least 1");
    for (const auto& x : data_) ScalarTraits<T>::validate(x);
}

template <Scalar T>
SymmetricMatrix<T> SymmetricMatrix<T>::diagonal(std::vector<T> entries) {
    const std::size_t n = entries.size();
    return SymmetricMatrix(n, Storage::diagonal, std::move(entries));
}

template <Scalar T>
SymmetricMatrix<T> SymmetricMatrix<T>::from_lower(std::size_t order, std::vector<T> packed) {
    if (packed.size() != order * (order + 1) / 2) {
        throw DimensionError("packed lower triangle of order " + std::to_string(order) + " needs " +
                             std::to_string(order * (order + 1) / 2) + " entries, got " +
                             std::to_string(packed.size()));
    }
    return SymmetricMatrix(order, Storage::dense, std::move(packed));
}

template <Scalar T>
SymmetricMatrix<T> SymmetricMatrix<T>::from_rows(const std::vector<std::vector<T>>& rows) {
    const std::size_t n = rows.size();
    std::vector<T> packed;
    packed.reserve(n * (n + 1) / 2);
    for (std::size_t i = 0; i < n; ++i) {
        if (rows[i].size() != n) throw DimensionError("matrix rows must be square");
        for (std::size_t j = 0; j <= i; ++j) {
            if (!(rows[i][j] == rows[j][i])) throw DimensionError("matrix is not symmetric");
            packed.push_back(rows[i][j]);
        }
    }
    return from_lower(n, std::move(packed));
}

template <Scalar T>
T SymmetricMatrix<T>::at(std::size_t i, std::size_t j) const {
    if (i >= order_ || j >= order_) throw DimensionError("matrix index out of range");
    if (storage_ == Storage::diagonal) return i == j ? data_[i] : T(0);
    return data_[packed_index(i, j)];
}

template <Scalar T>
std::vector<T> SymmetricMatrix<T>::diagonal_entries() const {
    if (storage_ == Storage::diagonal) return data_;
    std::vector<T> out;
    out.reserve(order_);
    for (std::size_t i = 0; i < order_; ++i) out.push_back(data_[packed_index(i, i)]);
    return out;
}

template <Scalar T>
SymmetricMatrix<T>& SymmetricMatrix<T>::certify_spd() {
    if (!spd_certified_) {
        if (!spd_check(*this)) throw NotSPD("matrix is not symmetric positive definite");
        spd_certified_ = true;
    }
    return *this;
}

// ------------------------------------------------------------ RitzSystem

template <Scalar T>
RitzSystem<T>::RitzSystem(std::size_t order, std::vector<T> matrix, std::vector<T> rhs)
    : m(order), abar(std::move(matrix)), rbar(std::move(rhs)) {
    if (m == 0 || m > kMaxRitzOrder) {
        throw DimensionError("Ritz system order must be in 1.." + std::to_string(kMaxRitzOrder));
    }
    if (abar.size() != m * m || rbar.size() != m) throw DimensionError("Ritz system shape mismatch");
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            if (!(abar[i * m + j] == abar[j * m + i])) throw DimensionError("Ritz matrix is not symmetric");
        }
    }
}

// ------------------------------------------------------------ operations

template <Scalar T>
Vector<T> matvec(const SymmetricMatrix<T>& a, const Vector<T>& v) {
    require_same_size(a.order(), v.size(), "matvec");
    const std::size_t n = a.order();
    const auto& d = a.data();
    std::vector<T> out(n, T(0));
    if (a.is_diagonal()) {
        for (std::size_t i = 0; i < n; ++i) out[i] = d[i] * v[i];
        return Vector<T>(std::move(out));
    }
    // One pass over the packed triangle; each off-diagonal entry feeds two rows.
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < i; ++j, ++k) {
            out[i] += d[k] * v[j];
            out[j] += d[k] * v[i];
        }
        out[i] += d[k++] * v[i];
    }
    return Vector<T>(std::move(out));
}

template <>
Vector<Rational> small_solve(const RitzSystem<Rational>& sys) {
    const std::size_t m = sys.m;
    std::vector<std::vector<Rational>> rows(m);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) rows[i].push_back(sys(i, j));
        rows[i].push_back(sys.rbar[i]);
    }
    auto aug = integer_rows(rows);

    mpz_class previous = 1;
    for (std::size_t k = 0; k < m; ++k) {
        std::size_t pivot = k;
        while (pivot < m && aug[pivot][k] == 0) ++pivot;
        if (pivot == m) throw SingularRitzSystem("Ritz matrix is singular");
        std::swap(aug[k], aug[pivot]);
        bareiss_eliminate(aug, k, previous);
        previous = aug[k][k];
    }

    std::vector<Rational> a(m);
    for (std::size_t i = m; i-- > 0;) {
        Rational s(aug[i][m], mpz_class(1));
        for (std::size_t j = i + 1; j < m; ++j) s -= Rational(aug[i][j], mpz_class(1)) * a[j];
        a[i] = s / Rational(aug[i][i], mpz_class(1));
    }
    return Vector<Rational>(std::move(a));
}

template <>
Vector<double> small_solve(const RitzSystem<double>& sys) {
    const std::size_t m = sys.m;
    std::vector<std::vector<double>> aug(m, std::vector<double>(m + 1));
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) aug[i][j] = sys(i, j);
        aug[i][m] = sys.rbar[i];
    }
    for (std::size_t k = 0; k < m; ++k) {
        std::size_t pivot = k;
        for (std::size_t i = k + 1; i < m; ++i) {
            if (std::abs(aug[i][k]) > std::abs(aug[pivot][k])) pivot = i;
        }
        if (aug[pivot][k] == 0.0) throw SingularRitzSystem("Ritz matrix is singular");
        std::swap(aug[k], aug[pivot]);
        for (std::size_t i = k + 1; i < m; ++i) {
            const double f = aug[i][k] / aug[k][k];
            for (std::size_t j = k; j <= m; ++j) aug[i][j] -= f * aug[k][j];
        }
    }
    std::vector<double> a(m);
    for (std::size_t i = m; i-- > 0;) {
        double s = aug[i][m];
        for (std::size_t j = i + 1; j < m; ++j) s -= aug[i][j] * a[j];
        a[i] = s / aug[i][i];
        if (!std::isfinite(a[i])) throw SingularRitzSystem("Ritz solve produced a non-finite coefficient");
    }
    return Vector<double>(std::move(a));
}

template <>
bool spd_check(const SymmetricMatrix<Rational>& a) {
    const std::size_t n = a.order();
    if (a.is_diagonal()) {
        return std::all_of(a.data().begin(), a.data().end(), [](const Rational& q) { return q.sign() > 0; });
    }
    std::vector<std::vector<Rational>> rows(n, std::vector<Rational>(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) rows[i][j] = a.at(i, j);
    }
    auto m = integer_rows(rows);
    // Without pivoting, the k-th Bareiss pivot is the k-th leading principal minor.
    mpz_class previous = 1;
    for (std::size_t k = 0; k < n; ++k) {
        if (sgn(m[k][k]) <= 0) return false;
        bareiss_eliminate(m, k, previous);
        previous = m[k][k];
    }
    return true;
}

template <>
bool spd_check(const SymmetricMatrix<double>& a) {
    if (a.is_diagonal()) {
        return std::all_of(a.data().begin(), a.data().end(), [](double x) { return x > 0.0; });
    }
    auto l = dense_doubles(a);
    return cholesky(l);
}

template <Scalar T>
T energy(const SymmetricMatrix<T>& a, const Vector<T>& b, const Vector<T>& x) {
    require_same_size(b.size(), x.size(), "energy");
    const Vector<T> ax = matvec(a, x);
    return dot(x, ax) / T(2) - dot(x, b);
}

template <Scalar T>
double condition_estimate(const SymmetricMatrix<T>& a) {
    if (a.is_diagonal()) {
        const auto& d = a.data();
        const auto [lo, hi] = std::minmax_element(d.begin(), d.end());
        if (!(*lo > T(0))) throw NotSPD("diagonal matrix has a nonpositive entry");
        return ScalarTraits<T>::to_double(*hi / *lo);
    }
    if (!a.spd_certified() && !spd_check(a)) throw NotSPD("matrix is not symmetric positive definite");

    const auto ad = convert<double>(a);
    auto l = dense_doubles(ad);
    if (!cholesky(l)) throw NotSPD("matrix is not numerically positive definite in double precision");
    const std::size_t n = ad.order();

    const double largest = rayleigh_iteration(n, [&](const std::vector<double>& v) {
        const auto w = matvec(ad, Vector<double>(v));
        return std::vector<double>(w.begin(), w.end());
    });
    const double inverse_smallest = rayleigh_iteration(n, [&](const std::vector<double>& v) {
        return cholesky_solve(l, v);
    });
    return largest * inverse_smallest;
}

template <Scalar To, Scalar From>
Vector<To> convert(const Vector<From>& v) {
    if constexpr (std::is_same_v<To, From>) {
        return v;
    } else {
        std::vector<To> out;
        out.reserve(v.size());
        for (const auto& x : v) {
            if constexpr (std::is_same_v<To, double>) {
                out.push_back(demote(x));
            } else {
                out.push_back(rationalize(x));
            }
        }
        return Vector<To>(std::move(out));
    }
}

template <Scalar To, Scalar From>
SymmetricMatrix<To> convert(const SymmetricMatrix<From>& a) {
    if constexpr (std::is_same_v<To, From>) {
        return a;
    } else {
        std::vector<To> out;
        out.reserve(a.data().size());
        for (const auto& x : a.data()) {
            if constexpr (std::is_same_v<To, double>) {
                out.push_back(demote(x));
            } else {
                out.push_back(rationalize(x));
            }
        }
        if (a.is_diagonal()) return SymmetricMatrix<To>::diagonal(std::move(out));
        return SymmetricMatrix<To>::from_lower(a.order(), std::move(out));
    }
}

#define IRM_INSTANTIATE_LINALG(T)                                                          \
    template class Vector<T>;                                                              \
    template class SymmetricMatrix<T>;                                                     \
    template struct RitzSystem<T>;                                                         \
    template T dot<T>(const Vector<T>&, const Vector<T>&);                                 \
    template Vector<T> combine<T>(const T&, const Vector<T>&, const T&, const Vector<T>&); \
    template Vector<T> operator+ <T>(const Vector<T>&, const Vector<T>&);                  \
    template Vector<T> operator- <T>(const Vector<T>&, const Vector<T>&);                  \
    template Vector<T> operator* <T>(const T&, const Vector<T>&);                          \
    template Vector<T> matvec<T>(const SymmetricMatrix<T>&, const Vector<T>&);             \
    template T energy<T>(const SymmetricMatrix<T>&, const Vector<T>&, const Vector<T>&);   \
    template double condition_estimate<T>(const SymmetricMatrix<T>&)

IRM_INSTANTIATE_LINALG(Rational);
IRM_INSTANTIATE_LINALG(double);
#undef IRM_INSTANTIATE_LINALG

template Vector<Rational> convert<Rational, Rational>(const Vector<Rational>&);
template Vector<double> convert<double, Rational>(const Vector<Rational>&);
template Vector<Rational> convert<Rational, double>(const Vector<double>&);
template Vector<double> convert<double, double>(const Vector<double>&);
template SymmetricMatrix<Rational> convert<Rational, Rational>(const SymmetricMatrix<Rational>&);
template SymmetricMatrix<double> convert<double, Rational>(const SymmetricMatrix<Rational>&);
template SymmetricMatrix<Rational> convert<Rational, double>(const SymmetricMatrix<double>&);
template SymmetricMatrix<double> convert<double, double>(const SymmetricMatrix<double>&);

} // namespace irm
