#pragma once

// Dense/diagonal symmetric matrices and vectors over either scalar backend.

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "irm/arithmetic.hpp"

namespace irm {

template <Scalar T>
class Vector {
public:
    /// Zero vector of length n (n >= 1).
    explicit Vector(std::size_t n);
    explicit Vector(std::vector<T> entries);
    Vector(std::initializer_list<T> entries) : Vector(std::vector<T>(entries)) {}

    std::size_t size() const { return entries_.size(); }
    const T& operator[](std::size_t i) const { return entries_[i]; }
    T& operator[](std::size_t i) { return entries_[i]; }

    auto begin() const { return entries_.begin(); }
    auto end() const { return entries_.end(); }
    std::span<const T> entries() const { return entries_; }

    bool is_zero() const;

    friend bool operator==(const Vector&, const Vector&) = default;

private:
    std::vector<T> entries_;
};

template <Scalar T>
T dot(const Vector<T>& u, const Vector<T>& v);

/// a*u + b*v
template <Scalar T>
Vector<T> combine(const T& a, const Vector<T>& u, const T& b, const Vector<T>& v);

template <Scalar T>
Vector<T> operator+(const Vector<T>& u, const Vector<T>& v);
template <Scalar T>
Vector<T> operator-(const Vector<T>& u, const Vector<T>& v);
template <Scalar T>
Vector<T> operator*(const T& s, const Vector<T>& v);

enum class Storage { dense, diagonal };

/// Symmetric matrix stored as its packed lower triangle (row-major) or its diagonal.
template <Scalar T>
class SymmetricMatrix {
public:
    static SymmetricMatrix diagonal(std::vector<T> entries);
    /// Packed lower triangle: a00, a10, a11, a20, a21, a22, ...
    static SymmetricMatrix from_lower(std::size_t order, std::vector<T> packed);
    /// Full row-major matrix; throws DimensionError unless exactly symmetric.
    static SymmetricMatrix from_rows(const std::vector<std::vector<T>>& rows);

    std::size_t order() const { return order_; }
    Storage storage() const { return storage_; }
    bool is_diagonal() const { return storage_ == Storage::diagonal; }

    T at(std::size_t i, std::size_t j) const;
    /// Diagonal entries, regardless of storage.
    std::vector<T> diagonal_entries() const;
    const std::vector<T>& data() const { return data_; }

    /// Set only by certify_spd().
    bool spd_certified() const { return spd_certified_; }
    /// Runs spd_check; throws NotSPD on failure.
    SymmetricMatrix& certify_spd();

    friend bool operator==(const SymmetricMatrix& a, const SymmetricMatrix& b) {
        return a.order_ == b.order_ && a.storage_ == b.storage_ && a.data_ == b.data_;
    }

private:
    SymmetricMatrix(std::size_t order, Storage storage, std::vector<T> data);

    std::size_t order_ = 0;
    Storage storage_ = Storage::diagonal;
    std::vector<T> data_;
    bool spd_certified_ = false;
};

/// Small symmetric projected system abar * a = rbar of order 1..kMaxRitzOrder.
template <Scalar T>
struct RitzSystem {
    static constexpr std::size_t kMaxRitzOrder = 4;

    std::size_t m = 0;
    std::vector<T> abar; ///< m*m, row-major
    std::vector<T> rbar; ///< m

    RitzSystem(std::size_t order, std::vector<T> matrix, std::vector<T> rhs);

    const T& operator()(std::size_t i, std::size_t j) const { return abar[i * m + j]; }
};

template <Scalar T>
Vector<T> matvec(const SymmetricMatrix<T>& a, const Vector<T>& v);

/// Exact (fraction-free) solve for Rational, partial pivoting for double.
/// Throws SingularRitzSystem when abar is singular.
template <Scalar T>
Vector<T> small_solve(const RitzSystem<T>& sys);

/// True iff every pivot of the symmetric LDL^T factorisation is positive.
template <Scalar T>
bool spd_check(const SymmetricMatrix<T>& a);

/// 1/2 x^T A x - x^T b
template <Scalar T>
T energy(const SymmetricMatrix<T>& a, const Vector<T>& b, const Vector<T>& x);

/// Ratio of extreme eigenvalues. Exact for diagonal storage; otherwise an
/// estimate from power iteration (largest) and inverse iteration (smallest).
template <Scalar T>
double condition_estimate(const SymmetricMatrix<T>& a);

/// Backend conversion: Rational -> double demotes each entry, double -> Rational
/// rationalizes bit-exactly.
template <Scalar To, Scalar From>
Vector<To> convert(const Vector<From>& v);
template <Scalar To, Scalar From>
SymmetricMatrix<To> convert(const SymmetricMatrix<From>& a);

} // namespace irm
