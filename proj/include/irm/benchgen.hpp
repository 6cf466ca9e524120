#pragma once

// Benchmark systems with exactly known spectra and solutions.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

#include "irm/linalg.hpp"

namespace irm {

struct SpectrumItem {
    Rational eigenvalue;
    std::size_t multiplicity = 1;
    bool active = true;
};

enum class RhsRule { ones, explicit_vector, random };

struct SpectrumSpec {
    std::vector<SpectrumItem> items;
    RhsRule rhs = RhsRule::ones;
    std::vector<Rational> explicit_rhs; ///< RhsRule::explicit_vector only
    std::uint64_t seed = 0;             ///< RhsRule::random only

    std::size_t order() const;
    /// Throws InvalidSpectrum unless eigenvalues are positive and pairwise distinct,
    /// multiplicities positive, and an explicit rhs has length n with zeros on
    /// inactive blocks.
    void validate() const;

    /// Inline form "1x1,2x1,7x1:inactive" (eigenvalue x multiplicity).
    static SpectrumSpec parse_inline(std::string_view text);
    /// Lines "eigenvalue multiplicity active|inactive", then
    /// "rhs ones", "rhs random <seed>" or "rhs explicit v1 .. vn".
    static SpectrumSpec parse(std::istream& in);
};

/// One Givens-type rotation on rows/columns (i, j) with cos^2 + sin^2 = 1 exactly.
struct Rotation {
    std::size_t i = 0;
    std::size_t j = 0;
    Rational cos;
    Rational sin;
};

struct RotationPlan {
    std::vector<Rotation> steps;

    /// Reversed steps with sin negated: applies V^T.
    RotationPlan inverse() const;
    /// `count` rotations on random index pairs using the Pythagorean pairs
    /// (3/5, 4/5), (5/13, 12/13), (8/17, 15/17) with random order and sign.
    static RotationPlan random(std::size_t n, std::size_t count, std::uint64_t seed);
};

struct BenchmarkSystem {
    SymmetricMatrix<Rational> a;
    Vector<Rational> b;
    std::size_t active_count = 0; ///< m: distinct eigenvalues carrying a nonzero rhs component
};

BenchmarkSystem gen_diagonal(const SpectrumSpec& spec);

/// A = V D V^T, b = V b_diag. Throws InvalidRotation for a non-Pythagorean
/// pair, i == j, or an index >= n.
BenchmarkSystem gen_rotated(const SpectrumSpec& spec, const RotationPlan& plan);

/// Rotates an already-built system (dense result unless the plan is empty).
BenchmarkSystem rotate(const BenchmarkSystem& system, const RotationPlan& plan);

/// b = A x_star exactly. Only the exact backend is accepted.
template <Scalar T>
Vector<T> gen_inverse(const SymmetricMatrix<T>& a, const Vector<T>& x_star);

/// Fixed-fixed spring chain: diagonal k_i + k_{i+1}, off-diagonal -k_{i+1}.
/// Needs n + 1 positive stiffnesses.
SymmetricMatrix<Rational> gen_spring_chain(std::size_t n, const std::vector<Rational>& stiffnesses);

} // namespace irm
