#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "irm/benchgen.hpp"
#include "irm/linalg.hpp"
#include "oracles.hpp"

namespace testing_support {

inline irm::Rational to_rational(const oracle::Q& q) { return irm::Rational::from_mpq(q); }

inline irm::SymmetricMatrix<irm::Rational> to_matrix(const oracle::QMat& rows) {
    std::vector<std::vector<irm::Rational>> out;
    for (const auto& row : rows) {
        std::vector<irm::Rational> r;
        for (const auto& q : row) r.push_back(to_rational(q));
        out.push_back(std::move(r));
    }
    return irm::SymmetricMatrix<irm::Rational>::from_rows(out);
}

inline irm::Vector<irm::Rational> to_vector(const oracle::QVec& v) {
    std::vector<irm::Rational> out;
    for (const auto& q : v) out.push_back(to_rational(q));
    return irm::Vector<irm::Rational>(std::move(out));
}

inline oracle::QMat to_qmat(const irm::SymmetricMatrix<irm::Rational>& a) {
    oracle::QMat out(a.order(), oracle::QVec(a.order()));
    for (std::size_t i = 0; i < a.order(); ++i) {
        for (std::size_t j = 0; j < a.order(); ++j) out[i][j] = a.at(i, j).mpq();
    }
    return out;
}

inline oracle::QVec to_qvec(const irm::Vector<irm::Rational>& v) {
    oracle::QVec out;
    for (const auto& q : v) out.push_back(q.mpq());
    return out;
}

/// Seeded spectrum with `distinct` active eigenvalues spread over small integers and halves,
/// random multiplicities and an optional inactive block.
inline irm::SpectrumSpec random_spectrum(std::mt19937_64& rng, std::size_t distinct, std::size_t max_order,
                                         bool with_inactive) {
    irm::SpectrumSpec spec;
    std::vector<long> used;
    std::size_t n = 0;
    auto fresh = [&] {
        for (;;) {
            const long twice = static_cast<long>(rng() % 80) + 1;
            bool seen = false;
            for (long u : used) seen = seen || u == twice;
            if (!seen) {
                used.push_back(twice);
                return irm::Rational(mpz_class(twice), mpz_class(2));
            }
        }
    };
    for (std::size_t k = 0; k < distinct; ++k) {
        const std::size_t room = max_order - n - (distinct - k - 1) - (with_inactive ? 1 : 0);
        const std::size_t mult = 1 + rng() % std::min<std::size_t>(3, room);
        spec.items.push_back({fresh(), mult, true});
        n += mult;
    }
    if (with_inactive) spec.items.push_back({fresh(), 1, false});
    spec.rhs = irm::RhsRule::random;
    spec.seed = rng();
    return spec;
}

} // namespace testing_support
