#include "irm/benchgen.hpp"

#include <algorithm>
#include <cctype>
#include <istream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <utility>

namespace irm {

namespace {

void validate_rotation(const Rotation& rot, std::size_t n) {
    if (rot.i == rot.j) throw InvalidRotation("rotation needs two distinct indices");
    if (rot.i >= n || rot.j >= n) {
        throw InvalidRotation("rotation index out of range for order " + std::to_string(n));
    }
    if (!(rot.cos * rot.cos + rot.sin * rot.sin == Rational(1))) {
        throw InvalidRotation("cos^2 + sin^2 != 1 for (" + rot.cos.literal() + ", " + rot.sin.literal() + ")");
    }
}

// Rows i, j <- (c row_i - s row_j, s row_i + c row_j).
void rotate_rows(std::vector<std::vector<Rational>>& m, const Rotation& rot) {
    for (std::size_t k = 0; k < m.size(); ++k) {
        const Rational top = m[rot.i][k];
        const Rational bottom = m[rot.j][k];
        m[rot.i][k] = rot.cos * top - rot.sin * bottom;
        m[rot.j][k] = rot.sin * top + rot.cos * bottom;
    }
}

void rotate_columns(std::vector<std::vector<Rational>>& m, const Rotation& rot) {
    for (auto& row : m) {
        const Rational left = row[rot.i];
        const Rational right = row[rot.j];
        row[rot.i] = rot.cos * left - rot.sin * right;
        row[rot.j] = rot.sin * left + rot.cos * right;
    }
}

Rational random_rhs_entry(std::mt19937_64& rng) {
    const long num = static_cast<long>(rng() % 9) + 1;
    const long den = static_cast<long>(rng() % 4) + 1;
    const bool negative = (rng() & 1U) != 0;
    return Rational(mpz_class(negative ? -num : num), mpz_class(den));
}

bool parse_activity(const std::string& token) {
    if (token == "active") return true;
    if (token == "inactive") return false;
    throw ParseError("expected active or inactive, got '" + token + "'");
}

std::size_t parse_multiplicity(const std::string& token) {
    if (token.empty() || !std::all_of(token.begin(), token.end(), [](unsigned char c) { return std::isdigit(c); })) {
        throw ParseError("multiplicity must be a positive integer, got '" + token + "'");
    }
    return std::stoul(token);
}

} // namespace

std::size_t SpectrumSpec::order() const {
    std::size_t n = 0;
    for (const auto& item : items) n += item.multiplicity;
    return n;
}

void SpectrumSpec::validate() const {
    if (items.empty()) throw InvalidSpectrum("spectrum has no eigenvalues");
    std::set<Rational> seen;
    for (const auto& item : items) {
        if (item.eigenvalue.sign() <= 0) throw InvalidSpectrum("eigenvalue " + item.eigenvalue.literal() + " is not positive");
        if (item.multiplicity == 0) throw InvalidSpectrum("multiplicity must be positive");
        if (!seen.insert(item.eigenvalue).second) {
            throw InvalidSpectrum("eigenvalue " + item.eigenvalue.literal() + " listed twice");
        }
    }
    if (rhs == RhsRule::explicit_vector) {
        if (explicit_rhs.size() != order()) {
            throw InvalidSpectrum("explicit rhs has " + std::to_string(explicit_rhs.size()) + " entries, spectrum order is " +
                                  std::to_string(order()));
        }
        std::size_t k = 0;
        for (const auto& item : items) {
            for (std::size_t c = 0; c < item.multiplicity; ++c, ++k) {
                if (!item.active && !explicit_rhs[k].is_zero()) {
                    throw InvalidSpectrum("explicit rhs is nonzero on inactive eigenvalue " + item.eigenvalue.literal());
                }
            }
        }
    }
}

SpectrumSpec SpectrumSpec::parse_inline(std::string_view text) {
    SpectrumSpec spec;
    std::string all(text);
    std::stringstream ss(all);
    std::string token;
    while (std::getline(ss, token, ',')) {
        if (token.empty()) throw ParseError("empty item in spectrum '" + all + "'");
        SpectrumItem item;
        const auto colon = token.find(':');
        if (colon != std::string::npos) {
            item.active = parse_activity(token.substr(colon + 1));
            token = token.substr(0, colon);
        }
        const auto x = token.find('x');
        if (x == std::string::npos) throw ParseError("spectrum item '" + token + "' must look like <eigenvalue>x<multiplicity>");
        item.eigenvalue = parse_decimal(token.substr(0, x));
        item.multiplicity = parse_multiplicity(token.substr(x + 1));
        spec.items.push_back(std::move(item));
    }
    return spec;
}

SpectrumSpec SpectrumSpec::parse(std::istream& in) {
    SpectrumSpec spec;
    bool have_rhs = false;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream fields(line);
        std::string first;
        if (!(fields >> first) || first.front() == '#') continue;
        if (have_rhs) throw ParseError("spectrum file continues after the rhs line");
        if (first == "rhs") {
            std::string rule;
            if (!(fields >> rule)) throw ParseError("rhs line needs a rule");
            if (rule == "ones") {
                spec.rhs = RhsRule::ones;
            } else if (rule == "random") {
                std::string seed;
                if (!(fields >> seed)) throw ParseError("rhs random needs a seed");
                spec.rhs = RhsRule::random;
                spec.seed = std::stoull(seed);
            } else if (rule == "explicit") {
                spec.rhs = RhsRule::explicit_vector;
                std::string value;
                while (fields >> value) spec.explicit_rhs.push_back(parse_rational(value));
            } else {
                throw ParseError("unknown rhs rule '" + rule + "'");
            }
            std::string extra;
            if (fields >> extra) throw ParseError("unexpected token '" + extra + "' on rhs line");
            have_rhs = true;
            continue;
        }
        std::string multiplicity, activity, extra;
        if (!(fields >> multiplicity >> activity) || (fields >> extra)) {
            throw ParseError("spectrum line must be 'eigenvalue multiplicity active|inactive': '" + line + "'");
        }
        spec.items.push_back({parse_decimal(first), parse_multiplicity(multiplicity), parse_activity(activity)});
    }
    if (!have_rhs) throw ParseError("spectrum file needs a final 'rhs' line");
    return spec;
}

RotationPlan RotationPlan::inverse() const {
    RotationPlan out;
    for (auto it = steps.rbegin(); it != steps.rend(); ++it) out.steps.push_back({it->i, it->j, it->cos, -it->sin});
    return out;
}

RotationPlan RotationPlan::random(std::size_t n, std::size_t count, std::uint64_t seed) {
    static const std::pair<long, long> kLegs[] = {{3, 4}, {5, 12}, {8, 15}};
    static const long kHypotenuse[] = {5, 13, 17};
    RotationPlan plan;
    if (count == 0) return plan;
    if (n < 2) throw InvalidRotation("rotations need order at least 2");
    std::mt19937_64 rng(seed);
    for (std::size_t k = 0; k < count; ++k) {
        const std::size_t i = rng() % n;
        std::size_t j = rng() % (n - 1);
        if (j >= i) ++j;
        const std::size_t pick = rng() % 3;
        long c = kLegs[pick].first;
        long s = kLegs[pick].second;
        if (rng() & 1U) std::swap(c, s);
        if (rng() & 1U) s = -s;
        plan.steps.push_back({i, j, Rational(mpz_class(c), mpz_class(kHypotenuse[pick])),
                              Rational(mpz_class(s), mpz_class(kHypotenuse[pick]))});
    }
    return plan;
}

BenchmarkSystem gen_diagonal(const SpectrumSpec& spec) {
    spec.validate();
    std::mt19937_64 rng(spec.seed);
    std::vector<Rational> diag;
    std::vector<Rational> rhs;
    std::size_t active = 0;
    std::size_t k = 0;
    for (const auto& item : spec.items) {
        bool carries = false;
        for (std::size_t c = 0; c < item.multiplicity; ++c, ++k) {
            diag.push_back(item.eigenvalue);
            Rational value;
            if (item.active) {
                switch (spec.rhs) {
                case RhsRule::ones: value = Rational(1); break;
                case RhsRule::random: value = random_rhs_entry(rng); break;
                case RhsRule::explicit_vector: value = spec.explicit_rhs[k]; break;
                }
            }
            carries = carries || !value.is_zero();
            rhs.push_back(std::move(value));
        }
        if (carries) ++active;
    }
    auto a = SymmetricMatrix<Rational>::diagonal(std::move(diag));
    a.certify_spd();
    return {std::move(a), Vector<Rational>(std::move(rhs)), active};
}

BenchmarkSystem rotate(const BenchmarkSystem& system, const RotationPlan& plan) {
    const std::size_t n = system.a.order();
    for (const auto& rot : plan.steps) validate_rotation(rot, n);
    if (plan.steps.empty()) return system;

    std::vector<std::vector<Rational>> m(n, std::vector<Rational>(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) m[i][j] = system.a.at(i, j);
    }
    std::vector<Rational> b(system.b.begin(), system.b.end());
    for (const auto& rot : plan.steps) {
        rotate_rows(m, rot);
        rotate_columns(m, rot);
        const Rational top = b[rot.i];
        const Rational bottom = b[rot.j];
        b[rot.i] = rot.cos * top - rot.sin * bottom;
        b[rot.j] = rot.sin * top + rot.cos * bottom;
    }
    auto a = SymmetricMatrix<Rational>::from_rows(m);
    if (system.a.spd_certified()) a.certify_spd();
    return {std::move(a), Vector<Rational>(std::move(b)), system.active_count};
}

BenchmarkSystem gen_rotated(const SpectrumSpec& spec, const RotationPlan& plan) {
    return rotate(gen_diagonal(spec), plan);
}

template <Scalar T>
Vector<T> gen_inverse(const SymmetricMatrix<T>& a, const Vector<T>& x_star) {
    if constexpr (!is_exact_v<T>) {
        throw ExactRequired("inverse-method benchmarks need exact input data and matvec");
    } else {
        return matvec(a, x_star);
    }
}

template Vector<Rational> gen_inverse<Rational>(const SymmetricMatrix<Rational>&, const Vector<Rational>&);
template Vector<double> gen_inverse<double>(const SymmetricMatrix<double>&, const Vector<double>&);

SymmetricMatrix<Rational> gen_spring_chain(std::size_t n, const std::vector<Rational>& stiffnesses) {
    if (n == 0) throw InvalidStiffness("spring chain needs at least one degree of freedom");
    if (stiffnesses.size() != n + 1) {
        throw InvalidStiffness("spring chain of " + std::to_string(n) + " DoF needs " + std::to_string(n + 1) +
                               " stiffnesses, got " + std::to_string(stiffnesses.size()));
    }
    for (const auto& k : stiffnesses) {
        if (k.sign() <= 0) throw InvalidStiffness("stiffness " + k.literal() + " is not positive");
    }
    std::vector<Rational> packed;
    packed.reserve(n * (n + 1) / 2);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j + 1 < i; ++j) packed.emplace_back();
        if (i > 0) packed.push_back(-stiffnesses[i]);
        packed.push_back(stiffnesses[i] + stiffnesses[i + 1]);
    }
    auto a = SymmetricMatrix<Rational>::from_lower(n, std::move(packed));
    a.certify_spd();
    return a;
}

} // namespace irm
