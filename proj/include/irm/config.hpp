#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "irm/arithmetic.hpp"

namespace irm {

enum class Method { irm, irm_cg, cg };

/// Built-in coordinate-vector generators for the generic IRM step.
enum class GeneratorId {
    residual,                  ///< [r]: steepest descent
    residual_increment,        ///< [r, p]
    jacobi_residual_increment, ///< [D^-1 r, p], D = diag(A)
};

std::string_view to_string(Method m);
std::string_view to_string(GeneratorId g);
/// "irm", "irm-cg", "cg"
Method parse_method(std::string_view text);
/// "residual", "residual+increment", "jacobi-residual+increment"
GeneratorId parse_generator(std::string_view text);

struct SolverConfig {
    /// Exact default for refresh_k: recursion is exact, so never refresh after step 0.
    static constexpr std::uint64_t kExactRefreshDefault = 2147483647; // 2^31 - 1
    static constexpr std::uint64_t kDoubleRefreshDefault = 50;

    Method method = Method::irm_cg;
    Rational omega{1};
    Rational epsilon{0};
    /// Unset: kExactRefreshDefault or kDoubleRefreshDefault depending on the backend.
    std::optional<std::uint64_t> refresh_k;
    /// Unset: 100 * n.
    std::optional<std::uint64_t> max_steps;
    GeneratorId generator = GeneratorId::residual_increment;
    bool record_energy = true;
    BitBudget budget{};

    /// Throws InvalidConfig unless 0 < omega < 2, epsilon >= 0, refresh_k >= 1, max_steps >= 1.
    void validate() const;

    std::uint64_t resolved_refresh_k(bool exact) const;
    std::uint64_t resolved_max_steps(std::size_t n) const;
};

/// Added to component `component` (1-based) of p once the step counter reaches step_index.
struct Perturbation {
    std::uint64_t step_index = 0;
    std::size_t component = 1;
    Rational delta{1};

    /// "step:component:delta", e.g. "1:7:1".
    static Perturbation parse(std::string_view text);
    std::string str() const;
};

} // namespace irm
