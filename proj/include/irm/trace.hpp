#pragma once

// Per-step convergence history of a solver run.

#include <cstdint>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

#include "irm/arithmetic.hpp"
#include "irm/config.hpp"

namespace irm {

enum class Termination { converged, max_steps, budget_exceeded, zero_initial_residual };

std::string_view to_string(Termination t);
Termination parse_termination(std::string_view text);

/// True for converged and zero_initial_residual.
bool is_converged(Termination t);

template <Scalar T>
struct StepRecord {
    std::uint64_t step = 0;
    T rr{};                   ///< r^T r in the run's arithmetic
    std::optional<T> energy;  ///< absent when energy recording is off
    bool refreshed = false;   ///< r recomputed as b - A x on this step
    bool perturbed = false;   ///< p perturbed after this step

    friend bool operator==(const StepRecord&, const StepRecord&) = default;
};

/// Config values as they were resolved for the run.
struct RunSettings {
    Method method = Method::irm_cg;
    GeneratorId generator = GeneratorId::residual_increment;
    Rational omega{1};
    Rational epsilon{0};
    std::uint64_t refresh_k = 1;
    std::uint64_t max_steps = 1;

    friend bool operator==(const RunSettings&, const RunSettings&) = default;
};

template <Scalar T>
struct ConvergenceTrace {
    RunSettings settings;
    std::size_t order = 0;                  ///< n of the solved system
    std::optional<std::uint64_t> seed;      ///< benchmark seed, when there was one
    std::optional<std::uint64_t> system_id; ///< fingerprint of the exact system
    std::vector<StepRecord<T>> records;     ///< records[0] is the initial state
    Termination termination = Termination::max_steps;

    static constexpr std::string_view arithmetic() { return ScalarTraits<T>::tag; }

    /// Number of completed steps (records.size() - 1).
    std::uint64_t steps() const { return records.empty() ? 0 : records.size() - 1; }

    friend bool operator==(const ConvergenceTrace&, const ConvergenceTrace&) = default;
};

using AnyTrace = std::variant<ConvergenceTrace<Rational>, ConvergenceTrace<double>>;

} // namespace irm
