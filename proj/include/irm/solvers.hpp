#pragma once

// Generic Iterated Ritz Method, its two-vector CG-equivalent (IRM-CG), and
// textbook Hestenes-Stiefel CG, all run under the same refresh/termination
// harness so their traces line up step for step.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "irm/config.hpp"
#include "irm/linalg.hpp"
#include "irm/trace.hpp"

namespace irm {

template <Scalar T>
struct SolverState {
    std::uint64_t i = 0;
    Vector<T> x;
    Vector<T> r;
    Vector<T> p; ///< increment: x_{i+1} = x_i + omega * p_i
    std::optional<Vector<T>> beta;      ///< A p (IRM-CG and CG)
    std::optional<Vector<T>> direction; ///< CG search direction d, with p = step_length * d
    T step_length{};                    ///< CG only
    T rr{};                             ///< r^T r
    T rr0{};                            ///< r_0^T r_0
    bool converged = false;             ///< r is exactly zero
};

/// Side quantities of one step, for invariant checks and tracing.
template <Scalar T>
struct StepInfo {
    bool refreshed = false;
    bool reduced = false;     ///< Ritz system lost a column (dependence or singular fallback)
    std::size_t subspace = 0; ///< columns in the Ritz solve; 0 when r reached zero
    std::size_t matvecs = 0;
    T r_dot_p{};                  ///< r_{i+1}^T p_i, also the second entry of rbar for IRM-CG
    std::optional<T> r_dot_beta;  ///< r_{i+1}^T beta_i (IRM-CG)
    std::optional<T> p_dot_alpha; ///< p_i^T alpha_i (IRM-CG)
};

/// Produces the coordinate vectors [phi_1 .. phi_m] from the updated residual
/// r_{i+1} and the previous increment p_i.
template <Scalar T>
using CoordinateGenerator =
    std::function<std::vector<Vector<T>>(const SymmetricMatrix<T>& a, const Vector<T>& r, const Vector<T>& p)>;

template <Scalar T>
CoordinateGenerator<T> make_generator(GeneratorId id);

/// Steepest-descent initialisation shared by all three methods. Throws NotSPD
/// unless A is SPD. A zero initial residual yields a converged state.
template <Scalar T>
SolverState<T> init(const SymmetricMatrix<T>& a, const Vector<T>& b, const Vector<T>& x0, Method method);

/// One IRM-CG step: a single matvec (A r_{i+1}) on non-refresh steps.
template <Scalar T>
SolverState<T> irmcg_step(SolverState<T> state, const SymmetricMatrix<T>& a, const Vector<T>& b,
                          const SolverConfig& cfg, StepInfo<T>* info = nullptr);

/// One generic IRM step with the given coordinate generator.
template <Scalar T>
SolverState<T> irm_step(SolverState<T> state, const SymmetricMatrix<T>& a, const Vector<T>& b,
                        const SolverConfig& cfg, const CoordinateGenerator<T>& generator,
                        StepInfo<T>* info = nullptr);

/// One Hestenes-Stiefel CG step. Throws NumericalBreakdown if d^T A d vanishes with r != 0.
template <Scalar T>
SolverState<T> cg_step(SolverState<T> state, const SymmetricMatrix<T>& a, const Vector<T>& b,
                       const SolverConfig& cfg, StepInfo<T>* info = nullptr);

/// Adds delta to p at the (1-based) component and restores the cached
/// products (beta = A p, CG direction) for the perturbed increment.
template <Scalar T>
void apply_perturbation(SolverState<T>& state, const SymmetricMatrix<T>& a, const Perturbation& perturbation);

/// Called after initialisation (info == nullptr) and after every step.
template <Scalar T>
using StepObserver = std::function<void(const SolverState<T>&, const StepInfo<T>*)>;

template <Scalar T>
struct SolveResult {
    Vector<T> x;
    ConvergenceTrace<T> trace;
};

/// Runs the configured method until r^T r <= eps^2 r_0^T r_0 or max_steps steps
/// have been taken. Running past the bit budget ends the run with termination
/// budget_exceeded and the last state that fit.
template <Scalar T>
SolveResult<T> solve(const SymmetricMatrix<T>& a, const Vector<T>& b, const Vector<T>& x0, const SolverConfig& cfg,
                     std::span<const Perturbation> perturbations = {}, const StepObserver<T>& observer = {});

} // namespace irm
