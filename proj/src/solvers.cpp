#include "irm/solvers.hpp"

#include <stdexcept>
#include <string>
#include <utility>

namespace irm {

namespace {

// Relative norm below which a double coordinate vector counts as dependent.
constexpr double kDependenceTolerance = 1e-10;

template <Scalar T>
void require_conformant(const SymmetricMatrix<T>& a, const Vector<T>& b, const Vector<T>& x) {
    if (b.size() != a.order() || x.size() != a.order()) {
        throw DimensionError("system of order " + std::to_string(a.order()) + " got vectors of length " +
                             std::to_string(b.size()) + " and " + std::to_string(x.size()));
    }
}

template <Scalar T>
void require_active(const SolverState<T>& state) {
    if (state.converged) throw std::logic_error("solver step called on a converged state");
}

template <Scalar T>
T omega_of(const SolverConfig& cfg) {
    return ScalarTraits<T>::from_rational(cfg.omega);
}

// Lines shared by every method: x_{i+1} = x_i + omega p_i, then either the
// recursive residual update or a full recomputation when i mod k == 0.
template <Scalar T>
bool advance(SolverState<T>& s, const SymmetricMatrix<T>& a, const Vector<T>& b, const SolverConfig& cfg,
             const Vector<T>& a_times_p, StepInfo<T>& info) {
    const T omega = omega_of<T>(cfg);
    const bool refreshed = s.i % cfg.resolved_refresh_k(is_exact_v<T>) == 0;
    s.x = combine(T(1), s.x, omega, s.p);
    if (refreshed) {
        s.r = b - matvec(a, s.x);
        ++info.matvecs;
    } else {
        s.r = combine(T(1), s.r, -omega, a_times_p);
    }
    info.refreshed = refreshed;
    info.r_dot_p = dot(s.r, s.p);
    s.rr = dot(s.r, s.r);
    return refreshed;
}

template <Scalar T>
void mark_converged(SolverState<T>& s) {
    const std::size_t n = s.x.size();
    s.p = Vector<T>(n);
    if (s.beta) s.beta = Vector<T>(n);
    if (s.direction) s.direction = Vector<T>(n);
    s.converged = true;
}

template <Scalar T>
bool negligible(const Vector<T>& remainder, const Vector<T>& original) {
    if constexpr (is_exact_v<T>) {
        return remainder.is_zero();
    } else {
        const double scale = dot(original, original);
        return scale == 0.0 || dot(remainder, remainder) <= kDependenceTolerance * kDependenceTolerance * scale;
    }
}

// Keeps the columns that are independent of the ones kept before them
// (Gram-Schmidt on copies; the kept originals are returned unchanged).
template <Scalar T>
std::vector<Vector<T>> independent_columns(const std::vector<Vector<T>>& columns) {
    std::vector<Vector<T>> kept;
    std::vector<Vector<T>> basis;
    for (const auto& column : columns) {
        Vector<T> w = column;
        for (const auto& q : basis) w = combine(T(1), w, -(dot(q, w) / dot(q, q)), q);
        if (negligible(w, column)) continue;
        kept.push_back(column);
        basis.push_back(std::move(w));
    }
    return kept;
}

template <Scalar T>
void check_budget(const SolverState<T>& s, const BitBudget& budget) {
    if constexpr (is_exact_v<T>) {
        auto check_all = [&](const Vector<T>& v) {
            for (const auto& q : v) budget.check(q);
        };
        check_all(s.x);
        check_all(s.r);
        check_all(s.p);
        if (s.beta) check_all(*s.beta);
        if (s.direction) check_all(*s.direction);
        budget.check(s.step_length);
    }
}

template <Scalar T>
bool within(const T& rr, const T& threshold) {
    return rr <= threshold;
}

} // namespace

template <Scalar T>
CoordinateGenerator<T> make_generator(GeneratorId id) {
    switch (id) {
    case GeneratorId::residual:
        return [](const SymmetricMatrix<T>&, const Vector<T>& r, const Vector<T>&) {
            return std::vector<Vector<T>>{r};
        };
    case GeneratorId::residual_increment:
        return [](const SymmetricMatrix<T>&, const Vector<T>& r, const Vector<T>& p) {
            return std::vector<Vector<T>>{r, p};
        };
    case GeneratorId::jacobi_residual_increment:
        return [](const SymmetricMatrix<T>& a, const Vector<T>& r, const Vector<T>& p) {
            const auto d = a.diagonal_entries();
            std::vector<T> scaled(r.size());
            for (std::size_t i = 0; i < r.size(); ++i) scaled[i] = r[i] / d[i];
            return std::vector<Vector<T>>{Vector<T>(std::move(scaled)), p};
        };
    }
    throw GeneratorError("unknown generator id");
}

template <Scalar T>
SolverState<T> init(const SymmetricMatrix<T>& a, const Vector<T>& b, const Vector<T>& x0, Method method) {
    require_conformant(a, b, x0);
    if (!a.spd_certified() && !spd_check(a)) throw NotSPD("system matrix is not symmetric positive definite");

    const std::size_t n = a.order();
    Vector<T> r = b - matvec(a, x0);
    const T rr = dot(r, r);
    SolverState<T> s{0, x0, r, Vector<T>(n), std::nullopt, std::nullopt, T(0), rr, rr, false};
    if (method != Method::irm) s.beta = Vector<T>(n);
    if (method == Method::cg) s.direction = Vector<T>(n);
    if (ScalarTraits<T>::is_zero(rr)) {
        s.converged = true;
        return s;
    }

    const Vector<T> ar = matvec(a, r);
    const T rar = dot(r, ar);
    if (!(rar > T(0))) throw NumericalBreakdown("r^T A r is not positive at initialisation");
    const T q = rr / rar;
    s.p = q * r;
    switch (method) {
    case Method::irm: break;
    case Method::irm_cg: s.beta = matvec(a, s.p); break;
    case Method::cg:
        s.direction = r;
        s.step_length = q;
        s.beta = q * ar;
        break;
    }
    return s;
}

template <Scalar T>
SolverState<T> irmcg_step(SolverState<T> s, const SymmetricMatrix<T>& a, const Vector<T>& b,
                          const SolverConfig& cfg, StepInfo<T>* info_out) {
    require_active(s);
    if (!s.beta) throw std::logic_error("IRM-CG step needs beta = A p in the state");
    StepInfo<T> info;
    const Vector<T> p_prev = s.p;
    const Vector<T> beta_prev = *s.beta;

    advance(s, a, b, cfg, beta_prev, info);
    ++s.i;
    if (ScalarTraits<T>::is_zero(s.rr)) {
        mark_converged(s);
        if (info_out) *info_out = std::move(info);
        return s;
    }

    const Vector<T> alpha = matvec(a, s.r); // sole matvec on recursive steps
    ++info.matvecs;

    const T a11 = dot(s.r, alpha);
    const T a12 = dot(s.r, beta_prev);
    const T a22 = dot(p_prev, beta_prev);
    info.r_dot_beta = a12;
    info.p_dot_alpha = dot(p_prev, alpha);

    try {
        const RitzSystem<T> ritz(2, {a11, a12, a12, a22}, {s.rr, info.r_dot_p});
        const Vector<T> coeff = small_solve(ritz);
        s.p = combine(coeff[0], s.r, coeff[1], p_prev);
        s.beta = combine(coeff[0], alpha, coeff[1], beta_prev);
        info.subspace = 2;
    } catch (const SingularRitzSystem&) {
        // [r, p] dependent: drop p and take the steepest-descent step on r.
        if (!(a11 > T(0))) throw NumericalBreakdown("r^T A r is not positive in the fallback step");
        const T c = s.rr / a11;
        s.p = c * s.r;
        s.beta = c * alpha;
        info.subspace = 1;
        info.reduced = true;
    }
    if (info_out) *info_out = std::move(info);
    return s;
}

template <Scalar T>
SolverState<T> irm_step(SolverState<T> s, const SymmetricMatrix<T>& a, const Vector<T>& b, const SolverConfig& cfg,
                        const CoordinateGenerator<T>& generator, StepInfo<T>* info_out) {
    require_active(s);
    if (!generator) throw GeneratorError("no coordinate generator supplied");
    StepInfo<T> info;
    const Vector<T> p_prev = s.p;

    // Algorithm-1 form: the recursive update multiplies A p explicitly.
    const bool refresh_now = s.i % cfg.resolved_refresh_k(is_exact_v<T>) == 0;
    const Vector<T> ap = refresh_now ? Vector<T>(a.order()) : matvec(a, p_prev);
    if (!refresh_now) ++info.matvecs;
    advance(s, a, b, cfg, ap, info);
    ++s.i;
    if (ScalarTraits<T>::is_zero(s.rr)) {
        mark_converged(s);
        if (info_out) *info_out = std::move(info);
        return s;
    }

    const std::vector<Vector<T>> emitted = generator(a, s.r, p_prev);
    if (emitted.empty()) throw GeneratorError("coordinate generator produced no vectors");
    if (emitted.size() > RitzSystem<T>::kMaxRitzOrder) {
        throw GeneratorError("coordinate generator produced " + std::to_string(emitted.size()) +
                             " vectors; at most " + std::to_string(RitzSystem<T>::kMaxRitzOrder) + " allowed");
    }
    for (const auto& phi : emitted) {
        if (phi.size() != a.order()) throw GeneratorError("coordinate vector has the wrong length");
    }
    std::vector<Vector<T>> phi = independent_columns(emitted);
    if (phi.empty()) throw GeneratorError("coordinate generator produced only zero vectors");
    info.reduced = phi.size() < emitted.size();

    std::vector<Vector<T>> a_phi;
    for (const auto& v : phi) a_phi.push_back(matvec(a, v));
    info.matvecs += phi.size();

    for (;;) {
        const std::size_t m = phi.size();
        std::vector<T> abar(m * m);
        std::vector<T> rbar(m);
        for (std::size_t j = 0; j < m; ++j) {
            for (std::size_t k = j; k < m; ++k) {
                abar[j * m + k] = dot(phi[j], a_phi[k]);
                abar[k * m + j] = abar[j * m + k];
            }
            rbar[j] = dot(phi[j], s.r);
        }
        try {
            const Vector<T> coeff = small_solve(RitzSystem<T>(m, std::move(abar), std::move(rbar)));
            Vector<T> p(a.order());
            for (std::size_t j = 0; j < m; ++j) p = combine(T(1), p, coeff[j], phi[j]);
            s.p = std::move(p);
            info.subspace = m;
            break;
        } catch (const SingularRitzSystem&) {
            // Only reachable in floating point: independence was checked exactly otherwise.
            if (m == 1) throw NumericalBreakdown("one-column Ritz system is singular");
            phi.pop_back();
            a_phi.pop_back();
            info.reduced = true;
        }
    }
    if (info_out) *info_out = std::move(info);
    return s;
}

template <Scalar T>
SolverState<T> cg_step(SolverState<T> s, const SymmetricMatrix<T>& a, const Vector<T>& b, const SolverConfig& cfg,
                       StepInfo<T>* info_out) {
    require_active(s);
    if (!s.beta || !s.direction) throw std::logic_error("CG step needs the search direction in the state");
    StepInfo<T> info;
    const T rr_prev = s.rr;

    advance(s, a, b, cfg, *s.beta, info);
    ++s.i;
    if (ScalarTraits<T>::is_zero(s.rr)) {
        mark_converged(s);
        if (info_out) *info_out = std::move(info);
        return s;
    }

    const T conjugation = s.rr / rr_prev;
    s.direction = combine(T(1), s.r, conjugation, *s.direction);
    const Vector<T> ad = matvec(a, *s.direction);
    ++info.matvecs;
    const T dad = dot(*s.direction, ad);
    if (!(dad > T(0))) throw NumericalBreakdown("d^T A d vanished with a nonzero residual");
    s.step_length = s.rr / dad;
    s.p = s.step_length * *s.direction;
    s.beta = s.step_length * ad;
    info.subspace = 1;
    if (info_out) *info_out = std::move(info);
    return s;
}

template <Scalar T>
void apply_perturbation(SolverState<T>& s, const SymmetricMatrix<T>& a, const Perturbation& perturbation) {
    if (perturbation.component == 0 || perturbation.component > s.p.size()) {
        throw DimensionError("perturbation component " + std::to_string(perturbation.component) +
                             " outside 1.." + std::to_string(s.p.size()));
    }
    s.p[perturbation.component - 1] += ScalarTraits<T>::from_rational(perturbation.delta);
    if (s.beta) s.beta = matvec(a, s.p);
    if (s.direction) s.direction = (T(1) / s.step_length) * s.p;
}

template <Scalar T>
SolveResult<T> solve(const SymmetricMatrix<T>& a, const Vector<T>& b, const Vector<T>& x0, const SolverConfig& cfg,
                     std::span<const Perturbation> perturbations, const StepObserver<T>& observer) {
    cfg.validate();
    require_conformant(a, b, x0);
    const std::size_t n = a.order();
    for (const auto& pert : perturbations) {
        if (pert.component == 0 || pert.component > n) {
            throw DimensionError("perturbation component " + std::to_string(pert.component) + " outside 1.." +
                                 std::to_string(n));
        }
    }

    ConvergenceTrace<T> trace;
    trace.settings = RunSettings{cfg.method,
                                 cfg.generator,
                                 cfg.omega,
                                 cfg.epsilon,
                                 cfg.resolved_refresh_k(is_exact_v<T>),
                                 cfg.resolved_max_steps(n)};
    trace.order = n;

    const auto generator = cfg.method == Method::irm ? make_generator<T>(cfg.generator) : CoordinateGenerator<T>{};
    auto record = [&](const SolverState<T>& s, bool refreshed, bool perturbed) {
        StepRecord<T> rec{s.i, s.rr, std::nullopt, refreshed, perturbed};
        if (cfg.record_energy) rec.energy = energy(a, b, s.x);
        trace.records.push_back(std::move(rec));
    };
    auto perturb = [&](SolverState<T>& s) {
        bool applied = false;
        if (s.converged) return applied;
        for (const auto& pert : perturbations) {
            if (pert.step_index == s.i) {
                apply_perturbation(s, a, pert);
                applied = true;
            }
        }
        return applied;
    };

    SolverState<T> state = init(a, b, x0, cfg.method);
    if (state.converged) {
        record(state, false, false);
        trace.termination = Termination::zero_initial_residual;
        if (observer) observer(state, nullptr);
        return {state.x, std::move(trace)};
    }

    const T eps = ScalarTraits<T>::from_rational(cfg.epsilon);
    const T threshold = eps * eps * state.rr0;
    const std::uint64_t max_steps = trace.settings.max_steps;

    bool over_budget = false;
    {
        const bool perturbed = perturb(state);
        try {
            check_budget(state, cfg.budget);
        } catch (const BudgetExceeded&) {
            over_budget = true;
        }
        record(state, false, perturbed);
        if (observer) observer(state, nullptr);
    }

    while (!over_budget && !within(state.rr, threshold) && state.i < max_steps) {
        StepInfo<T> info;
        SolverState<T> next = [&] {
            switch (cfg.method) {
            case Method::irm: return irm_step(state, a, b, cfg, generator, &info);
            case Method::irm_cg: return irmcg_step(state, a, b, cfg, &info);
            case Method::cg: return cg_step(state, a, b, cfg, &info);
            }
            throw std::logic_error("unknown method");
        }();
        const bool perturbed = perturb(next);
        try {
            check_budget(next, cfg.budget);
        } catch (const BudgetExceeded&) {
            over_budget = true;
            break;
        }
        state = std::move(next);
        record(state, info.refreshed, perturbed);
        if (observer) observer(state, &info);
    }

    if (over_budget) {
        trace.termination = Termination::budget_exceeded;
    } else if (within(state.rr, threshold)) {
        trace.termination = Termination::converged;
    } else {
        trace.termination = Termination::max_steps;
    }
    return {state.x, std::move(trace)};
}

#define IRM_INSTANTIATE_SOLVERS(T)                                                                                  \
    template CoordinateGenerator<T> make_generator<T>(GeneratorId);                                                 \
    template SolverState<T> init<T>(const SymmetricMatrix<T>&, const Vector<T>&, const Vector<T>&, Method);         \
    template SolverState<T> irmcg_step<T>(SolverState<T>, const SymmetricMatrix<T>&, const Vector<T>&,              \
                                          const SolverConfig&, StepInfo<T>*);                                       \
    template SolverState<T> irm_step<T>(SolverState<T>, const SymmetricMatrix<T>&, const Vector<T>&,                \
                                        const SolverConfig&, const CoordinateGenerator<T>&, StepInfo<T>*);          \
    template SolverState<T> cg_step<T>(SolverState<T>, const SymmetricMatrix<T>&, const Vector<T>&,                 \
                                       const SolverConfig&, StepInfo<T>*);                                          \
    template void apply_perturbation<T>(SolverState<T>&, const SymmetricMatrix<T>&, const Perturbation&);           \
    template SolveResult<T> solve<T>(const SymmetricMatrix<T>&, const Vector<T>&, const Vector<T>&,                 \
                                     const SolverConfig&, std::span<const Perturbation>, const StepObserver<T>&)

IRM_INSTANTIATE_SOLVERS(Rational);
IRM_INSTANTIATE_SOLVERS(double);
#undef IRM_INSTANTIATE_SOLVERS

} // namespace irm
