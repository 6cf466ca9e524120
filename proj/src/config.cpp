#include "irm/config.hpp"

#include <charconv>
#include <string>

#include "irm/trace.hpp"

namespace irm {

std::string_view to_string(Method m) {
    switch (m) {
    case Method::irm: return "irm";
    case Method::irm_cg: return "irm-cg";
    case Method::cg: return "cg";
    }
    return "?";
}

std::string_view to_string(GeneratorId g) {
    switch (g) {
    case GeneratorId::residual: return "residual";
    case GeneratorId::residual_increment: return "residual+increment";
    case GeneratorId::jacobi_residual_increment: return "jacobi-residual+increment";
    }
    return "?";
}

Method parse_method(std::string_view text) {
    for (Method m : {Method::irm, Method::irm_cg, Method::cg}) {
        if (text == to_string(m)) return m;
    }
    throw ParseError("unknown method '" + std::string(text) + "'");
}

GeneratorId parse_generator(std::string_view text) {
    for (GeneratorId g :
         {GeneratorId::residual, GeneratorId::residual_increment, GeneratorId::jacobi_residual_increment}) {
        if (text == to_string(g)) return g;
    }
    throw ParseError("unknown coordinate generator '" + std::string(text) + "'");
}

void SolverConfig::validate() const {
    if (!(omega > Rational(0) && omega < Rational(2))) {
        throw InvalidConfig("omega must lie in (0, 2), got " + omega.literal());
    }
    if (epsilon.sign() < 0) throw InvalidConfig("epsilon must be nonnegative");
    if (refresh_k && *refresh_k == 0) throw InvalidConfig("refresh period must be at least 1");
    if (max_steps && *max_steps == 0) throw InvalidConfig("max_steps must be at least 1");
    budget.validate();
}

std::uint64_t SolverConfig::resolved_refresh_k(bool exact) const {
    if (refresh_k) return *refresh_k;
    return exact ? kExactRefreshDefault : kDoubleRefreshDefault;
}

std::uint64_t SolverConfig::resolved_max_steps(std::size_t n) const {
    return max_steps ? *max_steps : 100 * static_cast<std::uint64_t>(n);
}

Perturbation Perturbation::parse(std::string_view text) {
    const auto first = text.find(':');
    const auto second = first == std::string_view::npos ? first : text.find(':', first + 1);
    if (second == std::string_view::npos) {
        throw ParseError("perturbation must look like step:component:delta, got '" + std::string(text) + "'");
    }
    auto parse_uint = [&](std::string_view part) {
        std::uint64_t value = 0;
        const auto result = std::from_chars(part.data(), part.data() + part.size(), value);
        if (part.empty() || result.ec != std::errc{} || result.ptr != part.data() + part.size()) {
            throw ParseError("bad integer '" + std::string(part) + "' in perturbation '" + std::string(text) + "'");
        }
        return value;
    };
    Perturbation out;
    out.step_index = parse_uint(text.substr(0, first));
    out.component = static_cast<std::size_t>(parse_uint(text.substr(first + 1, second - first - 1)));
    if (out.component == 0) throw ParseError("perturbation components are 1-based");
    out.delta = parse_decimal(text.substr(second + 1));
    return out;
}

std::string Perturbation::str() const {
    return std::to_string(step_index) + ":" + std::to_string(component) + ":" + delta.literal();
}

std::string_view to_string(Termination t) {
    switch (t) {
    case Termination::converged: return "converged";
    case Termination::max_steps: return "max_steps";
    case Termination::budget_exceeded: return "budget_exceeded";
    case Termination::zero_initial_residual: return "zero_initial_residual";
    }
    return "?";
}

Termination parse_termination(std::string_view text) {
    for (Termination t : {Termination::converged, Termination::max_steps, Termination::budget_exceeded,
                          Termination::zero_initial_residual}) {
        if (text == to_string(t)) return t;
    }
    throw ParseError("unknown termination reason '" + std::string(text) + "'");
}

bool is_converged(Termination t) {
    return t == Termination::converged || t == Termination::zero_initial_residual;
}

} // namespace irm
