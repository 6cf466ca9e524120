#pragma once

// Trace post-processing: relative norms, active-eigenvalue counts,
// exact-vs-double comparison and the trace CSV format.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "irm/linalg.hpp"
#include "irm/trace.hpp"

namespace irm {

/// sqrt(rr_i / rr_0) per record; exact traces divide before demoting.
template <Scalar T>
std::vector<double> relative_norms(const ConvergenceTrace<T>& trace);
std::vector<double> relative_norms(const AnyTrace& trace);

/// Distinct diagonal values d with b_j != 0 for some j where D_jj = d.
template <Scalar T>
std::size_t count_active(const SymmetricMatrix<T>& d, const Vector<T>& b);

/// FNV-1a over the exact text form of (A, b).
std::uint64_t system_fingerprint(const SymmetricMatrix<Rational>& a, const Vector<Rational>& b);

struct ComparisonRow {
    std::uint64_t step = 0;
    std::optional<double> first;
    std::optional<double> second;
};

struct ComparisonReport {
    std::string first_tag;
    std::string second_tag;
    double gap = 1.0; ///< decades
    std::vector<ComparisonRow> rows;
    std::optional<std::uint64_t> divergence_step;
    std::uint64_t first_steps = 0;
    std::uint64_t second_steps = 0;
    Termination first_termination = Termination::max_steps;
    Termination second_termination = Termination::max_steps;
    std::int64_t delta_steps = 0; ///< second_steps - first_steps
    bool termination_mismatch = false;
    bool second_below_first = false; ///< some step where the second curve is strictly lower

    /// "divergence_step=<i|none> delta_steps=<d>"
    std::string summary_line() const;
};

/// Throws IncomparableTraces unless method, generator, omega, epsilon,
/// max_steps, n and (when both present) seed and system fingerprint agree.
/// refresh_k is not compared: the two backends default it differently.
ComparisonReport compare(const AnyTrace& first, const AnyTrace& second, double gap = 1.0);

std::string format_report(const ComparisonReport& report);

void emit_csv(const AnyTrace& trace, std::ostream& out);
AnyTrace parse_csv(std::istream& in);

void write_csv(const std::filesystem::path& path, const AnyTrace& trace);
AnyTrace read_csv(const std::filesystem::path& path);

} // namespace irm
