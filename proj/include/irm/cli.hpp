#pragma once

// Command-line front end. Subcommands: gen, solve, compare, active, replay.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace irm::cli {

/// Exit statuses. max_steps without convergence is reported as 1.
enum ExitCode : int {
    kConverged = 0,
    kNotConverged = 1,
    kUsage = 2,
    kNotSpd = 3,
    kBudget = 4,
    kIncomparable = 5,
};

struct GenArgs {
    std::optional<std::string> spectrum;      ///< inline "1x1,2x1"
    std::optional<std::string> spectrum_file;
    std::optional<std::uint64_t> chain;       ///< spring-chain DoF count
    std::optional<std::string> stiff;         ///< "k1,k2,...,k{n+1}"
    std::optional<std::string> rhs;           ///< ones | random
    std::uint64_t rotate = 0;                 ///< random rotations
    std::optional<std::string> plan_file;     ///< lines "i j cos sin", 1-based indices
    std::uint64_t seed = 0;
    std::optional<std::string> inverse;       ///< x* file: replaces b by A x*
    std::string output;
};

struct SolveArgs {
    std::string matrix;
    std::string rhs;
    std::optional<std::string> x0;
    std::string method = "irm-cg";
    std::string arith = "exact";
    std::string omega = "1";
    std::string eps = "0";
    std::optional<std::uint64_t> refresh_k;
    std::optional<std::uint64_t> max_steps;
    std::string generator = "residual+increment";
    std::vector<std::string> perturb;
    bool energy = true;
    std::optional<std::uint64_t> seed;
    std::uint64_t budget_bits = 1'000'000;
    std::optional<std::string> snap_zero;
    std::optional<std::string> output;
    std::optional<std::string> x_out;
};

/// Everything needed to re-run a gen or solve invocation bit-for-bit.
struct RunManifest {
    std::string subcommand; ///< "gen" or "solve"
    std::optional<GenArgs> gen;
    std::optional<SolveArgs> solve;

    std::string to_json() const;
    static RunManifest from_json(const std::string& text);
};

int execute(const RunManifest& manifest, std::ostream& out, std::ostream& err);

/// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace irm::cli
