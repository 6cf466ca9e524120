#include "irm/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "irm/analysis.hpp"
#include "irm/benchgen.hpp"
#include "irm/matrix_io.hpp"
#include "irm/solvers.hpp"

namespace irm::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

template <class T>
void put(json& j, const char* key, const std::optional<T>& v) {
    j[key] = v ? json(*v) : json(nullptr);
}

template <class T>
void get(const json& j, const char* key, std::optional<T>& v) {
    if (j.contains(key) && !j.at(key).is_null()) v = j.at(key).get<T>();
}

template <class T>
void get(const json& j, const char* key, T& v) {
    if (j.contains(key)) v = j.at(key).get<T>();
}

json gen_to_json(const GenArgs& g) {
    json j;
    put(j, "spectrum", g.spectrum);
    put(j, "spectrum_file", g.spectrum_file);
    put(j, "chain", g.chain);
    put(j, "stiff", g.stiff);
    put(j, "rhs", g.rhs);
    j["rotate"] = g.rotate;
    put(j, "plan_file", g.plan_file);
    j["seed"] = g.seed;
    put(j, "inverse", g.inverse);
    j["output"] = g.output;
    return j;
}

GenArgs gen_from_json(const json& j) {
    GenArgs g;
    get(j, "spectrum", g.spectrum);
    get(j, "spectrum_file", g.spectrum_file);
    get(j, "chain", g.chain);
    get(j, "stiff", g.stiff);
    get(j, "rhs", g.rhs);
    get(j, "rotate", g.rotate);
    get(j, "plan_file", g.plan_file);
    get(j, "seed", g.seed);
    get(j, "inverse", g.inverse);
    get(j, "output", g.output);
    return g;
}

json solve_to_json(const SolveArgs& s) {
    json j;
    j["matrix"] = s.matrix;
    j["rhs"] = s.rhs;
    put(j, "x0", s.x0);
    j["method"] = s.method;
    j["arith"] = s.arith;
    j["omega"] = s.omega;
    j["eps"] = s.eps;
    put(j, "refresh_k", s.refresh_k);
    put(j, "max_steps", s.max_steps);
    j["generator"] = s.generator;
    j["perturb"] = s.perturb;
    j["energy"] = s.energy;
    put(j, "seed", s.seed);
    j["budget_bits"] = s.budget_bits;
    put(j, "snap_zero", s.snap_zero);
    put(j, "output", s.output);
    put(j, "x_out", s.x_out);
    return j;
}

SolveArgs solve_from_json(const json& j) {
    SolveArgs s;
    get(j, "matrix", s.matrix);
    get(j, "rhs", s.rhs);
    get(j, "x0", s.x0);
    get(j, "method", s.method);
    get(j, "arith", s.arith);
    get(j, "omega", s.omega);
    get(j, "eps", s.eps);
    get(j, "refresh_k", s.refresh_k);
    get(j, "max_steps", s.max_steps);
    get(j, "generator", s.generator);
    get(j, "perturb", s.perturb);
    get(j, "energy", s.energy);
    get(j, "seed", s.seed);
    get(j, "budget_bits", s.budget_bits);
    get(j, "snap_zero", s.snap_zero);
    get(j, "output", s.output);
    get(j, "x_out", s.x_out);
    return s;
}

std::vector<Rational> parse_list(const std::string& text) {
    std::vector<Rational> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_decimal(item));
    return out;
}

RotationPlan read_plan(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    RotationPlan plan;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream f(line);
        std::string i, j, c, s;
        if (!(f >> i) || i.front() == '#') continue;
        if (!(f >> j >> c >> s)) throw ParseError("plan line must be 'i j cos sin': '" + line + "'");
        const auto to_index = [](const std::string& t) {
            const auto q = parse_rational(t);
            if (!q.is_integer() || q.sign() <= 0) throw ParseError("rotation indices are positive integers");
            return static_cast<std::size_t>(q.num().get_ui()) - 1;
        };
        plan.steps.push_back({to_index(i), to_index(j), parse_decimal(c), parse_decimal(s)});
    }
    return plan;
}

void require_output(const std::string& dir) {
    if (dir.empty()) throw InvalidConfig("-o <dir> is required");
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir + ": " + ec.message());
}

int cmd_gen(const GenArgs& g, std::ostream& out) {
    const int sources = int(g.spectrum.has_value()) + int(g.spectrum_file.has_value()) + int(g.chain.has_value());
    if (sources != 1) throw InvalidConfig("give exactly one of --spectrum, --spectrum-file, --chain");
    if (g.rotate > 0 && g.plan_file) throw InvalidConfig("--rotate and --plan-file are mutually exclusive");

    std::optional<SpectrumSpec> spec;
    if (g.spectrum) spec = SpectrumSpec::parse_inline(*g.spectrum);
    if (g.spectrum_file) {
        std::ifstream in(*g.spectrum_file);
        if (!in) throw IoError("cannot open " + *g.spectrum_file);
        spec = SpectrumSpec::parse(in);
    }
    if (spec && g.rhs) {
        if (*g.rhs == "ones") {
            spec->rhs = RhsRule::ones;
        } else if (*g.rhs == "random") {
            spec->rhs = RhsRule::random;
            spec->seed = g.seed;
        } else {
            throw InvalidConfig("--rhs must be ones or random");
        }
    }

    BenchmarkSystem system = [&] {
        if (spec) return gen_diagonal(*spec);
        if (!g.stiff) throw InvalidConfig("--chain needs --stiff");
        auto a = gen_spring_chain(*g.chain, parse_list(*g.stiff));
        std::vector<Rational> ones(a.order(), Rational(1));
        return BenchmarkSystem{std::move(a), Vector<Rational>(std::move(ones)), 0};
    }();

    const RotationPlan plan =
        g.plan_file ? read_plan(*g.plan_file) : RotationPlan::random(system.a.order(), g.rotate, g.seed);

    if (g.inverse) {
        const auto x_star = io::load_vector(*g.inverse);
        if (x_star.size() != system.a.order()) throw DimensionError("x* length differs from the system order");
        // x* lives in the rotated basis; pull it back to find b in the eigenbasis.
        const auto x_diag = plan.steps.empty() ? x_star : rotate({system.a, x_star, 0}, plan.inverse()).b;
        system.b = gen_inverse(system.a, x_diag);
        if (spec) system.active_count = count_active(system.a, system.b);
    }
    system = rotate(system, plan);

    require_output(g.output);
    io::save_matrix(fs::path(g.output) / "A.txt", system.a);
    io::save_vector(fs::path(g.output) / "b.txt", system.b);
    out << "n=" << system.a.order() << '\n';
    if (spec) out << "m=" << system.active_count << '\n';
    return kConverged;
}

template <Scalar T>
int solve_as(const SolveArgs& s, const SymmetricMatrix<Rational>& a, const Vector<Rational>& b,
             const Vector<Rational>& x0, std::ostream& out) {
    SolverConfig cfg;
    cfg.method = parse_method(s.method);
    cfg.omega = parse_decimal(s.omega);
    cfg.epsilon = parse_decimal(s.eps);
    cfg.refresh_k = s.refresh_k;
    cfg.max_steps = s.max_steps;
    cfg.generator = parse_generator(s.generator);
    cfg.record_energy = s.energy;
    cfg.budget.max_bits = s.budget_bits;
    cfg.validate();

    std::vector<Perturbation> perturbations;
    for (const auto& text : s.perturb) perturbations.push_back(Perturbation::parse(text));

    auto result = [&] {
        if constexpr (is_exact_v<T>) {
            return solve(a, b, x0, cfg, perturbations);
        } else {
            return solve(convert<double>(a), convert<double>(b), convert<double>(x0), cfg, perturbations);
        }
    }();
    result.trace.seed = s.seed;
    result.trace.system_id = system_fingerprint(a, b);

    if (s.output) write_csv(*s.output, result.trace);
    if (s.x_out) {
        if constexpr (is_exact_v<T>) {
            io::save_vector(*s.x_out, result.x);
        } else {
            std::vector<Rational> exact;
            for (double v : result.x) exact.push_back(rationalize(v));
            io::save_vector(*s.x_out, Vector<Rational>(std::move(exact)));
        }
    }

    const auto& last = result.trace.records.back();
    std::string rr = ScalarTraits<T>::format(last.rr);
    if (rr.size() > 40) rr = "~" + format_double(ScalarTraits<T>::to_double(last.rr));
    out << "method=" << s.method << " arith=" << result.trace.arithmetic() << " steps=" << result.trace.steps()
        << " termination=" << to_string(result.trace.termination) << " rr=" << rr << '\n';
    switch (result.trace.termination) {
    case Termination::converged:
    case Termination::zero_initial_residual: return kConverged;
    case Termination::budget_exceeded: return kBudget;
    case Termination::max_steps: return kNotConverged;
    }
    return kNotConverged;
}

int cmd_solve(const SolveArgs& s, std::ostream& out) {
    std::optional<Rational> snap;
    if (s.snap_zero) snap = parse_decimal(*s.snap_zero);
    const auto a = io::load_matrix(s.matrix, snap);
    const auto b = io::load_vector(s.rhs);
    const auto x0 = s.x0 ? io::load_vector(*s.x0) : Vector<Rational>(a.order());
    if (s.arith == "exact") return solve_as<Rational>(s, a, b, x0, out);
    if (s.arith == "f64") return solve_as<double>(s, a, b, x0, out);
    throw InvalidConfig("--arith must be exact or f64");
}

int cmd_compare(const std::string& first, const std::string& second, double gap, std::ostream& out) {
    const auto report = compare(read_csv(first), read_csv(second), gap);
    out << format_report(report);
    return kConverged;
}

int cmd_active(const std::string& matrix, const std::string& rhs, std::ostream& out) {
    out << "m=" << count_active(io::load_matrix(matrix), io::load_vector(rhs)) << '\n';
    return kConverged;
}

void write_manifest(const std::string& path, const RunManifest& m) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << m.to_json() << '\n';
    if (!out) throw IoError("failed writing " + path);
}

RunManifest load_manifest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::stringstream text;
    text << in.rdbuf();
    return RunManifest::from_json(text.str());
}

int guarded(std::ostream& err, const std::function<int()>& body) {
    try {
        return body();
    } catch (const NotSPD& e) {
        err << "error: " << e.what() << '\n';
        return kNotSpd;
    } catch (const BudgetExceeded& e) {
        err << "error: " << e.what() << '\n';
        return kBudget;
    } catch (const IncomparableTraces& e) {
        err << "error: " << e.what() << '\n';
        return kIncomparable;
    } catch (const NumericalBreakdown& e) {
        err << "error: " << e.what() << '\n';
        return kNotConverged;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const json::exception& e) {
        err << "error: bad manifest: " << e.what() << '\n';
        return kUsage;
    }
}

} // namespace

std::string RunManifest::to_json() const {
    json j;
    j["subcommand"] = subcommand;
    if (gen) j["args"] = gen_to_json(*gen);
    if (solve) j["args"] = solve_to_json(*solve);
    return j.dump(2);
}

RunManifest RunManifest::from_json(const std::string& text) {
    const json j = json::parse(text);
    RunManifest m;
    m.subcommand = j.at("subcommand").get<std::string>();
    if (m.subcommand == "gen") {
        m.gen = gen_from_json(j.at("args"));
    } else if (m.subcommand == "solve") {
        m.solve = solve_from_json(j.at("args"));
    } else {
        throw ParseError("manifest subcommand must be gen or solve");
    }
    return m;
}

int execute(const RunManifest& manifest, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        if (manifest.gen) return cmd_gen(*manifest.gen, out);
        if (manifest.solve) return cmd_solve(*manifest.solve, out);
        throw ParseError("manifest has no arguments");
    });
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Iterated Ritz Method solvers under exact and double arithmetic"};
    app.require_subcommand(1);

    GenArgs g;
    std::string gen_manifest;
    auto* gen = app.add_subcommand("gen", "generate a benchmark system");
    gen->add_option("--spectrum", g.spectrum, "inline spectrum, e.g. 1x1,2x2,7x1:inactive");
    gen->add_option("--spectrum-file", g.spectrum_file, "spectrum file");
    gen->add_option("--chain", g.chain, "spring chain with this many degrees of freedom");
    gen->add_option("--stiff", g.stiff, "comma-separated stiffnesses k1..k{n+1}");
    gen->add_option("--rhs", g.rhs, "ones | random")->check(CLI::IsMember({"ones", "random"}));
    gen->add_option("--rotate", g.rotate, "number of random exact rotations");
    gen->add_option("--plan-file", g.plan_file, "rotation plan: lines 'i j cos sin', 1-based");
    gen->add_option("--seed", g.seed, "seed for random rhs and rotations");
    gen->add_option("--inverse", g.inverse, "x* vector file; b is set to A x*");
    gen->add_option("-o,--output", g.output, "output directory")->required();
    gen->add_option("--write-manifest", gen_manifest, "also write a replayable JSON manifest");

    SolveArgs s;
    std::string solve_manifest;
    auto* sol = app.add_subcommand("solve", "run a solver on A.txt b.txt");
    sol->add_option("matrix", s.matrix, "matrix file (text format or Matrix Market)")->required();
    sol->add_option("rhs", s.rhs, "right-hand side vector file")->required();
    sol->add_option("--x0", s.x0, "initial guess (default 0)");
    sol->add_option("--method", s.method, "irm | irm-cg | cg")->check(CLI::IsMember({"irm", "irm-cg", "cg"}));
    sol->add_option("--arith", s.arith, "exact | f64")->check(CLI::IsMember({"exact", "f64"}));
    sol->add_option("--omega", s.omega, "relaxation factor in (0, 2)");
    sol->add_option("--eps", s.eps, "relative residual tolerance (decimal, parsed exactly)");
    sol->add_option("--refresh-k", s.refresh_k, "recompute r = b - A x every k steps");
    sol->add_option("--max-steps", s.max_steps, "step cap (default 100 n)");
    sol->add_option("--generator", s.generator, "coordinate generator for --method irm");
    sol->add_option("--perturb", s.perturb, "step:component:delta, repeatable")->allow_extra_args(false);
    sol->add_flag("!--no-energy", s.energy, "skip the per-step energy column");
    sol->add_option("--seed", s.seed, "benchmark seed to record in the trace");
    sol->add_option("--budget-bits", s.budget_bits, "max bits of any rational in the state");
    sol->add_option("--snap-zero", s.snap_zero, "zero out input entries with |a| <= t");
    sol->add_option("-o,--output", s.output, "trace CSV path");
    sol->add_option("--x-out", s.x_out, "write the final iterate");
    sol->add_option("--write-manifest", solve_manifest, "also write a replayable JSON manifest");

    std::string first, second;
    double gap = 1.0;
    auto* cmp = app.add_subcommand("compare", "compare two trace CSVs");
    cmp->add_option("first", first, "first trace (usually exact)")->required();
    cmp->add_option("second", second, "second trace (usually f64)")->required();
    cmp->add_option("--gap", gap, "divergence threshold in decades of relative norm");

    std::string active_matrix, active_rhs;
    auto* act = app.add_subcommand("active", "count active eigenvalues of a diagonal system");
    act->add_option("matrix", active_matrix, "diagonal matrix file")->required();
    act->add_option("rhs", active_rhs, "right-hand side vector file")->required();

    std::string manifest_path;
    auto* rep = app.add_subcommand("replay", "re-run a JSON manifest");
    rep->add_option("manifest", manifest_path, "manifest file")->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kConverged : kUsage;
    }

    if (gen->parsed()) {
        return guarded(err, [&] {
            RunManifest m{"gen", g, std::nullopt};
            if (!gen_manifest.empty()) write_manifest(gen_manifest, m);
            return cmd_gen(g, out);
        });
    }
    if (sol->parsed()) {
        return guarded(err, [&] {
            RunManifest m{"solve", std::nullopt, s};
            if (!solve_manifest.empty()) write_manifest(solve_manifest, m);
            return cmd_solve(s, out);
        });
    }
    if (cmp->parsed()) return guarded(err, [&] { return cmd_compare(first, second, gap, out); });
    if (act->parsed()) return guarded(err, [&] { return cmd_active(active_matrix, active_rhs, out); });
    return guarded(err, [&] { return execute(load_manifest(manifest_path), out, err); });
}

} // namespace irm::cli
