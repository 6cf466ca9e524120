#include "irm/analysis.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

#include "irm/matrix_io.hpp"

namespace irm {

namespace {

constexpr std::string_view kHeader = "step,rr,energy,refreshed,perturbed";
constexpr const char* kPreambleKeys[] = {"method", "arith",     "omega", "epsilon", "refresh_k",  "max_steps",
                                         "generator", "seed", "n",     "system",  "termination"};

std::string hex64(std::uint64_t v) {
    std::ostringstream s;
    s << std::hex << std::setw(16) << std::setfill('0') << v;
    return s.str();
}

std::uint64_t parse_u64(const std::string& text, int base = 10) {
    std::uint64_t value = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value, base);
    if (text.empty() || res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
        throw ParseError("bad unsigned integer '" + text + "' in trace CSV");
    }
    return value;
}

bool parse_flag(const std::string& text) {
    if (text == "0") return false;
    if (text == "1") return true;
    throw ParseError("flag must be 0 or 1, got '" + text + "'");
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, sep)) out.push_back(field);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

template <Scalar T>
void emit(const ConvergenceTrace<T>& t, std::ostream& out) {
    const auto& s = t.settings;
    out << "# method=" << to_string(s.method) << '\n'
        << "# arith=" << t.arithmetic() << '\n'
        << "# omega=" << s.omega.literal() << '\n'
        << "# epsilon=" << s.epsilon.literal() << '\n'
        << "# refresh_k=" << s.refresh_k << '\n'
        << "# max_steps=" << s.max_steps << '\n'
        << "# generator=" << to_string(s.generator) << '\n'
        << "# seed=" << (t.seed ? std::to_string(*t.seed) : "none") << '\n'
        << "# n=" << t.order << '\n'
        << "# system=" << (t.system_id ? hex64(*t.system_id) : "none") << '\n'
        << "# termination=" << to_string(t.termination) << '\n'
        << kHeader << '\n';
    for (const auto& rec : t.records) {
        out << rec.step << ',' << ScalarTraits<T>::format(rec.rr) << ','
            << (rec.energy ? ScalarTraits<T>::format(*rec.energy) : "") << ',' << (rec.refreshed ? 1 : 0) << ','
            << (rec.perturbed ? 1 : 0) << '\n';
    }
}

template <Scalar T>
ConvergenceTrace<T> build(const std::map<std::string, std::string>& meta, const std::vector<std::string>& rows) {
    ConvergenceTrace<T> t;
    t.settings.method = parse_method(meta.at("method"));
    t.settings.omega = parse_rational(meta.at("omega"));
    t.settings.epsilon = parse_rational(meta.at("epsilon"));
    t.settings.refresh_k = parse_u64(meta.at("refresh_k"));
    t.settings.max_steps = parse_u64(meta.at("max_steps"));
    t.settings.generator = parse_generator(meta.at("generator"));
    if (meta.at("seed") != "none") t.seed = parse_u64(meta.at("seed"));
    t.order = parse_u64(meta.at("n"));
    if (meta.at("system") != "none") t.system_id = parse_u64(meta.at("system"), 16);
    t.termination = parse_termination(meta.at("termination"));
    for (const auto& row : rows) {
        const auto f = split(row, ',');
        if (f.size() != 5) throw ParseError("trace row needs 5 fields: '" + row + "'");
        StepRecord<T> rec;
        rec.step = parse_u64(f[0]);
        rec.rr = ScalarTraits<T>::parse(f[1]);
        if (!f[2].empty()) rec.energy = ScalarTraits<T>::parse(f[2]);
        rec.refreshed = parse_flag(f[3]);
        rec.perturbed = parse_flag(f[4]);
        if (rec.step != t.records.size()) throw ParseError("trace rows must be numbered 0, 1, 2, ...");
        t.records.push_back(std::move(rec));
    }
    if (t.records.empty()) throw ParseError("trace CSV has no rows");
    return t;
}

struct Fields {
    std::string tag;
    RunSettings settings;
    std::size_t order;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> system_id;
    std::uint64_t steps;
    Termination termination;
};

Fields fields(const AnyTrace& any) {
    return std::visit(
        [](const auto& t) {
            return Fields{std::string(t.arithmetic()), t.settings, t.order, t.seed, t.system_id, t.steps(),
                          t.termination};
        },
        any);
}

void require_same(bool same, const std::string& what) {
    if (!same) throw IncomparableTraces("traces differ in " + what);
}

std::string format_norm(const std::optional<double>& v) {
    if (!v) return "-";
    std::ostringstream s;
    s << std::scientific << std::setprecision(6) << *v;
    return s.str();
}

} // namespace

template <Scalar T>
std::vector<double> relative_norms(const ConvergenceTrace<T>& trace) {
    if (trace.records.empty()) throw ZeroInitialResidual("trace has no records");
    const T& rr0 = trace.records.front().rr;
    if (ScalarTraits<T>::is_zero(rr0)) throw ZeroInitialResidual("relative norms need a nonzero initial residual");
    std::vector<double> out;
    out.reserve(trace.records.size());
    for (const auto& rec : trace.records) {
        if constexpr (is_exact_v<T>) {
            out.push_back(std::sqrt(demote(rec.rr / rr0)));
        } else {
            out.push_back(std::sqrt(rec.rr / rr0));
        }
    }
    out.front() = 1.0;
    return out;
}

std::vector<double> relative_norms(const AnyTrace& trace) {
    return std::visit([](const auto& t) { return relative_norms(t); }, trace);
}

template <Scalar T>
std::size_t count_active(const SymmetricMatrix<T>& d, const Vector<T>& b) {
    if (!d.is_diagonal()) throw DiagonalRequired("count_active needs a diagonal matrix");
    if (d.order() != b.size()) throw DimensionError("matrix and vector sizes differ");
    const auto diag = d.diagonal_entries();
    std::set<T> active;
    for (std::size_t j = 0; j < diag.size(); ++j) {
        if (!ScalarTraits<T>::is_zero(b[j])) active.insert(diag[j]);
    }
    return active.size();
}

std::uint64_t system_fingerprint(const SymmetricMatrix<Rational>& a, const Vector<Rational>& b) {
    std::ostringstream text;
    io::write_matrix(text, a);
    io::write_vector(text, b);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text.str()) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string ComparisonReport::summary_line() const {
    return "divergence_step=" + (divergence_step ? std::to_string(*divergence_step) : std::string("none")) +
           " delta_steps=" + std::to_string(delta_steps);
}

ComparisonReport compare(const AnyTrace& first, const AnyTrace& second, double gap) {
    if (!(gap > 0.0)) throw InvalidConfig("divergence gap must be positive");
    const Fields a = fields(first);
    const Fields b = fields(second);
    require_same(a.settings.method == b.settings.method, "method");
    require_same(a.settings.generator == b.settings.generator, "coordinate generator");
    require_same(a.settings.omega == b.settings.omega, "omega");
    require_same(a.settings.epsilon == b.settings.epsilon, "epsilon");
    require_same(a.settings.max_steps == b.settings.max_steps, "max_steps");
    require_same(a.order == b.order, "system order");
    require_same(!a.seed || !b.seed || *a.seed == *b.seed, "seed");
    require_same(!a.system_id || !b.system_id || *a.system_id == *b.system_id, "system");

    ComparisonReport report;
    report.first_tag = a.tag;
    report.second_tag = b.tag;
    report.gap = gap;
    report.first_steps = a.steps;
    report.second_steps = b.steps;
    report.first_termination = a.termination;
    report.second_termination = b.termination;
    report.delta_steps = static_cast<std::int64_t>(b.steps) - static_cast<std::int64_t>(a.steps);
    report.termination_mismatch = is_converged(a.termination) != is_converged(b.termination);

    const auto na = relative_norms(first);
    const auto nb = relative_norms(second);
    for (std::size_t i = 0; i < std::max(na.size(), nb.size()); ++i) {
        ComparisonRow row{i, std::nullopt, std::nullopt};
        if (i < na.size()) row.first = na[i];
        if (i < nb.size()) row.second = nb[i];
        if (row.first && row.second) {
            const double x = *row.first;
            const double y = *row.second;
            if (y < x) report.second_below_first = true;
            const bool apart = (x == 0.0) != (y == 0.0) || (x > 0.0 && std::abs(std::log10(x / y)) > gap);
            if (apart && !report.divergence_step) report.divergence_step = i;
        }
        report.rows.push_back(row);
    }
    return report;
}

std::string format_report(const ComparisonReport& report) {
    std::ostringstream out;
    out << std::setw(6) << "step" << "  " << std::setw(14) << ("rel_" + report.first_tag) << "  " << std::setw(14)
        << ("rel_" + report.second_tag) << '\n';
    for (const auto& row : report.rows) {
        out << std::setw(6) << row.step << "  " << std::setw(14) << format_norm(row.first) << "  " << std::setw(14)
            << format_norm(row.second) << '\n';
    }
    out << report.first_tag << ": " << report.first_steps << " steps, " << to_string(report.first_termination) << '\n'
        << report.second_tag << ": " << report.second_steps << " steps, " << to_string(report.second_termination)
        << '\n';
    if (report.termination_mismatch) out << "termination mismatch\n";
    if (report.second_below_first) out << report.second_tag << " curve lies below " << report.first_tag << " at some step\n";
    out << report.summary_line() << '\n';
    return out.str();
}

void emit_csv(const AnyTrace& trace, std::ostream& out) {
    std::visit([&](const auto& t) { emit(t, out); }, trace);
}

AnyTrace parse_csv(std::istream& in) {
    std::map<std::string, std::string> meta;
    std::vector<std::string> rows;
    std::string line;
    bool header = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!header && line.rfind("# ", 0) == 0) {
            const auto eq = line.find('=');
            if (eq == std::string::npos) throw ParseError("bad preamble line '" + line + "'");
            meta[line.substr(2, eq - 2)] = line.substr(eq + 1);
        } else if (!header) {
            if (line != kHeader) throw ParseError("expected header '" + std::string(kHeader) + "'");
            header = true;
        } else if (!line.empty()) {
            rows.push_back(line);
        }
    }
    if (!header) throw ParseError("trace CSV has no header");
    for (const char* key : kPreambleKeys) {
        if (!meta.count(key)) throw ParseError(std::string("trace CSV preamble lacks '") + key + "'");
    }
    const auto& arith = meta.at("arith");
    if (arith == ScalarTraits<Rational>::tag) return build<Rational>(meta, rows);
    if (arith == ScalarTraits<double>::tag) return build<double>(meta, rows);
    throw ParseError("unknown arithmetic tag '" + arith + "'");
}

void write_csv(const std::filesystem::path& path, const AnyTrace& trace) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    emit_csv(trace, out);
    out.flush();
    if (!out) throw IoError("failed writing " + path.string());
}

AnyTrace read_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    return parse_csv(in);
}

template std::vector<double> relative_norms<Rational>(const ConvergenceTrace<Rational>&);
template std::vector<double> relative_norms<double>(const ConvergenceTrace<double>&);
template std::size_t count_active<Rational>(const SymmetricMatrix<Rational>&, const Vector<Rational>&);
template std::size_t count_active<double>(const SymmetricMatrix<double>&, const Vector<double>&);

} // namespace irm
