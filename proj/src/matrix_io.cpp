#include "irm/matrix_io.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <utility>

namespace irm::io {

namespace {

std::string lowercase(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

std::size_t parse_count(const std::string& token, const char* what) {
    if (token.empty() || !std::all_of(token.begin(), token.end(), [](unsigned char c) { return std::isdigit(c); })) {
        throw ParseError(std::string("expected a nonnegative integer for ") + what + ", got '" + token + "'");
    }
    return std::stoul(token);
}

std::vector<Rational> read_entries(std::istream& in, std::size_t count) {
    std::vector<Rational> out;
    out.reserve(count);
    std::string token;
    while (out.size() < count && in >> token) out.push_back(parse_rational(token));
    if (out.size() != count) {
        throw ParseError("expected " + std::to_string(count) + " entries, found " + std::to_string(out.size()));
    }
    if (in >> token) throw ParseError("unexpected trailing token '" + token + "'");
    return out;
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out) throw IoError("failed writing '" + path.string() + "'");
}

} // namespace

SymmetricMatrix<Rational> read_matrix(std::istream& in) {
    std::string kind;
    std::string order_token;
    if (!(in >> kind >> order_token)) throw ParseError("missing matrix header");
    const std::size_t n = parse_count(order_token, "matrix order");
    if (n == 0) throw ParseError("matrix order must be positive");
    if (kind == "diagonal") return SymmetricMatrix<Rational>::diagonal(read_entries(in, n));
    if (kind == "symmetric") return SymmetricMatrix<Rational>::from_lower(n, read_entries(in, n * (n + 1) / 2));
    throw ParseError("unknown matrix kind '" + kind + "' (expected symmetric or diagonal)");
}

Vector<Rational> read_vector(std::istream& in) {
    std::string kind;
    std::string size_token;
    if (!(in >> kind >> size_token)) throw ParseError("missing vector header");
    if (kind != "vector") throw ParseError("expected 'vector' header, got '" + kind + "'");
    const std::size_t n = parse_count(size_token, "vector length");
    if (n == 0) throw ParseError("vector length must be positive");
    return Vector<Rational>(read_entries(in, n));
}

void write_matrix(std::ostream& out, const SymmetricMatrix<Rational>& a) {
    const std::size_t n = a.order();
    if (a.is_diagonal()) {
        out << "diagonal " << n << '\n';
        for (const auto& q : a.data()) out << q.literal() << '\n';
        return;
    }
    out << "symmetric " << n << '\n';
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) out << (j ? " " : "") << a.at(i, j).literal();
        out << '\n';
    }
}

void write_vector(std::ostream& out, const Vector<Rational>& v) {
    out << "vector " << v.size() << '\n';
    for (const auto& q : v) out << q.literal() << '\n';
}

SymmetricMatrix<Rational> read_matrix_market(std::istream& in, const std::optional<Rational>& snap) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty Matrix Market input");
    std::istringstream header(line);
    std::string banner, object, format, field, symmetry;
    header >> banner >> object >> format >> field >> symmetry;
    if (banner != "%%MatrixMarket") throw ParseError("missing %%MatrixMarket banner");
    object = lowercase(object);
    format = lowercase(format);
    field = lowercase(field);
    symmetry = lowercase(symmetry);
    if (object != "matrix" || format != "coordinate") {
        throw ParseError("only 'matrix coordinate' Matrix Market files are supported");
    }
    if (field != "real" && field != "integer") throw ParseError("unsupported Matrix Market field '" + field + "'");
    if (symmetry != "symmetric") throw ParseError("only symmetric Matrix Market matrices are supported");

    do {
        if (!std::getline(in, line)) throw ParseError("missing Matrix Market size line");
    } while (line.empty() || line.front() == '%');

    std::istringstream size_line(line);
    std::string rows_token, cols_token, nnz_token;
    size_line >> rows_token >> cols_token >> nnz_token;
    const std::size_t rows = parse_count(rows_token, "row count");
    const std::size_t cols = parse_count(cols_token, "column count");
    const std::size_t nnz = parse_count(nnz_token, "entry count");
    if (rows != cols || rows == 0) throw ParseError("Matrix Market matrix must be square and nonempty");

    const std::size_t n = rows;
    std::vector<Rational> packed(n * (n + 1) / 2);
    std::set<std::pair<std::size_t, std::size_t>> seen;
    std::size_t read = 0;
    while (read < nnz && std::getline(in, line)) {
        if (line.empty() || line.front() == '%') continue;
        std::istringstream entry(line);
        std::string i_token, j_token, value_token;
        if (!(entry >> i_token >> j_token >> value_token)) throw ParseError("malformed Matrix Market entry '" + line + "'");
        std::size_t i = parse_count(i_token, "row index");
        std::size_t j = parse_count(j_token, "column index");
        if (i == 0 || j == 0 || i > n || j > n) throw ParseError("Matrix Market index out of range in '" + line + "'");
        if (i < j) std::swap(i, j);
        if (!seen.emplace(i, j).second) throw ParseError("duplicate Matrix Market entry in '" + line + "'");

        Rational value = field == "integer" ? parse_rational(value_token) : rationalize(parse_double(value_token));
        if (snap) value = snap_zero(value, *snap);
        packed[(i - 1) * i / 2 + (j - 1)] = std::move(value);
        ++read;
    }
    if (read != nnz) throw ParseError("Matrix Market file ended after " + std::to_string(read) + " entries");
    return SymmetricMatrix<Rational>::from_lower(n, std::move(packed));
}

SymmetricMatrix<Rational> load_matrix(const std::filesystem::path& path, const std::optional<Rational>& snap) {
    auto in = open_input(path);
    std::string first;
    const auto start = in.tellg();
    in >> first;
    in.clear();
    in.seekg(start);
    if (first.rfind("%%MatrixMarket", 0) == 0) return read_matrix_market(in, snap);
    auto a = read_matrix(in);
    if (snap) {
        std::vector<Rational> data;
        data.reserve(a.data().size());
        for (const auto& q : a.data()) data.push_back(snap_zero(q, *snap));
        return a.is_diagonal() ? SymmetricMatrix<Rational>::diagonal(std::move(data))
                               : SymmetricMatrix<Rational>::from_lower(a.order(), std::move(data));
    }
    return a;
}

Vector<Rational> load_vector(const std::filesystem::path& path) {
    auto in = open_input(path);
    return read_vector(in);
}

void save_matrix(const std::filesystem::path& path, const SymmetricMatrix<Rational>& a) {
    auto out = open_output(path);
    write_matrix(out, a);
    finish(out, path);
}

void save_vector(const std::filesystem::path& path, const Vector<Rational>& v) {
    auto out = open_output(path);
    write_vector(out, v);
    finish(out, path);
}

} // namespace irm::io
