#pragma once

// Text formats for exact systems.
//
//   matrix:  "symmetric n" followed by the lower triangle row-major, or
//            "diagonal n" followed by n entries
//   vector:  "vector n" followed by n entries
//
// Entries are whitespace-separated rational literals ("-36/25", "7").

#include <filesystem>
#include <iosfwd>
#include <optional>

#include "irm/linalg.hpp"

namespace irm::io {

SymmetricMatrix<Rational> read_matrix(std::istream& in);
Vector<Rational> read_vector(std::istream& in);

void write_matrix(std::ostream& out, const SymmetricMatrix<Rational>& a);
void write_vector(std::ostream& out, const Vector<Rational>& v);

/// Matrix Market "coordinate real|integer symmetric" reader. Every stored
/// double is rationalized bit-exactly, then snapped to zero when a threshold
/// is given.
SymmetricMatrix<Rational> read_matrix_market(std::istream& in, const std::optional<Rational>& snap = std::nullopt);

/// Reads either format, picking Matrix Market when the file starts with "%%MatrixMarket".
SymmetricMatrix<Rational> load_matrix(const std::filesystem::path& path,
                                      const std::optional<Rational>& snap = std::nullopt);
Vector<Rational> load_vector(const std::filesystem::path& path);

void save_matrix(const std::filesystem::path& path, const SymmetricMatrix<Rational>& a);
void save_vector(const std::filesystem::path& path, const Vector<Rational>& v);

} // namespace irm::io
