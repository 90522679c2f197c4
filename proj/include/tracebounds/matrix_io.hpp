#pragma once

#include "tracebounds/matrix.hpp"

#include <filesystem>
#include <istream>
#include <string>

namespace tracebounds {

struct ParsedMatrix {
    SymMatrix matrix;
    double max_asymmetry = 0.0; ///< before symmetrization
    std::string format;         ///< "matrix-market" or "raw"
};

/// Reads either a MatrixMarket coordinate file (real or integer, symmetric or
/// general) or the raw dense format: a line holding d followed by d·d
/// whitespace-separated row-major values. The result is symmetrized as
/// (M + Mᵀ)/2. Throws ParseError carrying the offending line.
ParsedMatrix parse_matrix(std::istream& in);
ParsedMatrix parse_matrix_file(const std::filesystem::path& path);

/// Writes the raw dense format with shortest round-trip decimals.
void write_raw_matrix(std::ostream& out, const Matrix& m);

} // namespace tracebounds
