#include "tracebounds/matrix_io.hpp"

#include "tracebounds/errors.hpp"
#include "tracebounds/format.hpp"

#include <algorithm>
#include <charconv>
#include <cctype>
#include <fstream>
#include <sstream>
#include <vector>

namespace tracebounds {

namespace {

struct Token {
    std::string text;
    std::size_t line;
};

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

std::vector<std::string> split(const std::string& line) {
    std::istringstream is(line);
    std::vector<std::string> out;
    for (std::string w; is >> w;) out.push_back(w);
    return out;
}

double to_double(const std::string& text, std::size_t line) {
    double v = 0.0;
    const char* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end) throw ParseError("invalid number '" + text + "'", line);
    return v;
}

std::size_t to_index(const std::string& text, std::size_t line) {
    std::size_t v = 0;
    const char* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end) throw ParseError("invalid integer '" + text + "'", line);
    return v;
}

ParsedMatrix finish(const Matrix& m, std::string format) {
    const double asym = max_asymmetry(m);
    return {SymMatrix::symmetrized(m), asym, std::move(format)};
}

ParsedMatrix parse_matrix_market(std::istream& in, const std::string& header) {
    const auto words = split(lower(header));
    if (words.size() < 5 || words[1] != "matrix") throw ParseError("malformed MatrixMarket header", 1);
    if (words[2] != "coordinate") throw ParseError("only coordinate MatrixMarket files are supported", 1);
    if (words[3] != "real" && words[3] != "integer")
        throw ParseError("unsupported MatrixMarket field '" + words[3] + "'", 1);
    const bool symmetric = words[4] == "symmetric";
    if (!symmetric && words[4] != "general")
        throw ParseError("unsupported MatrixMarket symmetry '" + words[4] + "'", 1);

    std::size_t line_no = 1;
    std::string line;
    std::size_t rows = 0, cols = 0, nnz = 0;
    bool have_size = false;
    Matrix m;
    std::vector<char> seen;
    std::size_t entries = 0;

    while (std::getline(in, line)) {
        ++line_no;
        const auto fields = split(line);
        if (fields.empty() || fields[0][0] == '%') continue;
        if (!have_size) {
            if (fields.size() != 3) throw ParseError("expected 'rows cols entries'", line_no);
            rows = to_index(fields[0], line_no);
            cols = to_index(fields[1], line_no);
            nnz = to_index(fields[2], line_no);
            if (rows != cols)
                throw ParseError("matrix is not square (" + std::to_string(rows) + "x" + std::to_string(cols) + ")",
                                 line_no);
            if (rows == 0) throw ParseError("matrix dimension must be >= 1", line_no);
            m = Matrix(rows, cols);
            seen.assign(rows * cols, 0);
            have_size = true;
            continue;
        }
        if (fields.size() != 3) throw ParseError("expected 'row col value'", line_no);
        const std::size_t i = to_index(fields[0], line_no);
        const std::size_t j = to_index(fields[1], line_no);
        const double v = to_double(fields[2], line_no);
        if (i < 1 || i > rows || j < 1 || j > cols) throw ParseError("entry index out of range", line_no);
        if (entries == nnz) throw ParseError("more entries than declared", line_no);
        if (seen[(i - 1) * cols + (j - 1)]) throw ParseError("duplicate entry", line_no);
        seen[(i - 1) * cols + (j - 1)] = 1;
        m(i - 1, j - 1) = v;
        if (symmetric) {
            if (i != j && seen[(j - 1) * cols + (i - 1)]) throw ParseError("duplicate symmetric entry", line_no);
            seen[(j - 1) * cols + (i - 1)] = 1;
            m(j - 1, i - 1) = v;
        }
        ++entries;
    }
    if (!have_size) throw ParseError("missing size line", line_no);
    if (entries != nnz)
        throw ParseError("expected " + std::to_string(nnz) + " entries, found " + std::to_string(entries), line_no);
    return finish(m, "matrix-market");
}

ParsedMatrix parse_raw(std::istream& in, const std::string& first, std::size_t first_line) {
    const auto head = split(first);
    if (head.size() != 1) throw ParseError("raw format must start with a line holding only d", first_line);
    const std::size_t d = to_index(head[0], first_line);
    if (d == 0) throw ParseError("matrix dimension must be >= 1", first_line);

    std::vector<double> values;
    values.reserve(d * d);
    std::size_t line_no = first_line;
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        for (const auto& tok : split(line)) {
            if (values.size() == d * d) throw ParseError("more than d*d values", line_no);
            values.push_back(to_double(tok, line_no));
        }
    }
    if (values.size() != d * d)
        throw ParseError("expected " + std::to_string(d * d) + " values, found " + std::to_string(values.size()),
                         line_no);
    Matrix m(d, d);
    std::copy(values.begin(), values.end(), m.data().begin());
    return finish(m, "raw");
}

} // namespace

ParsedMatrix parse_matrix(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.rfind("%%MatrixMarket", 0) == 0) {
            if (line_no != 1) throw ParseError("MatrixMarket header must be the first line", line_no);
            return parse_matrix_market(in, line);
        }
        if (split(line).empty()) continue;
        return parse_raw(in, line, line_no);
    }
    throw ParseError("empty matrix file", line_no);
}

ParsedMatrix parse_matrix_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::filesystem::filesystem_error("cannot open matrix file", path,
                                                     std::make_error_code(std::errc::no_such_file_or_directory));
    return parse_matrix(in);
}

void write_raw_matrix(std::ostream& out, const Matrix& m) {
    out << m.rows() << '\n';
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) out << (j ? " " : "") << format_double(m(i, j));
        out << '\n';
    }
}

} // namespace tracebounds
