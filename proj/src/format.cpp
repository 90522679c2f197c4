#include "tracebounds/format.hpp"

#include "tracebounds/errors.hpp"

#include <charconv>
#include <cmath>

namespace tracebounds {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc()) throw Error("failed to format double");
    return std::string(buf, ptr);
}

CsvWriter::CsvWriter(std::ostream& out, std::initializer_list<std::string_view> header)
    : out_(out), columns_(header.size()) {
    for (auto h : header) field(h);
    end_row();
}

void CsvWriter::separator() {
    if (current_ > 0) out_ << ',';
    ++current_;
}

CsvWriter& CsvWriter::field(double v) {
    separator();
    out_ << format_double(v);
    return *this;
}

CsvWriter& CsvWriter::field(std::size_t v) {
    separator();
    out_ << v;
    return *this;
}

CsvWriter& CsvWriter::field(bool v) {
    separator();
    out_ << (v ? 1 : 0);
    return *this;
}

CsvWriter& CsvWriter::field(std::string_view v) {
    separator();
    out_ << v;
    return *this;
}

void CsvWriter::end_row() {
    if (current_ != columns_) throw Error("CSV row has " + std::to_string(current_) + " fields, expected " +
                                          std::to_string(columns_));
    out_ << '\n';
    current_ = 0;
}

} // namespace tracebounds
