#pragma once

#include <initializer_list>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace tracebounds {

/// Shortest decimal that parses back to the same double ("nan", "inf",
/// "-inf" for non-finite values).
std::string format_double(double v);

/// Minimal CSV emitter: fixed header, one call per row, no quoting (fields
/// are numbers or identifiers).
class CsvWriter {
public:
    CsvWriter(std::ostream& out, std::initializer_list<std::string_view> header);

    CsvWriter& field(double v);
    CsvWriter& field(std::size_t v);
    CsvWriter& field(bool v);
    CsvWriter& field(std::string_view v);
    void end_row();

private:
    void separator();

    std::ostream& out_;
    std::size_t columns_;
    std::size_t current_ = 0;
};

} // namespace tracebounds
