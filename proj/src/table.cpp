#include "homsim/table.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

namespace homsim {

std::string format_double(double d) {
    if (std::isnan(d)) return "nan";
    if (std::isinf(d)) return d > 0 ? "inf" : "-inf";
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), d);
    return std::string(buf, res.ptr);
}

namespace {

std::string csv_cell(const Cell& cell) {
    if (const auto* d = std::get_if<double>(&cell.value)) return format_double(*d);
    if (const auto* n = std::get_if<std::uint64_t>(&cell.value)) return std::to_string(*n);
    return "nan";
}

std::string jsonl_cell(const Cell& cell) {
    if (const auto* d = std::get_if<double>(&cell.value))
        return std::isfinite(*d) ? format_double(*d) : "null";
    if (const auto* n = std::get_if<std::uint64_t>(&cell.value)) return std::to_string(*n);
    return "null";
}

}  // namespace

void write_table(const Table& table, std::ostream& os, OutputFormat format) {
    for (const auto& row : table.rows)
        if (row.size() != table.columns.size())
            throw std::logic_error("write_table: row width != column count");

    if (format == OutputFormat::Csv) {
        for (std::size_t i = 0; i < table.columns.size(); ++i)
            os << (i ? "," : "") << table.columns[i];
        os << '\n';
        for (const auto& row : table.rows) {
            for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_cell(row[i]);
            os << '\n';
        }
        return;
    }
    for (const auto& row : table.rows) {
        os << '{';
        for (std::size_t i = 0; i < row.size(); ++i) {
            os << (i ? "," : "") << '"' << table.columns[i] << "\":" << jsonl_cell(row[i]);
        }
        os << "}\n";
    }
}

}  // namespace homsim
