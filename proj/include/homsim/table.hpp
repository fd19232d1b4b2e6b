#ifndef HOMSIM_TABLE_HPP
#define HOMSIM_TABLE_HPP

#include <cstdint>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

namespace homsim {

enum class OutputFormat { Csv, Jsonl };

// One table cell: a real, a count, or missing (flagged sweep cells).
struct Cell {
    std::variant<double, std::uint64_t, std::monostate> value;

    static Cell real(double d) { return {d}; }
    static Cell count(std::uint64_t n) { return {n}; }
    static Cell null() { return {std::monostate{}}; }
};

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

// Shortest representation that round-trips the double exactly.
std::string format_double(double d);

// CSV: one header row, decimal point, no locale, '\n' line ends, missing
// cells spelled "nan". JSONL: one object per row, missing cells null.
void write_table(const Table& table, std::ostream& os, OutputFormat format);

}  // namespace homsim

#endif
