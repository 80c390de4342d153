#pragma once

#include <ostream>
#include <string>
#include <variant>
#include <vector>

namespace cli {

using Cell = std::variant<double, long, std::string>;

/// Column-ordered result table plus a resolved-parameter header. The CSV
/// and JSONL encodings carry identical values: doubles are printed with 17
/// significant digits so either form parses back to the same bits.
struct Table {
    std::vector<std::pair<std::string, std::string>> meta;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add_row(std::vector<Cell> row);
};

std::string format_double(double v);

/// format: "csv" (RFC 4180 body, `# key = value` preamble) or "jsonl"
/// (first line {"meta": ...}, then one object per row).
void write_table(std::ostream& out, const Table& table, const std::string& format);

}  // namespace cli
