#include "table_io.hpp"

#include <cstdio>
#include <stdexcept>

#include <json.hpp>

#include "snc/errors.hpp"

namespace cli {

void Table::add_row(std::vector<Cell> row) {
    if (row.size() != columns.size())
        throw std::logic_error("table row width mismatch");
    rows.push_back(std::move(row));
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

std::string cell_text(const Cell& c) {
    if (std::holds_alternative<double>(c)) return format_double(std::get<double>(c));
    if (std::holds_alternative<long>(c)) return std::to_string(std::get<long>(c));
    return std::get<std::string>(c);
}

void write_csv(std::ostream& out, const Table& t) {
    for (const auto& [k, v] : t.meta) out << "# " << k << " = " << v << "\r\n";
    for (std::size_t i = 0; i < t.columns.size(); ++i)
        out << (i ? "," : "") << csv_escape(t.columns[i]);
    out << "\r\n";
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            out << (i ? "," : "") << csv_escape(cell_text(row[i]));
        out << "\r\n";
    }
}

void write_jsonl(std::ostream& out, const Table& t) {
    nlohmann::ordered_json meta;
    for (const auto& [k, v] : t.meta) meta[k] = v;
    nlohmann::ordered_json head;
    head["meta"] = meta;
    out << head.dump() << "\n";
    for (const auto& row : t.rows) {
        nlohmann::ordered_json obj;
        for (std::size_t i = 0; i < row.size(); ++i) {
            const Cell& c = row[i];
            if (std::holds_alternative<double>(c)) obj[t.columns[i]] = std::get<double>(c);
            else if (std::holds_alternative<long>(c)) obj[t.columns[i]] = std::get<long>(c);
            else obj[t.columns[i]] = std::get<std::string>(c);
        }
        out << obj.dump() << "\n";
    }
}

}  // namespace

void write_table(std::ostream& out, const Table& table, const std::string& format) {
    if (format == "csv") write_csv(out, table);
    else if (format == "jsonl") write_jsonl(out, table);
    else throw snc::config_error("unknown output format: " + format);
}

}  // namespace cli
