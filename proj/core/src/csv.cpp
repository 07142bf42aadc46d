#include "vaxalloc/csv.hpp"

#include <fstream>
#include <sstream>

#include "vaxalloc/errors.hpp"

namespace vaxalloc {
namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cell += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cell += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            cells.push_back(std::move(cell));
            cell.clear();
        } else {
            cell += c;
        }
    }
    cells.push_back(std::move(cell));
    return cells;
}

std::string quote_if_needed(const std::string& cell) {
    if (cell.find_first_of(",\"\n") == std::string::npos) return cell;
    std::string out = "\"";
    for (char c : cell) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

} // namespace

int CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return static_cast<int>(i);
    return -1;
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open file: " + path);
    CsvTable table;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line_no == 1) {
            table.header = split_line(line);
            continue;
        }
        if (line.empty()) continue;
        auto cells = split_line(line);
        if (cells.size() != table.header.size())
            throw RowError("expected " + std::to_string(table.header.size()) + " cells, got " +
                               std::to_string(cells.size()),
                           line_no);
        table.rows.push_back(std::move(cells));
    }
    if (table.header.empty()) throw SchemaError("empty file: " + path);
    return table;
}

void write_csv(const std::string& path, const CsvTable& table) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw SchemaError("cannot open file for writing: " + path);
    std::ostringstream line;
    for (std::size_t i = 0; i < table.header.size(); ++i) {
        if (i) line << ',';
        line << quote_if_needed(table.header[i]);
    }
    out << line.str() << '\n';
    for (const auto& row : table.rows) {
        line.str("");
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) line << ',';
            line << quote_if_needed(row[i]);
        }
        out << line.str() << '\n';
    }
    if (!out) throw SchemaError("write failed: " + path);
}

} // namespace vaxalloc
