#pragma once

#include <string>
#include <vector>

namespace vaxalloc {

/// A parsed delimited text file: one header row plus data rows of raw cells.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Column index by name, -1 when absent.
    int column(const std::string& name) const;
};

/// Reads a comma-separated file. Handles double-quoted fields with embedded
/// commas/quotes. Throws SchemaError on an empty file and RowError when a row
/// has a different cell count than the header.
CsvTable read_csv(const std::string& path);

/// Writes cells with minimal quoting (fields containing comma, quote or
/// newline get quoted).
void write_csv(const std::string& path, const CsvTable& table);

} // namespace vaxalloc
