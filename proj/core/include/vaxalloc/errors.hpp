#pragma once

#include <stdexcept>
#include <string>

namespace vaxalloc {

/// Input file violates the expected schema (bad header, missing column).
class SchemaError : public std::runtime_error {
public:
    explicit SchemaError(const std::string& what) : std::runtime_error(what) {}
};

/// A specific data row could not be interpreted. Carries the 1-based line number.
class RowError : public std::runtime_error {
public:
    RowError(const std::string& what, long line)
        : std::runtime_error(what + " (line " + std::to_string(line) + ")"), line_(line) {}
    long line() const { return line_; }

private:
    long line_;
};

/// Numerical failure inside a pipeline stage (NaN loss, non-finite activation).
class NumericError : public std::runtime_error {
public:
    NumericError(const std::string& what, const std::string& stage)
        : std::runtime_error("[" + stage + "] " + what), stage_(stage) {}
    const std::string& stage() const { return stage_; }

private:
    std::string stage_;
};

/// A referenced input file does not exist.
class MissingFileError : public std::runtime_error {
public:
    explicit MissingFileError(const std::string& path)
        : std::runtime_error("missing file: " + path), path_(path) {}
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

/// Run configuration rejected. Carries the offending field name.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& what, const std::string& field)
        : std::runtime_error(what + " (field: " + field + ")"), field_(field) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

} // namespace vaxalloc
