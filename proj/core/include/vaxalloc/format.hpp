#pragma once

#include <optional>
#include <string>

namespace vaxalloc {

/// Shortest %.17g rendering — parses back to the identical double, so artifact
/// files are bit-reproducible.
std::string fmt_double(double v);

/// Strict full-string double parse; empty or malformed -> nullopt.
std::optional<double> parse_double(const std::string& s);

} // namespace vaxalloc
