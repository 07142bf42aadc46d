#pragma once

#include <string>

namespace vaxalloc::log {

/// Writes "warning: ..." to stderr. Warnings never touch output artifacts, so
/// they cannot break bit-determinism of pipeline outputs.
void warn(const std::string& msg);

/// Suppress/enable warnings (tests exercising degenerate inputs use this).
void set_quiet(bool quiet);

} // namespace vaxalloc::log
