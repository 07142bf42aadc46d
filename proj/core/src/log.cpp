#include "vaxalloc/log.hpp"

#include <atomic>
#include <iostream>

namespace vaxalloc::log {
namespace {
std::atomic<bool> g_quiet{false};
}

void warn(const std::string& msg) {
    if (!g_quiet.load(std::memory_order_relaxed)) std::cerr << "warning: " << msg << '\n';
}

void set_quiet(bool quiet) { g_quiet.store(quiet, std::memory_order_relaxed); }

} // namespace vaxalloc::log
