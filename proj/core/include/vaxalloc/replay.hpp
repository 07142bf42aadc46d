#pragma once

#include <cstddef>
#include <vector>

#include "vaxalloc/env.hpp"
#include "vaxalloc/rng.hpp"

namespace vaxalloc::rl {

struct Experience {
    RlState state;
    std::size_t action = 0;
    double reward = 0.0;
    RlState next;
    bool terminal = false;
};

/// Bounded ring buffer of transitions; the oldest entry is evicted first.
class ReplayMemory {
public:
    explicit ReplayMemory(std::size_t capacity);

    void push(Experience e);
    std::size_t size() const { return buf_.size(); }
    std::size_t capacity() const { return capacity_; }

    /// Uniform sample of k distinct experiences; deterministic given the rng
    /// state. Throws when fewer than k are stored.
    std::vector<Experience> sample(std::size_t k, num::Rng& rng) const;

    /// Live experiences, oldest first.
    std::vector<Experience> snapshot() const;

private:
    std::size_t capacity_;
    std::vector<Experience> buf_;
    std::size_t next_ = 0;  // overwrite cursor once full
};

} // namespace vaxalloc::rl
