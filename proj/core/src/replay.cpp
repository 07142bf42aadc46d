#include "vaxalloc/replay.hpp"

#include <numeric>
#include <stdexcept>

namespace vaxalloc::rl {

ReplayMemory::ReplayMemory(std::size_t capacity) : capacity_(capacity) {
    if (capacity_ == 0) throw std::invalid_argument("ReplayMemory: zero capacity");
    buf_.reserve(capacity_);
}

void ReplayMemory::push(Experience e) {
    if (buf_.size() < capacity_) {
        buf_.push_back(std::move(e));
    } else {
        buf_[next_] = std::move(e);
        next_ = (next_ + 1) % capacity_;
    }
}

std::vector<Experience> ReplayMemory::sample(std::size_t k, num::Rng& rng) const {
    if (buf_.size() < k)
        throw std::invalid_argument("ReplayMemory: need " + std::to_string(k) +
                                    " experiences, have " + std::to_string(buf_.size()));
    // partial Fisher-Yates: first k entries of a random permutation
    std::vector<std::size_t> idx(buf_.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::vector<Experience> out;
    out.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t j = i + rng.uniform_index(idx.size() - i);
        std::swap(idx[i], idx[j]);
        out.push_back(buf_[idx[i]]);
    }
    return out;
}

std::vector<Experience> ReplayMemory::snapshot() const {
    std::vector<Experience> out;
    out.reserve(buf_.size());
    if (buf_.size() < capacity_) {
        out = buf_;
    } else {
        for (std::size_t i = 0; i < capacity_; ++i) out.push_back(buf_[(next_ + i) % capacity_]);
    }
    return out;
}

} // namespace vaxalloc::rl
