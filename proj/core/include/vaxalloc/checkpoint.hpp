#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace vaxalloc::num {

/// One named tensor in a checkpoint file.
struct NamedTensor {
    std::string name;
    std::vector<std::uint64_t> shape;
    std::vector<double> data;  // row-major, size == product(shape)
};

// Checkpoint container, byte layout (all integers little-endian):
//
//   offset  size  field
//   0        8    magic "VXTC0001"
//   8        4    u32 tensor count
//   per tensor, in file order:
//            2    u16 name length L
//            L    name bytes (UTF-8, no terminator)
//            1    u8 rank R
//          8*R    u64 dims[R]
//   8*prod(dims)  f64 data, row-major, IEEE-754 binary64
//
// Two checkpoints of the same model trained with the same seed are
// byte-identical.

constexpr char kCheckpointMagic[9] = "VXTC0001";

void write_checkpoint(const std::string& path, const std::vector<NamedTensor>& tensors);
std::vector<NamedTensor> read_checkpoint(const std::string& path);

} // namespace vaxalloc::num
