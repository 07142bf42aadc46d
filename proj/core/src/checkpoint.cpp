#include "vaxalloc/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <limits>

#include "vaxalloc/errors.hpp"

namespace vaxalloc::num {
namespace {

// The format is defined little-endian; this implementation assumes a
// little-endian host with IEEE-754 doubles (checked at compile time where
// possible).
static_assert(std::numeric_limits<double>::is_iec559, "IEEE-754 doubles required");

template <typename T>
void put(std::ofstream& out, T v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::ifstream& in, const std::string& what) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw SchemaError("checkpoint truncated while reading " + what);
    return v;
}

} // namespace

void write_checkpoint(const std::string& path, const std::vector<NamedTensor>& tensors) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw SchemaError("cannot open checkpoint for writing: " + path);
    out.write(kCheckpointMagic, 8);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(tensors.size()));
    for (const auto& t : tensors) {
        put<std::uint16_t>(out, static_cast<std::uint16_t>(t.name.size()));
        out.write(t.name.data(), static_cast<std::streamsize>(t.name.size()));
        put<std::uint8_t>(out, static_cast<std::uint8_t>(t.shape.size()));
        std::uint64_t n = 1;
        for (std::uint64_t d : t.shape) {
            put<std::uint64_t>(out, d);
            n *= d;
        }
        if (n != t.data.size())
            throw SchemaError("tensor '" + t.name + "' shape does not match data length");
        out.write(reinterpret_cast<const char*>(t.data.data()),
                  static_cast<std::streamsize>(n * sizeof(double)));
    }
    if (!out) throw SchemaError("write failed: " + path);
}

std::vector<NamedTensor> read_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SchemaError("cannot open checkpoint: " + path);
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, kCheckpointMagic, 8) != 0)
        throw SchemaError("bad checkpoint magic in " + path);
    const auto count = get<std::uint32_t>(in, "tensor count");
    std::vector<NamedTensor> tensors(count);
    for (auto& t : tensors) {
        const auto name_len = get<std::uint16_t>(in, "name length");
        t.name.resize(name_len);
        in.read(t.name.data(), name_len);
        const auto rank = get<std::uint8_t>(in, "rank");
        t.shape.resize(rank);
        std::uint64_t n = 1;
        for (auto& d : t.shape) {
            d = get<std::uint64_t>(in, "dimension");
            n *= d;
        }
        t.data.resize(n);
        in.read(reinterpret_cast<char*>(t.data.data()),
                static_cast<std::streamsize>(n * sizeof(double)));
        if (!in) throw SchemaError("checkpoint truncated in tensor '" + t.name + "'");
    }
    return tensors;
}

} // namespace vaxalloc::num
