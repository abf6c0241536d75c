#include "badam/idx.hpp"

#include <cstdio>
#include <fstream>
#include <limits>

namespace badam {

namespace {

std::uint32_t read_be32(std::span<const std::uint8_t> bytes, std::size_t off) {
    if (off + 4 > bytes.size()) {
        throw IdxError("truncated header", off);
    }
    return (static_cast<std::uint32_t>(bytes[off]) << 24) |
           (static_cast<std::uint32_t>(bytes[off + 1]) << 16) |
           (static_cast<std::uint32_t>(bytes[off + 2]) << 8) |
           static_cast<std::uint32_t>(bytes[off + 3]);
}

}  // namespace

IdxData parse_idx(std::span<const std::uint8_t> bytes) {
    const std::uint32_t magic = read_be32(bytes, 0);
    std::size_t ndims = 0;
    if (magic == 0x00000803u) {
        ndims = 3;
    } else if (magic == 0x00000801u) {
        ndims = 1;
    } else {
        throw IdxError("unsupported magic 0x" + [magic] {
            char buf[16];
            std::snprintf(buf, sizeof(buf), "%08x", magic);
            return std::string(buf);
        }(), 0);
    }

    IdxData out;
    out.dims.resize(ndims);
    std::size_t count = 1;
    for (std::size_t d = 0; d < ndims; ++d) {
        const std::size_t off = 4 + 4 * d;
        const std::uint32_t dim = read_be32(bytes, off);
        if (dim != 0 && count > std::numeric_limits<std::size_t>::max() / dim) {
            throw IdxError("dimension size overflow", off);
        }
        out.dims[d] = dim;
        count *= dim;
    }

    const std::size_t payload_off = 4 + 4 * ndims;
    if (bytes.size() < payload_off + count) {
        throw IdxError("truncated payload: expected " + std::to_string(count) + " bytes, have " +
                           std::to_string(bytes.size() - payload_off),
                       bytes.size());
    }
    out.payload.assign(bytes.begin() + static_cast<std::ptrdiff_t>(payload_off),
                       bytes.begin() + static_cast<std::ptrdiff_t>(payload_off + count));
    return out;
}

std::vector<std::uint8_t> read_file_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open file: " + path);
    }
    in.seekg(0, std::ios::end);
    const std::streamoff size = in.tellg();
    in.seekg(0, std::ios::beg);
    std::vector<std::uint8_t> bytes(static_cast<std::size_t>(size));
    in.read(reinterpret_cast<char*>(bytes.data()), size);
    if (!in) {
        throw std::runtime_error("failed reading file: " + path);
    }
    return bytes;
}

}  // namespace badam
