#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace badam {

// Parse failure; `offset` is the byte position the error was detected at.
struct IdxError : std::runtime_error {
    std::size_t offset;
    IdxError(const std::string& what, std::size_t off)
        : std::runtime_error(what + " (at byte offset " + std::to_string(off) + ")"),
          offset(off) {}
};

struct IdxData {
    std::vector<std::size_t> dims;
    std::vector<std::uint8_t> payload;
};

// IDX container: 4-byte big-endian magic (0x00000803 = ubyte images, 3 dims;
// 0x00000801 = ubyte labels, 1 dim), big-endian 32-bit dimension sizes, then
// the raw unsigned-byte payload.
IdxData parse_idx(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> read_file_bytes(const std::string& path);

}  // namespace badam
