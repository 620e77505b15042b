#pragma once

#include <filesystem>

#include "dabit/image.hpp"

namespace dabit {

// Middlebury interchange format: 4-byte tag "PIEH", then width and height as
// 32-bit little-endian integers, then row-major interleaved (dx, dy) 32-bit
// little-endian floats. write_flo / read_flo round-trip bit-for-bit.
Image read_flo(const std::filesystem::path& path);
void write_flo(const std::filesystem::path& path, const Image& flow);

FlowSequence load_flows(const std::filesystem::path& dir);
std::vector<std::filesystem::path> save_flows(const std::filesystem::path& dir, const FlowSequence& seq);

}  // namespace dabit
