#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace dabit {

struct NamedTensor {
    std::string name;
    std::vector<int> shape;
    std::vector<float> data;

    bool operator==(const NamedTensor&) const = default;
};

// Flat-tensor container: magic "DBW1", a 32-bit little-endian header length,
// a JSON header listing {name, shape, offset} per tensor (offsets in float
// units from the payload start), then the float32 little-endian payload.
void save_weights(const std::filesystem::path& path, const std::vector<NamedTensor>& tensors);
std::vector<NamedTensor> load_weights(const std::filesystem::path& path);

}  // namespace dabit
