#include "dabit/weights_io.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

#include <json.hpp>

namespace dabit {

namespace fs = std::filesystem;

namespace {

constexpr char kMagic[4] = {'D', 'B', 'W', '1'};

size_t element_count(const std::vector<int>& shape) {
    size_t n = 1;
    for (int d : shape) {
        if (d < 1) throw std::invalid_argument("weights: non-positive shape dimension");
        n *= static_cast<size_t>(d);
    }
    return n;
}

}  // namespace

void save_weights(const fs::path& path, const std::vector<NamedTensor>& tensors) {
    nlohmann::ordered_json header;
    header["tensors"] = nlohmann::ordered_json::array();
    size_t offset = 0;
    for (const NamedTensor& t : tensors) {
        if (t.data.size() != element_count(t.shape))
            throw std::invalid_argument("save_weights: data size does not match shape for " + t.name);
        header["tensors"].push_back({{"name", t.name}, {"shape", t.shape}, {"offset", offset}});
        offset += t.data.size();
    }
    const std::string header_text = header.dump();
    const uint32_t header_len = static_cast<uint32_t>(header_text.size());

    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
        out.write(kMagic, 4);
        const unsigned char len_bytes[4] = {
            static_cast<unsigned char>(header_len), static_cast<unsigned char>(header_len >> 8),
            static_cast<unsigned char>(header_len >> 16), static_cast<unsigned char>(header_len >> 24)};
        out.write(reinterpret_cast<const char*>(len_bytes), 4);
        out.write(header_text.data(), header_len);
        for (const NamedTensor& t : tensors)
            out.write(reinterpret_cast<const char*>(t.data.data()),
                      static_cast<std::streamsize>(t.data.size() * 4));
        if (!out) throw std::runtime_error(path.string() + ": write failed");
    }
    fs::rename(tmp, path);
}

std::vector<NamedTensor> load_weights(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error(path.string() + ": cannot open");

    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0)
        throw std::runtime_error(path.string() + ": bad magic (not a weight file)");
    unsigned char len_bytes[4];
    in.read(reinterpret_cast<char*>(len_bytes), 4);
    const uint32_t header_len = static_cast<uint32_t>(len_bytes[0]) | len_bytes[1] << 8 |
                               len_bytes[2] << 16 | static_cast<uint32_t>(len_bytes[3]) << 24;
    std::string header_text(header_len, '\0');
    in.read(header_text.data(), header_len);
    if (!in) throw std::runtime_error(path.string() + ": truncated header");

    const nlohmann::json header = nlohmann::json::parse(header_text);
    std::vector<NamedTensor> tensors;
    for (const auto& entry : header.at("tensors")) {
        NamedTensor t;
        t.name = entry.at("name").get<std::string>();
        t.shape = entry.at("shape").get<std::vector<int>>();
        t.data.resize(element_count(t.shape));
        tensors.push_back(std::move(t));
    }
    for (NamedTensor& t : tensors) {
        in.read(reinterpret_cast<char*>(t.data.data()),
                static_cast<std::streamsize>(t.data.size() * 4));
        if (static_cast<size_t>(in.gcount()) != t.data.size() * 4)
            throw std::runtime_error(path.string() + ": truncated payload for " + t.name);
    }
    return tensors;
}

}  // namespace dabit
