#include "dabit/flo_io.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>

namespace dabit {

namespace fs = std::filesystem;

namespace {

constexpr char kTag[4] = {'P', 'I', 'E', 'H'};

static_assert(sizeof(float) == 4, "flo format requires 32-bit floats");

uint32_t read_u32_le(std::istream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    return static_cast<uint32_t>(b[0]) | static_cast<uint32_t>(b[1]) << 8 |
           static_cast<uint32_t>(b[2]) << 16 | static_cast<uint32_t>(b[3]) << 24;
}

void write_u32_le(std::ostream& out, uint32_t v) {
    const unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                                static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

}  // namespace

Image read_flo(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error(path.string() + ": cannot open");

    char tag[4];
    in.read(tag, 4);
    if (!in || std::memcmp(tag, kTag, 4) != 0)
        throw std::runtime_error(path.string() + ": bad magic tag (not a flo file)");

    const uint32_t width = read_u32_le(in);
    const uint32_t height = read_u32_le(in);
    if (!in || width == 0 || height == 0 || width > 1u << 20 || height > 1u << 20)
        throw std::runtime_error(path.string() + ": invalid dimensions");

    Image flow(static_cast<int>(height), static_cast<int>(width), 2);
    // Host is little-endian on every supported target; read floats directly.
    in.read(reinterpret_cast<char*>(flow.data()), static_cast<std::streamsize>(flow.size() * 4));
    if (static_cast<size_t>(in.gcount()) != flow.size() * 4)
        throw std::runtime_error(path.string() + ": truncated payload");
    return flow;
}

void write_flo(const fs::path& path, const Image& flow) {
    if (flow.channels() != 2)
        throw std::invalid_argument("write_flo: flow must have 2 channels");
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
        out.write(kTag, 4);
        write_u32_le(out, static_cast<uint32_t>(flow.width()));
        write_u32_le(out, static_cast<uint32_t>(flow.height()));
        out.write(reinterpret_cast<const char*>(flow.data()),
                  static_cast<std::streamsize>(flow.size() * 4));
        if (!out) throw std::runtime_error(path.string() + ": write failed");
    }
    fs::rename(tmp, path);
}

FlowSequence load_flows(const fs::path& dir) {
    if (!fs::is_directory(dir))
        throw std::runtime_error(dir.string() + ": not a directory");
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".flo")
            files.push_back(entry.path());
    std::sort(files.begin(), files.end(),
              [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });
    if (files.empty())
        throw std::runtime_error(dir.string() + ": no flo files found");

    FlowSequence seq;
    for (const fs::path& p : files) {
        Image flow = read_flo(p);
        if (!seq.flows.empty() && (flow.height() != seq.height() || flow.width() != seq.width()))
            throw std::runtime_error(p.string() + ": dimension mismatch within sequence");
        seq.flows.push_back(std::move(flow));
    }
    return seq;
}

std::vector<fs::path> save_flows(const fs::path& dir, const FlowSequence& seq) {
    fs::create_directories(dir);
    std::vector<fs::path> paths;
    for (int t = 0; t < seq.length(); ++t) {
        char name[16];
        std::snprintf(name, sizeof(name), "%05d.flo", t);
        const fs::path p = dir / name;
        write_flo(p, seq.flows[t]);
        paths.push_back(p);
    }
    return paths;
}

}  // namespace dabit
