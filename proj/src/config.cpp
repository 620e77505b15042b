#include "dabit/config.hpp"

#include <cctype>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace dabit {

namespace fs = std::filesystem;

namespace {

// Minimal TOML reader covering what PipelineConfig needs: [sections] with
// key = value lines where values are strings, integers, floats, or booleans.
using TomlTable = std::map<std::string, std::map<std::string, std::string>>;

std::string trim(const std::string& s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

TomlTable parse_toml(const std::string& text) {
    TomlTable table;
    std::string section;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        // strip comments outside of strings
        bool in_string = false;
        for (size_t i = 0; i < line.size(); ++i) {
            if (line[i] == '"') in_string = !in_string;
            if (line[i] == '#' && !in_string) {
                line = line.substr(0, i);
                break;
            }
        }
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw std::runtime_error("toml: malformed section header at line " +
                                         std::to_string(line_no));
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("toml: expected key = value at line " +
                                     std::to_string(line_no));
        const std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw std::runtime_error("toml: empty key or value at line " + std::to_string(line_no));
        if (value.front() == '"') {
            if (value.size() < 2 || value.back() != '"')
                throw std::runtime_error("toml: unterminated string at line " +
                                         std::to_string(line_no));
            value = value.substr(1, value.size() - 2);
        }
        table[section][key] = value;
    }
    return table;
}

class TomlReader {
public:
    explicit TomlReader(TomlTable table) : table_(std::move(table)) {}

    double number(const std::string& section, const std::string& key, double fallback) const {
        const std::string* raw = find(section, key);
        if (!raw) return fallback;
        char* end = nullptr;
        const double v = std::strtod(raw->c_str(), &end);
        if (end == raw->c_str() || *end != '\0')
            throw std::runtime_error("toml: " + section + "." + key + " is not a number");
        return v;
    }

    int integer(const std::string& section, const std::string& key, int fallback) const {
        const double v = number(section, key, fallback);
        const int i = static_cast<int>(v);
        if (static_cast<double>(i) != v)
            throw std::runtime_error("toml: " + section + "." + key + " is not an integer");
        return i;
    }

    uint64_t unsigned64(const std::string& section, const std::string& key,
                        uint64_t fallback) const {
        const std::string* raw = find(section, key);
        if (!raw) return fallback;
        char* end = nullptr;
        const uint64_t v = std::strtoull(raw->c_str(), &end, 10);
        if (end == raw->c_str() || *end != '\0')
            throw std::runtime_error("toml: " + section + "." + key + " is not an integer");
        return v;
    }

    std::string text(const std::string& section, const std::string& key,
                     const std::string& fallback) const {
        const std::string* raw = find(section, key);
        return raw ? *raw : fallback;
    }

private:
    const std::string* find(const std::string& section, const std::string& key) const {
        const auto s = table_.find(section);
        if (s == table_.end()) return nullptr;
        const auto k = s->second.find(key);
        return k == s->second.end() ? nullptr : &k->second;
    }

    TomlTable table_;
};

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

void validate_config(const PipelineConfig& c) {
    auto reject = [](const std::string& what) {
        throw std::invalid_argument("config: " + what);
    };
    if (c.bounds.f0_min < 0.0 || c.bounds.f0_max > 255.0 || c.bounds.f0_min > c.bounds.f0_max)
        reject("f0 bounds must satisfy 0 <= min <= max <= 255");
    if (c.bounds.f_r_min < 0.0 || c.bounds.f_r_min > c.bounds.f_r_max)
        reject("f_r bounds must satisfy 0 <= min <= max");
    if (c.bounds.df_dt_min > c.bounds.df_dt_max) reject("df_dt bounds inverted");
    if (c.bounds.clip_length < 1) reject("clip_length must be >= 1");
    if (c.bounds.ref_count < 0) reject("ref_count must be >= 0");
    if (c.sigma <= 0.0) reject("sigma must be positive");
    if (c.wavelet_levels < 1) reject("wavelet_levels must be >= 1");
    if (c.depth_bins < 1) reject("depth_bins must be >= 1");
    if (c.tau_b < 0.0) reject("tau_b must be non-negative");
    if (c.tau_c <= 0.0) reject("tau_c must be positive");
    if (c.window_rows < 1 || c.window_cols < 1) reject("window dimensions must be >= 1");
    if (c.temporal_stride < 1) reject("temporal_stride must be >= 1");
    if (c.block_count < 1) reject("block_count must be >= 1");
    if (c.embed_dim < 1 || c.heads < 1 || c.embed_dim % c.heads != 0)
        reject("embed_dim must be a positive multiple of heads");
    if (c.feature_channels < 1) reject("feature_channels must be >= 1");
    if (c.encoder_downsample < 1) reject("encoder_downsample must be >= 1");
    if (c.jobs < 0) reject("jobs must be >= 0");
}

std::string config_to_toml(const PipelineConfig& c) {
    std::ostringstream out;
    out << "[synth]\n";
    out << "f0_min = " << format_double(c.bounds.f0_min) << "\n";
    out << "f0_max = " << format_double(c.bounds.f0_max) << "\n";
    out << "f_r_min = " << format_double(c.bounds.f_r_min) << "\n";
    out << "f_r_max = " << format_double(c.bounds.f_r_max) << "\n";
    out << "df_dt_min = " << format_double(c.bounds.df_dt_min) << "\n";
    out << "df_dt_max = " << format_double(c.bounds.df_dt_max) << "\n";
    out << "clip_length = " << c.bounds.clip_length << "\n";
    out << "ref_count = " << c.bounds.ref_count << "\n";
    out << "sigma = " << format_double(c.sigma) << "\n";
    out << "\n[estimate]\n";
    out << "wavelet_levels = " << c.wavelet_levels << "\n";
    out << "depth_bins = " << c.depth_bins << "\n";
    out << "tau_b = " << format_double(c.tau_b) << "\n";
    out << "\n[propagate]\n";
    out << "tau_c = " << format_double(c.tau_c) << "\n";
    out << "\n[transformer]\n";
    out << "window_rows = " << c.window_rows << "\n";
    out << "window_cols = " << c.window_cols << "\n";
    out << "temporal_stride = " << c.temporal_stride << "\n";
    out << "block_count = " << c.block_count << "\n";
    out << "embed_dim = " << c.embed_dim << "\n";
    out << "heads = " << c.heads << "\n";
    out << "feature_channels = " << c.feature_channels << "\n";
    out << "encoder_downsample = " << c.encoder_downsample << "\n";
    out << "\n[run]\n";
    out << "seed = " << c.seed << "\n";
    out << "jobs = " << c.jobs << "\n";
    out << "frames_dir = \"" << c.frames_dir << "\"\n";
    out << "depth_dir = \"" << c.depth_dir << "\"\n";
    out << "output_dir = \"" << c.output_dir << "\"\n";
    return out.str();
}

PipelineConfig config_from_toml(const std::string& text) {
    const TomlReader toml(parse_toml(text));
    PipelineConfig c;
    c.bounds.f0_min = toml.number("synth", "f0_min", c.bounds.f0_min);
    c.bounds.f0_max = toml.number("synth", "f0_max", c.bounds.f0_max);
    c.bounds.f_r_min = toml.number("synth", "f_r_min", c.bounds.f_r_min);
    c.bounds.f_r_max = toml.number("synth", "f_r_max", c.bounds.f_r_max);
    c.bounds.df_dt_min = toml.number("synth", "df_dt_min", c.bounds.df_dt_min);
    c.bounds.df_dt_max = toml.number("synth", "df_dt_max", c.bounds.df_dt_max);
    c.bounds.clip_length = toml.integer("synth", "clip_length", c.bounds.clip_length);
    c.bounds.ref_count = toml.integer("synth", "ref_count", c.bounds.ref_count);
    c.sigma = toml.number("synth", "sigma", c.sigma);
    c.wavelet_levels = toml.integer("estimate", "wavelet_levels", c.wavelet_levels);
    c.depth_bins = toml.integer("estimate", "depth_bins", c.depth_bins);
    c.tau_b = toml.number("estimate", "tau_b", c.tau_b);
    c.tau_c = toml.number("propagate", "tau_c", c.tau_c);
    c.window_rows = toml.integer("transformer", "window_rows", c.window_rows);
    c.window_cols = toml.integer("transformer", "window_cols", c.window_cols);
    c.temporal_stride = toml.integer("transformer", "temporal_stride", c.temporal_stride);
    c.block_count = toml.integer("transformer", "block_count", c.block_count);
    c.embed_dim = toml.integer("transformer", "embed_dim", c.embed_dim);
    c.heads = toml.integer("transformer", "heads", c.heads);
    c.feature_channels = toml.integer("transformer", "feature_channels", c.feature_channels);
    c.encoder_downsample = toml.integer("transformer", "encoder_downsample", c.encoder_downsample);
    c.seed = toml.unsigned64("run", "seed", c.seed);
    c.jobs = toml.integer("run", "jobs", c.jobs);
    c.frames_dir = toml.text("run", "frames_dir", c.frames_dir);
    c.depth_dir = toml.text("run", "depth_dir", c.depth_dir);
    c.output_dir = toml.text("run", "output_dir", c.output_dir);
    validate_config(c);
    return c;
}

void save_config(const fs::path& path, const PipelineConfig& config) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
        out << config_to_toml(config);
    }
    fs::rename(tmp, path);
}

PipelineConfig load_config(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error(path.string() + ": cannot open");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return config_from_toml(text);
}

}  // namespace dabit
