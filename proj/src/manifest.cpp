#include "dabit/manifest.hpp"

#include <fstream>

#include <json.hpp>

namespace dabit {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

ordered_json schedule_to_json(const FocusSchedule& s) {
    return ordered_json{{"f0", s.f0},         {"f_r", s.f_r},     {"df_dt", s.df_dt},
                        {"n_max", s.n_max},   {"sigma", s.sigma}, {"length", s.length},
                        {"ref_count", s.ref_count}};
}

FocusSchedule schedule_from_json(const ordered_json& j) {
    FocusSchedule s;
    s.f0 = j.at("f0").get<double>();
    s.f_r = j.at("f_r").get<double>();
    s.df_dt = j.at("df_dt").get<double>();
    s.n_max = j.at("n_max").get<int>();
    s.sigma = j.at("sigma").get<double>();
    s.length = j.at("length").get<int>();
    s.ref_count = j.at("ref_count").get<int>();
    return s;
}

}  // namespace

std::string manifest_to_json(const DatasetManifest& m) {
    ordered_json j;
    j["sequence_id"] = m.sequence_id;
    j["schedule"] = schedule_to_json(m.schedule);
    j["kernel_ramp"] = m.kernel_ramp;
    j["frames"] = m.frame_paths;
    j["depth"] = m.depth_paths;
    j["blur_maps"] = m.blur_map_paths;
    j["masks"] = m.mask_paths;
    j["lr"] = ordered_json{{"frames", m.lr_frame_paths},
                           {"blur_maps", m.lr_blur_map_paths},
                           {"depth", m.lr_depth_paths}};
    return j.dump(2) + "\n";
}

DatasetManifest manifest_from_json(const std::string& text) {
    const ordered_json j = ordered_json::parse(text);
    DatasetManifest m;
    m.sequence_id = j.at("sequence_id").get<std::string>();
    m.schedule = schedule_from_json(j.at("schedule"));
    m.kernel_ramp = j.at("kernel_ramp").get<std::string>();
    m.frame_paths = j.at("frames").get<std::vector<std::string>>();
    m.depth_paths = j.at("depth").get<std::vector<std::string>>();
    m.blur_map_paths = j.at("blur_maps").get<std::vector<std::string>>();
    m.mask_paths = j.at("masks").get<std::vector<std::string>>();
    m.lr_frame_paths = j.at("lr").at("frames").get<std::vector<std::string>>();
    m.lr_blur_map_paths = j.at("lr").at("blur_maps").get<std::vector<std::string>>();
    m.lr_depth_paths = j.at("lr").at("depth").get<std::vector<std::string>>();
    return m;
}

void save_manifest(const fs::path& path, const DatasetManifest& manifest) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
        out << manifest_to_json(manifest);
    }
    fs::rename(tmp, path);
}

DatasetManifest load_manifest(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error(path.string() + ": cannot open");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return manifest_from_json(text);
}

void verify_manifest_paths(const DatasetManifest& m, const fs::path& base_dir) {
    auto check = [&](const std::vector<std::string>& paths) {
        for (const std::string& p : paths)
            if (!fs::exists(base_dir / p))
                throw std::runtime_error("manifest references missing path: " + p);
    };
    check(m.frame_paths);
    check(m.depth_paths);
    check(m.blur_map_paths);
    check(m.mask_paths);
    check(m.lr_frame_paths);
    check(m.lr_blur_map_paths);
    check(m.lr_depth_paths);
}

}  // namespace dabit
