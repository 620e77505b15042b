#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "dabit/focus_schedule.hpp"

namespace dabit {

// Index of one synthesized sequence on disk. Paths are stored relative to the
// manifest file so a dataset directory can be moved as a whole.
struct DatasetManifest {
    std::string sequence_id;
    FocusSchedule schedule;
    std::string kernel_ramp = "linear-odd-snap";

    std::vector<std::string> frame_paths;      // blurred frames
    std::vector<std::string> depth_paths;
    std::vector<std::string> blur_map_paths;
    std::vector<std::string> mask_paths;

    std::vector<std::string> lr_frame_paths;   // factor-2 variants
    std::vector<std::string> lr_blur_map_paths;
    std::vector<std::string> lr_depth_paths;

    bool operator==(const DatasetManifest&) const = default;
};

std::string manifest_to_json(const DatasetManifest& manifest);
DatasetManifest manifest_from_json(const std::string& text);

void save_manifest(const std::filesystem::path& path, const DatasetManifest& manifest);
DatasetManifest load_manifest(const std::filesystem::path& path);

// Checks that every referenced path exists relative to base_dir; throws with
// the first missing path otherwise.
void verify_manifest_paths(const DatasetManifest& manifest, const std::filesystem::path& base_dir);

}  // namespace dabit
