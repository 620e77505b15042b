#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "dabit/blur_synth.hpp"

namespace dabit {

// Everything the CLI commands can read from a TOML file. Command-line flags
// override individual fields. save_config / load_config round-trip all values
// losslessly.
struct PipelineConfig {
    // [synth]
    ScheduleBounds bounds;
    double sigma = 5.0;

    // [estimate]
    int wavelet_levels = 3;
    int depth_bins = 32;
    double tau_b = 0.02;

    // [propagate]
    double tau_c = 1.0;

    // [transformer]
    int window_rows = 5;
    int window_cols = 9;
    int temporal_stride = 2;
    int block_count = 8;
    int embed_dim = 128;
    int heads = 4;
    int feature_channels = 16;
    int encoder_downsample = 4;

    // [run]
    uint64_t seed = 0;
    int jobs = 0;  // 0 = hardware concurrency
    std::string frames_dir;
    std::string depth_dir;
    std::string output_dir;

    bool operator==(const PipelineConfig&) const = default;
};

// Rejects any value that would violate a module precondition.
void validate_config(const PipelineConfig& config);

std::string config_to_toml(const PipelineConfig& config);
PipelineConfig config_from_toml(const std::string& text);

void save_config(const std::filesystem::path& path, const PipelineConfig& config);
PipelineConfig load_config(const std::filesystem::path& path);

}  // namespace dabit
