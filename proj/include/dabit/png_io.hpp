#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "dabit/image.hpp"

namespace dabit {

// Raw decoded PNG. 8-bit samples are stored widened into the same buffer.
struct PngImage {
    int width = 0;
    int height = 0;
    int channels = 0;   // 1 = gray, 3 = rgb
    int bit_depth = 0;  // 8 or 16
    std::vector<uint16_t> samples;  // row-major, interleaved
};

PngImage read_png(const std::filesystem::path& path);
void write_png8(const std::filesystem::path& path, int width, int height, int channels,
                const std::vector<uint8_t>& data);
void write_png16_gray(const std::filesystem::path& path, int width, int height,
                      const std::vector<uint16_t>& data);

// Frame loaders/savers. Directories hold lexicographically ordered PNG files.
//
// load_frames: 8-bit RGB, pixel p -> p/255.
// load_depth:  16-bit gray -> v*255/65535; 8-bit gray accepted as-is.
// Blur maps persist as 8-bit PNG at kernel-size*20 (lossless for values <= 12);
// estimated [0,1] maps persist at value*255. Masks persist as {0,255}.
FrameSequence load_frames(const std::filesystem::path& dir);
DepthSequence load_depth(const std::filesystem::path& dir);
BlurMapSequence load_blur_maps(const std::filesystem::path& dir);
BlurMapSequence load_estimated_maps(const std::filesystem::path& dir);
MaskSequence load_masks(const std::filesystem::path& dir);

std::vector<std::filesystem::path> save_frames(const std::filesystem::path& dir, const FrameSequence& seq);
std::vector<std::filesystem::path> save_depth(const std::filesystem::path& dir, const DepthSequence& seq);
std::vector<std::filesystem::path> save_blur_maps(const std::filesystem::path& dir, const BlurMapSequence& seq);
std::vector<std::filesystem::path> save_estimated_maps(const std::filesystem::path& dir, const BlurMapSequence& seq);
std::vector<std::filesystem::path> save_masks(const std::filesystem::path& dir, const MaskSequence& seq);

// Lexicographically sorted *.png entries of a directory.
std::vector<std::filesystem::path> list_png_files(const std::filesystem::path& dir);

}  // namespace dabit
