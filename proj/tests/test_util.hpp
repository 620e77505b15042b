#pragma once

#include <cmath>
#include <filesystem>
#include <string>

#include "dabit/image.hpp"
#include "dabit/rng.hpp"

namespace testutil {

// Unique scratch directory under the system temp root, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("dabit_test_" + tag + "_" + std::to_string(::getpid()) + "_" +
                 std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline dabit::Image random_image(int height, int width, int channels, dabit::Rng& rng,
                                 float lo = 0.0f, float hi = 1.0f) {
    dabit::Image im(height, width, channels);
    for (size_t i = 0; i < im.size(); ++i)
        im.data()[i] = static_cast<float>(rng.uniform(lo, hi));
    return im;
}

// Smooth high-frequency texture: random per-pixel noise over sinusoidal
// structure, enough detail for wavelet and matching oracles.
inline dabit::Image textured_frame(int height, int width, dabit::Rng& rng) {
    dabit::Image im(height, width, 3);
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x)
            for (int c = 0; c < 3; ++c) {
                const double wave = 0.25 * std::sin(0.9 * x + 0.7 * c) * std::cos(1.1 * y - c);
                const double noise = rng.uniform(-0.22, 0.22);
                im.at(y, x, c) = static_cast<float>(0.5 + wave + noise);
            }
    return im;
}

inline double max_abs_diff(const dabit::Image& a, const dabit::Image& b) {
    double worst = 0.0;
    for (size_t i = 0; i < a.size(); ++i)
        worst = std::max(worst, std::fabs(static_cast<double>(a.data()[i]) - b.data()[i]));
    return worst;
}

inline bool bit_identical(const dabit::Image& a, const dabit::Image& b) { return a == b; }

}  // namespace testutil
