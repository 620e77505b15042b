#include "dabit/blur_estimate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dabit/parallel.hpp"
#include "dabit/wavelet.hpp"

namespace dabit {

Image luma(const Image& frame) {
    if (frame.channels() == 1) return frame;
    if (frame.channels() != 3)
        throw std::invalid_argument("luma: expected 1 or 3 channels");
    Image out(frame.height(), frame.width(), 1);
    for (int y = 0; y < frame.height(); ++y)
        for (int x = 0; x < frame.width(); ++x)
            out.at(y, x) = 0.299f * frame.at(y, x, 0) + 0.587f * frame.at(y, x, 1) +
                           0.114f * frame.at(y, x, 2);
    return out;
}

Image estimate_blur_map(const Image& frame, const Image& depth, int levels, int depth_bins) {
    if (frame.height() != depth.height() || frame.width() != depth.width() || depth.channels() != 1)
        throw std::invalid_argument("estimate_blur_map: frame/depth dimension mismatch");
    if (depth_bins < 1)
        throw std::invalid_argument("estimate_blur_map: depth_bins must be >= 1");

    const int height = frame.height();
    const int width = frame.width();
    const WaveletPyramid pyramid = wavelet_decompose(luma(frame), levels);

    // Per-pixel sharpness: detail magnitudes of every level, nearest-upsampled
    // to full resolution and summed.
    std::vector<double> sharpness(static_cast<size_t>(height) * width, 0.0);
    for (size_t l = 0; l < pyramid.levels.size(); ++l) {
        const WaveletLevel& level = pyramid.levels[l];
        const int shift = static_cast<int>(l) + 1;
        const int bh = level.lh.height();
        const int bw = level.lh.width();
        for (int y = 0; y < height; ++y) {
            const int by = std::min(y >> shift, bh - 1);
            for (int x = 0; x < width; ++x) {
                const int bx = std::min(x >> shift, bw - 1);
                sharpness[static_cast<size_t>(y) * width + x] +=
                    std::fabs(level.lh.at(by, bx)) + std::fabs(level.hl.at(by, bx)) +
                    std::fabs(level.hh.at(by, bx));
            }
        }
    }

    // Mean sharpness per equal-width depth bin over [0,255].
    std::vector<double> bin_sum(depth_bins, 0.0);
    std::vector<long> bin_count(depth_bins, 0);
    std::vector<int> bin_of(static_cast<size_t>(height) * width);
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) {
            const double d = std::clamp(static_cast<double>(depth.at(y, x)), 0.0, 255.0);
            const int b = std::min(static_cast<int>(d / 255.0 * depth_bins), depth_bins - 1);
            const size_t p = static_cast<size_t>(y) * width + x;
            bin_of[p] = b;
            bin_sum[b] += sharpness[p];
            bin_count[b]++;
        }

    double global_sum = 0.0;
    long global_count = 0;
    for (int b = 0; b < depth_bins; ++b) {
        global_sum += bin_sum[b];
        global_count += bin_count[b];
    }
    const double global_mean = global_count > 0 ? global_sum / global_count : 0.0;

    std::vector<double> bin_mean(depth_bins);
    for (int b = 0; b < depth_bins; ++b)
        bin_mean[b] = bin_count[b] > 0 ? bin_sum[b] / bin_count[b] : global_mean;

    const double max_mean = *std::max_element(bin_mean.begin(), bin_mean.end());
    const double min_mean = *std::min_element(bin_mean.begin(), bin_mean.end());
    const double span = max_mean - min_mean;

    Image out(height, width, 1);
    if (span <= 0.0) return out;  // no per-depth contrast: report all-focused
    std::vector<float> bin_blur(depth_bins);
    for (int b = 0; b < depth_bins; ++b)
        bin_blur[b] = static_cast<float>((max_mean - bin_mean[b]) / span);
    for (size_t p = 0; p < bin_of.size(); ++p)
        out.data()[p] = bin_blur[bin_of[p]];
    return out;
}

BlurMapSequence estimate_blur_maps(const FrameSequence& frames, const DepthSequence& depths,
                                   int levels, int depth_bins, int jobs) {
    if (frames.length() != depths.length())
        throw std::invalid_argument("estimate_blur_maps: frame/depth length mismatch");
    BlurMapSequence out;
    out.maps.resize(frames.length());
    parallel_for(0, frames.length(), jobs, [&](int t) {
        out.maps[t] = estimate_blur_map(frames.frames[t], depths.maps[t], levels, depth_bins);
    });
    return out;
}

Image binarize(const Image& map, double tol) {
    if (map.channels() != 1)
        throw std::invalid_argument("binarize: expected a single-channel map");
    float lowest = std::numeric_limits<float>::infinity();
    for (size_t i = 0; i < map.size(); ++i) lowest = std::min(lowest, map.data()[i]);
    const double cutoff = lowest + std::max(tol, 0.0);
    Image mask(map.height(), map.width(), 1);
    for (size_t i = 0; i < map.size(); ++i)
        mask.data()[i] = map.data()[i] <= cutoff ? 0.0f : 1.0f;
    return mask;
}

MaskSequence binarize(const BlurMapSequence& maps, double tol) {
    MaskSequence out;
    for (const Image& m : maps.maps) out.masks.push_back(binarize(m, tol));
    return out;
}

}  // namespace dabit
