#include "dabit/transforms.hpp"

#include <algorithm>
#include <cmath>

namespace dabit {

namespace {

// Catmull-Rom (a = -0.5) cubic interpolation weight.
double cubic_weight(double t) {
    constexpr double a = -0.5;
    t = std::fabs(t);
    if (t <= 1.0) return ((a + 2.0) * t - (a + 3.0)) * t * t + 1.0;
    if (t < 2.0) return ((a * t - 5.0 * a) * t + 8.0 * a) * t - 4.0 * a;
    return 0.0;
}

struct CubicTaps {
    int index[4];
    double weight[4];
};

CubicTaps cubic_taps(double src, int limit) {
    CubicTaps taps;
    const int base = static_cast<int>(std::floor(src));
    double sum = 0.0;
    for (int k = 0; k < 4; ++k) {
        const int i = base - 1 + k;
        taps.index[k] = std::clamp(i, 0, limit - 1);
        taps.weight[k] = cubic_weight(src - i);
        sum += taps.weight[k];
    }
    for (double& w : taps.weight) w /= sum;
    return taps;
}

Image reversed_copy(const Image& flow) {
    Image out(flow.height(), flow.width(), flow.channels());
    for (size_t i = 0; i < flow.size(); ++i) out.data()[i] = -flow.data()[i];
    return out;
}

template <typename Seq>
Seq flip_seq(const Seq& seq, std::vector<Image> Seq::*field) {
    Seq out;
    for (const Image& im : seq.*field) (out.*field).push_back(flip_image(im));
    return out;
}

template <typename Seq>
Seq reverse_seq(const Seq& seq, std::vector<Image> Seq::*field) {
    Seq out = seq;
    std::reverse((out.*field).begin(), (out.*field).end());
    return out;
}

void check_factor(const Image& im, int factor) {
    if (factor < 1)
        throw std::invalid_argument("downsample: factor must be >= 1");
    if (im.height() % factor != 0 || im.width() % factor != 0)
        throw std::invalid_argument("downsample: factor must divide both dimensions");
}

}  // namespace

Image resize_bicubic(const Image& src, int out_height, int out_width) {
    Image out(out_height, out_width, src.channels());
    const double sy = static_cast<double>(src.height()) / out_height;
    const double sx = static_cast<double>(src.width()) / out_width;
    std::vector<CubicTaps> col_taps(out_width);
    for (int x = 0; x < out_width; ++x)
        col_taps[x] = cubic_taps((x + 0.5) * sx - 0.5, src.width());
    for (int y = 0; y < out_height; ++y) {
        const CubicTaps ty = cubic_taps((y + 0.5) * sy - 0.5, src.height());
        for (int x = 0; x < out_width; ++x) {
            const CubicTaps& tx = col_taps[x];
            for (int c = 0; c < src.channels(); ++c) {
                double acc = 0.0;
                for (int ky = 0; ky < 4; ++ky) {
                    double row_acc = 0.0;
                    for (int kx = 0; kx < 4; ++kx)
                        row_acc += tx.weight[kx] * src.at(ty.index[ky], tx.index[kx], c);
                    acc += ty.weight[ky] * row_acc;
                }
                out.at(y, x, c) = static_cast<float>(acc);
            }
        }
    }
    return out;
}

Image resize_bilinear(const Image& src, int out_height, int out_width) {
    Image out(out_height, out_width, src.channels());
    const double sy = static_cast<double>(src.height()) / out_height;
    const double sx = static_cast<double>(src.width()) / out_width;
    for (int y = 0; y < out_height; ++y) {
        const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, static_cast<double>(src.height() - 1));
        const int y0 = std::min(static_cast<int>(fy), src.height() - 1);
        const int y1 = std::min(y0 + 1, src.height() - 1);
        const double wy = fy - y0;
        for (int x = 0; x < out_width; ++x) {
            const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, static_cast<double>(src.width() - 1));
            const int x0 = std::min(static_cast<int>(fx), src.width() - 1);
            const int x1 = std::min(x0 + 1, src.width() - 1);
            const double wx = fx - x0;
            for (int c = 0; c < src.channels(); ++c) {
                const double top = src.at(y0, x0, c) + (src.at(y0, x1, c) - src.at(y0, x0, c)) * wx;
                const double bot = src.at(y1, x0, c) + (src.at(y1, x1, c) - src.at(y1, x0, c)) * wx;
                out.at(y, x, c) = static_cast<float>(top + (bot - top) * wy);
            }
        }
    }
    return out;
}

Image resize_nearest(const Image& src, int out_height, int out_width) {
    Image out(out_height, out_width, src.channels());
    const double sy = static_cast<double>(src.height()) / out_height;
    const double sx = static_cast<double>(src.width()) / out_width;
    for (int y = 0; y < out_height; ++y) {
        const int iy = std::clamp(static_cast<int>(std::floor((y + 0.5) * sy)), 0, src.height() - 1);
        for (int x = 0; x < out_width; ++x) {
            const int ix = std::clamp(static_cast<int>(std::floor((x + 0.5) * sx)), 0, src.width() - 1);
            for (int c = 0; c < src.channels(); ++c)
                out.at(y, x, c) = src.at(iy, ix, c);
        }
    }
    return out;
}

Image flip_image(const Image& src) {
    Image out(src.height(), src.width(), src.channels());
    for (int y = 0; y < src.height(); ++y)
        for (int x = 0; x < src.width(); ++x)
            for (int c = 0; c < src.channels(); ++c)
                out.at(y, src.width() - 1 - x, c) = src.at(y, x, c);
    return out;
}

FrameSequence horizontal_flip(const FrameSequence& seq) { return flip_seq(seq, &FrameSequence::frames); }
DepthSequence horizontal_flip(const DepthSequence& seq) { return flip_seq(seq, &DepthSequence::maps); }
BlurMapSequence horizontal_flip(const BlurMapSequence& seq) { return flip_seq(seq, &BlurMapSequence::maps); }
MaskSequence horizontal_flip(const MaskSequence& seq) { return flip_seq(seq, &MaskSequence::masks); }

FrameSequence temporal_reverse(const FrameSequence& seq) { return reverse_seq(seq, &FrameSequence::frames); }
DepthSequence temporal_reverse(const DepthSequence& seq) { return reverse_seq(seq, &DepthSequence::maps); }
BlurMapSequence temporal_reverse(const BlurMapSequence& seq) { return reverse_seq(seq, &BlurMapSequence::maps); }
MaskSequence temporal_reverse(const MaskSequence& seq) { return reverse_seq(seq, &MaskSequence::masks); }

FlowSequence temporal_reverse(const FlowSequence& seq) {
    FlowSequence out;
    for (int t = seq.length() - 1; t >= 0; --t)
        out.flows.push_back(reversed_copy(seq.flows[t]));
    return out;
}

namespace {

template <typename Seq>
Seq downsample_seq(const Seq& seq, std::vector<Image> Seq::*field, int factor, bool bicubic,
                   float lo, float hi) {
    Seq out;
    for (const Image& im : seq.*field) {
        check_factor(im, factor);
        if (factor == 1) {
            (out.*field).push_back(im);
            continue;
        }
        Image resized = bicubic ? resize_bicubic(im, im.height() / factor, im.width() / factor)
                                : resize_nearest(im, im.height() / factor, im.width() / factor);
        if (bicubic)  // cubic overshoot must not leave the valid range
            for (size_t i = 0; i < resized.size(); ++i)
                resized.data()[i] = std::clamp(resized.data()[i], lo, hi);
        (out.*field).push_back(std::move(resized));
    }
    return out;
}

}  // namespace

FrameSequence downsample(const FrameSequence& seq, int factor) {
    return downsample_seq(seq, &FrameSequence::frames, factor, true, 0.0f, 1.0f);
}
DepthSequence downsample(const DepthSequence& seq, int factor) {
    return downsample_seq(seq, &DepthSequence::maps, factor, true, 0.0f, 255.0f);
}
BlurMapSequence downsample(const BlurMapSequence& seq, int factor) {
    return downsample_seq(seq, &BlurMapSequence::maps, factor, false, 0.0f, 0.0f);
}
MaskSequence downsample(const MaskSequence& seq, int factor) {
    return downsample_seq(seq, &MaskSequence::masks, factor, false, 0.0f, 0.0f);
}

}  // namespace dabit
