#include "dabit/wavelet.hpp"

namespace dabit {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440084436210485;

// 1-D Haar pairs (a+b)/sqrt(2), (a-b)/sqrt(2); an odd tail passes through
// unscaled with a zero detail coefficient.
void haar_rows(const Image& src, Image& approx, Image& detail) {
    const int n = src.width();
    const int half = (n + 1) / 2;
    approx = Image(src.height(), half, 1);
    detail = Image(src.height(), half, 1);
    for (int y = 0; y < src.height(); ++y) {
        for (int i = 0; i < n / 2; ++i) {
            const double a = src.at(y, 2 * i);
            const double b = src.at(y, 2 * i + 1);
            approx.at(y, i) = static_cast<float>((a + b) * kInvSqrt2);
            detail.at(y, i) = static_cast<float>((a - b) * kInvSqrt2);
        }
        if (n % 2 == 1) {
            approx.at(y, half - 1) = src.at(y, n - 1);
            detail.at(y, half - 1) = 0.0f;
        }
    }
}

void haar_cols(const Image& src, Image& approx, Image& detail) {
    const int n = src.height();
    const int half = (n + 1) / 2;
    approx = Image(half, src.width(), 1);
    detail = Image(half, src.width(), 1);
    for (int x = 0; x < src.width(); ++x) {
        for (int i = 0; i < n / 2; ++i) {
            const double a = src.at(2 * i, x);
            const double b = src.at(2 * i + 1, x);
            approx.at(i, x) = static_cast<float>((a + b) * kInvSqrt2);
            detail.at(i, x) = static_cast<float>((a - b) * kInvSqrt2);
        }
        if (n % 2 == 1) {
            approx.at(half - 1, x) = src.at(n - 1, x);
            detail.at(half - 1, x) = 0.0f;
        }
    }
}

Image unhaar_cols(const Image& approx, const Image& detail, int out_height) {
    Image out(out_height, approx.width(), 1);
    for (int x = 0; x < approx.width(); ++x) {
        for (int i = 0; i < out_height / 2; ++i) {
            const double a = approx.at(i, x);
            const double d = detail.at(i, x);
            out.at(2 * i, x) = static_cast<float>((a + d) * kInvSqrt2);
            out.at(2 * i + 1, x) = static_cast<float>((a - d) * kInvSqrt2);
        }
        if (out_height % 2 == 1)
            out.at(out_height - 1, x) = approx.at(approx.height() - 1, x);
    }
    return out;
}

Image unhaar_rows(const Image& approx, const Image& detail, int out_width) {
    Image out(approx.height(), out_width, 1);
    for (int y = 0; y < approx.height(); ++y) {
        for (int i = 0; i < out_width / 2; ++i) {
            const double a = approx.at(y, i);
            const double d = detail.at(y, i);
            out.at(y, 2 * i) = static_cast<float>((a + d) * kInvSqrt2);
            out.at(y, 2 * i + 1) = static_cast<float>((a - d) * kInvSqrt2);
        }
        if (out_width % 2 == 1)
            out.at(y, out_width - 1) = approx.at(y, approx.width() - 1);
    }
    return out;
}

}  // namespace

WaveletPyramid wavelet_decompose(const Image& gray, int levels) {
    if (gray.channels() != 1)
        throw std::invalid_argument("wavelet_decompose: expected a single-channel image");
    if (levels < 1)
        throw std::invalid_argument("wavelet_decompose: levels must be >= 1");

    WaveletPyramid pyramid;
    Image current = gray;
    for (int l = 0; l < levels; ++l) {
        if (current.height() < 2 || current.width() < 2)
            throw std::invalid_argument("wavelet_decompose: too many levels for image size");
        WaveletLevel level;
        level.src_height = current.height();
        level.src_width = current.width();
        Image row_lo, row_hi;
        haar_rows(current, row_lo, row_hi);
        Image ll;
        haar_cols(row_lo, ll, level.hl);
        haar_cols(row_hi, level.lh, level.hh);
        pyramid.levels.push_back(std::move(level));
        current = std::move(ll);
    }
    pyramid.approx = std::move(current);
    return pyramid;
}

Image wavelet_reconstruct(const WaveletPyramid& pyramid) {
    Image current = pyramid.approx;
    for (int l = static_cast<int>(pyramid.levels.size()) - 1; l >= 0; --l) {
        const WaveletLevel& level = pyramid.levels[l];
        Image row_lo = unhaar_cols(current, level.hl, level.src_height);
        Image row_hi = unhaar_cols(level.lh, level.hh, level.src_height);
        current = unhaar_rows(row_lo, row_hi, level.src_width);
    }
    return current;
}

}  // namespace dabit
