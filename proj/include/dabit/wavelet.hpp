#pragma once

#include <vector>

#include "dabit/image.hpp"

namespace dabit {

// One decomposition level. Band naming follows the detail direction:
// lh carries horizontal detail (vertical edges), hl vertical detail,
// hh diagonal. Odd-length tails pass through to the approximation with a
// zero detail coefficient, so level l bands are ceil(H/2^l) x ceil(W/2^l).
struct WaveletLevel {
    Image lh, hl, hh;
    int src_height = 0;  // dims of the image this level decomposed
    int src_width = 0;
};

struct WaveletPyramid {
    std::vector<WaveletLevel> levels;
    Image approx;  // final low-pass band
};

// Orthonormal Haar analysis of a single-channel image. The inverse transform
// reconstructs the input to floating-point precision.
WaveletPyramid wavelet_decompose(const Image& gray, int levels);
Image wavelet_reconstruct(const WaveletPyramid& pyramid);

}  // namespace dabit
