#pragma once

#include "dabit/image.hpp"

namespace dabit {

// Returns the Rec.601 luma of an RGB frame (or a copy of a 1-channel image).
Image luma(const Image& frame);

// Estimates a relative blur map in [0,1] from a frame and its depth map.
// Wavelet detail magnitudes are summed into a per-pixel sharpness score,
// depth is quantized into equal-width bins over [0,255], and each pixel
// receives the inverse of its depth bin's mean sharpness, rescaled to [0,1].
// Empty bins take the global mean sharpness; a frame with no frequency
// evidence (constant color) reports all-focused.
Image estimate_blur_map(const Image& frame, const Image& depth, int levels = 3,
                        int depth_bins = 32);

BlurMapSequence estimate_blur_maps(const FrameSequence& frames, const DepthSequence& depths,
                                   int levels = 3, int depth_bins = 32, int jobs = 1);

// Binarizes a blur map: pixels whose value equals the map minimum within
// `tol` map to 0 (in focus), everything else to 1. A uniform map is all
// zeros; the result is idempotent under re-binarization.
Image binarize(const Image& map, double tol = 0.0);
MaskSequence binarize(const BlurMapSequence& maps, double tol = 0.0);

}  // namespace dabit
