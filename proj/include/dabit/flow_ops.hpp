#pragma once

#include <vector>

#include "dabit/image.hpp"

namespace dabit {

// Bilinear sample at (xs, ys); positions outside [0,W-1]x[0,H-1] are invalid.
bool sample_in_bounds(const Image& image, double xs, double ys);
double sample_bilinear(const Image& image, double xs, double ys, int channel);
// Clamp-to-edge variant, defined everywhere.
double sample_bilinear_clamped(const Image& image, double xs, double ys, int channel);

struct WarpResult {
    Image image;  // output(x) = bilinear sample of input at x + flow(x)
    Image valid;  // 1 where the sample position was in bounds
};

WarpResult warp(const Image& image, const Image& flow);

// Forward-backward round-trip error e(x) = |F_fwd(x) + F_bwd(x + F_fwd(x))|_2,
// with clamp-to-edge sampling of the backward field.
Image fb_consistency(const Image& flow_fwd, const Image& flow_bwd);

struct FlowCompletionResult {
    FlowSequence flows;
    bool all_masked = false;  // some field had no unmasked vectors; zero fill
};

// Classical masked flow completion. Works at 1/8 resolution: masked cells are
// filled by Jacobi averaging of their neighbors (unmasked cells held fixed)
// until the maximum change drops below `tol` or `max_iters` is reached, then
// upsampled bilinearly. Unmasked vectors are kept verbatim.
FlowCompletionResult complete_flows(const FlowSequence& flows, const MaskSequence& masks,
                                    double tol = 1e-4, int max_iters = 500);

struct PropagationResult {
    FrameSequence frames;
    MaskSequence masks;
    std::vector<Image> provenance;  // source frame index per pixel, -1 untouched
};

// Bidirectional image propagation: a backward pass (pulling from frame t+1)
// then a forward pass (pulling from frame t-1). A masked pixel is replaced by
// the warped neighbor value when every contributing source pixel is unmasked
// and the forward-backward consistency error is below the threshold; its mask
// bit then clears so the value chains onward. Blur maps are not touched.
PropagationResult propagate(const FrameSequence& frames, const MaskSequence& masks,
                            const FlowSequence& flow_fwd, const FlowSequence& flow_bwd,
                            double consistency_threshold = 1.0, int jobs = 1);

struct ClipWithReferences {
    FrameSequence frames;
    MaskSequence masks;
    std::vector<int> source_indices;  // clip indices then reference indices
};

// Assembles the local clip followed by the global reference frames, in order.
// Reference indices must be distinct and outside the clip.
ClipWithReferences query_global_references(const FrameSequence& frames, const MaskSequence& masks,
                                           int clip_start, int clip_length,
                                           const std::vector<int>& ref_indices);

// Constant-translation flow fields for T frames (content at x in frame t
// appears at x + (dx, dy) in frame t+1); the backward fields are negated.
FlowSequence translation_flows(int frames, int height, int width, double dx, double dy);

}  // namespace dabit
