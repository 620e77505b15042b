#pragma once

#include <filesystem>
#include <vector>

#include "dabit/focus_schedule.hpp"
#include "dabit/image.hpp"
#include "dabit/manifest.hpp"
#include "dabit/rng.hpp"

namespace dabit {

// Truncated, renormalized 2-D Gaussian. Weights sum to 1 and are 4-fold
// symmetric.
struct GaussianKernel {
    int size = 1;
    std::vector<double> weights;  // size*size, row-major

    double at(int dy, int dx) const {
        const int r = (size - 1) / 2;
        return weights[static_cast<size_t>(dy + r) * size + (dx + r)];
    }
};

GaussianKernel gaussian_kernel(int n, double sigma);

// Kernel size for a pixel at depth d: 0 inside the focal range, then linear
// in the excess distance up to n_max at the farthest attainable distance,
// snapped to the nearest odd integer (snapped results below 3 become 0).
int blur_size_at_depth(double d, double f, double f_r, int n_max, double d_min, double d_max);

// Depth axis is fixed to [0,255] by the loaders.
constexpr double kDepthMin = 0.0;
constexpr double kDepthMax = 255.0;

struct RenderResult {
    Image frame;     // blurred frame
    Image blur_map;  // applied kernel size per pixel
};

// Depth-banded focal blur: pixels sharing a kernel size form a band, each
// band is blurred with a normalized masked convolution that samples only
// same-or-farther bands, and bands composite far to near. In-focus pixels
// are copied bit-exactly.
RenderResult render_focal_blur(const Image& frame, const Image& depth, double f, double f_r,
                               int n_max, double sigma);

struct SynthesisResult {
    FrameSequence frames;
    BlurMapSequence blur_maps;
    MaskSequence masks;
};

// Applies the schedule frame by frame: the focal point at frame t is
// f0 + t*df_dt clamped to [0,255]. Masks are the binarized blur maps.
SynthesisResult synthesize_sequence(const FrameSequence& seq, const DepthSequence& depths,
                                    const FocusSchedule& schedule, int jobs = 1);

struct ScheduleBounds {
    double f0_min = 0.0, f0_max = 255.0;
    double f_r_min = 20.0, f_r_max = 150.0;
    double df_dt_min = -25.5, df_dt_max = 25.5;
    int clip_length = 10;
    int ref_count = 6;
};

struct TrainingSample {
    FocusSchedule schedule;
    std::vector<int> clip_indices;       // contiguous, length schedule.length
    std::vector<int> reference_indices;  // distinct, outside the clip
    bool flip = false;
    bool reverse = false;
};

// Draws one randomized training schedule: uniform f0/f_r/df_dt within bounds,
// n_max uniform over {3,5,7,9,11}, a contiguous clip plus distinct global
// reference indices outside it, and 50/50 flip/reverse augmentations.
TrainingSample sample_training_schedule(Rng& rng, int total_frames,
                                        const ScheduleBounds& bounds = {});

// Focal point reaches max(D) on completing the final frame's shift:
// l = T, n_max = 7, f_r = 100, f0 = 0, df_dt = max(D)/l.
FocusSchedule davis_blur_schedule(const DepthSequence& depths);

double depth_maximum(const DepthSequence& depths);

struct DavisBlurDataset {
    SynthesisResult data;
    DatasetManifest manifest;
};

// Synthesizes with the given schedule and writes frames, blur maps, masks,
// a copy of the depth maps, factor-2 low-resolution variants, and the
// manifest under out_dir.
DavisBlurDataset synthesize_and_write(const FrameSequence& seq, const DepthSequence& depths,
                                      const FocusSchedule& schedule,
                                      const std::filesystem::path& out_dir,
                                      const std::string& sequence_id, int jobs = 1);

// Deterministic test-set construction: synthesize_and_write with
// davis_blur_schedule.
DavisBlurDataset build_davis_blur(const FrameSequence& seq, const DepthSequence& depths,
                                  const std::filesystem::path& out_dir,
                                  const std::string& sequence_id, int jobs = 1);

}  // namespace dabit
