#include "dabit/blur_synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "dabit/blur_estimate.hpp"
#include "dabit/parallel.hpp"
#include "dabit/png_io.hpp"
#include "dabit/transforms.hpp"

namespace dabit {

namespace fs = std::filesystem;

GaussianKernel gaussian_kernel(int n, double sigma) {
    if (n < 1 || n % 2 == 0)
        throw std::invalid_argument("gaussian_kernel: size must be odd and positive");
    if (sigma <= 0.0)
        throw std::invalid_argument("gaussian_kernel: sigma must be positive");
    GaussianKernel kernel;
    kernel.size = n;
    kernel.weights.resize(static_cast<size_t>(n) * n);
    const int r = (n - 1) / 2;
    double sum = 0.0;
    for (int y = -r; y <= r; ++y)
        for (int x = -r; x <= r; ++x) {
            const double w = std::exp(-(x * x + y * y) / (2.0 * sigma * sigma));
            kernel.weights[static_cast<size_t>(y + r) * n + (x + r)] = w;
            sum += w;
        }
    for (double& w : kernel.weights) w /= sum;
    return kernel;
}

int blur_size_at_depth(double d, double f, double f_r, int n_max, double d_min, double d_max) {
    if (f_r < 0.0)
        throw std::invalid_argument("blur_size_at_depth: f_r must be non-negative");
    if (n_max < 3 || n_max % 2 == 0)
        throw std::invalid_argument("blur_size_at_depth: n_max must be odd and >= 3");

    const double half_range = f_r / 2.0;
    const double dist = std::fabs(d - f);
    if (dist <= half_range) return 0;

    const double farthest = std::max(std::fabs(d_min - f), std::fabs(d_max - f)) - half_range;
    if (farthest <= 0.0) return 0;

    double raw = n_max * (dist - half_range) / farthest;
    raw = std::clamp(raw, 0.0, static_cast<double>(n_max));
    const long odd = 2 * std::lround((raw - 1.0) / 2.0) + 1;
    if (odd < 3) return 0;
    return static_cast<int>(std::min<long>(odd, n_max));
}

namespace {

std::vector<double> gaussian_taps_1d(int n, double sigma) {
    const int r = (n - 1) / 2;
    std::vector<double> taps(n);
    double sum = 0.0;
    for (int i = -r; i <= r; ++i) {
        taps[i + r] = std::exp(-(i * i) / (2.0 * sigma * sigma));
        sum += taps[i + r];
    }
    for (double& t : taps) t /= sum;
    return taps;
}

// Separable convolution with zero padding outside the image; `width` columns,
// `fields` interleaved values per pixel.
void convolve_separable(std::vector<double>& buf, std::vector<double>& scratch, int height,
                        int width, int fields, const std::vector<double>& taps) {
    const int r = (static_cast<int>(taps.size()) - 1) / 2;
    // horizontal
    for (int y = 0; y < height; ++y) {
        const double* in_row = buf.data() + static_cast<size_t>(y) * width * fields;
        double* out_row = scratch.data() + static_cast<size_t>(y) * width * fields;
        for (int x = 0; x < width; ++x) {
            const int k0 = std::max(-r, -x);
            const int k1 = std::min(r, width - 1 - x);
            for (int c = 0; c < fields; ++c) {
                double acc = 0.0;
                for (int k = k0; k <= k1; ++k)
                    acc += taps[k + r] * in_row[(x + k) * fields + c];
                out_row[x * fields + c] = acc;
            }
        }
    }
    // vertical
    for (int y = 0; y < height; ++y) {
        const int k0 = std::max(-r, -y);
        const int k1 = std::min(r, height - 1 - y);
        double* out_row = buf.data() + static_cast<size_t>(y) * width * fields;
        for (int x = 0; x < width; ++x)
            for (int c = 0; c < fields; ++c) {
                double acc = 0.0;
                for (int k = k0; k <= k1; ++k)
                    acc += taps[k + r] * scratch[(static_cast<size_t>(y + k) * width + x) * fields + c];
                out_row[x * fields + c] = acc;
            }
    }
}

}  // namespace

RenderResult render_focal_blur(const Image& frame, const Image& depth, double f, double f_r,
                               int n_max, double sigma) {
    if (frame.height() != depth.height() || frame.width() != depth.width() || depth.channels() != 1)
        throw std::invalid_argument("render_focal_blur: frame/depth dimension mismatch");

    const int height = frame.height();
    const int width = frame.width();
    const int channels = frame.channels();

    RenderResult result{frame, Image(height, width, 1)};
    std::vector<int> sizes(static_cast<size_t>(height) * width);
    std::set<int> bands;
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) {
            const int s = blur_size_at_depth(depth.at(y, x), f, f_r, n_max, kDepthMin, kDepthMax);
            sizes[static_cast<size_t>(y) * width + x] = s;
            result.blur_map.at(y, x) = static_cast<float>(s);
            bands.insert(s);
        }

    // In-focus pixels stay bit-identical via the copy above; blurred bands are
    // overwritten far to near. Each band samples only same-or-farther pixels,
    // renormalizing by the covered kernel mass, so focused foreground never
    // bleeds into a blurred band.
    const int fields = channels + 1;  // premultiplied channels + coverage
    std::vector<double> buf(static_cast<size_t>(height) * width * fields);
    std::vector<double> scratch(buf.size());
    for (auto it = bands.rbegin(); it != bands.rend(); ++it) {
        const int s = *it;
        if (s == 0) continue;
        const std::vector<double> taps = gaussian_taps_1d(s, sigma);
        for (int y = 0; y < height; ++y)
            for (int x = 0; x < width; ++x) {
                const size_t p = static_cast<size_t>(y) * width + x;
                const bool inside = sizes[p] >= s;
                for (int c = 0; c < channels; ++c)
                    buf[p * fields + c] = inside ? static_cast<double>(frame.at(y, x, c)) : 0.0;
                buf[p * fields + channels] = inside ? 1.0 : 0.0;
            }
        convolve_separable(buf, scratch, height, width, fields, taps);
        for (int y = 0; y < height; ++y)
            for (int x = 0; x < width; ++x) {
                const size_t p = static_cast<size_t>(y) * width + x;
                if (sizes[p] != s) continue;
                const double w = buf[p * fields + channels];
                for (int c = 0; c < channels; ++c)
                    result.frame.at(y, x, c) = static_cast<float>(buf[p * fields + c] / w);
            }
    }
    return result;
}

SynthesisResult synthesize_sequence(const FrameSequence& seq, const DepthSequence& depths,
                                    const FocusSchedule& schedule, int jobs) {
    schedule.validate();
    if (seq.length() != depths.length())
        throw std::invalid_argument("synthesize_sequence: frame/depth length mismatch");
    const int total = seq.length();
    if (schedule.length > total)
        throw std::invalid_argument("synthesize_sequence: clip length exceeds sequence length");

    SynthesisResult result;
    result.frames.frames.resize(total);
    result.blur_maps.maps.resize(total);
    result.masks.masks.resize(total);
    parallel_for(0, total, jobs, [&](int t) {
        const double focal = std::clamp(schedule.f0 + t * schedule.df_dt, kDepthMin, kDepthMax);
        RenderResult rendered = render_focal_blur(seq.frames[t], depths.maps[t], focal,
                                                  schedule.f_r, schedule.n_max, schedule.sigma);
        result.masks.masks[t] = binarize(rendered.blur_map);
        result.frames.frames[t] = std::move(rendered.frame);
        result.blur_maps.maps[t] = std::move(rendered.blur_map);
    });
    return result;
}

TrainingSample sample_training_schedule(Rng& rng, int total_frames, const ScheduleBounds& bounds) {
    const int l = bounds.clip_length;
    const int r = bounds.ref_count;
    if (total_frames <= l)
        throw std::invalid_argument("sample_training_schedule: need more frames than the clip length");
    if (total_frames - l < r)
        throw std::invalid_argument("sample_training_schedule: not enough frames outside the clip");

    static constexpr int kKernelChoices[] = {3, 5, 7, 9, 11};

    TrainingSample sample;
    sample.schedule.f0 = rng.uniform(bounds.f0_min, bounds.f0_max);
    sample.schedule.f_r = rng.uniform(bounds.f_r_min, bounds.f_r_max);
    sample.schedule.df_dt = rng.uniform(bounds.df_dt_min, bounds.df_dt_max);
    sample.schedule.n_max = kKernelChoices[rng.uniform_int(0, 4)];
    sample.schedule.sigma = 5.0;
    sample.schedule.length = l;
    sample.schedule.ref_count = r;
    sample.schedule.validate();

    const int clip_start = rng.uniform_int(0, total_frames - l);
    sample.clip_indices.resize(l);
    std::iota(sample.clip_indices.begin(), sample.clip_indices.end(), clip_start);

    std::vector<int> outside;
    for (int i = 0; i < total_frames; ++i)
        if (i < clip_start || i >= clip_start + l) outside.push_back(i);
    for (int i = static_cast<int>(outside.size()) - 1; i > 0; --i)
        std::swap(outside[i], outside[rng.uniform_int(0, i)]);
    sample.reference_indices.assign(outside.begin(), outside.begin() + r);

    sample.flip = rng.bernoulli(0.5);
    sample.reverse = rng.bernoulli(0.5);
    return sample;
}

double depth_maximum(const DepthSequence& depths) {
    double best = 0.0;
    for (const Image& im : depths.maps)
        for (size_t i = 0; i < im.size(); ++i)
            best = std::max(best, static_cast<double>(im.data()[i]));
    return best;
}

FocusSchedule davis_blur_schedule(const DepthSequence& depths) {
    FocusSchedule schedule;
    schedule.f0 = 0.0;
    schedule.f_r = 100.0;
    schedule.n_max = 7;
    schedule.sigma = 5.0;
    schedule.length = depths.length();
    schedule.ref_count = 0;
    schedule.df_dt = depth_maximum(depths) / schedule.length;
    return schedule;
}

namespace {

std::vector<std::string> relative_strings(const std::vector<fs::path>& paths, const fs::path& base) {
    std::vector<std::string> out;
    for (const fs::path& p : paths)
        out.push_back(fs::relative(p, base).generic_string());
    return out;
}

}  // namespace

DavisBlurDataset synthesize_and_write(const FrameSequence& seq, const DepthSequence& depths,
                                      const FocusSchedule& schedule, const fs::path& out_dir,
                                      const std::string& sequence_id, int jobs) {
    DavisBlurDataset dataset;
    dataset.data = synthesize_sequence(seq, depths, schedule, jobs);

    fs::create_directories(out_dir);
    DatasetManifest& m = dataset.manifest;
    m.sequence_id = sequence_id;
    m.schedule = schedule;
    m.frame_paths = relative_strings(save_frames(out_dir / "frames", dataset.data.frames), out_dir);
    m.depth_paths = relative_strings(save_depth(out_dir / "depth", depths), out_dir);
    m.blur_map_paths =
        relative_strings(save_blur_maps(out_dir / "blur_maps", dataset.data.blur_maps), out_dir);
    m.mask_paths = relative_strings(save_masks(out_dir / "masks", dataset.data.masks), out_dir);
    m.lr_frame_paths =
        relative_strings(save_frames(out_dir / "lr/frames", downsample(dataset.data.frames, 2)), out_dir);
    m.lr_blur_map_paths = relative_strings(
        save_blur_maps(out_dir / "lr/blur_maps", downsample(dataset.data.blur_maps, 2)), out_dir);
    m.lr_depth_paths =
        relative_strings(save_depth(out_dir / "lr/depth", downsample(depths, 2)), out_dir);
    save_manifest(out_dir / "manifest.json", m);
    return dataset;
}

DavisBlurDataset build_davis_blur(const FrameSequence& seq, const DepthSequence& depths,
                                  const fs::path& out_dir, const std::string& sequence_id,
                                  int jobs) {
    return synthesize_and_write(seq, depths, davis_blur_schedule(depths), out_dir, sequence_id,
                                jobs);
}

}  // namespace dabit

