#include "dabit/flow_ops.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "dabit/parallel.hpp"
#include "dabit/transforms.hpp"

namespace dabit {

namespace {

double lerp(double a, double b, double t) { return a + (b - a) * t; }

struct Taps {
    int x0, x1, y0, y1;
    double fx, fy;
};

Taps taps_at(const Image& image, double xs, double ys) {
    Taps t;
    t.x0 = image.width() > 1 ? std::min(static_cast<int>(std::floor(xs)), image.width() - 2) : 0;
    t.y0 = image.height() > 1 ? std::min(static_cast<int>(std::floor(ys)), image.height() - 2) : 0;
    t.x0 = std::max(t.x0, 0);
    t.y0 = std::max(t.y0, 0);
    t.x1 = std::min(t.x0 + 1, image.width() - 1);
    t.y1 = std::min(t.y0 + 1, image.height() - 1);
    t.fx = xs - t.x0;
    t.fy = ys - t.y0;
    return t;
}

}  // namespace

bool sample_in_bounds(const Image& image, double xs, double ys) {
    return xs >= 0.0 && ys >= 0.0 && xs <= image.width() - 1 && ys <= image.height() - 1;
}

double sample_bilinear(const Image& image, double xs, double ys, int channel) {
    const Taps t = taps_at(image, xs, ys);
    const double top = lerp(image.at(t.y0, t.x0, channel), image.at(t.y0, t.x1, channel), t.fx);
    const double bot = lerp(image.at(t.y1, t.x0, channel), image.at(t.y1, t.x1, channel), t.fx);
    return lerp(top, bot, t.fy);
}

double sample_bilinear_clamped(const Image& image, double xs, double ys, int channel) {
    xs = std::clamp(xs, 0.0, static_cast<double>(image.width() - 1));
    ys = std::clamp(ys, 0.0, static_cast<double>(image.height() - 1));
    return sample_bilinear(image, xs, ys, channel);
}

WarpResult warp(const Image& image, const Image& flow) {
    if (flow.channels() != 2 || flow.height() != image.height() || flow.width() != image.width())
        throw std::invalid_argument("warp: flow must be HxWx2 matching the image");
    WarpResult result{Image(image.height(), image.width(), image.channels()),
                      Image(image.height(), image.width(), 1)};
    for (int y = 0; y < image.height(); ++y)
        for (int x = 0; x < image.width(); ++x) {
            const double xs = x + flow.at(y, x, 0);
            const double ys = y + flow.at(y, x, 1);
            if (!sample_in_bounds(image, xs, ys)) continue;
            result.valid.at(y, x) = 1.0f;
            for (int c = 0; c < image.channels(); ++c)
                result.image.at(y, x, c) = static_cast<float>(sample_bilinear(image, xs, ys, c));
        }
    return result;
}

Image fb_consistency(const Image& flow_fwd, const Image& flow_bwd) {
    if (flow_fwd.channels() != 2 || flow_bwd.channels() != 2 ||
        flow_fwd.height() != flow_bwd.height() || flow_fwd.width() != flow_bwd.width())
        throw std::invalid_argument("fb_consistency: paired HxWx2 flows required");
    Image error(flow_fwd.height(), flow_fwd.width(), 1);
    for (int y = 0; y < flow_fwd.height(); ++y)
        for (int x = 0; x < flow_fwd.width(); ++x) {
            const double fx = flow_fwd.at(y, x, 0);
            const double fy = flow_fwd.at(y, x, 1);
            const double bx = sample_bilinear_clamped(flow_bwd, x + fx, y + fy, 0);
            const double by = sample_bilinear_clamped(flow_bwd, x + fx, y + fy, 1);
            error.at(y, x) = static_cast<float>(std::hypot(fx + bx, fy + by));
        }
    return error;
}

namespace {

constexpr int kCompletionScale = 8;

// Fills masked cells of one flow field by neighborhood diffusion at 1/8
// resolution. Returns false if the field had no unmasked vectors.
bool complete_one(const Image& flow, const Image& mask, double tol, int max_iters, Image& out) {
    const int height = flow.height();
    const int width = flow.width();
    bool any_masked = false;
    for (int y = 0; y < height && !any_masked; ++y)
        for (int x = 0; x < width; ++x)
            if (mask.at(y, x) != 0.0f) {
                any_masked = true;
                break;
            }
    out = flow;
    if (!any_masked) return true;

    const int lh = (height + kCompletionScale - 1) / kCompletionScale;
    const int lw = (width + kCompletionScale - 1) / kCompletionScale;
    std::vector<double> lr_u(static_cast<size_t>(lh) * lw, 0.0);
    std::vector<double> lr_v(lr_u.size(), 0.0);
    std::vector<char> lr_masked(lr_u.size(), 0);

    double mean_u = 0.0, mean_v = 0.0;
    long valid_count = 0;
    for (int by = 0; by < lh; ++by)
        for (int bx = 0; bx < lw; ++bx) {
            const int y0 = by * kCompletionScale, y1 = std::min(height, y0 + kCompletionScale);
            const int x0 = bx * kCompletionScale, x1 = std::min(width, x0 + kCompletionScale);
            double su = 0.0, sv = 0.0;
            long n = 0;
            bool blocked = false;
            for (int y = y0; y < y1; ++y)
                for (int x = x0; x < x1; ++x) {
                    su += flow.at(y, x, 0);
                    sv += flow.at(y, x, 1);
                    ++n;
                    if (mask.at(y, x) != 0.0f) blocked = true;
                }
            const size_t p = static_cast<size_t>(by) * lw + bx;
            lr_u[p] = su / n;
            lr_v[p] = sv / n;
            lr_masked[p] = blocked ? 1 : 0;
            if (!blocked) {
                mean_u += lr_u[p];
                mean_v += lr_v[p];
                ++valid_count;
            }
        }

    const bool has_valid = valid_count > 0;
    if (has_valid) {
        mean_u /= valid_count;
        mean_v /= valid_count;
    }
    for (size_t p = 0; p < lr_u.size(); ++p)
        if (lr_masked[p]) {
            lr_u[p] = mean_u;
            lr_v[p] = mean_v;
        }

    if (has_valid) {
        // Jacobi relaxation: masked cells move to the average of their
        // neighbors, unmasked cells stay fixed (Dirichlet data).
        std::vector<double> next_u = lr_u, next_v = lr_v;
        for (int iter = 0; iter < max_iters; ++iter) {
            double max_change = 0.0;
            for (int by = 0; by < lh; ++by)
                for (int bx = 0; bx < lw; ++bx) {
                    const size_t p = static_cast<size_t>(by) * lw + bx;
                    if (!lr_masked[p]) continue;
                    double su = 0.0, sv = 0.0;
                    int n = 0;
                    if (by > 0) { su += lr_u[p - lw]; sv += lr_v[p - lw]; ++n; }
                    if (by + 1 < lh) { su += lr_u[p + lw]; sv += lr_v[p + lw]; ++n; }
                    if (bx > 0) { su += lr_u[p - 1]; sv += lr_v[p - 1]; ++n; }
                    if (bx + 1 < lw) { su += lr_u[p + 1]; sv += lr_v[p + 1]; ++n; }
                    if (n == 0) continue;
                    next_u[p] = su / n;
                    next_v[p] = sv / n;
                    max_change = std::max(max_change, std::fabs(next_u[p] - lr_u[p]));
                    max_change = std::max(max_change, std::fabs(next_v[p] - lr_v[p]));
                }
            lr_u.swap(next_u);
            lr_v.swap(next_v);
            if (max_change < tol) break;
        }
    }

    Image lr_field(lh, lw, 2);
    for (int by = 0; by < lh; ++by)
        for (int bx = 0; bx < lw; ++bx) {
            lr_field.at(by, bx, 0) = static_cast<float>(lr_u[static_cast<size_t>(by) * lw + bx]);
            lr_field.at(by, bx, 1) = static_cast<float>(lr_v[static_cast<size_t>(by) * lw + bx]);
        }
    const Image filled = resize_bilinear(lr_field, height, width);
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x)
            if (mask.at(y, x) != 0.0f) {
                out.at(y, x, 0) = filled.at(y, x, 0);
                out.at(y, x, 1) = filled.at(y, x, 1);
            }
    return has_valid;
}

}  // namespace

FlowCompletionResult complete_flows(const FlowSequence& flows, const MaskSequence& masks,
                                    double tol, int max_iters) {
    if (masks.length() < flows.length())
        throw std::invalid_argument("complete_flows: need a mask per flow field");
    FlowCompletionResult result;
    result.flows.flows.resize(flows.length());
    for (int t = 0; t < flows.length(); ++t) {
        if (masks.masks[t].height() != flows.flows[t].height() ||
            masks.masks[t].width() != flows.flows[t].width())
            throw std::invalid_argument("complete_flows: mask/flow dimension mismatch");
        if (!complete_one(flows.flows[t], masks.masks[t], tol, max_iters, result.flows.flows[t]))
            result.all_masked = true;
    }
    return result;
}

namespace {

// One directional propagation step: fill masked pixels of frame `dst` from
// frame `src` through `flow_out` (dst -> src positions), validating against
// `flow_back` round trips.
void propagate_step(PropagationResult& state, int dst, int src, const Image& flow_out,
                    const Image& flow_back, double threshold, int jobs) {
    Image& frame = state.frames.frames[dst];
    Image& mask = state.masks.masks[dst];
    const Image& src_frame = state.frames.frames[src];
    const Image& src_mask = state.masks.masks[src];
    const int channels = frame.channels();

    parallel_for(0, frame.height(), jobs, [&](int y) {
        for (int x = 0; x < frame.width(); ++x) {
            if (mask.at(y, x) == 0.0f) continue;
            const double fx = flow_out.at(y, x, 0);
            const double fy = flow_out.at(y, x, 1);
            const double xs = x + fx;
            const double ys = y + fy;
            if (!sample_in_bounds(src_frame, xs, ys)) continue;
            const double bx = sample_bilinear_clamped(flow_back, xs, ys, 0);
            const double by = sample_bilinear_clamped(flow_back, xs, ys, 1);
            if (std::hypot(fx + bx, fy + by) >= threshold) continue;
            // every contributing source pixel must be unmasked
            if (sample_bilinear(src_mask, xs, ys, 0) != 0.0) continue;
            for (int c = 0; c < channels; ++c)
                frame.at(y, x, c) = static_cast<float>(sample_bilinear(src_frame, xs, ys, c));
            mask.at(y, x) = 0.0f;
            state.provenance[dst].at(y, x) = static_cast<float>(src);
        }
    });
}

}  // namespace

PropagationResult propagate(const FrameSequence& frames, const MaskSequence& masks,
                            const FlowSequence& flow_fwd, const FlowSequence& flow_bwd,
                            double consistency_threshold, int jobs) {
    const int total = frames.length();
    if (total < 2)
        throw std::invalid_argument("propagate: need at least two frames");
    if (masks.length() != total)
        throw std::invalid_argument("propagate: mask count mismatch");
    if (flow_fwd.length() != total - 1 || flow_bwd.length() != total - 1)
        throw std::invalid_argument("propagate: need T-1 forward and backward flows");

    PropagationResult state{frames, masks, {}};
    state.provenance.reserve(total);
    for (int t = 0; t < total; ++t)
        state.provenance.emplace_back(frames.height(), frames.width(), 1, -1.0f);

    // Backward pass: pull from the future along forward flows.
    for (int t = total - 2; t >= 0; --t)
        propagate_step(state, t, t + 1, flow_fwd.flows[t], flow_bwd.flows[t],
                       consistency_threshold, jobs);
    // Forward pass: pull from the past along backward flows.
    for (int t = 1; t < total; ++t)
        propagate_step(state, t, t - 1, flow_bwd.flows[t - 1], flow_fwd.flows[t - 1],
                       consistency_threshold, jobs);
    return state;
}

ClipWithReferences query_global_references(const FrameSequence& frames, const MaskSequence& masks,
                                           int clip_start, int clip_length,
                                           const std::vector<int>& ref_indices) {
    const int total = frames.length();
    if (masks.length() != total)
        throw std::invalid_argument("query_global_references: mask count mismatch");
    if (clip_start < 0 || clip_length < 1 || clip_start + clip_length > total)
        throw std::invalid_argument("query_global_references: clip out of range");

    std::set<int> seen;
    for (int idx : ref_indices) {
        if (idx < 0 || idx >= total)
            throw std::invalid_argument("query_global_references: reference index out of range");
        if (idx >= clip_start && idx < clip_start + clip_length)
            throw std::invalid_argument("query_global_references: reference index inside the clip");
        if (!seen.insert(idx).second)
            throw std::invalid_argument("query_global_references: duplicate reference index");
    }

    ClipWithReferences out;
    for (int t = clip_start; t < clip_start + clip_length; ++t) {
        out.frames.frames.push_back(frames.frames[t]);
        out.masks.masks.push_back(masks.masks[t]);
        out.source_indices.push_back(t);
    }
    for (int idx : ref_indices) {
        out.frames.frames.push_back(frames.frames[idx]);
        out.masks.masks.push_back(masks.masks[idx]);
        out.source_indices.push_back(idx);
    }
    return out;
}

FlowSequence translation_flows(int frames, int height, int width, double dx, double dy) {
    FlowSequence seq;
    for (int t = 0; t + 1 < frames; ++t) {
        Image flow(height, width, 2);
        for (int y = 0; y < height; ++y)
            for (int x = 0; x < width; ++x) {
                flow.at(y, x, 0) = static_cast<float>(dx);
                flow.at(y, x, 1) = static_cast<float>(dy);
            }
        seq.flows.push_back(std::move(flow));
    }
    return seq;
}

}  // namespace dabit
