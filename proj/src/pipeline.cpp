#include "dabit/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "dabit/metrics.hpp"
#include "dabit/parallel.hpp"
#include "dabit/rng.hpp"
#include "dabit/transforms.hpp"

namespace dabit {

namespace {

void fill_normal(std::vector<float>& v, size_t n, Rng& rng) {
    v.resize(n);
    for (float& x : v) x = static_cast<float>(rng.normal() * 0.02);
}

// Per-pixel linear projection: C_in channels -> C_out via a C_in x C_out matrix.
Image apply_linear(const Image& input, const std::vector<float>& weights, int out_channels) {
    const int in_channels = input.channels();
    if (weights.size() != static_cast<size_t>(in_channels) * out_channels)
        throw std::invalid_argument("apply_linear: weight shape mismatch");
    Image out(input.height(), input.width(), out_channels);
    for (int y = 0; y < input.height(); ++y)
        for (int x = 0; x < input.width(); ++x)
            for (int o = 0; o < out_channels; ++o) {
                double acc = 0.0;
                for (int c = 0; c < in_channels; ++c)
                    acc += static_cast<double>(input.at(y, x, c)) *
                           weights[static_cast<size_t>(c) * out_channels + o];
                out.at(y, x, o) = static_cast<float>(acc);
            }
    return out;
}

// Token-level projection of the whole grid.
mgst::PatchGrid project_grid(const mgst::PatchGrid& grid, const std::vector<float>& weights,
                             int out_dim) {
    if (weights.size() != static_cast<size_t>(grid.channels) * out_dim)
        throw std::invalid_argument("project_grid: weight shape mismatch");
    mgst::PatchGrid out(grid.frames, grid.rows, grid.cols, out_dim);
    const size_t tokens = static_cast<size_t>(grid.frames) * grid.rows * grid.cols;
    for (size_t t = 0; t < tokens; ++t) {
        const float* src = grid.tokens.data() + t * grid.channels;
        float* dst = out.tokens.data() + t * out_dim;
        for (int o = 0; o < out_dim; ++o) {
            double acc = 0.0;
            for (int c = 0; c < grid.channels; ++c)
                acc += static_cast<double>(src[c]) * weights[static_cast<size_t>(c) * out_dim + o];
            dst[o] = static_cast<float>(acc);
        }
    }
    return out;
}

constexpr int kEncoderChannels = 6;  // rgb + mask + depth + blur map
constexpr double kBlurMapScale = 11.0;  // largest supported kernel size

}  // namespace

PipelineWeights init_pipeline_weights(const ForwardConfig& cfg) {
    Rng rng(cfg.seed);
    PipelineWeights w;
    w.feature_channels = cfg.feature_channels;
    w.embed_dim = cfg.embed_dim;
    const int patch_dim = cfg.patch.kernel * cfg.patch.kernel * cfg.feature_channels;
    fill_normal(w.enc_proj, static_cast<size_t>(kEncoderChannels) * cfg.feature_channels, rng);
    fill_normal(w.embed, static_cast<size_t>(patch_dim) * cfg.embed_dim, rng);
    fill_normal(w.unembed, static_cast<size_t>(cfg.embed_dim) * patch_dim, rng);
    fill_normal(w.dec1, static_cast<size_t>(cfg.feature_channels) * 4 * cfg.feature_channels, rng);
    fill_normal(w.dec2, static_cast<size_t>(cfg.feature_channels) * 4 * cfg.feature_channels, rng);
    fill_normal(w.dec3, static_cast<size_t>(cfg.feature_channels) * 12, rng);
    w.stack = mgst::init_stack_weights(cfg.embed_dim, cfg.heads, cfg.embed_dim * cfg.ff_mult,
                                       cfg.block_count, rng.split(1));
    return w;
}

std::vector<NamedTensor> pipeline_weights_to_tensors(const PipelineWeights& w) {
    const int cf = w.feature_channels;
    const int dim = w.embed_dim;
    const int patch_dim = static_cast<int>(w.embed.size()) / dim;
    std::vector<NamedTensor> tensors;
    tensors.push_back({"enc.proj", {kEncoderChannels, cf}, w.enc_proj});
    tensors.push_back({"embed", {patch_dim, dim}, w.embed});
    tensors.push_back({"unembed", {dim, patch_dim}, w.unembed});
    tensors.push_back({"dec.0", {cf, 4 * cf}, w.dec1});
    tensors.push_back({"dec.1", {cf, 4 * cf}, w.dec2});
    tensors.push_back({"dec.2", {cf, 12}, w.dec3});
    for (size_t b = 0; b < w.stack.blocks.size(); ++b) {
        const mgst::BlockWeights& block = w.stack.blocks[b];
        const std::string prefix = "block" + std::to_string(b) + ".";
        tensors.push_back({prefix + "wq", {dim, dim}, block.wq});
        tensors.push_back({prefix + "wk", {dim, dim}, block.wk});
        tensors.push_back({prefix + "wv", {dim, dim}, block.wv});
        tensors.push_back({prefix + "wo", {dim, dim}, block.wo});
        tensors.push_back({prefix + "ff1", {dim, w.stack.ff_dim}, block.ff1});
        tensors.push_back({prefix + "ff2", {w.stack.ff_dim, dim}, block.ff2});
    }
    return tensors;
}

PipelineWeights pipeline_weights_from_tensors(const std::vector<NamedTensor>& tensors,
                                              const ForwardConfig& cfg) {
    auto find = [&](const std::string& name, const std::vector<int>& shape) -> const NamedTensor& {
        for (const NamedTensor& t : tensors)
            if (t.name == name) {
                if (t.shape != shape)
                    throw std::runtime_error("weight tensor " + name + " has unexpected shape");
                return t;
            }
        throw std::runtime_error("weight tensor " + name + " missing");
    };

    PipelineWeights w;
    w.feature_channels = cfg.feature_channels;
    w.embed_dim = cfg.embed_dim;
    const int cf = cfg.feature_channels;
    const int dim = cfg.embed_dim;
    const int patch_dim = cfg.patch.kernel * cfg.patch.kernel * cf;
    w.enc_proj = find("enc.proj", {kEncoderChannels, cf}).data;
    w.embed = find("embed", {patch_dim, dim}).data;
    w.unembed = find("unembed", {dim, patch_dim}).data;
    w.dec1 = find("dec.0", {cf, 4 * cf}).data;
    w.dec2 = find("dec.1", {cf, 4 * cf}).data;
    w.dec3 = find("dec.2", {cf, 12}).data;
    w.stack.dim = dim;
    w.stack.heads = cfg.heads;
    w.stack.ff_dim = dim * cfg.ff_mult;
    for (int b = 0; b < cfg.block_count; ++b) {
        const std::string prefix = "block" + std::to_string(b) + ".";
        mgst::BlockWeights block;
        block.wq = find(prefix + "wq", {dim, dim}).data;
        block.wk = find(prefix + "wk", {dim, dim}).data;
        block.wv = find(prefix + "wv", {dim, dim}).data;
        block.wo = find(prefix + "wo", {dim, dim}).data;
        block.ff1 = find(prefix + "ff1", {dim, w.stack.ff_dim}).data;
        block.ff2 = find(prefix + "ff2", {w.stack.ff_dim, dim}).data;
        w.stack.blocks.push_back(std::move(block));
    }
    return w;
}

ForwardResult mgst_forward(const FrameSequence& frames, const MaskSequence& masks,
                           const DepthSequence& depth, const BlurMapSequence& maps,
                           const ForwardConfig& cfg, const PipelineWeights& weights) {
    const int total = frames.length();
    if (total < 1) throw std::invalid_argument("mgst_forward: empty clip");
    if (masks.length() != total || depth.length() != total || maps.length() != total)
        throw std::invalid_argument("mgst_forward: sequence length mismatch");
    const int height = frames.height();
    const int width = frames.width();
    const int ds = cfg.encoder_downsample;
    if (height % ds != 0 || width % ds != 0)
        throw std::invalid_argument("mgst_forward: dimensions must divide the encoder factor");
    const int fh = height / ds;
    const int fw = width / ds;

    // Encode: fuse rgb + mask + depth + blur map, downsample, project.
    std::vector<Image> features(total);
    for (int t = 0; t < total; ++t) {
        Image fused(fh, fw, kEncoderChannels);
        const Image rgb = resize_bicubic(frames.frames[t], fh, fw);
        const Image msk = resize_nearest(masks.masks[t], fh, fw);
        const Image dep = resize_bicubic(depth.maps[t], fh, fw);
        const Image blur = resize_nearest(maps.maps[t], fh, fw);
        for (int y = 0; y < fh; ++y)
            for (int x = 0; x < fw; ++x) {
                fused.at(y, x, 0) = rgb.at(y, x, 0);
                fused.at(y, x, 1) = rgb.at(y, x, 1);
                fused.at(y, x, 2) = rgb.at(y, x, 2);
                fused.at(y, x, 3) = msk.at(y, x);
                fused.at(y, x, 4) = static_cast<float>(dep.at(y, x) / 255.0);
                fused.at(y, x, 5) = static_cast<float>(blur.at(y, x) / kBlurMapScale);
            }
        features[t] = apply_linear(fused, weights.enc_proj, cfg.feature_channels);
    }

    ForwardResult result;
    result.query_mask = mgst::build_query_mask(maps, fh, fw, cfg.patch);

    mgst::PatchGrid raw = mgst::soft_split(features, cfg.patch);
    mgst::PatchGrid grid = project_grid(raw, weights.embed, cfg.embed_dim);
    result.block_stats = mgst::block_stack_forward(grid, result.query_mask, weights.stack);
    for (const mgst::AttentionStats& s : result.block_stats) {
        result.active_windows += s.active_windows;
        result.skipped_windows += s.skipped_windows;
        result.max_softmax_row_error = std::max(result.max_softmax_row_error,
                                                s.max_softmax_row_error);
    }
    mgst::PatchGrid back = project_grid(grid, weights.unembed, raw.channels);
    const std::vector<Image> decoded = mgst::soft_comp(back, fh, fw, cfg.patch);

    // Decode: three linear + pixel-shuffle cascades, x8 from feature space.
    for (const Image& feat : decoded) {
        Image stage = mgst::pixel_shuffle(apply_linear(feat, weights.dec1, 4 * cfg.feature_channels), 2);
        stage = mgst::pixel_shuffle(apply_linear(stage, weights.dec2, 4 * cfg.feature_channels), 2);
        stage = mgst::pixel_shuffle(apply_linear(stage, weights.dec3, 12), 2);
        for (size_t i = 0; i < stage.size(); ++i)
            stage.data()[i] = std::clamp(stage.data()[i], 0.0f, 1.0f);
        result.output.frames.push_back(std::move(stage));
    }
    return result;
}

namespace {

BlurMapSequence all_ones_maps(int count, int height, int width) {
    BlurMapSequence maps;
    for (int t = 0; t < count; ++t) maps.maps.emplace_back(height, width, 1, 1.0f);
    return maps;
}

MaskSequence all_ones_masks(int count, int height, int width) {
    MaskSequence masks;
    for (int t = 0; t < count; ++t) masks.masks.emplace_back(height, width, 1, 1.0f);
    return masks;
}

}  // namespace

AblationReport run_ablation(const FrameSequence& degraded, const FrameSequence& ground_truth,
                            const MaskSequence& masks, const DepthSequence& depth,
                            const BlurMapSequence& maps, const FlowSequence& flow_fwd,
                            const FlowSequence& flow_bwd, const ForwardConfig& cfg,
                            double consistency_threshold, int jobs) {
    const int total = degraded.length();
    const int height = degraded.height();
    const int width = degraded.width();

    const PipelineWeights weights = init_pipeline_weights(cfg);

    struct Setup {
        std::string name;
        bool propagation;
        bool real_maps;
    };
    const Setup setups[] = {
        {"w/o propagation or blur maps", false, false},
        {"w/o blur maps", true, false},
        {"w/o propagation", false, true},
        {"full", true, true},
    };

    AblationReport report;
    for (const Setup& setup : setups) {
        const BlurMapSequence row_maps =
            setup.real_maps ? maps : all_ones_maps(total, height, width);
        const MaskSequence row_masks =
            setup.real_maps ? masks : all_ones_masks(total, height, width);

        FrameSequence restored = degraded;
        if (setup.propagation) {
            const FlowCompletionResult completed_fwd =
                complete_flows(flow_fwd, row_masks, 1e-4, 500);
            const FlowCompletionResult completed_bwd =
                complete_flows(flow_bwd, row_masks, 1e-4, 500);
            restored = propagate(degraded, row_masks, completed_fwd.flows, completed_bwd.flows,
                                 consistency_threshold, jobs)
                           .frames;
        }

        AblationRow row;
        row.name = setup.name;
        row.propagation = setup.propagation;
        row.real_blur_maps = setup.real_maps;

        // Restoration quality in the ground-truth blurred regions.
        double psnr_sum = 0.0, ssim_sum = 0.0;
        for (int t = 0; t < total; ++t) {
            psnr_sum += psnr_masked(restored.frames[t], ground_truth.frames[t], masks.masks[t]);
            ssim_sum += ssim_masked(restored.frames[t], ground_truth.frames[t], masks.masks[t]);
        }
        row.masked_psnr = psnr_sum / total;
        row.masked_ssim = ssim_sum / total;
        row.masked_tof = total >= 2 ? tof_masked(restored, ground_truth, masks, jobs) : 0.0;

        const ForwardResult forward =
            mgst_forward(restored, row_masks, depth, row_maps, cfg, weights);
        row.active_windows = forward.active_windows;
        row.skipped_windows = forward.skipped_windows;
        report.rows.push_back(std::move(row));
    }
    return report;
}

std::string ablation_report_to_json(const AblationReport& report) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const AblationRow& r : report.rows)
        rows.push_back({{"experiment", r.name},
                        {"propagation", r.propagation},
                        {"real_blur_maps", r.real_blur_maps},
                        {"masked_psnr", r.masked_psnr},
                        {"masked_ssim", r.masked_ssim},
                        {"masked_tof", r.masked_tof},
                        {"active_windows", r.active_windows},
                        {"skipped_windows", r.skipped_windows}});
    nlohmann::ordered_json j;
    j["rows"] = rows;
    return j.dump(2) + "\n";
}

std::string ablation_report_to_text(const AblationReport& report) {
    std::ostringstream out;
    out << "experiment                        PSNR_m   SSIM_m    tOF_m   active  skipped\n";
    char line[160];
    for (const AblationRow& r : report.rows) {
        std::snprintf(line, sizeof(line), "%-30s  %7.3f  %7.4f  %7.4f  %7ld  %7ld\n",
                      r.name.c_str(), r.masked_psnr, r.masked_ssim, r.masked_tof,
                      r.active_windows, r.skipped_windows);
        out << line;
    }
    return out.str();
}

}  // namespace dabit
