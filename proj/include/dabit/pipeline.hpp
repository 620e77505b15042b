#pragma once

#include <optional>
#include <string>

#include "dabit/flow_ops.hpp"
#include "dabit/image.hpp"
#include "dabit/mgst.hpp"
#include "dabit/weights_io.hpp"

namespace dabit {

// Forward-pass configuration around the sparse blocks. The learned encoder
// and decoder are replaced by fixed resampling plus seeded linear
// projections; only the interfaces and shape contracts are preserved.
struct ForwardConfig {
    int encoder_downsample = 4;
    int feature_channels = 16;
    int embed_dim = 128;
    int heads = 4;
    int block_count = 8;
    int ff_mult = 2;
    int temporal_stride = 2;
    mgst::PatchGeometry patch;
    uint64_t seed = 0;
};

struct PipelineWeights {
    int feature_channels = 0;
    int embed_dim = 0;
    std::vector<float> enc_proj;          // 6 x C_f
    std::vector<float> embed;             // (k*k*C_f) x D
    std::vector<float> unembed;           // D x (k*k*C_f)
    std::vector<float> dec1, dec2, dec3;  // C_f x 4C_f, C_f x 4C_f, C_f x 12
    mgst::StackWeights stack;
};

PipelineWeights init_pipeline_weights(const ForwardConfig& cfg);
std::vector<NamedTensor> pipeline_weights_to_tensors(const PipelineWeights& weights);
PipelineWeights pipeline_weights_from_tensors(const std::vector<NamedTensor>& tensors,
                                              const ForwardConfig& cfg);

struct ForwardResult {
    FrameSequence output;  // T x 2H x 2W x 3
    Image query_mask;      // token-grid blur gating values
    std::vector<mgst::AttentionStats> block_stats;
    long active_windows = 0;
    long skipped_windows = 0;
    double max_softmax_row_error = 0.0;
};

// Encode (stack frame/mask/depth/blur channels, downsample, project), run the
// block stack, decode, and upscale 2x via cascaded pixel shuffles. Inputs are
// the low-resolution clip; propagation, when wanted, runs beforehand.
ForwardResult mgst_forward(const FrameSequence& frames, const MaskSequence& masks,
                           const DepthSequence& depth, const BlurMapSequence& maps,
                           const ForwardConfig& cfg, const PipelineWeights& weights);

struct AblationRow {
    std::string name;
    bool propagation = false;
    bool real_blur_maps = false;
    double masked_psnr = 0.0;
    double masked_ssim = 0.0;
    double masked_tof = 0.0;
    long active_windows = 0;
    long skipped_windows = 0;
};

struct AblationReport {
    std::vector<AblationRow> rows;
};

// Four-way experiment over {propagation on/off} x {real blur maps vs all-ones}.
// Restoration metrics are computed on the propagated (or untouched) frames in
// the ground-truth masked regions; the sparse-block stats come from a forward
// pass with the row's blur maps. With all-ones maps the masks passed to
// propagation are also all-ones, mirroring "everything is blurred".
AblationReport run_ablation(const FrameSequence& degraded, const FrameSequence& ground_truth,
                            const MaskSequence& masks, const DepthSequence& depth,
                            const BlurMapSequence& maps, const FlowSequence& flow_fwd,
                            const FlowSequence& flow_bwd, const ForwardConfig& cfg,
                            double consistency_threshold = 1.0, int jobs = 1);

std::string ablation_report_to_json(const AblationReport& report);
std::string ablation_report_to_text(const AblationReport& report);

}  // namespace dabit
