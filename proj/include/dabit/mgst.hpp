#pragma once

#include <cstdint>
#include <vector>

#include "dabit/image.hpp"
#include "dabit/rng.hpp"

namespace dabit::mgst {

// Overlapping patch geometry used by soft split / soft composite.
struct PatchGeometry {
    int kernel = 7;
    int stride = 3;
    int padding = 3;

    int tokens_along(int extent) const { return (extent + 2 * padding - kernel) / stride + 1; }
};

// T x m x n token grid with C values per token.
struct PatchGrid {
    int frames = 0, rows = 0, cols = 0, channels = 0;
    std::vector<float> tokens;

    PatchGrid() = default;
    PatchGrid(int t, int m, int n, int c)
        : frames(t), rows(m), cols(n), channels(c),
          tokens(static_cast<size_t>(t) * m * n * c, 0.0f) {}

    float& at(int t, int i, int j, int c) {
        return tokens[((static_cast<size_t>(t) * rows + i) * cols + j) * channels + c];
    }
    float at(int t, int i, int j, int c) const {
        return tokens[((static_cast<size_t>(t) * rows + i) * cols + j) * channels + c];
    }
    float* token(int t, int i, int j) {
        return tokens.data() + ((static_cast<size_t>(t) * rows + i) * cols + j) * channels;
    }
    const float* token(int t, int i, int j) const {
        return tokens.data() + ((static_cast<size_t>(t) * rows + i) * cols + j) * channels;
    }
};

// Overlapping patch extraction: token channels are the flattened kernel x
// kernel x C patch, zero-padded outside the feature map.
PatchGrid soft_split(const std::vector<Image>& features, const PatchGeometry& geom = {});

// Inverse of soft_split: overlaps are summed and divided by the overlap
// count, so soft_comp(soft_split(x)) reproduces x up to float rounding.
std::vector<Image> soft_comp(const PatchGrid& grid, int height, int width,
                             const PatchGeometry& geom = {});

// Per-token query mask: max blur over every frame within the token's input
// footprint. Zero iff all frames are in focus there.
Image build_query_mask(const BlurMapSequence& maps, int feature_height, int feature_width,
                       const PatchGeometry& geom = {});

// Non-overlapping query window plus its expanded, border-clamped key/value
// region on the token grid.
struct WindowSpec {
    int row0 = 0, col0 = 0, rows = 0, cols = 0;      // query tokens
    int krow0 = 0, kcol0 = 0, krows = 0, kcols = 0;  // expanded kv tokens
};

std::vector<WindowSpec> partition_windows(int grid_rows, int grid_cols, int window_rows = 5,
                                          int window_cols = 9, int expand_rows = 2,
                                          int expand_cols = 4);

// Temporal stride 2: even-parity frames serve even blocks, odd-parity frames
// odd blocks; never empty.
std::vector<int> select_kv_frames(int total_frames, int block_index);

struct BlockWeights {
    std::vector<float> wq, wk, wv, wo;  // dim x dim, row-major
    std::vector<float> ff1;             // dim x ff_dim
    std::vector<float> ff2;             // ff_dim x dim
};

struct StackWeights {
    int dim = 128;
    int heads = 4;
    int ff_dim = 256;
    std::vector<BlockWeights> blocks;
};

// Seeded normal(0, 0.02) initialization, reproducible for a fixed seed.
StackWeights init_stack_weights(int dim, int heads, int ff_dim, int block_count, Rng rng);

struct AttentionStats {
    long active_windows = 0;
    long skipped_windows = 0;
    double max_softmax_row_error = 0.0;  // max |row sum - 1| over active rows
    int kv_frame_count = 0;              // frames serving keys/values this block
};

// One sparse block: windows whose query-mask values are all zero pass their
// tokens through untouched (attention and feed-forward both bypassed); active
// windows run 4-head scaled dot-product attention over stride-selected
// key/value tokens plus one mean-pooled global token per kv frame. Query-mask
// values are added to the query embedding as a scalar bias before the Q
// projection.
void attention_forward(PatchGrid& grid, const Image& query_mask, const BlockWeights& weights,
                       int heads, int block_index, AttentionStats* stats = nullptr);

// Applies the 8 (or however many) blocks sequentially with alternating
// key/value parity.
std::vector<AttentionStats> block_stack_forward(PatchGrid& grid, const Image& query_mask,
                                                const StackWeights& weights);

// Channel-to-space rearrangement:
// out(y*s+dy, x*s+dx, c) = in(y, x, c*s*s + dy*s + dx).
Image pixel_shuffle(const Image& input, int scale);
Image pixel_unshuffle(const Image& input, int scale);

}  // namespace dabit::mgst
