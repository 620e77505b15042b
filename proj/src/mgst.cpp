#include "dabit/mgst.hpp"

#include <algorithm>
#include <cmath>

namespace dabit::mgst {

PatchGrid soft_split(const std::vector<Image>& features, const PatchGeometry& geom) {
    if (features.empty())
        throw std::invalid_argument("soft_split: empty feature sequence");
    const int height = features.front().height();
    const int width = features.front().width();
    const int channels = features.front().channels();
    const int m = geom.tokens_along(height);
    const int n = geom.tokens_along(width);
    if (m < 1 || n < 1)
        throw std::invalid_argument("soft_split: feature map too small for patch geometry");

    PatchGrid grid(static_cast<int>(features.size()), m, n,
                   geom.kernel * geom.kernel * channels);
    for (size_t t = 0; t < features.size(); ++t) {
        const Image& f = features[t];
        if (f.height() != height || f.width() != width || f.channels() != channels)
            throw std::invalid_argument("soft_split: mixed feature dimensions");
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < n; ++j) {
                float* token = grid.token(static_cast<int>(t), i, j);
                int slot = 0;
                for (int ky = 0; ky < geom.kernel; ++ky)
                    for (int kx = 0; kx < geom.kernel; ++kx) {
                        const int y = i * geom.stride - geom.padding + ky;
                        const int x = j * geom.stride - geom.padding + kx;
                        for (int c = 0; c < channels; ++c, ++slot)
                            token[slot] = (y >= 0 && y < height && x >= 0 && x < width)
                                              ? f.at(y, x, c)
                                              : 0.0f;
                    }
            }
    }
    return grid;
}

std::vector<Image> soft_comp(const PatchGrid& grid, int height, int width,
                             const PatchGeometry& geom) {
    const int patch_area = geom.kernel * geom.kernel;
    if (grid.channels % patch_area != 0)
        throw std::invalid_argument("soft_comp: token channels do not match patch geometry");
    const int channels = grid.channels / patch_area;
    if (grid.rows != geom.tokens_along(height) || grid.cols != geom.tokens_along(width))
        throw std::invalid_argument("soft_comp: grid does not match target dimensions");

    std::vector<Image> features;
    std::vector<double> acc(static_cast<size_t>(height) * width * channels);
    std::vector<double> count(static_cast<size_t>(height) * width);
    for (int t = 0; t < grid.frames; ++t) {
        std::fill(acc.begin(), acc.end(), 0.0);
        std::fill(count.begin(), count.end(), 0.0);
        for (int i = 0; i < grid.rows; ++i)
            for (int j = 0; j < grid.cols; ++j) {
                const float* token = grid.token(t, i, j);
                int slot = 0;
                for (int ky = 0; ky < geom.kernel; ++ky)
                    for (int kx = 0; kx < geom.kernel; ++kx) {
                        const int y = i * geom.stride - geom.padding + ky;
                        const int x = j * geom.stride - geom.padding + kx;
                        if (y < 0 || y >= height || x < 0 || x >= width) {
                            slot += channels;
                            continue;
                        }
                        const size_t p = static_cast<size_t>(y) * width + x;
                        for (int c = 0; c < channels; ++c, ++slot)
                            acc[p * channels + c] += token[slot];
                        count[p] += 1.0;
                    }
            }
        Image f(height, width, channels);
        for (int y = 0; y < height; ++y)
            for (int x = 0; x < width; ++x) {
                const size_t p = static_cast<size_t>(y) * width + x;
                for (int c = 0; c < channels; ++c)
                    f.at(y, x, c) = count[p] > 0.0
                                        ? static_cast<float>(acc[p * channels + c] / count[p])
                                        : 0.0f;
            }
        features.push_back(std::move(f));
    }
    return features;
}

Image build_query_mask(const BlurMapSequence& maps, int feature_height, int feature_width,
                       const PatchGeometry& geom) {
    if (maps.length() < 1)
        throw std::invalid_argument("build_query_mask: empty map sequence");
    const int map_h = maps.height();
    const int map_w = maps.width();
    const int m = geom.tokens_along(feature_height);
    const int n = geom.tokens_along(feature_width);
    const double scale_y = static_cast<double>(map_h) / feature_height;
    const double scale_x = static_cast<double>(map_w) / feature_width;

    Image mask(m, n, 1);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) {
            // token footprint in feature space, clamped to the map
            const int fy0 = std::max(0, i * geom.stride - geom.padding);
            const int fy1 = std::min(feature_height, i * geom.stride - geom.padding + geom.kernel);
            const int fx0 = std::max(0, j * geom.stride - geom.padding);
            const int fx1 = std::min(feature_width, j * geom.stride - geom.padding + geom.kernel);
            const int y0 = static_cast<int>(std::floor(fy0 * scale_y));
            const int y1 = std::min(map_h, static_cast<int>(std::ceil(fy1 * scale_y)));
            const int x0 = static_cast<int>(std::floor(fx0 * scale_x));
            const int x1 = std::min(map_w, static_cast<int>(std::ceil(fx1 * scale_x)));
            float peak = 0.0f;
            for (const Image& map : maps.maps)
                for (int y = y0; y < y1; ++y)
                    for (int x = x0; x < x1; ++x)
                        peak = std::max(peak, map.at(y, x));
            mask.at(i, j) = peak;
        }
    return mask;
}

std::vector<WindowSpec> partition_windows(int grid_rows, int grid_cols, int window_rows,
                                          int window_cols, int expand_rows, int expand_cols) {
    std::vector<WindowSpec> windows;
    for (int r = 0; r < grid_rows; r += window_rows)
        for (int c = 0; c < grid_cols; c += window_cols) {
            WindowSpec w;
            w.row0 = r;
            w.col0 = c;
            w.rows = std::min(window_rows, grid_rows - r);
            w.cols = std::min(window_cols, grid_cols - c);
            w.krow0 = std::max(0, r - expand_rows);
            w.kcol0 = std::max(0, c - expand_cols);
            w.krows = std::min(grid_rows, r + w.rows + expand_rows) - w.krow0;
            w.kcols = std::min(grid_cols, c + w.cols + expand_cols) - w.kcol0;
            windows.push_back(w);
        }
    return windows;
}

std::vector<int> select_kv_frames(int total_frames, int block_index) {
    if (total_frames < 1)
        throw std::invalid_argument("select_kv_frames: need at least one frame");
    if (block_index < 0)
        throw std::invalid_argument("select_kv_frames: negative block index");
    std::vector<int> frames;
    for (int t = block_index % 2; t < total_frames; t += 2) frames.push_back(t);
    if (frames.empty()) frames.push_back(0);
    return frames;
}

StackWeights init_stack_weights(int dim, int heads, int ff_dim, int block_count, Rng rng) {
    if (dim % heads != 0)
        throw std::invalid_argument("init_stack_weights: dim must divide evenly into heads");
    StackWeights w;
    w.dim = dim;
    w.heads = heads;
    w.ff_dim = ff_dim;
    auto fill = [&rng](std::vector<float>& v, size_t n) {
        v.resize(n);
        for (float& x : v) x = static_cast<float>(rng.normal() * 0.02);
    };
    for (int b = 0; b < block_count; ++b) {
        BlockWeights block;
        fill(block.wq, static_cast<size_t>(dim) * dim);
        fill(block.wk, static_cast<size_t>(dim) * dim);
        fill(block.wv, static_cast<size_t>(dim) * dim);
        fill(block.wo, static_cast<size_t>(dim) * dim);
        fill(block.ff1, static_cast<size_t>(dim) * ff_dim);
        fill(block.ff2, static_cast<size_t>(ff_dim) * dim);
        w.blocks.push_back(std::move(block));
    }
    return w;
}

namespace {

double gelu(double x) { return 0.5 * x * (1.0 + std::erf(x / std::sqrt(2.0))); }

// rows x dim times dim x cols, double accumulation.
void matmul(const std::vector<double>& a, int rows, int inner, const std::vector<float>& b,
            int cols, std::vector<double>& out) {
    out.assign(static_cast<size_t>(rows) * cols, 0.0);
    for (int i = 0; i < rows; ++i)
        for (int k = 0; k < inner; ++k) {
            const double av = a[static_cast<size_t>(i) * inner + k];
            if (av == 0.0) continue;
            const float* brow = b.data() + static_cast<size_t>(k) * cols;
            double* orow = out.data() + static_cast<size_t>(i) * cols;
            for (int j = 0; j < cols; ++j) orow[j] += av * brow[j];
        }
}

}  // namespace

void attention_forward(PatchGrid& grid, const Image& query_mask, const BlockWeights& weights,
                       int heads, int block_index, AttentionStats* stats) {
    if (query_mask.height() != grid.rows || query_mask.width() != grid.cols)
        throw std::invalid_argument("attention_forward: query mask does not match token grid");
    const int dim = grid.channels;
    if (dim % heads != 0)
        throw std::invalid_argument("attention_forward: dim must divide evenly into heads");
    const int head_dim = dim / heads;
    const double scale = 1.0 / std::sqrt(static_cast<double>(head_dim));

    const std::vector<int> kv_frames = select_kv_frames(grid.frames, block_index);
    if (stats) stats->kv_frame_count = static_cast<int>(kv_frames.size());

    // One mean-pooled global token per key/value frame.
    std::vector<double> global_tokens(kv_frames.size() * dim, 0.0);
    for (size_t g = 0; g < kv_frames.size(); ++g) {
        const int t = kv_frames[g];
        for (int i = 0; i < grid.rows; ++i)
            for (int j = 0; j < grid.cols; ++j) {
                const float* tok = grid.token(t, i, j);
                for (int c = 0; c < dim; ++c) global_tokens[g * dim + c] += tok[c];
            }
        const double inv = 1.0 / (static_cast<double>(grid.rows) * grid.cols);
        for (int c = 0; c < dim; ++c) global_tokens[g * dim + c] *= inv;
    }

    for (const WindowSpec& w : partition_windows(grid.rows, grid.cols)) {
        bool active = false;
        for (int i = w.row0; i < w.row0 + w.rows && !active; ++i)
            for (int j = w.col0; j < w.col0 + w.cols; ++j)
                if (query_mask.at(i, j) != 0.0f) {
                    active = true;
                    break;
                }
        if (!active) {
            if (stats) stats->skipped_windows++;
            continue;
        }
        if (stats) stats->active_windows++;

        const int q_count = grid.frames * w.rows * w.cols;
        const int kv_count = static_cast<int>(kv_frames.size()) * (w.krows * w.kcols + 1);

        // Gather queries with the scalar query-mask bias added pre-projection.
        std::vector<double> q_in(static_cast<size_t>(q_count) * dim);
        {
            int row = 0;
            for (int t = 0; t < grid.frames; ++t)
                for (int i = w.row0; i < w.row0 + w.rows; ++i)
                    for (int j = w.col0; j < w.col0 + w.cols; ++j, ++row) {
                        const float* tok = grid.token(t, i, j);
                        const double bias = query_mask.at(i, j);
                        for (int c = 0; c < dim; ++c)
                            q_in[static_cast<size_t>(row) * dim + c] = tok[c] + bias;
                    }
        }

        std::vector<double> kv_in(static_cast<size_t>(kv_count) * dim);
        {
            int row = 0;
            for (size_t g = 0; g < kv_frames.size(); ++g) {
                const int t = kv_frames[g];
                for (int i = w.krow0; i < w.krow0 + w.krows; ++i)
                    for (int j = w.kcol0; j < w.kcol0 + w.kcols; ++j, ++row) {
                        const float* tok = grid.token(t, i, j);
                        for (int c = 0; c < dim; ++c)
                            kv_in[static_cast<size_t>(row) * dim + c] = tok[c];
                    }
                for (int c = 0; c < dim; ++c)
                    kv_in[static_cast<size_t>(row) * dim + c] = global_tokens[g * dim + c];
                ++row;
            }
        }

        std::vector<double> q_proj, k_proj, v_proj;
        matmul(q_in, q_count, dim, weights.wq, dim, q_proj);
        matmul(kv_in, kv_count, dim, weights.wk, dim, k_proj);
        matmul(kv_in, kv_count, dim, weights.wv, dim, v_proj);

        std::vector<double> attn_out(static_cast<size_t>(q_count) * dim, 0.0);
        std::vector<double> scores(kv_count);
        for (int h = 0; h < heads; ++h) {
            const int off = h * head_dim;
            for (int qi = 0; qi < q_count; ++qi) {
                const double* qrow = q_proj.data() + static_cast<size_t>(qi) * dim + off;
                double peak = -1e300;
                for (int ki = 0; ki < kv_count; ++ki) {
                    const double* krow = k_proj.data() + static_cast<size_t>(ki) * dim + off;
                    double dot = 0.0;
                    for (int c = 0; c < head_dim; ++c) dot += qrow[c] * krow[c];
                    scores[ki] = dot * scale;
                    peak = std::max(peak, scores[ki]);
                }
                double denom = 0.0;
                for (int ki = 0; ki < kv_count; ++ki) {
                    scores[ki] = std::exp(scores[ki] - peak);
                    denom += scores[ki];
                }
                double row_sum = 0.0;
                double* orow = attn_out.data() + static_cast<size_t>(qi) * dim + off;
                for (int ki = 0; ki < kv_count; ++ki) {
                    const double weight = scores[ki] / denom;
                    row_sum += weight;
                    const double* vrow = v_proj.data() + static_cast<size_t>(ki) * dim + off;
                    for (int c = 0; c < head_dim; ++c) orow[c] += weight * vrow[c];
                }
                if (stats)
                    stats->max_softmax_row_error =
                        std::max(stats->max_softmax_row_error, std::fabs(row_sum - 1.0));
            }
        }

        std::vector<double> projected;
        matmul(attn_out, q_count, dim, weights.wo, dim, projected);

        // Residual attention update, then the feed-forward residual.
        std::vector<double> x(static_cast<size_t>(q_count) * dim);
        {
            int row = 0;
            for (int t = 0; t < grid.frames; ++t)
                for (int i = w.row0; i < w.row0 + w.rows; ++i)
                    for (int j = w.col0; j < w.col0 + w.cols; ++j, ++row) {
                        const float* tok = grid.token(t, i, j);
                        for (int c = 0; c < dim; ++c)
                            x[static_cast<size_t>(row) * dim + c] =
                                tok[c] + projected[static_cast<size_t>(row) * dim + c];
                    }
        }
        std::vector<double> hidden, ff_out;
        matmul(x, q_count, dim, weights.ff1, static_cast<int>(weights.ff1.size()) / dim, hidden);
        const int ff_dim = static_cast<int>(weights.ff1.size()) / dim;
        for (double& v : hidden) v = gelu(v);
        matmul(hidden, q_count, ff_dim, weights.ff2, dim, ff_out);

        {
            int row = 0;
            for (int t = 0; t < grid.frames; ++t)
                for (int i = w.row0; i < w.row0 + w.rows; ++i)
                    for (int j = w.col0; j < w.col0 + w.cols; ++j, ++row) {
                        float* tok = grid.token(t, i, j);
                        for (int c = 0; c < dim; ++c)
                            tok[c] = static_cast<float>(x[static_cast<size_t>(row) * dim + c] +
                                                        ff_out[static_cast<size_t>(row) * dim + c]);
                    }
        }
    }
}

std::vector<AttentionStats> block_stack_forward(PatchGrid& grid, const Image& query_mask,
                                                const StackWeights& weights) {
    if (grid.channels != weights.dim)
        throw std::invalid_argument("block_stack_forward: token dim does not match weights");
    std::vector<AttentionStats> stats(weights.blocks.size());
    for (size_t b = 0; b < weights.blocks.size(); ++b)
        attention_forward(grid, query_mask, weights.blocks[b], weights.heads,
                          static_cast<int>(b), &stats[b]);
    return stats;
}

Image pixel_shuffle(const Image& input, int scale) {
    if (scale < 1)
        throw std::invalid_argument("pixel_shuffle: scale must be >= 1");
    if (input.channels() % (scale * scale) != 0)
        throw std::invalid_argument("pixel_shuffle: channels not divisible by scale^2");
    const int out_c = input.channels() / (scale * scale);
    Image out(input.height() * scale, input.width() * scale, out_c);
    for (int y = 0; y < input.height(); ++y)
        for (int x = 0; x < input.width(); ++x)
            for (int c = 0; c < out_c; ++c)
                for (int dy = 0; dy < scale; ++dy)
                    for (int dx = 0; dx < scale; ++dx)
                        out.at(y * scale + dy, x * scale + dx, c) =
                            input.at(y, x, c * scale * scale + dy * scale + dx);
    return out;
}

Image pixel_unshuffle(const Image& input, int scale) {
    if (scale < 1)
        throw std::invalid_argument("pixel_unshuffle: scale must be >= 1");
    if (input.height() % scale != 0 || input.width() % scale != 0)
        throw std::invalid_argument("pixel_unshuffle: dimensions not divisible by scale");
    const int out_c = input.channels() * scale * scale;
    Image out(input.height() / scale, input.width() / scale, out_c);
    for (int y = 0; y < out.height(); ++y)
        for (int x = 0; x < out.width(); ++x)
            for (int c = 0; c < input.channels(); ++c)
                for (int dy = 0; dy < scale; ++dy)
                    for (int dx = 0; dx < scale; ++dx)
                        out.at(y, x, c * scale * scale + dy * scale + dx) =
                            input.at(y * scale + dy, x * scale + dx, c);
    return out;
}

}  // namespace dabit::mgst
