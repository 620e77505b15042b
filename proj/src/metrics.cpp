#include "dabit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "dabit/blur_estimate.hpp"
#include "dabit/parallel.hpp"
#include "dabit/transforms.hpp"

namespace dabit {

namespace {

void check_paired(const Image& a, const Image& b, const char* what) {
    if (!a.same_shape(b))
        throw std::invalid_argument(std::string(what) + ": dimension mismatch");
}

// Mean computed against the first element as an offset, so a list of
// identical values averages to exactly that value.
class ShiftedMean {
public:
    void add(double v) {
        if (count_ == 0) offset_ = v;
        sum_ += v - offset_;
        ++count_;
    }
    long count() const { return count_; }
    double value() const { return count_ == 0 ? 0.0 : offset_ + sum_ / count_; }

private:
    double offset_ = 0.0;
    double sum_ = 0.0;
    long count_ = 0;
};

}  // namespace

double charbonnier(const Image& pred, const Image& gt, double epsilon) {
    check_paired(pred, gt, "charbonnier");
    const double eps2 = epsilon * epsilon;
    ShiftedMean mean;
    for (size_t i = 0; i < pred.size(); ++i) {
        const double d = static_cast<double>(pred.data()[i]) - gt.data()[i];
        mean.add(std::sqrt(d * d + eps2));
    }
    return mean.value();
}

double masked_l1(const Image& pred, const Image& gt, const Image& mask) {
    check_paired(pred, gt, "masked_l1");
    if (mask.height() != pred.height() || mask.width() != pred.width() || mask.channels() != 1)
        throw std::invalid_argument("masked_l1: mask must be HxWx1 matching the images");
    ShiftedMean mean;
    for (int y = 0; y < pred.height(); ++y)
        for (int x = 0; x < pred.width(); ++x) {
            if (mask.at(y, x) == 0.0f) continue;
            for (int c = 0; c < pred.channels(); ++c)
                mean.add(std::fabs(static_cast<double>(pred.at(y, x, c)) - gt.at(y, x, c)));
        }
    return mean.value();
}

namespace {

Image inverted_mask(const Image& mask) {
    Image out(mask.height(), mask.width(), 1);
    for (size_t i = 0; i < mask.size(); ++i)
        out.data()[i] = mask.data()[i] == 0.0f ? 1.0f : 0.0f;
    return out;
}

}  // namespace

double total_loss(const Image& pred_hr, const Image& gt_hr, const Image& pred_lr,
                  const Image& gt_lr, const Image& mask_lr, const LossWeights& weights) {
    if (weights.epsilon <= 0.0)
        throw std::invalid_argument("total_loss: epsilon must be positive");
    return weights.alpha * charbonnier(pred_hr, gt_hr, weights.epsilon) +
           weights.beta * masked_l1(pred_lr, gt_lr, mask_lr) +
           weights.gamma * masked_l1(pred_lr, gt_lr, inverted_mask(mask_lr));
}

namespace {

double psnr_from_mse(double mse, double peak) {
    if (mse <= 0.0) return kPsnrCap;
    return std::min(kPsnrCap, 10.0 * std::log10(peak * peak / mse));
}

}  // namespace

double psnr(const Image& pred, const Image& gt, double peak) {
    check_paired(pred, gt, "psnr");
    ShiftedMean mse;
    for (size_t i = 0; i < pred.size(); ++i) {
        const double d = static_cast<double>(pred.data()[i]) - gt.data()[i];
        mse.add(d * d);
    }
    return psnr_from_mse(mse.value(), peak);
}

double psnr_masked(const Image& pred, const Image& gt, const Image& mask, double peak) {
    check_paired(pred, gt, "psnr_masked");
    ShiftedMean mse;
    for (int y = 0; y < pred.height(); ++y)
        for (int x = 0; x < pred.width(); ++x) {
            if (mask.at(y, x) == 0.0f) continue;
            for (int c = 0; c < pred.channels(); ++c) {
                const double d = static_cast<double>(pred.at(y, x, c)) - gt.at(y, x, c);
                mse.add(d * d);
            }
        }
    return psnr_from_mse(mse.value(), peak);
}

namespace {

constexpr int kSsimWindow = 11;
constexpr int kSsimRadius = kSsimWindow / 2;

std::vector<double> ssim_window_taps() {
    std::vector<double> taps(kSsimWindow);
    double sum = 0.0;
    for (int i = -kSsimRadius; i <= kSsimRadius; ++i) {
        taps[i + kSsimRadius] = std::exp(-(i * i) / (2.0 * 1.5 * 1.5));
        sum += taps[i + kSsimRadius];
    }
    for (double& t : taps) t /= sum;
    return taps;
}

// Gaussian-weighted local mean of one channel, valid region only:
// output (H-10) x (W-10).
struct LocalStats {
    int height = 0, width = 0;
    std::vector<double> mu_x, mu_y, xx, yy, xy;
};

LocalStats ssim_local_stats(const Image& a, const Image& b, int channel) {
    const std::vector<double> taps = ssim_window_taps();
    const int height = a.height();
    const int width = a.width();
    const int vw = width - 2 * kSsimRadius;
    const int vh = height - 2 * kSsimRadius;

    // horizontal pass over the 5 products
    std::vector<double> hx(static_cast<size_t>(height) * vw), hy(hx.size()), hxx(hx.size()),
        hyy(hx.size()), hxy(hx.size());
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < vw; ++x) {
            double sx = 0.0, sy = 0.0, sxx = 0.0, syy = 0.0, sxy = 0.0;
            for (int k = 0; k < kSsimWindow; ++k) {
                const double va = a.at(y, x + k, channel);
                const double vb = b.at(y, x + k, channel);
                const double w = taps[k];
                sx += w * va;
                sy += w * vb;
                sxx += w * va * va;
                syy += w * vb * vb;
                sxy += w * va * vb;
            }
            const size_t p = static_cast<size_t>(y) * vw + x;
            hx[p] = sx;
            hy[p] = sy;
            hxx[p] = sxx;
            hyy[p] = syy;
            hxy[p] = sxy;
        }

    LocalStats stats;
    stats.height = vh;
    stats.width = vw;
    const size_t n = static_cast<size_t>(vh) * vw;
    stats.mu_x.resize(n);
    stats.mu_y.resize(n);
    stats.xx.resize(n);
    stats.yy.resize(n);
    stats.xy.resize(n);
    for (int y = 0; y < vh; ++y)
        for (int x = 0; x < vw; ++x) {
            double sx = 0.0, sy = 0.0, sxx = 0.0, syy = 0.0, sxy = 0.0;
            for (int k = 0; k < kSsimWindow; ++k) {
                const size_t p = static_cast<size_t>(y + k) * vw + x;
                const double w = taps[k];
                sx += w * hx[p];
                sy += w * hy[p];
                sxx += w * hxx[p];
                syy += w * hyy[p];
                sxy += w * hxy[p];
            }
            const size_t p = static_cast<size_t>(y) * vw + x;
            stats.mu_x[p] = sx;
            stats.mu_y[p] = sy;
            stats.xx[p] = sxx;
            stats.yy[p] = syy;
            stats.xy[p] = sxy;
        }
    return stats;
}

double ssim_impl(const Image& pred, const Image& gt, const Image* mask) {
    check_paired(pred, gt, "ssim");
    if (pred.height() < kSsimWindow || pred.width() < kSsimWindow)
        throw std::invalid_argument("ssim: image smaller than the 11x11 window");
    constexpr double kC1 = 0.01 * 0.01;  // (K1*L)^2, L = 1
    constexpr double kC2 = 0.03 * 0.03;  // (K2*L)^2

    ShiftedMean channel_mean;
    for (int c = 0; c < pred.channels(); ++c) {
        const LocalStats s = ssim_local_stats(pred, gt, c);
        ShiftedMean mean;
        for (int y = 0; y < s.height; ++y)
            for (int x = 0; x < s.width; ++x) {
                if (mask && mask->at(y + kSsimRadius, x + kSsimRadius) == 0.0f) continue;
                const size_t p = static_cast<size_t>(y) * s.width + x;
                const double mx = s.mu_x[p];
                const double my = s.mu_y[p];
                const double var_x = s.xx[p] - mx * mx;
                const double var_y = s.yy[p] - my * my;
                const double cov = s.xy[p] - mx * my;
                const double num = (2.0 * mx * my + kC1) * (2.0 * cov + kC2);
                const double den = (mx * mx + my * my + kC1) * (var_x + var_y + kC2);
                mean.add(num / den);
            }
        if (mean.count() == 0) return 1.0;  // nothing selected
        channel_mean.add(mean.value());
    }
    return channel_mean.value();
}

}  // namespace

double ssim(const Image& pred, const Image& gt) { return ssim_impl(pred, gt, nullptr); }

double ssim_masked(const Image& pred, const Image& gt, const Image& mask) {
    return ssim_impl(pred, gt, &mask);
}

namespace {

Image box_downsample2(const Image& src) {
    const int h = src.height() / 2;
    const int w = src.width() / 2;
    Image out(h, w, src.channels());
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            for (int c = 0; c < src.channels(); ++c)
                out.at(y, x, c) = 0.25f * (src.at(2 * y, 2 * x, c) + src.at(2 * y, 2 * x + 1, c) +
                                           src.at(2 * y + 1, 2 * x, c) +
                                           src.at(2 * y + 1, 2 * x + 1, c));
    return out;
}

double block_sad(const Image& prev, const Image& next, int y0, int x0, int bh, int bw, int dy,
                 int dx) {
    double sad = 0.0;
    for (int y = y0; y < y0 + bh; ++y)
        for (int x = x0; x < x0 + bw; ++x) {
            const int sy = std::clamp(y + dy, 0, next.height() - 1);
            const int sx = std::clamp(x + dx, 0, next.width() - 1);
            sad += std::fabs(static_cast<double>(prev.at(y, x)) - next.at(sy, sx));
        }
    return sad;
}

constexpr int kBlockSize = 8;
constexpr double kMotionLambda = 0.5;  // diagonal penalty per displacement step

void match_level(const Image& prev, const Image& next, Image& flow, int radius) {
    const int height = prev.height();
    const int width = prev.width();
    for (int y0 = 0; y0 < height; y0 += kBlockSize)
        for (int x0 = 0; x0 < width; x0 += kBlockSize) {
            const int bh = std::min(kBlockSize, height - y0);
            const int bw = std::min(kBlockSize, width - x0);
            // initialize from the upscaled coarse estimate (block mean)
            double iu = 0.0, iv = 0.0;
            for (int y = y0; y < y0 + bh; ++y)
                for (int x = x0; x < x0 + bw; ++x) {
                    iu += flow.at(y, x, 0);
                    iv += flow.at(y, x, 1);
                }
            const int init_u = static_cast<int>(std::lround(iu / (bh * bw)));
            const int init_v = static_cast<int>(std::lround(iv / (bh * bw)));

            double best_cost = 0.0;
            int best_dy = 0, best_dx = 0;
            bool first = true;
            for (int dy = -radius; dy <= radius; ++dy)
                for (int dx = -radius; dx <= radius; ++dx) {
                    const double cost =
                        block_sad(prev, next, y0, x0, bh, bw, init_v + dy, init_u + dx) +
                        kMotionLambda * (std::abs(dx) + std::abs(dy));
                    if (first || cost < best_cost) {
                        best_cost = cost;
                        best_dy = dy;
                        best_dx = dx;
                        first = false;
                    }
                }
            for (int y = y0; y < y0 + bh; ++y)
                for (int x = x0; x < x0 + bw; ++x) {
                    flow.at(y, x, 0) = static_cast<float>(init_u + best_dx);
                    flow.at(y, x, 1) = static_cast<float>(init_v + best_dy);
                }
        }
}

}  // namespace

Image estimate_motion(const Image& prev_gray, const Image& next_gray) {
    check_paired(prev_gray, next_gray, "estimate_motion");
    if (prev_gray.channels() != 1)
        throw std::invalid_argument("estimate_motion: expected grayscale inputs");

    std::vector<Image> prev_pyr{prev_gray};
    std::vector<Image> next_pyr{next_gray};
    while (prev_pyr.size() < 3 && prev_pyr.back().height() >= 32 && prev_pyr.back().width() >= 32) {
        prev_pyr.push_back(box_downsample2(prev_pyr.back()));
        next_pyr.push_back(box_downsample2(next_pyr.back()));
    }

    Image flow(prev_pyr.back().height(), prev_pyr.back().width(), 2);
    for (int level = static_cast<int>(prev_pyr.size()) - 1; level >= 0; --level) {
        if (level != static_cast<int>(prev_pyr.size()) - 1) {
            Image up = resize_bilinear(flow, prev_pyr[level].height(), prev_pyr[level].width());
            for (size_t i = 0; i < up.size(); ++i) up.data()[i] *= 2.0f;
            flow = std::move(up);
        }
        const int radius = level == static_cast<int>(prev_pyr.size()) - 1 ? 4 : 2;
        match_level(prev_pyr[level], next_pyr[level], flow, radius);
    }
    return flow;
}

namespace {

double tof_impl(const FrameSequence& pred, const FrameSequence& gt, const MaskSequence* masks,
                int jobs) {
    if (pred.length() != gt.length())
        throw std::invalid_argument("tof: sequence length mismatch");
    if (pred.length() < 2)
        throw std::invalid_argument("tof: need at least two frames");

    const int pairs = pred.length() - 1;
    std::vector<Image> pred_flows(pairs), gt_flows(pairs);
    parallel_for(0, pairs, jobs, [&](int t) {
        pred_flows[t] = estimate_motion(luma(pred.frames[t]), luma(pred.frames[t + 1]));
        gt_flows[t] = estimate_motion(luma(gt.frames[t]), luma(gt.frames[t + 1]));
    });

    ShiftedMean mean;
    for (int t = 0; t < pairs; ++t) {
        const Image& fp = pred_flows[t];
        const Image& fg = gt_flows[t];
        for (int y = 0; y < fp.height(); ++y)
            for (int x = 0; x < fp.width(); ++x) {
                if (masks && masks->masks[t].at(y, x) == 0.0f) continue;
                mean.add(std::fabs(static_cast<double>(fp.at(y, x, 0)) - fg.at(y, x, 0)) +
                         std::fabs(static_cast<double>(fp.at(y, x, 1)) - fg.at(y, x, 1)));
            }
    }
    return mean.value();
}

}  // namespace

double tof(const FrameSequence& pred, const FrameSequence& gt, int jobs) {
    return tof_impl(pred, gt, nullptr, jobs);
}

double tof_masked(const FrameSequence& pred, const FrameSequence& gt, const MaskSequence& masks,
                  int jobs) {
    if (masks.length() != pred.length())
        throw std::invalid_argument("tof_masked: mask count mismatch");
    return tof_impl(pred, gt, &masks, jobs);
}

MetricReport evaluate_sequences(const FrameSequence& pred, const FrameSequence& gt, int jobs) {
    if (pred.length() != gt.length())
        throw std::invalid_argument("evaluate_sequences: sequence length mismatch");
    MetricReport report;
    report.psnr.resize(pred.length());
    report.ssim.resize(pred.length());
    parallel_for(0, pred.length(), jobs, [&](int t) {
        report.psnr[t] = psnr(pred.frames[t], gt.frames[t]);
        report.ssim[t] = ssim(pred.frames[t], gt.frames[t]);
    });
    if (pred.length() >= 2) {
        const int pairs = pred.length() - 1;
        report.tof_pairs.resize(pairs);
        parallel_for(0, pairs, jobs, [&](int t) {
            FrameSequence p2{{pred.frames[t], pred.frames[t + 1]}};
            FrameSequence g2{{gt.frames[t], gt.frames[t + 1]}};
            report.tof_pairs[t] = tof(p2, g2, 1);
        });
    }

    ShiftedMean mp, ms, mt;
    for (double v : report.psnr) mp.add(v);
    for (double v : report.ssim) ms.add(v);
    for (double v : report.tof_pairs) mt.add(v);
    report.mean_psnr = mp.value();
    report.mean_ssim = ms.value();
    report.mean_tof = mt.value();
    return report;
}

std::string metric_report_to_json(const MetricReport& report) {
    nlohmann::ordered_json j;
    j["per_frame"] = {{"psnr", report.psnr}, {"ssim", report.ssim}};
    j["per_pair"] = {{"tof", report.tof_pairs}};
    j["mean"] = {{"psnr", report.mean_psnr}, {"ssim", report.mean_ssim}, {"tof", report.mean_tof}};
    return j.dump(2) + "\n";
}

std::string metric_report_to_text(const MetricReport& report) {
    std::ostringstream out;
    char line[128];
    out << "frame      PSNR     SSIM      tOF\n";
    for (size_t t = 0; t < report.psnr.size(); ++t) {
        if (t < report.tof_pairs.size())
            std::snprintf(line, sizeof(line), "%5zu  %8.3f  %7.4f  %7.4f\n", t, report.psnr[t],
                          report.ssim[t], report.tof_pairs[t]);
        else
            std::snprintf(line, sizeof(line), "%5zu  %8.3f  %7.4f        -\n", t, report.psnr[t],
                          report.ssim[t]);
        out << line;
    }
    std::snprintf(line, sizeof(line), " mean  %8.3f  %7.4f  %7.4f\n", report.mean_psnr,
                  report.mean_ssim, report.mean_tof);
    out << line;
    return out.str();
}

}  // namespace dabit
