#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dabit/image.hpp"

namespace dabit {

struct LossWeights {
    double alpha = 1.0;
    double beta = 1.0;
    double gamma = 1.0;
    double epsilon = 0.001;
};

// Mean over all elements of sqrt((pred-gt)^2 + epsilon^2).
double charbonnier(const Image& pred, const Image& gt, double epsilon);

// Mean |pred-gt| over mask==1 pixels (all channels); 0 for an empty mask.
double masked_l1(const Image& pred, const Image& gt, const Image& mask);

// alpha*charbonnier(HR pair) + beta*masked_l1(LR pair, mask)
// + gamma*masked_l1(LR pair, 1-mask).
double total_loss(const Image& pred_hr, const Image& gt_hr, const Image& pred_lr,
                  const Image& gt_lr, const Image& mask_lr, const LossWeights& weights);

constexpr double kPsnrCap = 99.0;

// 10*log10(peak^2/MSE); identical inputs report the 99 dB cap.
double psnr(const Image& pred, const Image& gt, double peak = 1.0);
// PSNR restricted to mask==1 pixels; empty mask reports the cap.
double psnr_masked(const Image& pred, const Image& gt, const Image& mask, double peak = 1.0);

// Mean local SSIM, 11x11 Gaussian window sigma=1.5, K1=0.01, K2=0.03, L=1.
// Channels are evaluated independently and averaged.
double ssim(const Image& pred, const Image& gt);
// Restricted to windows centered on mask==1 pixels.
double ssim_masked(const Image& pred, const Image& gt, const Image& mask);

// Deterministic multi-scale block-matching motion estimator (8x8 blocks,
// diagonal |dx|+|dy| regularizer toward the coarse initialization). Both tOF
// operands run through this same estimator.
Image estimate_motion(const Image& prev_gray, const Image& next_gray);

// Mean L1 difference between the motion fields of consecutive pred frames
// and consecutive gt frames. An optional mask sequence restricts the average
// to masked pixels.
double tof(const FrameSequence& pred, const FrameSequence& gt, int jobs = 1);
double tof_masked(const FrameSequence& pred, const FrameSequence& gt, const MaskSequence& masks,
                  int jobs = 1);

struct MetricReport {
    std::vector<double> psnr;      // per frame
    std::vector<double> ssim;      // per frame
    std::vector<double> tof_pairs; // per consecutive pair
    double mean_psnr = 0.0;
    double mean_ssim = 0.0;
    double mean_tof = 0.0;
};

MetricReport evaluate_sequences(const FrameSequence& pred, const FrameSequence& gt, int jobs = 1);

std::string metric_report_to_json(const MetricReport& report);
std::string metric_report_to_text(const MetricReport& report);

}  // namespace dabit
