#pragma once

#include "dabit/image.hpp"

namespace dabit {

// Resampling to an arbitrary target size. Bicubic uses the Catmull-Rom kernel
// with clamped borders and per-tap weight normalization, so constants are
// preserved and factor-1 resampling is the identity.
Image resize_bicubic(const Image& src, int out_height, int out_width);
Image resize_bilinear(const Image& src, int out_height, int out_width);
Image resize_nearest(const Image& src, int out_height, int out_width);

Image flip_image(const Image& src);

// Column x maps to W-1-x in every frame; applying twice is the identity.
FrameSequence horizontal_flip(const FrameSequence& seq);
DepthSequence horizontal_flip(const DepthSequence& seq);
BlurMapSequence horizontal_flip(const BlurMapSequence& seq);
MaskSequence horizontal_flip(const MaskSequence& seq);

// Frame t maps to T-1-t. Reversing a FlowSequence additionally negates the
// vectors and re-pairs them with the reversed frame order.
FrameSequence temporal_reverse(const FrameSequence& seq);
DepthSequence temporal_reverse(const DepthSequence& seq);
BlurMapSequence temporal_reverse(const BlurMapSequence& seq);
MaskSequence temporal_reverse(const MaskSequence& seq);
FlowSequence temporal_reverse(const FlowSequence& seq);

// Integer-factor downsampling; the factor must divide both dimensions.
// Frames and depth resample bicubically; blur maps and masks use nearest
// neighbor so binary/ordinal semantics survive.
FrameSequence downsample(const FrameSequence& seq, int factor);
DepthSequence downsample(const DepthSequence& seq, int factor);
BlurMapSequence downsample(const BlurMapSequence& seq, int factor);
MaskSequence downsample(const MaskSequence& seq, int factor);

}  // namespace dabit
