#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace dabit {

// Dense H x W x C float image, row-major with interleaved channels.
class Image {
public:
    Image() = default;
    Image(int height, int width, int channels, float fill = 0.0f)
        : height_(height), width_(width), channels_(channels),
          data_(static_cast<size_t>(height) * width * channels, fill) {
        if (height < 1 || width < 1 || channels < 1)
            throw std::invalid_argument("Image: dimensions must be positive");
    }

    int height() const { return height_; }
    int width() const { return width_; }
    int channels() const { return channels_; }
    bool empty() const { return data_.empty(); }
    size_t size() const { return data_.size(); }

    float& at(int y, int x, int c = 0) {
        return data_[(static_cast<size_t>(y) * width_ + x) * channels_ + c];
    }
    float at(int y, int x, int c = 0) const {
        return data_[(static_cast<size_t>(y) * width_ + x) * channels_ + c];
    }

    float* row(int y) { return data_.data() + static_cast<size_t>(y) * width_ * channels_; }
    const float* row(int y) const { return data_.data() + static_cast<size_t>(y) * width_ * channels_; }

    float* data() { return data_.data(); }
    const float* data() const { return data_.data(); }

    bool same_shape(const Image& other) const {
        return height_ == other.height_ && width_ == other.width_ && channels_ == other.channels_;
    }

    bool operator==(const Image& other) const {
        return same_shape(other) && data_ == other.data_;
    }

private:
    int height_ = 0;
    int width_ = 0;
    int channels_ = 0;
    std::vector<float> data_;
};

// Ordered RGB frames with shared dimensions, pixel values in [0,1].
struct FrameSequence {
    std::vector<Image> frames;

    int length() const { return static_cast<int>(frames.size()); }
    int height() const { return frames.empty() ? 0 : frames.front().height(); }
    int width() const { return frames.empty() ? 0 : frames.front().width(); }
    void validate() const;
};

// Per-frame single-channel relative depth, values in [0,255].
struct DepthSequence {
    std::vector<Image> maps;

    int length() const { return static_cast<int>(maps.size()); }
    int height() const { return maps.empty() ? 0 : maps.front().height(); }
    int width() const { return maps.empty() ? 0 : maps.front().width(); }
    void validate() const;
};

// Per-frame single-channel map of the applied blur kernel size (0 = in focus).
// Estimated maps hold non-negative relative blurriness instead of kernel sizes.
struct BlurMapSequence {
    std::vector<Image> maps;

    int length() const { return static_cast<int>(maps.size()); }
    int height() const { return maps.empty() ? 0 : maps.front().height(); }
    int width() const { return maps.empty() ? 0 : maps.front().width(); }
    void validate() const;
};

// Per-frame binary focus masks: 0 = in focus, 1 = blurred.
struct MaskSequence {
    std::vector<Image> masks;

    int length() const { return static_cast<int>(masks.size()); }
    int height() const { return masks.empty() ? 0 : masks.front().height(); }
    int width() const { return masks.empty() ? 0 : masks.front().width(); }
    void validate() const;
};

// Displacement fields between adjacent frames, (dx, dy) in pixels.
// A T-frame sequence carries exactly T-1 flows.
struct FlowSequence {
    std::vector<Image> flows;

    int length() const { return static_cast<int>(flows.size()); }
    int height() const { return flows.empty() ? 0 : flows.front().height(); }
    int width() const { return flows.empty() ? 0 : flows.front().width(); }
    void validate() const;
};

}  // namespace dabit
