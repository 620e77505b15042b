#include "dabit/image.hpp"

namespace dabit {

namespace {

void check_uniform_dims(const std::vector<Image>& items, int channels, const char* what) {
    if (items.empty())
        throw std::invalid_argument(std::string(what) + ": empty sequence");
    const int h = items.front().height();
    const int w = items.front().width();
    for (const Image& im : items) {
        if (im.channels() != channels)
            throw std::invalid_argument(std::string(what) + ": wrong channel count");
        if (im.height() != h || im.width() != w)
            throw std::invalid_argument(std::string(what) + ": mixed dimensions");
    }
}

}  // namespace

void FrameSequence::validate() const {
    check_uniform_dims(frames, 3, "FrameSequence");
    for (const Image& im : frames)
        for (size_t i = 0; i < im.size(); ++i)
            if (im.data()[i] < 0.0f || im.data()[i] > 1.0f)
                throw std::invalid_argument("FrameSequence: pixel value outside [0,1]");
}

void DepthSequence::validate() const {
    check_uniform_dims(maps, 1, "DepthSequence");
    for (const Image& im : maps)
        for (size_t i = 0; i < im.size(); ++i)
            if (im.data()[i] < 0.0f || im.data()[i] > 255.0f)
                throw std::invalid_argument("DepthSequence: value outside [0,255]");
}

void BlurMapSequence::validate() const {
    check_uniform_dims(maps, 1, "BlurMapSequence");
    for (const Image& im : maps)
        for (size_t i = 0; i < im.size(); ++i)
            if (im.data()[i] < 0.0f)
                throw std::invalid_argument("BlurMapSequence: negative blur value");
}

void MaskSequence::validate() const {
    check_uniform_dims(masks, 1, "MaskSequence");
    for (const Image& im : masks)
        for (size_t i = 0; i < im.size(); ++i)
            if (im.data()[i] != 0.0f && im.data()[i] != 1.0f)
                throw std::invalid_argument("MaskSequence: non-binary value");
}

void FlowSequence::validate() const {
    check_uniform_dims(flows, 2, "FlowSequence");
}

}  // namespace dabit
