#include "dabit/png_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>

namespace dabit {

namespace fs = std::filesystem;

namespace {

struct FileCloser {
    void operator()(FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<FILE, FileCloser>;

[[noreturn]] void fail(const fs::path& path, const std::string& what) {
    throw std::runtime_error(path.string() + ": " + what);
}

// Writes bytes to <path>.tmp then renames, so readers never observe a
// partially written file.
class AtomicFile {
public:
    explicit AtomicFile(const fs::path& path)
        : final_path_(path), tmp_path_(path.string() + ".tmp"), file_(std::fopen(tmp_path_.c_str(), "wb")) {
        if (!file_) fail(path, "cannot open for writing");
    }
    ~AtomicFile() {
        if (file_) {
            std::fclose(file_);
            std::remove(tmp_path_.c_str());
        }
    }
    FILE* get() { return file_; }
    void commit() {
        std::fclose(file_);
        file_ = nullptr;
        fs::rename(tmp_path_, final_path_);
    }

private:
    fs::path final_path_;
    std::string tmp_path_;
    FILE* file_ = nullptr;
};

}  // namespace

PngImage read_png(const fs::path& path) {
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) fail(path, "cannot open");

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) fail(path, "png_create_read_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        fail(path, "png_create_info_struct failed");
    }
    std::vector<png_bytep> rows;
    PngImage out;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        fail(path, "corrupt or unreadable PNG");
    }

    png_init_io(png, fp.get());
    png_read_info(png, info);

    out.width = static_cast<int>(png_get_image_width(png, info));
    out.height = static_cast<int>(png_get_image_height(png, info));
    out.bit_depth = png_get_bit_depth(png, info);
    const int color_type = png_get_color_type(png, info);

    if (color_type == PNG_COLOR_TYPE_GRAY) {
        out.channels = 1;
    } else if (color_type == PNG_COLOR_TYPE_RGB) {
        out.channels = 3;
    } else {
        png_destroy_read_struct(&png, &info, nullptr);
        fail(path, "unsupported color type (expected gray or RGB)");
    }
    if (out.bit_depth != 8 && out.bit_depth != 16) {
        png_destroy_read_struct(&png, &info, nullptr);
        fail(path, "unsupported bit depth " + std::to_string(out.bit_depth));
    }
    if (out.bit_depth == 16) png_set_swap(png);  // file is big-endian
    png_read_update_info(png, info);

    const size_t row_samples = static_cast<size_t>(out.width) * out.channels;
    out.samples.resize(static_cast<size_t>(out.height) * row_samples);

    if (out.bit_depth == 16) {
        rows.resize(out.height);
        for (int y = 0; y < out.height; ++y)
            rows[y] = reinterpret_cast<png_bytep>(out.samples.data() + y * row_samples);
        png_read_image(png, rows.data());
    } else {
        std::vector<uint8_t> bytes(out.samples.size());
        rows.resize(out.height);
        for (int y = 0; y < out.height; ++y)
            rows[y] = bytes.data() + y * row_samples;
        png_read_image(png, rows.data());
        for (size_t i = 0; i < bytes.size(); ++i) out.samples[i] = bytes[i];
    }
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return out;
}

void write_png8(const fs::path& path, int width, int height, int channels,
                const std::vector<uint8_t>& data) {
    if (data.size() != static_cast<size_t>(width) * height * channels)
        fail(path, "write_png8: data size mismatch");
    AtomicFile file(path);

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) fail(path, "png_create_write_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        fail(path, "png_create_info_struct failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        fail(path, "PNG write failed");
    }
    png_init_io(png, file.get());
    const int color_type = channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB;
    png_set_IHDR(png, info, width, height, 8, color_type, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    const size_t row_bytes = static_cast<size_t>(width) * channels;
    for (int y = 0; y < height; ++y)
        png_write_row(png, const_cast<png_bytep>(data.data() + y * row_bytes));
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    file.commit();
}

void write_png16_gray(const fs::path& path, int width, int height,
                      const std::vector<uint16_t>& data) {
    if (data.size() != static_cast<size_t>(width) * height)
        fail(path, "write_png16_gray: data size mismatch");
    AtomicFile file(path);

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) fail(path, "png_create_write_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        fail(path, "png_create_info_struct failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        fail(path, "PNG write failed");
    }
    png_init_io(png, file.get());
    png_set_IHDR(png, info, width, height, 16, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_set_swap(png);
    for (int y = 0; y < height; ++y)
        png_write_row(png, reinterpret_cast<png_bytep>(
                               const_cast<uint16_t*>(data.data() + static_cast<size_t>(y) * width)));
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    file.commit();
}

std::vector<fs::path> list_png_files(const fs::path& dir) {
    if (!fs::is_directory(dir))
        throw std::runtime_error(dir.string() + ": not a directory");
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".png")
            files.push_back(entry.path());
    std::sort(files.begin(), files.end(),
              [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });
    return files;
}

namespace {

std::vector<fs::path> require_png_files(const fs::path& dir) {
    std::vector<fs::path> files = list_png_files(dir);
    if (files.empty())
        throw std::runtime_error(dir.string() + ": no PNG files found");
    return files;
}

fs::path numbered_path(const fs::path& dir, int index) {
    char name[16];
    std::snprintf(name, sizeof(name), "%05d.png", index);
    return dir / name;
}

uint8_t to_u8(float v) {
    return static_cast<uint8_t>(std::lround(std::clamp(v, 0.0f, 255.0f)));
}

// Loads a directory of single-channel PNGs into float maps via value/scale.
std::vector<Image> load_gray_dir(const fs::path& dir, double scale) {
    std::vector<Image> maps;
    for (const fs::path& p : require_png_files(dir)) {
        PngImage png = read_png(p);
        if (png.channels != 1 || png.bit_depth != 8)
            fail(p, "expected 8-bit grayscale PNG");
        if (!maps.empty() && (png.height != maps.front().height() || png.width != maps.front().width()))
            fail(p, "dimension mismatch within sequence");
        Image im(png.height, png.width, 1);
        for (size_t i = 0; i < png.samples.size(); ++i)
            im.data()[i] = static_cast<float>(png.samples[i] / scale);
        maps.push_back(std::move(im));
    }
    return maps;
}

std::vector<fs::path> save_gray_dir(const fs::path& dir, const std::vector<Image>& maps, double scale) {
    fs::create_directories(dir);
    std::vector<fs::path> paths;
    for (size_t t = 0; t < maps.size(); ++t) {
        const Image& im = maps[t];
        std::vector<uint8_t> bytes(im.size());
        for (size_t i = 0; i < im.size(); ++i)
            bytes[i] = to_u8(static_cast<float>(im.data()[i] * scale));
        const fs::path p = numbered_path(dir, static_cast<int>(t));
        write_png8(p, im.width(), im.height(), 1, bytes);
        paths.push_back(p);
    }
    return paths;
}

}  // namespace

FrameSequence load_frames(const fs::path& dir) {
    FrameSequence seq;
    for (const fs::path& p : require_png_files(dir)) {
        PngImage png = read_png(p);
        if (png.channels != 3 || png.bit_depth != 8)
            fail(p, "expected 8-bit RGB PNG");
        if (!seq.frames.empty() &&
            (png.height != seq.height() || png.width != seq.width()))
            fail(p, "dimension mismatch within sequence");
        Image im(png.height, png.width, 3);
        for (size_t i = 0; i < png.samples.size(); ++i)
            im.data()[i] = static_cast<float>(png.samples[i]) / 255.0f;
        seq.frames.push_back(std::move(im));
    }
    return seq;
}

DepthSequence load_depth(const fs::path& dir) {
    DepthSequence seq;
    for (const fs::path& p : require_png_files(dir)) {
        PngImage png = read_png(p);
        if (png.channels != 1)
            fail(p, "expected grayscale PNG for depth");
        if (!seq.maps.empty() && (png.height != seq.height() || png.width != seq.width()))
            fail(p, "dimension mismatch within sequence");
        Image im(png.height, png.width, 1);
        if (png.bit_depth == 16) {
            for (size_t i = 0; i < png.samples.size(); ++i)
                im.data()[i] = static_cast<float>(png.samples[i] * 255.0 / 65535.0);
        } else {
            for (size_t i = 0; i < png.samples.size(); ++i)
                im.data()[i] = static_cast<float>(png.samples[i]);
        }
        seq.maps.push_back(std::move(im));
    }
    return seq;
}

BlurMapSequence load_blur_maps(const fs::path& dir) {
    return BlurMapSequence{load_gray_dir(dir, 20.0)};
}

BlurMapSequence load_estimated_maps(const fs::path& dir) {
    return BlurMapSequence{load_gray_dir(dir, 255.0)};
}

MaskSequence load_masks(const fs::path& dir) {
    MaskSequence seq;
    for (const fs::path& p : require_png_files(dir)) {
        PngImage png = read_png(p);
        if (png.channels != 1 || png.bit_depth != 8)
            fail(p, "expected 8-bit grayscale PNG for mask");
        if (!seq.masks.empty() && (png.height != seq.height() || png.width != seq.width()))
            fail(p, "dimension mismatch within sequence");
        Image im(png.height, png.width, 1);
        for (size_t i = 0; i < png.samples.size(); ++i)
            im.data()[i] = png.samples[i] >= 128 ? 1.0f : 0.0f;
        seq.masks.push_back(std::move(im));
    }
    return seq;
}

std::vector<fs::path> save_frames(const fs::path& dir, const FrameSequence& seq) {
    fs::create_directories(dir);
    std::vector<fs::path> paths;
    for (int t = 0; t < seq.length(); ++t) {
        const Image& im = seq.frames[t];
        std::vector<uint8_t> bytes(im.size());
        for (size_t i = 0; i < im.size(); ++i)
            bytes[i] = to_u8(im.data()[i] * 255.0f);
        const fs::path p = numbered_path(dir, t);
        write_png8(p, im.width(), im.height(), 3, bytes);
        paths.push_back(p);
    }
    return paths;
}

std::vector<fs::path> save_depth(const fs::path& dir, const DepthSequence& seq) {
    fs::create_directories(dir);
    std::vector<fs::path> paths;
    for (int t = 0; t < seq.length(); ++t) {
        const Image& im = seq.maps[t];
        std::vector<uint16_t> samples(im.size());
        for (size_t i = 0; i < im.size(); ++i) {
            const double v = std::clamp(static_cast<double>(im.data()[i]), 0.0, 255.0);
            samples[i] = static_cast<uint16_t>(std::lround(v * 65535.0 / 255.0));
        }
        const fs::path p = numbered_path(dir, t);
        write_png16_gray(p, im.width(), im.height(), samples);
        paths.push_back(p);
    }
    return paths;
}

std::vector<fs::path> save_blur_maps(const fs::path& dir, const BlurMapSequence& seq) {
    return save_gray_dir(dir, seq.maps, 20.0);
}

std::vector<fs::path> save_estimated_maps(const fs::path& dir, const BlurMapSequence& seq) {
    return save_gray_dir(dir, seq.maps, 255.0);
}

std::vector<fs::path> save_masks(const fs::path& dir, const MaskSequence& seq) {
    return save_gray_dir(dir, seq.masks, 255.0);
}

}  // namespace dabit
