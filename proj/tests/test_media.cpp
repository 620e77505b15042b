#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>

#include "dabit/flo_io.hpp"
#include "dabit/manifest.hpp"
#include "dabit/png_io.hpp"
#include "dabit/transforms.hpp"
#include "test_util.hpp"

using namespace dabit;
using testutil::TempDir;

TEST_CASE("load_frames maps 8-bit values onto [0,1]") {
    TempDir dir("frames");
    std::vector<uint8_t> pixels = {255, 0, 128, 0, 255, 128, 128, 128, 0, 255, 255, 255};
    write_png8(dir / "00000.png", 2, 2, 3, pixels);

    const FrameSequence seq = load_frames(dir.path());
    REQUIRE(seq.length() == 1);
    CHECK(seq.frames[0].at(0, 0, 0) == 1.0f);
    CHECK(seq.frames[0].at(0, 0, 1) == 0.0f);
    // 128 -> 128/255, exact rational division
    CHECK(seq.frames[0].at(0, 0, 2) == doctest::Approx(128.0 / 255.0).epsilon(1e-7));
    seq.validate();
}

TEST_CASE("load_frames rejects mixed dimensions and empty directories") {
    TempDir dir("mixed");
    write_png8(dir / "a.png", 2, 2, 3, std::vector<uint8_t>(12, 10));
    write_png8(dir / "b.png", 3, 2, 3, std::vector<uint8_t>(18, 10));
    CHECK_THROWS_WITH_AS(load_frames(dir.path()), doctest::Contains("dimension mismatch"),
                         std::runtime_error);

    TempDir empty("empty");
    CHECK_THROWS_AS(load_frames(empty.path()), std::runtime_error);
}

TEST_CASE("load_depth linearly maps 16-bit values into [0,255]") {
    TempDir dir("depth");
    write_png16_gray(dir / "00000.png", 2, 2, {65535, 0, 32768, 1234});

    const DepthSequence seq = load_depth(dir.path());
    CHECK(seq.maps[0].at(0, 0) == 255.0f);
    CHECK(seq.maps[0].at(0, 1) == 0.0f);
    CHECK(seq.maps[0].at(1, 0) == doctest::Approx(32768.0 * 255.0 / 65535.0).epsilon(1e-7));
}

TEST_CASE("load_depth accepts 8-bit values as-is") {
    TempDir dir("depth8");
    write_png8(dir / "00000.png", 2, 1, 1, {200, 17});
    const DepthSequence seq = load_depth(dir.path());
    CHECK(seq.maps[0].at(0, 0) == 200.0f);
    CHECK(seq.maps[0].at(0, 1) == 17.0f);
}

TEST_CASE("frame save/load round-trips bit-exactly on its own output") {
    Rng rng(11);
    FrameSequence seq;
    seq.frames.push_back(testutil::random_image(6, 5, 3, rng));
    seq.frames.push_back(testutil::random_image(6, 5, 3, rng));

    TempDir a("roundtrip_a"), b("roundtrip_b");
    save_frames(a.path(), seq);
    const FrameSequence loaded = load_frames(a.path());
    save_frames(b.path(), loaded);
    const FrameSequence again = load_frames(b.path());
    for (int t = 0; t < 2; ++t) CHECK(testutil::bit_identical(loaded.frames[t], again.frames[t]));
}

TEST_CASE("depth, mask and blur-map persistence round-trips") {
    TempDir dir("persist");
    DepthSequence depth;
    depth.maps.emplace_back(2, 2, 1);
    depth.maps[0].at(0, 0) = 255.0f;
    depth.maps[0].at(0, 1) = 127.5f;
    save_depth(dir / "depth", depth);
    const DepthSequence depth2 = load_depth(dir / "depth");
    TempDir dir2("persist2");
    save_depth(dir2 / "depth", depth2);
    const DepthSequence depth3 = load_depth(dir2 / "depth");
    CHECK(testutil::bit_identical(depth2.maps[0], depth3.maps[0]));

    BlurMapSequence maps;
    maps.maps.emplace_back(2, 3, 1);
    maps.maps[0].at(0, 0) = 7.0f;
    maps.maps[0].at(0, 1) = 3.0f;
    maps.maps[0].at(1, 2) = 11.0f;
    save_blur_maps(dir / "maps", maps);
    const BlurMapSequence maps2 = load_blur_maps(dir / "maps");
    CHECK(testutil::bit_identical(maps.maps[0], maps2.maps[0]));  // values <= 12 are lossless

    MaskSequence masks;
    masks.masks.emplace_back(2, 3, 1);
    masks.masks[0].at(0, 0) = 1.0f;
    masks.masks[0].at(1, 1) = 1.0f;
    save_masks(dir / "masks", masks);
    const MaskSequence masks2 = load_masks(dir / "masks");
    CHECK(testutil::bit_identical(masks.masks[0], masks2.masks[0]));
}

TEST_CASE("flo format: smallest instance is 20 bytes and round-trips") {
    TempDir dir("flo");
    Image flow(1, 1, 2);
    flow.at(0, 0, 0) = 2.5f;
    flow.at(0, 0, 1) = -1.0f;
    const auto path = dir / "tiny.flo";
    write_flo(path, flow);
    CHECK(std::filesystem::file_size(path) == 20);
    const Image back = read_flo(path);
    CHECK(testutil::bit_identical(flow, back));
}

TEST_CASE("flo format: zero flow writes an all-zero payload") {
    TempDir dir("flo0");
    const auto path = dir / "zero.flo";
    write_flo(path, Image(2, 3, 2));
    std::ifstream in(path, std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    REQUIRE(bytes.size() == 12 + 2 * 3 * 2 * 4);
    for (size_t i = 12; i < bytes.size(); ++i) CHECK(bytes[i] == 0);
}

TEST_CASE("flo format: random field round-trip oracle") {
    Rng rng(7);
    TempDir dir("flo_rand");
    const Image flow = testutil::random_image(3, 4, 2, rng, -20.0f, 20.0f);
    write_flo(dir / "f.flo", flow);
    CHECK(testutil::bit_identical(flow, read_flo(dir / "f.flo")));
}

TEST_CASE("flo format: bad magic and truncation are rejected") {
    TempDir dir("flo_bad");
    {
        std::ofstream out(dir / "bad.flo", std::ios::binary);
        out << "JUNKxxxxxxxxxxxxxxxxxxx";
    }
    CHECK_THROWS_WITH_AS(read_flo(dir / "bad.flo"), doctest::Contains("magic"),
                         std::runtime_error);

    Image flow(2, 2, 2);
    write_flo(dir / "ok.flo", flow);
    std::ifstream in(dir / "ok.flo", std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    {
        std::ofstream out(dir / "trunc.flo", std::ios::binary);
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size() - 5));
    }
    CHECK_THROWS_WITH_AS(read_flo(dir / "trunc.flo"), doctest::Contains("truncated"),
                         std::runtime_error);
}

TEST_CASE("horizontal flip is an involution and mirrors columns") {
    Rng rng(3);
    FrameSequence seq;
    seq.frames.push_back(testutil::random_image(4, 6, 3, rng));

    const FrameSequence once = horizontal_flip(seq);
    const FrameSequence twice = horizontal_flip(once);
    CHECK(testutil::bit_identical(seq.frames[0], twice.frames[0]));
    CHECK(once.frames[0].at(1, 0, 0) == seq.frames[0].at(1, 5, 0));

    // 2x1x3 row [a, b] -> [b, a]
    FrameSequence row;
    row.frames.emplace_back(1, 2, 3);
    row.frames[0].at(0, 0, 0) = 0.25f;
    row.frames[0].at(0, 1, 0) = 0.75f;
    const FrameSequence flipped = horizontal_flip(row);
    CHECK(flipped.frames[0].at(0, 0, 0) == 0.75f);
    CHECK(flipped.frames[0].at(0, 1, 0) == 0.25f);

    // single column unchanged
    FrameSequence col;
    col.frames.push_back(testutil::random_image(3, 1, 3, rng));
    CHECK(testutil::bit_identical(horizontal_flip(col).frames[0], col.frames[0]));
}

TEST_CASE("temporal reverse is an involution; flows negate and re-pair") {
    Rng rng(5);
    FrameSequence seq;
    for (int t = 0; t < 4; ++t) seq.frames.push_back(testutil::random_image(3, 3, 3, rng));
    const FrameSequence twice = temporal_reverse(temporal_reverse(seq));
    for (int t = 0; t < 4; ++t) CHECK(testutil::bit_identical(seq.frames[t], twice.frames[t]));

    FrameSequence single;
    single.frames.push_back(seq.frames[0]);
    CHECK(testutil::bit_identical(temporal_reverse(single).frames[0], single.frames[0]));

    // Static-translation oracle: constant forward flows (dx,dy) reverse into
    // constant (-dx,-dy) flows, pair order reversed.
    FlowSequence flows;
    for (int t = 0; t < 3; ++t) {
        Image f(2, 2, 2);
        for (int y = 0; y < 2; ++y)
            for (int x = 0; x < 2; ++x) {
                f.at(y, x, 0) = static_cast<float>(1 + t);
                f.at(y, x, 1) = -2.0f;
            }
        flows.flows.push_back(std::move(f));
    }
    const FlowSequence rev = temporal_reverse(flows);
    REQUIRE(rev.length() == 3);
    CHECK(rev.flows[0].at(0, 0, 0) == -3.0f);  // last pair first, negated
    CHECK(rev.flows[2].at(0, 0, 0) == -1.0f);
    CHECK(rev.flows[1].at(1, 1, 1) == 2.0f);
    const FlowSequence back = temporal_reverse(rev);
    for (int t = 0; t < 3; ++t) CHECK(testutil::bit_identical(back.flows[t], flows.flows[t]));
}

TEST_CASE("flip and reverse commute") {
    Rng rng(9);
    FrameSequence seq;
    for (int t = 0; t < 3; ++t) seq.frames.push_back(testutil::random_image(4, 5, 3, rng));
    const FrameSequence a = horizontal_flip(temporal_reverse(seq));
    const FrameSequence b = temporal_reverse(horizontal_flip(seq));
    for (int t = 0; t < 3; ++t) CHECK(testutil::bit_identical(a.frames[t], b.frames[t]));
}

TEST_CASE("downsample preserves constants and dimensions") {
    FrameSequence seq;
    seq.frames.emplace_back(432, 240, 3, 0.37f);
    const FrameSequence half = downsample(seq, 2);
    CHECK(half.frames[0].height() == 216);
    CHECK(half.frames[0].width() == 120);
    for (size_t i = 0; i < half.frames[0].size(); ++i)
        CHECK(half.frames[0].data()[i] == 0.37f);

    MaskSequence masks;
    masks.masks.emplace_back(8, 8, 1, 1.0f);
    const MaskSequence ds = downsample(masks, 4);
    for (size_t i = 0; i < ds.masks[0].size(); ++i) CHECK(ds.masks[0].data()[i] == 1.0f);
}

TEST_CASE("downsample factor 1 is the identity") {
    Rng rng(13);
    FrameSequence seq;
    seq.frames.push_back(testutil::random_image(6, 4, 3, rng));
    CHECK(testutil::bit_identical(downsample(seq, 1).frames[0], seq.frames[0]));
}

TEST_CASE("downsample rejects non-divisible dimensions") {
    FrameSequence seq;
    seq.frames.emplace_back(5, 4, 3);
    CHECK_THROWS_AS(downsample(seq, 2), std::invalid_argument);
}

TEST_CASE("blur-map downsampling keeps ordinal values intact") {
    BlurMapSequence maps;
    maps.maps.emplace_back(4, 4, 1);
    for (int y = 0; y < 4; ++y)
        for (int x = 0; x < 4; ++x) maps.maps[0].at(y, x) = x < 2 ? 0.0f : 7.0f;
    const BlurMapSequence ds = downsample(maps, 2);
    for (size_t i = 0; i < ds.maps[0].size(); ++i) {
        const float v = ds.maps[0].data()[i];
        CHECK((v == 0.0f || v == 7.0f));
    }
}

TEST_CASE("manifest JSON round-trips losslessly") {
    DatasetManifest m;
    m.sequence_id = "fixture";
    m.schedule.f0 = 0.0;
    m.schedule.f_r = 100.0;
    m.schedule.df_dt = 2.55718231354219873;  // must survive serialization exactly
    m.schedule.n_max = 7;
    m.schedule.length = 50;
    m.frame_paths = {"frames/00000.png", "frames/00001.png"};
    m.depth_paths = {"depth/00000.png"};
    m.blur_map_paths = {"blur_maps/00000.png"};
    m.mask_paths = {"masks/00000.png"};
    m.lr_frame_paths = {"lr/frames/00000.png"};
    m.lr_blur_map_paths = {"lr/blur_maps/00000.png"};
    m.lr_depth_paths = {"lr/depth/00000.png"};

    const DatasetManifest back = manifest_from_json(manifest_to_json(m));
    CHECK(back == m);

    TempDir dir("manifest");
    save_manifest(dir / "manifest.json", m);
    CHECK(load_manifest(dir / "manifest.json") == m);
}

TEST_CASE("manifest path verification reports missing files") {
    TempDir dir("verify");
    DatasetManifest m;
    m.sequence_id = "x";
    m.frame_paths = {"frames/00000.png"};
    CHECK_THROWS_WITH_AS(verify_manifest_paths(m, dir.path()), doctest::Contains("missing"),
                         std::runtime_error);
    std::filesystem::create_directories(dir / "frames");
    write_png8(dir.path() / "frames/00000.png", 1, 1, 3, {0, 0, 0});
    CHECK_NOTHROW(verify_manifest_paths(m, dir.path()));
}
