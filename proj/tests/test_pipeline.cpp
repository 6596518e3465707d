#include "doctest.h"

#include "support.hpp"
#include "vidcut/error.hpp"
#include "vidcut/pipeline.hpp"
#include "vidcut/synthetic.hpp"

#include <algorithm>
#include <filesystem>

using namespace vidcut;
using vidcut::testing::Gen;
using vidcut::testing::TempDir;

namespace {

Image gray(int w, int h, std::initializer_list<int> v) {
    Image img(w, h, 1);
    std::transform(v.begin(), v.end(), img.data.begin(), [](int x) { return static_cast<std::uint8_t>(x); });
    return img;
}

SyntheticParams small_clip() {
    SyntheticParams p;
    p.width = 96;
    p.height = 72;
    p.frames = 8;
    p.radius = 13;
    p.start_x = 24;
    p.start_y = 30;
    p.velocity_x = 3;
    p.velocity_y = 1;
    return p;
}

double clip_iou(const std::vector<SegmentationMask>& pred, const std::vector<SegmentationMask>& truth) {
    std::uint64_t inter = 0, uni = 0;
    for (std::size_t t = 0; t < pred.size(); ++t)
        for (std::size_t i = 0; i < pred[t].values.size(); ++i) {
            inter += pred[t].values[i] && truth[t].values[i];
            uni += pred[t].values[i] || truth[t].values[i];
        }
    return uni ? static_cast<double>(inter) / static_cast<double>(uni) : 1.0;
}

}  // namespace

TEST_CASE("fuse_labels picks the most probable class") {
    AttentionMap a(3, 1), b(3, 1);
    a.values = {0.9f, 0.4f, 0.6f};
    b.values = {0.2f, 0.3f, 0.6f};
    const std::vector<AttentionMap> maps{a, b};
    const std::vector<int> ids{3, 1};
    const auto out = fuse_labels(maps, ids);
    CHECK(out.data == std::vector<std::uint8_t>{3, 0, 1});  // tie goes to the lower id

    CHECK_THROWS_AS(fuse_labels(maps, std::vector<int>{3}), InputError);
    CHECK_THROWS_AS(fuse_labels(maps, std::vector<int>{0, 1}), InputError);
    CHECK_THROWS_AS(fuse_labels(maps, std::vector<int>{255, 1}), InputError);
    AttentionMap bad(3, 1, 1.5f);
    CHECK_THROWS_AS(fuse_labels(std::vector<AttentionMap>{bad}, std::vector<int>{1}), InputError);
}

TEST_CASE("fuse_labels background threshold") {
    AttentionMap a(2, 1);
    a.values = {0.49f, 0.5f};
    const auto out = fuse_labels(std::vector<AttentionMap>{a}, std::vector<int>{7}, 0.5);
    CHECK(out.data == std::vector<std::uint8_t>{0, 7});
}

TEST_CASE("IoU on a 3x3 hand case") {
    const auto gt = gray(3, 3, {1, 1, 1, 1, 0, 0, 0, 0, 0});
    const auto pred = gray(3, 3, {1, 1, 0, 0, 1, 0, 0, 0, 0});
    const auto c = count_iou(pred, gt);
    CHECK(c.tp == 2);
    CHECK(c.fp == 1);
    CHECK(c.fn == 2);
    CHECK(c.iou() == doctest::Approx(0.4));

    // void pixels are ignored on both sides
    const auto gt_void = gray(3, 3, {1, 1, 1, 1, 255, 0, 0, 0, 0});
    CHECK(count_iou(pred, gt_void).iou() == doctest::Approx(0.5));
    CHECK(count_iou(gray(3, 3, {0, 0, 0, 0, 0, 0, 0, 0, 0}), gray(3, 3, {0, 0, 0, 0, 0, 0, 0, 0, 0})).iou() == 1.0);
    CHECK_THROWS_AS(count_iou(gray(3, 1, {0, 0, 0}), gt), InputError);
}

TEST_CASE("mIoU averages classes and videos with ground truth") {
    const auto gt = gray(3, 3, {1, 1, 1, 1, 0, 0, 0, 0, 0});
    const auto perfect = gt;
    const auto pred = gray(3, 3, {1, 1, 0, 0, 1, 0, 0, 0, 0});
    const auto empty = gray(3, 3, {0, 0, 0, 0, 0, 0, 0, 0, 0});
    const std::vector<EvalItem> items{{"a", 1, perfect, gt}, {"b", 2, pred, gt}, {"c", 3, pred, empty}};
    const auto r = evaluate_miou(items);
    REQUIRE(r.classes.size() == 3);
    CHECK(r.classes[0].iou == 1.0);
    CHECK(r.classes[1].iou == doctest::Approx(0.4));
    CHECK(r.classes[2].iou == 0.0);
    CHECK(r.class_mean_iou == doctest::Approx(0.7));
    CHECK(r.video_mean_iou == doctest::Approx(0.7));
    CHECK(r.to_json()["classes"].size() == 3);
}

TEST_CASE("mIoU does not depend on class numbering") {
    Gen gen(31);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<EvalItem> items, relabeled;
        for (int i = 0; i < 6; ++i) {
            Image p(5, 4, 1), g(5, 4, 1);
            for (auto& v : p.data) v = gen.coin(0.5);
            for (auto& v : g.data) v = gen.coin(0.1) ? 255 : gen.coin(0.5);
            const int cls = gen.integer(1, 3);
            items.push_back({"v" + std::to_string(i), cls, p, g});
            relabeled.push_back({"v" + std::to_string(i), 10 - cls, p, g});
        }
        const auto a = evaluate_miou(items), b = evaluate_miou(relabeled);
        CHECK(a.class_mean_iou == doctest::Approx(b.class_mean_iou).epsilon(1e-12));
        CHECK(a.video_mean_iou == doctest::Approx(b.video_mean_iou).epsilon(1e-12));
    }
}

TEST_CASE("export_trainset writes one file pair per entry") {
    for (int n : {0, 1, 3}) {
        TempDir dir("export");
        std::vector<TrainPair> pairs;
        for (int i = 0; i < n; ++i) pairs.push_back({AttentionMap(4, 3, 0.25f * i), SegmentationMask(4, 3, i % 2), 1, "src"});
        const auto manifest = export_trainset(pairs, dir.path());
        REQUIRE(manifest["pairs"].size() == static_cast<std::size_t>(n));
        CHECK(read_json_file(dir / "manifest.json") == manifest);
        for (int i = 0; i < n; ++i) {
            const auto& e = manifest["pairs"][i];
            CHECK(read_mask(dir / e["mask"].get<std::string>()) == pairs[i].mask);
            CHECK(attention_from_tensor(read_tensor(dir / e["attention"].get<std::string>())).values == pairs[i].attention.values);
        }
    }
    const std::vector<TrainPair> bad{{AttentionMap(4, 3), SegmentationMask(3, 3), 1, ""}};
    TempDir dir("export_bad");
    CHECK_THROWS_AS(export_trainset(bad, dir.path()), InputError);
}

TEST_CASE("synthetic clip end to end") {
    const auto clip = make_synthetic_clip(small_clip());
    TempDir dir("pipeline_e2e");
    write_synthetic_clip(clip, dir.path());
    PipelineConfig cfg;
    const auto in = load_video_dir(dir.path(), "disk", cfg);
    CHECK(in.frames.size() == 8);
    CHECK(in.flows.size() == 7);
    const auto r = segment_video(in, cfg);
    REQUIRE(r.masks.size() == 8);
    CHECK(r.intervals.size() == 1);
    CHECK(r.solves.size() == 1);
    for (const auto& s : r.solves) CHECK(std::abs(s.energy - s.recomputed_energy) <= 1e-9 * std::max(1.0, std::abs(s.energy)));
    CHECK(clip_iou(r.masks, clip.truth) >= 0.8);

    SUBCASE("deterministic") {
        const auto again = segment_video(in, cfg);
        for (std::size_t t = 0; t < r.masks.size(); ++t) CHECK(again.masks[t] == r.masks[t]);
    }
    SUBCASE("irrelevant frames are left empty") {
        auto low = in;
        for (auto& f : low.scores->frames) std::fill(f.begin(), f.end(), 0.5f);
        const auto none = segment_video(low, cfg);
        CHECK(none.solves.empty());
        CHECK(none.intervals.empty());
        for (const auto& m : none.masks) CHECK(std::count(m.values.begin(), m.values.end(), 0) == static_cast<long>(m.values.size()));
    }
    SUBCASE("zero attention gives background everywhere") {
        auto zero = in;
        for (auto& scales : zero.attention)
            for (auto& a : scales) std::fill(a.values.begin(), a.values.end(), 0.0f);
        const auto bg = segment_video(zero, cfg);
        CHECK_FALSE(bg.warnings.empty());
        for (const auto& m : bg.masks) CHECK(std::count(m.values.begin(), m.values.end(), 0) == static_cast<long>(m.values.size()));
    }
}

TEST_CASE("missing flow needs the estimation opt-in") {
    auto p = small_clip();
    p.frames = 4;
    const auto clip = make_synthetic_clip(p);
    TempDir dir("pipeline_flow");
    write_synthetic_clip(clip, dir.path());
    std::filesystem::remove(dir / "flow_000001.flo");
    PipelineConfig cfg;
    CHECK_THROWS_AS(load_video_dir(dir.path(), "disk", cfg), InputError);
    cfg.flow.allow_estimated = true;
    std::vector<std::string> warnings;
    const auto in = load_video_dir(dir.path(), "disk", cfg, &warnings);
    CHECK(in.flows.size() == 3);
    CHECK_FALSE(warnings.empty());
}

TEST_CASE("segment_video validates inputs") {
    const auto clip = make_synthetic_clip(small_clip());
    TempDir dir("pipeline_validate");
    write_synthetic_clip(clip, dir.path());
    const auto in = load_video_dir(dir.path(), "disk", PipelineConfig{});
    auto bad = in;
    bad.flows.pop_back();
    CHECK_THROWS_AS(segment_video(bad, PipelineConfig{}), InputError);
    bad = in;
    bad.attention[2].clear();
    CHECK_THROWS_AS(segment_video(bad, PipelineConfig{}), InputError);
    CHECK_THROWS_AS(segment_video(VideoInputs{}, PipelineConfig{}), InputError);
    CHECK_THROWS_AS(load_video_dir(dir / "missing", "disk", PipelineConfig{}), InputError);
    CHECK_THROWS_AS(load_video_dir(dir.path(), "horse", PipelineConfig{}), InputError);
}
