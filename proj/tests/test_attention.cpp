#include "doctest.h"

#include "support.hpp"
#include "vidcut/attention.hpp"
#include "vidcut/error.hpp"

#include <algorithm>

using namespace vidcut;
using vidcut::testing::Gen;

namespace {

Tensor random_features(Gen& gen, std::uint32_t h, std::uint32_t w, std::uint32_t d) {
    Tensor t({h, w, d});
    for (auto& v : t.data) v = static_cast<float>(gen.real(-2.0, 2.0));
    return t;
}

AttentionMap random_map(Gen& gen, int w, int h) {
    AttentionMap m(w, h);
    for (auto& v : m.values) v = static_cast<float>(gen.real(0.0, 3.0));
    return m;
}

ClassScores one_class(std::initializer_list<float> s) {
    ClassScores c;
    c.classes = {"x"};
    for (float v : s) c.frames.push_back({v});
    return c;
}

}  // namespace

TEST_CASE("identity weights reproduce the feature channel, clamped") {
    Gen gen(1);
    const auto f = random_features(gen, 3, 4, 1);
    Tensor w({1, 1});
    w[0] = 1.0f;
    const auto a = cam(f, w, 0);
    for (std::size_t i = 0; i < a.values.size(); ++i) CHECK(a.values[i] == std::max(f[i], 0.0f));
}

TEST_CASE("zero classifier column gives an all-zero map") {
    Gen gen(2);
    const auto f = random_features(gen, 2, 5, 3);
    Tensor w({3, 2});
    for (std::uint32_t k = 0; k < 3; ++k) w[k * 2 + 1] = 1.0f;
    const auto a = cam(f, w, 0);
    for (float v : a.values) CHECK(v == 0.0f);
}

TEST_CASE("cam hand computation clamps a negative response") {
    Tensor f({1, 1, 2});
    f[0] = 2.0f;
    f[1] = 3.0f;
    Tensor w({2, 1});
    w[0] = 0.5f;
    w[1] = -1.0f;
    CHECK(cam_raw(f, w, 0).values[0] == -2.0f);
    CHECK(cam(f, w, 0).values[0] == 0.0f);
}

TEST_CASE("cam_raw is linear in the weights") {
    Gen gen(3);
    for (int trial = 0; trial < 20; ++trial) {
        const auto d = static_cast<std::uint32_t>(gen.integer(1, 40));
        const auto f = random_features(gen, 3, 3, d);
        Tensor w1({d, 2}), w2({d, 2}), sum({d, 2});
        for (std::size_t i = 0; i < sum.size(); ++i) {
            w1[i] = static_cast<float>(gen.real(-1, 1));
            w2[i] = static_cast<float>(gen.real(-1, 1));
            sum[i] = w1[i] + w2[i];
        }
        const int c = gen.integer(0, 1);
        const auto a = cam_raw(f, w1, c), b = cam_raw(f, w2, c), s = cam_raw(f, sum, c);
        for (std::size_t i = 0; i < s.values.size(); ++i) CHECK(std::abs(s.values[i] - (a.values[i] + b.values[i])) <= 1e-5);
    }
}

TEST_CASE("cam rejects mismatched shapes and classes") {
    Gen gen(4);
    const auto f = random_features(gen, 2, 2, 3);
    CHECK_THROWS_AS(cam(f, Tensor({4, 1}), 0), InputError);
    CHECK_THROWS_AS(cam(f, Tensor({3, 1}), 1), InputError);
    CHECK_THROWS_AS(cam(f, Tensor({3, 1}), -1), InputError);
    CHECK_THROWS_AS(cam(Tensor({2, 2}), Tensor({2, 1}), 0), InputError);
}

TEST_CASE("fuse_multiscale on maps already at target size") {
    Gen gen(5);
    const auto a = random_map(gen, 4, 4), b = random_map(gen, 4, 4);

    SUBCASE("single map is max-normalized") {
        const auto out = fuse_multiscale(std::vector{a}, 4, 4);
        const float peak = *std::max_element(a.values.begin(), a.values.end());
        for (std::size_t i = 0; i < out.values.size(); ++i) CHECK(out.values[i] == doctest::Approx(a.values[i] / peak));
    }
    SUBCASE("duplicates change nothing") {
        CHECK(fuse_multiscale(std::vector{a, a}, 4, 4).values == fuse_multiscale(std::vector{a}, 4, 4).values);
    }
    SUBCASE("pixel-wise maximum over the global peak") {
        const auto out = fuse_multiscale(std::vector{a, b}, 4, 4);
        float peak = 0.0f;
        for (std::size_t i = 0; i < a.values.size(); ++i) peak = std::max({peak, a.values[i], b.values[i]});
        for (std::size_t i = 0; i < out.values.size(); ++i)
            CHECK(out.values[i] == doctest::Approx(std::max(a.values[i], b.values[i]) / peak));
        CHECK(fuse_multiscale(std::vector{b, a}, 4, 4).values == out.values);
    }
}

TEST_CASE("fuse_multiscale resizes every scale") {
    Gen gen(6);
    const std::vector maps{random_map(gen, 3, 2), random_map(gen, 9, 7), random_map(gen, 12, 8)};
    const auto out = fuse_multiscale(maps, 10, 6);
    CHECK(out.width == 10);
    CHECK(out.height == 6);
    CHECK(*std::max_element(out.values.begin(), out.values.end()) == doctest::Approx(1.0f));
    auto reversed = maps;
    std::reverse(reversed.begin(), reversed.end());
    CHECK(fuse_multiscale(reversed, 10, 6).values == out.values);
    CHECK_THROWS_AS(fuse_multiscale(std::vector<AttentionMap>{}, 4, 4), InputError);
}

TEST_CASE("bilinear resize keeps constants and same-size maps") {
    AttentionMap flat(5, 3, 0.25f);
    for (float v : resize_bilinear(flat, 11, 7).values) CHECK(v == doctest::Approx(0.25f));
    Gen gen(7);
    const auto m = random_map(gen, 6, 6);
    CHECK(resize_bilinear(m, 6, 6).values == m.values);
}

TEST_CASE("superpixel attention hand cases") {
    const auto img = vidcut::testing::uniform_image(4, 2, 0, 0, 0);
    const auto p = partition_from_labels(img, {0, 0, 1, 1, 0, 0, 1, 1});

    SUBCASE("constant map normalizes to one") {
        for (double a : superpixel_attention(AttentionMap(4, 2, 0.5f), p)) CHECK(a == 1.0);
    }
    SUBCASE("attention only on region 0") {
        AttentionMap m(4, 2);
        for (int y = 0; y < 2; ++y)
            for (int x = 0; x < 2; ++x) m.at(x, y) = 1.0f;
        CHECK(superpixel_attention(m, p) == std::vector<double>{1.0, 0.0});
    }
    SUBCASE("means 0.2 and 0.8") {
        AttentionMap m(4, 2);
        for (int y = 0; y < 2; ++y)
            for (int x = 0; x < 4; ++x) m.at(x, y) = x < 2 ? 0.2f : 0.8f;
        const auto a = superpixel_attention(m, p);
        CHECK(a[0] == doctest::Approx(0.25));
        CHECK(a[1] == 1.0);
    }
    SUBCASE("all-zero map") {
        CHECK(superpixel_attention(AttentionMap(4, 2), p) == std::vector<double>{0.0, 0.0});
    }
}

TEST_CASE("relevance filter examples") {
    CHECK(relevance_filter(one_class({0.1f, 0.5f, 0.8f}), 0, 0.8).empty());
    CHECK(relevance_filter(one_class({.9f, .9f, .9f, .9f, .9f, .9f, .9f}), 0, 0.8, 5) ==
          std::vector<RelevantInterval>{{0, 6, 0}});
    CHECK(relevance_filter(one_class({.9f, .9f, .9f, .9f, .1f, .9f, .9f, .9f, .9f, .9f}), 0, 0.8, 5) ==
          std::vector<RelevantInterval>{{5, 9, 0}});
}

TEST_CASE("a stored score of exactly the threshold is not relevant") {
    CHECK(relevance_filter(one_class({0.8f, 0.8f, 0.8f, 0.8f, 0.8f}), 0, 0.8, 1).empty());
}

TEST_CASE("relevance intervals are sorted, disjoint and above threshold") {
    Gen gen(8);
    for (int trial = 0; trial < 50; ++trial) {
        ClassScores s;
        s.classes = {"a", "b"};
        const int n = gen.integer(0, 60);
        for (int t = 0; t < n; ++t)
            s.frames.push_back({static_cast<float>(gen.real(0, 1)), gen.coin(0.7) ? 0.95f : 0.2f});
        const int min_run = gen.integer(1, 6);
        const auto iv = relevance_filter(s, 1, 0.8, min_run);
        int prev_end = -2;
        for (const auto& i : iv) {
            CHECK(i.start_frame > prev_end + 1);  // maximal runs never touch
            CHECK(i.length() >= min_run);
            for (int t = i.start_frame; t <= i.end_frame; ++t) CHECK(s.frames[t][1] > 0.8f);
            if (i.start_frame > 0) CHECK_FALSE(s.frames[i.start_frame - 1][1] > 0.8f);
            if (i.end_frame + 1 < n) CHECK_FALSE(s.frames[i.end_frame + 1][1] > 0.8f);
            prev_end = i.end_frame;
        }
    }
}

TEST_CASE("class scores parse, serialize and resolve names") {
    const auto j = nlohmann::json::parse(R"({"classes":["cat","dog"],"scores":[[0.1,0.9],[0.5,0.5]]})");
    const auto s = ClassScores::from_json(j);
    CHECK(s.class_index("dog") == 1);
    CHECK(s.class_index("0") == 0);
    CHECK_THROWS_AS(s.class_index("cow"), InputError);
    CHECK_THROWS_AS(s.class_index("2"), InputError);
    CHECK_THROWS_AS(s.class_index("99999999999999999999"), InputError);
    CHECK(ClassScores::from_json(s.to_json()).frames == s.frames);
    CHECK_THROWS_AS(ClassScores::from_json(nlohmann::json::parse(R"({"classes":["a"],"scores":[[1,2]]})")),
                    InputError);
}

TEST_CASE("attention tensors accept (h, w) and (h, w, 1)") {
    Tensor t({2, 3});
    t[4] = 0.5f;
    const auto m = attention_from_tensor(t);
    CHECK(m.width == 3);
    CHECK(m.at(1, 1) == 0.5f);
    Tensor t3({2, 3, 1});
    CHECK(attention_from_tensor(t3).width == 3);
    t3[0] = -1.0f;
    CHECK_THROWS_AS(attention_from_tensor(t3), InputError);
    CHECK_THROWS_AS(attention_from_tensor(Tensor({2, 3, 2})), InputError);
    CHECK(attention_to_tensor(m).data == t.data);
}
