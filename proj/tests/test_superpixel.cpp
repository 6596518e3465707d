#include "doctest.h"

#include "oracles.hpp"
#include "support.hpp"
#include "vidcut/error.hpp"
#include "vidcut/superpixel.hpp"

#include <map>
#include <set>

using namespace vidcut;
using vidcut::testing::Gen;

namespace {

std::map<std::uint32_t, std::size_t> sizes_of(const SuperpixelPartition& p) {
    std::map<std::uint32_t, std::size_t> out;
    for (auto l : p.labels) ++out[l];
    return out;
}

}  // namespace

TEST_CASE("uniform 16x16 with region 8 gives four 64-pixel regions") {
    const auto img = vidcut::testing::uniform_image(16, 16, 128, 128, 128);
    for (double color_scale : {0.0, 20.0, 100.0}) {
        SlicParams params;
        params.region_size = 8;
        params.color_scale = color_scale;
        const auto p = slic(img, params);
        REQUIRE(p.count() == 4);
        for (const auto& r : p.regions) CHECK(r.pixel_count == 64);
        // each region is one 8x8 quadrant
        for (int y = 0; y < 16; ++y)
            for (int x = 0; x < 16; ++x) CHECK(p.at(x, y) == p.at((x / 8) * 8, (y / 8) * 8));
    }
}

TEST_CASE("region size covering the image yields one region") {
    Gen gen(1);
    const auto img = gen.image(20, 13, 3);
    SlicParams params;
    params.region_size = 20;
    const auto p = slic(img, params);
    CHECK(p.count() == 1);
    CHECK(p.regions[0].pixel_count == 20u * 13u);

    params.region_size = 64;
    CHECK(slic(gen.image(5, 3, 3), params).count() == 1);
}

TEST_CASE("no region spans a two-color vertical edge") {
    for (int w : {16, 32, 40}) {
        Image img(w, 24, 3);
        for (int y = 0; y < 24; ++y)
            for (int x = 0; x < w; ++x)
                for (int c = 0; c < 3; ++c) img.at(x, y, c) = x < w / 2 ? 20 : 230;
        SlicParams params;
        params.region_size = w / 2;
        const auto p = slic(img, params);
        std::map<std::uint32_t, std::set<bool>> sides;
        for (int y = 0; y < 24; ++y)
            for (int x = 0; x < w; ++x) sides[p.at(x, y)].insert(x < w / 2);
        for (const auto& [label, s] : sides) CHECK(s.size() == 1);
    }
}

TEST_CASE("slic output satisfies every partition invariant") {
    Gen gen(2);
    for (int trial = 0; trial < 12; ++trial) {
        const int w = gen.integer(1, 60), h = gen.integer(1, 45);
        const auto img = gen.image(w, h, gen.coin() ? 3 : 1);
        SlicParams params;
        params.region_size = gen.integer(2, 20);
        params.compactness = gen.real(1.0, 40.0);
        params.iterations = gen.integer(1, 5);
        const auto p = slic(img, params);
        CHECK_NOTHROW(validate_partition(p, img));

        std::size_t total = 0;
        for (const auto& r : p.regions) total += r.pixel_count;
        CHECK(total == static_cast<std::size_t>(w) * h);

        // labels are renumbered in raster order of first appearance
        std::uint32_t next = 0;
        std::set<std::uint32_t> seen;
        for (auto l : p.labels)
            if (seen.insert(l).second) CHECK(l == next++);
    }
}

TEST_CASE("slic is deterministic") {
    Gen gen(4);
    const auto img = gen.image(64, 48, 3);
    const auto a = slic(img);
    const auto b = slic(img);
    CHECK(a.labels == b.labels);
}

TEST_CASE("stats recompute exactly from the label map") {
    Gen gen(5);
    const auto img = gen.image(23, 17, 3);
    const auto p = partition_from_labels(img, gen.block_labels(23, 17, 6));
    std::vector<std::array<double, 5>> acc(p.count(), std::array<double, 5>{});
    for (int y = 0; y < 17; ++y)
        for (int x = 0; x < 23; ++x) {
            auto& a = acc[p.at(x, y)];
            for (int c = 0; c < 3; ++c) a[c] += img.at(x, y, c) / 255.0;
            a[3] += x + 0.5;
            a[4] += y + 0.5;
        }
    for (std::size_t k = 0; k < p.count(); ++k) {
        const double n = p.regions[k].pixel_count;
        for (int c = 0; c < 3; ++c) CHECK(p.regions[k].mean_rgb[c] == doctest::Approx(acc[k][c] / n).epsilon(1e-12));
        CHECK(p.regions[k].centroid[0] == doctest::Approx(acc[k][3] / n).epsilon(1e-12));
        CHECK(p.regions[k].centroid[1] == doctest::Approx(acc[k][4] / n).epsilon(1e-12));
    }
}

TEST_CASE("validate_partition catches broken partitions") {
    const auto img = vidcut::testing::uniform_image(4, 1, 0, 0, 0);
    auto p = partition_from_labels(img, {0, 1, 1, 0});
    CHECK_THROWS_AS(validate_partition(p, img), InvariantError);  // label 0 is split

    auto q = partition_from_labels(img, {0, 0, 1, 1});
    CHECK_NOTHROW(validate_partition(q, img));
    q.regions[1].pixel_count = 3;
    CHECK_THROWS_AS(validate_partition(q, img), InvariantError);
}

TEST_CASE("region adjacency on hand cases") {
    const auto img = vidcut::testing::uniform_image(4, 4, 0, 0, 0);
    SUBCASE("vertical split") {
        std::vector<std::uint32_t> l(16);
        for (int i = 0; i < 16; ++i) l[i] = (i % 4) < 2 ? 0 : 1;
        const auto adj = region_adjacency(partition_from_labels(img, l));
        REQUIRE(adj.size() == 1);
        CHECK(adj[0] == RegionAdjacency{0, 1, 4});
    }
    SUBCASE("single region") {
        CHECK(region_adjacency(partition_from_labels(img, std::vector<std::uint32_t>(16, 0))).empty());
    }
    SUBCASE("2x2 grid has no diagonal pairs") {
        std::vector<std::uint32_t> l(16);
        for (int i = 0; i < 16; ++i) l[i] = ((i / 4) < 2 ? 0 : 2) + ((i % 4) < 2 ? 0 : 1);
        const auto adj = region_adjacency(partition_from_labels(img, l));
        CHECK(adj.size() == 4);
        for (const auto& a : adj) CHECK(a.boundary_length == 2);
    }
}

TEST_CASE("region adjacency matches a pixel-scan oracle") {
    Gen gen(6);
    for (int trial = 0; trial < 30; ++trial) {
        const int w = gen.integer(1, 30), h = gen.integer(1, 30);
        const auto img = gen.image(w, h, 3);
        const auto p = slic(img, SlicParams{gen.integer(2, 9), 10.0, 3, 20.0});
        const auto expect = oracle::adjacency(p);
        const auto got = region_adjacency(p);
        REQUIRE(got.size() == expect.size());
        std::size_t k = 0;
        for (const auto& [pair, len] : expect) {
            CHECK(got[k].a == pair.first);
            CHECK(got[k].b == pair.second);
            CHECK(got[k].boundary_length == len);
            ++k;
        }
    }
}

TEST_CASE("label dump and stats sidecar describe the partition") {
    Gen gen(7);
    const auto img = gen.image(10, 6, 3);
    const auto p = partition_from_labels(img, gen.block_labels(10, 6, 4));
    const auto dump = partition_to_image16(p);
    for (std::size_t i = 0; i < p.labels.size(); ++i) CHECK(dump.data[i] == p.labels[i]);
    const auto j = partition_stats_json(p);
    CHECK(j.at("count").get<std::size_t>() == p.count());
    CHECK(j.at("regions").size() == p.count());
    std::size_t total = 0;
    for (const auto& [label, n] : sizes_of(p)) total += n;
    CHECK(total == 60);
}
