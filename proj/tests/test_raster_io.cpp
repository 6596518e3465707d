#include "doctest.h"

#include "support.hpp"
#include "vidcut/error.hpp"
#include "vidcut/raster_io.hpp"

#include <cstring>
#include <limits>
#include <string>

using namespace vidcut;
using vidcut::testing::Gen;

namespace {

Bytes bytes_of(const std::string& header, std::initializer_list<std::uint8_t> payload = {}) {
    Bytes b(header.begin(), header.end());
    b.insert(b.end(), payload.begin(), payload.end());
    return b;
}

void put_u32(Bytes& b, std::uint32_t v) {
    for (int k = 0; k < 4; ++k) b.push_back(static_cast<std::uint8_t>(v >> (8 * k)));
}

void put_f32(Bytes& b, float f) {
    std::uint32_t v;
    std::memcpy(&v, &f, 4);
    put_u32(b, v);
}

}  // namespace

TEST_CASE("P5 mask payload decodes 255 as foreground") {
    const auto m = decode_mask(bytes_of("P5\n2 2\n255\n", {0, 255, 255, 0}));
    CHECK(m.width == 2);
    CHECK(m.height == 2);
    CHECK(m.values == std::vector<std::uint8_t>{0, 1, 1, 0});
    CHECK(encode_mask(m) == bytes_of("P5\n2 2\n255\n", {0, 255, 255, 0}));
}

TEST_CASE("P6 pixel keeps channel order") {
    const auto img = decode_netpbm(bytes_of("P6\n1 1\n255\n", {10, 20, 30}));
    REQUIRE(img.channels == 3);
    CHECK(img.at(0, 0, 0) == 10);
    CHECK(img.at(0, 0, 1) == 20);
    CHECK(img.at(0, 0, 2) == 30);
}

TEST_CASE("netpbm header accepts comments and arbitrary whitespace") {
    const auto img = decode_netpbm(bytes_of("P5 # gray\n# size next\n 2\t1 # w h\n255\n", {7, 9}));
    CHECK(img.width == 2);
    CHECK(img.height == 1);
    CHECK(img.data == std::vector<std::uint8_t>{7, 9});
}

TEST_CASE("netpbm rejects malformed input with an offset") {
    SUBCASE("bad magic") {
        try {
            decode_netpbm(bytes_of("P3\n1 1\n255\n", {0}));
            FAIL("expected FormatError");
        } catch (const FormatError& e) {
            CHECK(e.offset() == 0);
        }
    }
    SUBCASE("non-digit width") {
        try {
            decode_netpbm(bytes_of("P5\nx 1\n255\n", {0}));
            FAIL("expected FormatError");
        } catch (const FormatError& e) {
            CHECK(e.offset() == 3);
        }
    }
    SUBCASE("truncated pixels") { CHECK_THROWS_AS(decode_netpbm(bytes_of("P5\n2 2\n255\n", {1, 2, 3})), TruncationError); }
    SUBCASE("trailing bytes") { CHECK_THROWS_AS(decode_netpbm(bytes_of("P5\n1 1\n255\n", {1, 2})), FormatError); }
    SUBCASE("zero width") { CHECK_THROWS_AS(decode_netpbm(bytes_of("P5\n0 1\n255\n")), FormatError); }
    SUBCASE("maxval other than 255") { CHECK_THROWS_AS(decode_netpbm(bytes_of("P5\n1 1\n15\n", {1})), FormatError); }
    SUBCASE("header cut short") { CHECK_THROWS_AS(decode_netpbm(bytes_of("P5\n4")), TruncationError); }
}

TEST_CASE("mask values other than 0 and 255 are rejected") {
    try {
        decode_mask(bytes_of("P5\n3 1\n255\n", {0, 255, 7}));
        FAIL("expected FormatError");
    } catch (const FormatError& e) {
        CHECK(e.offset() == 13);
    }
    CHECK_THROWS_AS(decode_mask(bytes_of("P6\n1 1\n255\n", {0, 0, 0})), FormatError);
}

TEST_CASE("16-bit P5 is big-endian") {
    Image16 img{2, 1, {0x0102, 0xfffe}};
    const auto b = encode_netpbm16(img);
    CHECK(b == bytes_of("P5\n2 1\n65535\n", {0x01, 0x02, 0xff, 0xfe}));
    const auto back = decode_netpbm16(b);
    CHECK(back.data == img.data);
}

TEST_CASE("flo file for a single pixel is 20 bytes") {
    FlowField f(1, 1);
    f.u[0] = 1.0f;
    f.v[0] = -2.0f;
    Bytes expected{'P', 'I', 'E', 'H'};
    put_u32(expected, 1);
    put_u32(expected, 1);
    put_f32(expected, 1.0f);
    put_f32(expected, -2.0f);
    const auto b = encode_flo(f);
    CHECK(b.size() == 20);
    CHECK(b == expected);
    const auto back = decode_flo(b);
    CHECK(back.u[0] == 1.0f);
    CHECK(back.v[0] == -2.0f);
}

TEST_CASE("flo rejects NaN, bad magic and bad sizes") {
    FlowField f(2, 1);
    auto b = encode_flo(f);
    SUBCASE("NaN") {
        const float nan = std::numeric_limits<float>::quiet_NaN();
        std::memcpy(b.data() + 16, &nan, 4);
        CHECK_THROWS_AS(decode_flo(b), FormatError);
    }
    SUBCASE("magic") {
        b[0] = 'X';
        CHECK_THROWS_AS(decode_flo(b), FormatError);
    }
    SUBCASE("negative width") {
        b[4] = 0xff;
        b[5] = 0xff;
        b[6] = 0xff;
        b[7] = 0xff;
        CHECK_THROWS_AS(decode_flo(b), FormatError);
    }
    SUBCASE("truncated") {
        b.pop_back();
        CHECK_THROWS_AS(decode_flo(b), TruncationError);
    }
    SUBCASE("writer refuses non-finite") {
        f.u[1] = std::numeric_limits<float>::infinity();
        CHECK_THROWS_AS(encode_flo(f), InputError);
    }
}

TEST_CASE("zero flow decodes to zero displacements") {
    const auto back = decode_flo(encode_flo(FlowField(5, 3)));
    for (std::size_t i = 0; i < back.u.size(); ++i) {
        CHECK(back.u[i] == 0.0f);
        CHECK(back.v[i] == 0.0f);
    }
}

TEST_CASE("TNSR layout is row-major") {
    Bytes b{'T', 'N', 'S', 'R'};
    put_u32(b, 2);
    put_u32(b, 2);
    put_u32(b, 2);
    for (float v : {1.0f, 2.0f, 3.0f, 4.0f}) put_f32(b, v);
    const auto t = decode_tensor(b);
    CHECK(t.dims == std::vector<std::uint32_t>{2, 2});
    CHECK(t[1 * 2 + 0] == 3.0f);
    CHECK(encode_tensor(t) == b);
}

TEST_CASE("TNSR scalar score") {
    Tensor t({1});
    t[0] = 0.8f;
    CHECK(decode_tensor(encode_tensor(t))[0] == 0.8f);
}

TEST_CASE("TNSR rejects corrupt headers before allocating") {
    Tensor t({2, 3});
    auto good = encode_tensor(t);
    SUBCASE("magic") {
        good[3] = 'X';
        CHECK_THROWS_AS(decode_tensor(good), FormatError);
    }
    SUBCASE("ndims 0 and 5") {
        good[4] = 0;
        CHECK_THROWS_AS(decode_tensor(good), FormatError);
        good[4] = 5;
        CHECK_THROWS_AS(decode_tensor(good), FormatError);
    }
    SUBCASE("huge dims on a tiny file") {
        Bytes b{'T', 'N', 'S', 'R'};
        put_u32(b, 4);
        for (int k = 0; k < 4; ++k) put_u32(b, 0xffffffffu);
        CHECK_THROWS_AS(decode_tensor(b), FormatError);
    }
    SUBCASE("zero dim") {
        good[8] = 0;
        CHECK_THROWS_AS(decode_tensor(good), FormatError);
    }
    SUBCASE("payload length mismatch") {
        good.push_back(0);
        CHECK_THROWS_AS(decode_tensor(good), FormatError);
        good.resize(good.size() - 5);
        CHECK_THROWS_AS(decode_tensor(good), TruncationError);
    }
}

TEST_CASE("random payloads round-trip byte for byte") {
    Gen gen(11);
    for (int trial = 0; trial < 25; ++trial) {
        const auto img = gen.image(gen.integer(1, 17), gen.integer(1, 17), gen.coin() ? 1 : 3);
        const auto b = encode_netpbm(img);
        CHECK(encode_netpbm(decode_netpbm(b)) == b);
        CHECK(decode_netpbm(b).data == img.data);

        FlowField f(gen.integer(1, 9), gen.integer(1, 9));
        for (auto& u : f.u) u = gen.finite_float();
        for (auto& v : f.v) v = gen.finite_float();
        const auto fb = encode_flo(f);
        CHECK(encode_flo(decode_flo(fb)) == fb);

        std::vector<std::uint32_t> dims(static_cast<std::size_t>(gen.integer(1, 4)));
        for (auto& d : dims) d = static_cast<std::uint32_t>(gen.integer(1, 5));
        Tensor t(dims);
        for (auto& v : t.data) v = gen.finite_float();
        const auto tb = encode_tensor(t);
        CHECK(encode_tensor(decode_tensor(tb)) == tb);
    }
}

TEST_CASE("file helpers report the path") {
    vidcut::testing::TempDir dir("rio");
    const auto p = dir / "bad.pgm";
    write_file(p, bytes_of("P5\n1 1\n255\n"));
    try {
        read_netpbm(p);
        FAIL("expected InputError");
    } catch (const InputError& e) {
        CHECK(std::string(e.what()).find("bad.pgm") != std::string::npos);
    }
    CHECK_THROWS_AS(read_netpbm(dir / "missing.pgm"), InputError);
}
