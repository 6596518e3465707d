#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace vidcut {

using Bytes = std::vector<std::uint8_t>;

// Interleaved 8-bit raster, row-major, 1 (gray) or 3 (RGB) channels.
struct Image {
    int width = 0;
    int height = 0;
    int channels = 0;
    std::vector<std::uint8_t> data;

    Image() = default;
    Image(int w, int h, int c);

    std::uint8_t& at(int x, int y, int c = 0) {
        return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
    std::uint8_t at(int x, int y, int c = 0) const {
        return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
    std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }
};

// Binary mask; values are 0 (background) or 1 (foreground).
struct SegmentationMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> values;

    SegmentationMask() = default;
    SegmentationMask(int w, int h, std::uint8_t fill = 0);

    std::uint8_t& at(int x, int y) { return values[static_cast<std::size_t>(y) * width + x]; }
    std::uint8_t at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }

    friend bool operator==(const SegmentationMask&, const SegmentationMask&) = default;
};

// Dense optical flow; u is +x (right), v is +y (down), both in pixels.
struct FlowField {
    int width = 0;
    int height = 0;
    std::vector<float> u;
    std::vector<float> v;

    FlowField() = default;
    FlowField(int w, int h);

    std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * width + x; }
};

// Row-major float32 array with 1 to 4 dimensions.
struct Tensor {
    std::vector<std::uint32_t> dims;
    std::vector<float> data;

    Tensor() = default;
    explicit Tensor(std::vector<std::uint32_t> shape);

    std::size_t size() const { return data.size(); }
    float& operator[](std::size_t i) { return data[i]; }
    float operator[](std::size_t i) const { return data[i]; }
};

// 16-bit gray raster; used for superpixel label dumps.
struct Image16 {
    int width = 0;
    int height = 0;
    std::vector<std::uint16_t> data;
};

// In-memory codecs. Decoders throw FormatError / TruncationError.
Bytes encode_netpbm(const Image& img);
Image decode_netpbm(std::span<const std::uint8_t> bytes);
Bytes encode_netpbm16(const Image16& img);
Image16 decode_netpbm16(std::span<const std::uint8_t> bytes);
Bytes encode_mask(const SegmentationMask& mask);
SegmentationMask decode_mask(std::span<const std::uint8_t> bytes);
Bytes encode_flo(const FlowField& flow);
FlowField decode_flo(std::span<const std::uint8_t> bytes);
Bytes encode_tensor(const Tensor& t);
Tensor decode_tensor(std::span<const std::uint8_t> bytes);

Bytes read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

Image read_netpbm(const std::filesystem::path& path);
void write_netpbm(const std::filesystem::path& path, const Image& img);
SegmentationMask read_mask(const std::filesystem::path& path);
void write_mask(const std::filesystem::path& path, const SegmentationMask& mask);
FlowField read_flo(const std::filesystem::path& path);
void write_flo(const std::filesystem::path& path, const FlowField& flow);
Tensor read_tensor(const std::filesystem::path& path);
void write_tensor(const std::filesystem::path& path, const Tensor& t);

}  // namespace vidcut
