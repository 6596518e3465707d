#include "vidcut/raster_io.hpp"

#include "vidcut/error.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <string>

namespace vidcut {

Image::Image(int w, int h, int c)
    : width(w), height(h), channels(c), data(static_cast<std::size_t>(w) * h * c, 0) {}

SegmentationMask::SegmentationMask(int w, int h, std::uint8_t fill)
    : width(w), height(h), values(static_cast<std::size_t>(w) * h, fill) {}

FlowField::FlowField(int w, int h)
    : width(w), height(h),
      u(static_cast<std::size_t>(w) * h, 0.0f),
      v(static_cast<std::size_t>(w) * h, 0.0f) {}

Tensor::Tensor(std::vector<std::uint32_t> shape) : dims(std::move(shape)) {
    std::size_t n = 1;
    for (auto d : dims) n *= d;
    data.assign(n, 0.0f);
}

namespace {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

class ByteReader {
public:
    explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    std::size_t offset() const { return pos_; }
    std::size_t remaining() const { return bytes_.size() - pos_; }

    std::span<const std::uint8_t> take(std::size_t n, const char* what) {
        if (remaining() < n) throw TruncationError(std::string("truncated ") + what, bytes_.size());
        auto out = bytes_.subspan(pos_, n);
        pos_ += n;
        return out;
    }

    std::uint32_t u32le(const char* what) {
        auto b = take(4, what);
        return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
               (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
    }
    std::int32_t i32le(const char* what) { return std::bit_cast<std::int32_t>(u32le(what)); }
    float f32le(const char* what) { return std::bit_cast<float>(u32le(what)); }

private:
    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

void put_u32le(Bytes& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 24));
}
void put_f32le(Bytes& out, float v) { put_u32le(out, std::bit_cast<std::uint32_t>(v)); }

void put_text(Bytes& out, const std::string& s) { out.insert(out.end(), s.begin(), s.end()); }

// --- netpbm header ---------------------------------------------------------

bool is_space(std::uint8_t c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f'; }

struct PnmHeader {
    char kind = 0;  // '5' or '6'
    int width = 0;
    int height = 0;
    int maxval = 0;
    std::size_t data_offset = 0;
};

PnmHeader parse_pnm_header(std::span<const std::uint8_t> b) {
    if (b.size() < 2) throw TruncationError("netpbm: missing magic", b.size());
    if (b[0] != 'P' || (b[1] != '5' && b[1] != '6'))
        throw FormatError("netpbm: magic must be P5 or P6", 0);
    PnmHeader h;
    h.kind = static_cast<char>(b[1]);
    std::size_t pos = 2;

    auto read_uint = [&](const char* field) -> int {
        // whitespace and '#' comments may precede every header token
        while (true) {
            if (pos >= b.size()) throw TruncationError(std::string("netpbm: missing ") + field, pos);
            if (is_space(b[pos])) {
                ++pos;
            } else if (b[pos] == '#') {
                while (pos < b.size() && b[pos] != '\n' && b[pos] != '\r') ++pos;
            } else {
                break;
            }
        }
        if (b[pos] < '0' || b[pos] > '9')
            throw FormatError(std::string("netpbm: expected digits for ") + field, pos);
        long long v = 0;
        while (pos < b.size() && b[pos] >= '0' && b[pos] <= '9') {
            v = v * 10 + (b[pos] - '0');
            if (v > std::numeric_limits<int>::max())
                throw FormatError(std::string("netpbm: ") + field + " too large", pos);
            ++pos;
        }
        return static_cast<int>(v);
    };

    h.width = read_uint("width");
    h.height = read_uint("height");
    h.maxval = read_uint("maxval");
    if (h.width < 1 || h.height < 1) throw FormatError("netpbm: zero dimension", pos);
    if (h.maxval < 1 || h.maxval > 65535) throw FormatError("netpbm: maxval out of range", pos);
    if (pos >= b.size()) throw TruncationError("netpbm: missing separator after maxval", pos);
    if (!is_space(b[pos])) throw FormatError("netpbm: expected whitespace after maxval", pos);
    h.data_offset = pos + 1;
    return h;
}

std::span<const std::uint8_t> pnm_payload(std::span<const std::uint8_t> b, const PnmHeader& h,
                                          std::size_t bytes_per_sample) {
    const int channels = h.kind == '6' ? 3 : 1;
    const std::size_t need =
        static_cast<std::size_t>(h.width) * static_cast<std::size_t>(h.height) * channels * bytes_per_sample;
    const std::size_t have = b.size() - h.data_offset;
    if (have < need) throw TruncationError("netpbm: pixel data truncated", b.size());
    if (have > need) throw FormatError("netpbm: trailing bytes after pixel data", h.data_offset + need);
    return b.subspan(h.data_offset, need);
}

}  // namespace

Bytes encode_netpbm(const Image& img) {
    if (img.channels != 1 && img.channels != 3) throw InputError("netpbm: channels must be 1 or 3");
    if (img.data.size() != img.pixel_count() * img.channels) throw InputError("netpbm: data size mismatch");
    Bytes out;
    put_text(out, std::string(img.channels == 1 ? "P5" : "P6") + "\n" + std::to_string(img.width) + " " +
                      std::to_string(img.height) + "\n255\n");
    out.insert(out.end(), img.data.begin(), img.data.end());
    return out;
}

Image decode_netpbm(std::span<const std::uint8_t> bytes) {
    const auto h = parse_pnm_header(bytes);
    if (h.maxval != 255) throw FormatError("netpbm: only maxval 255 is supported for images", h.data_offset - 1);
    auto payload = pnm_payload(bytes, h, 1);
    Image img;
    img.width = h.width;
    img.height = h.height;
    img.channels = h.kind == '6' ? 3 : 1;
    img.data.assign(payload.begin(), payload.end());
    return img;
}

Bytes encode_netpbm16(const Image16& img) {
    if (img.data.size() != static_cast<std::size_t>(img.width) * img.height)
        throw InputError("netpbm16: data size mismatch");
    Bytes out;
    put_text(out, "P5\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n65535\n");
    // netpbm stores 16-bit samples most significant byte first
    for (auto v : img.data) {
        out.push_back(static_cast<std::uint8_t>(v >> 8));
        out.push_back(static_cast<std::uint8_t>(v));
    }
    return out;
}

Image16 decode_netpbm16(std::span<const std::uint8_t> bytes) {
    const auto h = parse_pnm_header(bytes);
    if (h.kind != '5') throw FormatError("netpbm16: expected P5", 0);
    if (h.maxval <= 255) throw FormatError("netpbm16: expected 16-bit maxval", h.data_offset - 1);
    auto payload = pnm_payload(bytes, h, 2);
    Image16 img{h.width, h.height, {}};
    img.data.resize(payload.size() / 2);
    for (std::size_t i = 0; i < img.data.size(); ++i)
        img.data[i] = static_cast<std::uint16_t>((payload[2 * i] << 8) | payload[2 * i + 1]);
    return img;
}

Bytes encode_mask(const SegmentationMask& mask) {
    Image img(mask.width, mask.height, 1);
    for (std::size_t i = 0; i < mask.values.size(); ++i) {
        if (mask.values[i] > 1) throw InvariantError("mask value outside {0,1}");
        img.data[i] = mask.values[i] ? 255 : 0;
    }
    return encode_netpbm(img);
}

SegmentationMask decode_mask(std::span<const std::uint8_t> bytes) {
    const auto h = parse_pnm_header(bytes);
    if (h.kind != '5') throw FormatError("mask: expected P5", 0);
    Image img = decode_netpbm(bytes);
    SegmentationMask mask(img.width, img.height);
    for (std::size_t i = 0; i < img.data.size(); ++i) {
        const auto v = img.data[i];
        if (v != 0 && v != 255) throw FormatError("mask: value must be 0 or 255", h.data_offset + i);
        mask.values[i] = v ? 1 : 0;
    }
    return mask;
}

namespace {
constexpr std::uint8_t kFloMagic[4] = {'P', 'I', 'E', 'H'};
constexpr std::uint8_t kTensorMagic[4] = {'T', 'N', 'S', 'R'};
}  // namespace

Bytes encode_flo(const FlowField& flow) {
    if (flow.width < 1 || flow.height < 1) throw InputError("flo: dimensions must be positive");
    const std::size_t n = static_cast<std::size_t>(flow.width) * flow.height;
    if (flow.u.size() != n || flow.v.size() != n) throw InputError("flo: data size mismatch");
    Bytes out;
    out.reserve(12 + 8 * n);
    out.insert(out.end(), std::begin(kFloMagic), std::end(kFloMagic));
    put_u32le(out, static_cast<std::uint32_t>(flow.width));
    put_u32le(out, static_cast<std::uint32_t>(flow.height));
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(flow.u[i]) || !std::isfinite(flow.v[i])) throw InputError("flo: non-finite flow value");
        put_f32le(out, flow.u[i]);
        put_f32le(out, flow.v[i]);
    }
    return out;
}

FlowField decode_flo(std::span<const std::uint8_t> bytes) {
    ByteReader r(bytes);
    auto magic = r.take(4, "flo magic");
    if (std::memcmp(magic.data(), kFloMagic, 4) != 0) throw FormatError("flo: bad magic", 0);
    const std::int32_t w = r.i32le("flo width");
    const std::int32_t h = r.i32le("flo height");
    if (w <= 0 || h <= 0) throw FormatError("flo: dimension must be positive", 4);
    const std::uint64_t n = static_cast<std::uint64_t>(w) * static_cast<std::uint64_t>(h);
    if (n * 8 > r.remaining()) throw TruncationError("flo: flow data truncated", bytes.size());
    if (n * 8 < r.remaining()) throw FormatError("flo: trailing bytes", 12 + n * 8);
    FlowField flow(w, h);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t at = r.offset();
        flow.u[i] = r.f32le("flo u");
        flow.v[i] = r.f32le("flo v");
        if (!std::isfinite(flow.u[i]) || !std::isfinite(flow.v[i]))
            throw FormatError("flo: non-finite flow value", at);
    }
    return flow;
}

Bytes encode_tensor(const Tensor& t) {
    if (t.dims.empty() || t.dims.size() > 4) throw InputError("tensor: 1 to 4 dims required");
    std::uint64_t n = 1;
    for (auto d : t.dims) n *= d;
    if (n != t.data.size()) throw InputError("tensor: data size does not match dims");
    Bytes out;
    out.reserve(8 + 4 * t.dims.size() + 4 * t.data.size());
    out.insert(out.end(), std::begin(kTensorMagic), std::end(kTensorMagic));
    put_u32le(out, static_cast<std::uint32_t>(t.dims.size()));
    for (auto d : t.dims) put_u32le(out, d);
    for (float v : t.data) {
        if (!std::isfinite(v)) throw InputError("tensor: non-finite value");
        put_f32le(out, v);
    }
    return out;
}

Tensor decode_tensor(std::span<const std::uint8_t> bytes) {
    ByteReader r(bytes);
    auto magic = r.take(4, "tensor magic");
    if (std::memcmp(magic.data(), kTensorMagic, 4) != 0) throw FormatError("tensor: bad magic", 0);
    const std::uint32_t ndims = r.u32le("tensor ndims");
    if (ndims < 1 || ndims > 4) throw FormatError("tensor: ndims must be 1..4", 4);
    std::vector<std::uint32_t> dims(ndims);
    // validate the element count against the file size before allocating
    const std::uint64_t budget = bytes.size() / 4 + 1;
    std::uint64_t n = 1;
    for (std::uint32_t i = 0; i < ndims; ++i) {
        const std::size_t at = r.offset();
        dims[i] = r.u32le("tensor dims");
        if (dims[i] == 0) throw FormatError("tensor: zero-length dimension", at);
        n *= dims[i];
        if (n > budget) throw FormatError("tensor: dims product exceeds payload", at);
    }
    if (n * 4 > r.remaining()) throw TruncationError("tensor: payload shorter than dims product", bytes.size());
    if (n * 4 < r.remaining()) throw FormatError("tensor: payload longer than dims product", r.offset() + n * 4);
    Tensor t;
    t.dims = std::move(dims);
    t.data.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t at = r.offset();
        t.data[i] = r.f32le("tensor data");
        if (!std::isfinite(t.data[i])) throw FormatError("tensor: non-finite value", at);
    }
    return t;
}

Bytes read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path.string());
    Bytes out((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return out;
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

namespace {
template <class F>
auto with_path(const std::filesystem::path& path, F&& decode) {
    auto bytes = read_file(path);
    try {
        return decode(std::span<const std::uint8_t>(bytes));
    } catch (const FormatError& e) {
        throw InputError(path.string() + ": " + e.what());
    }
}
}  // namespace

Image read_netpbm(const std::filesystem::path& path) { return with_path(path, decode_netpbm); }
void write_netpbm(const std::filesystem::path& path, const Image& img) { write_file(path, encode_netpbm(img)); }
SegmentationMask read_mask(const std::filesystem::path& path) { return with_path(path, decode_mask); }
void write_mask(const std::filesystem::path& path, const SegmentationMask& m) { write_file(path, encode_mask(m)); }
FlowField read_flo(const std::filesystem::path& path) { return with_path(path, decode_flo); }
void write_flo(const std::filesystem::path& path, const FlowField& f) { write_file(path, encode_flo(f)); }
Tensor read_tensor(const std::filesystem::path& path) { return with_path(path, decode_tensor); }
void write_tensor(const std::filesystem::path& path, const Tensor& t) { write_file(path, encode_tensor(t)); }

}  // namespace vidcut
