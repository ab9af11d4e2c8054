#include "ssicast/grid.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "ssicast/timeutil.hpp"

namespace ssicast {

namespace {

// meters per degree of latitude (spherical mean earth); longitude scales
// with cos(origin latitude). Good enough for a lat/lon anchor, per scope.
constexpr double kMetersPerDegLat = 111320.0;

void put_u16le(std::vector<unsigned char>& out, uint16_t v) {
    out.push_back(static_cast<unsigned char>(v & 0xff));
    out.push_back(static_cast<unsigned char>(v >> 8));
}

void put_u32le(std::vector<unsigned char>& out, uint32_t v) {
    for (int k = 0; k < 4; ++k) out.push_back(static_cast<unsigned char>((v >> (8 * k)) & 0xff));
}

void put_i64le(std::vector<unsigned char>& out, int64_t v) {
    auto u = static_cast<uint64_t>(v);
    for (int k = 0; k < 8; ++k) out.push_back(static_cast<unsigned char>((u >> (8 * k)) & 0xff));
}

void put_f32le(std::vector<unsigned char>& out, float v) {
    uint32_t bits;
    std::memcpy(&bits, &v, 4);
    put_u32le(out, bits);
}

void put_f64le(std::vector<unsigned char>& out, double v) {
    uint64_t bits;
    std::memcpy(&bits, &v, 8);
    put_i64le(out, static_cast<int64_t>(bits));
}

class ByteReader {
public:
    explicit ByteReader(std::span<const unsigned char> bytes) : bytes_(bytes) {}

    std::size_t offset() const { return pos_; }

    void need(std::size_t n, const char* what) const {
        if (pos_ + n > bytes_.size())
            throw TruncationError(std::string("SSI1 payload truncated while reading ") + what,
                                  bytes_.size());
    }

    uint16_t u16le(const char* what) {
        need(2, what);
        uint16_t v = uint16_t(bytes_[pos_]) | uint16_t(bytes_[pos_ + 1]) << 8;
        pos_ += 2;
        return v;
    }
    uint8_t u8(const char* what) {
        need(1, what);
        return bytes_[pos_++];
    }
    uint32_t u32le(const char* what) {
        need(4, what);
        uint32_t v = 0;
        for (int k = 0; k < 4; ++k) v |= uint32_t(bytes_[pos_ + k]) << (8 * k);
        pos_ += 4;
        return v;
    }
    int64_t i64le(const char* what) {
        need(8, what);
        uint64_t v = 0;
        for (int k = 0; k < 8; ++k) v |= uint64_t(bytes_[pos_ + k]) << (8 * k);
        pos_ += 8;
        return static_cast<int64_t>(v);
    }
    float f32le(const char* what) {
        uint32_t bits = u32le(what);
        float v;
        std::memcpy(&v, &bits, 4);
        return v;
    }
    double f64le(const char* what) {
        uint64_t bits = static_cast<uint64_t>(i64le(what));
        double v;
        std::memcpy(&v, &bits, 8);
        return v;
    }

private:
    std::span<const unsigned char> bytes_;
    std::size_t pos_ = 0;
};

}  // namespace

const char* to_string(SeriesKind kind) {
    switch (kind) {
        case SeriesKind::Irradiance: return "irradiance";
        case SeriesKind::ClearSkyIndex: return "clear_sky_index";
        case SeriesKind::CloudIndex: return "cloud_index";
    }
    return "unknown";
}

double GridSpec::pixel_lat(uint32_t i) const {
    return origin_lat - double(i) * double(pixel_size_m) / kMetersPerDegLat;
}

double GridSpec::pixel_lon(uint32_t j) const {
    double scale = kMetersPerDegLat * std::cos(origin_lat * M_PI / 180.0);
    return origin_lon + double(j) * double(pixel_size_m) / scale;
}

double GridSpec::pixel_elevation(uint32_t i, uint32_t j) const {
    if (elevation_m.empty()) return 0.0;
    return elevation_m[std::size_t(i) * width + j];
}

void GridSpec::validate() const {
    if (width < 1 || height < 1) throw std::invalid_argument("GridSpec: width and height must be >= 1");
    if (!(pixel_size_m > 0)) throw std::invalid_argument("GridSpec: pixel_size_m must be > 0");
    if (step_s == 0) throw std::invalid_argument("GridSpec: step_s must be > 0");
    if (!elevation_m.empty() && elevation_m.size() != pixel_count())
        throw std::invalid_argument("GridSpec: elevation raster does not match dimensions");
}

bool GridSpec::same_geometry(const GridSpec& other) const {
    return width == other.width && height == other.height &&
           pixel_size_m == other.pixel_size_m && origin_lat == other.origin_lat &&
           origin_lon == other.origin_lon;
}

bool GridSpec::same_axis(const GridSpec& other) const {
    return t0 == other.t0 && step_s == other.step_s && frames == other.frames;
}

MapStack::MapStack(GridSpec s, SeriesKind k, float fill) : spec(std::move(s)), kind(k) {
    spec.validate();
    data.assign(std::size_t(spec.frames) * spec.pixel_count(), fill);
}

std::span<const float> MapStack::frame(std::size_t t) const {
    return {data.data() + t * frame_size(), frame_size()};
}

std::span<float> MapStack::frame(std::size_t t) {
    return {data.data() + t * frame_size(), frame_size()};
}

void MapStack::validate() const {
    spec.validate();
    if (data.size() != std::size_t(spec.frames) * spec.pixel_count())
        throw std::invalid_argument("MapStack: payload size does not match spec");
    if (kind == SeriesKind::Irradiance) {
        for (float v : data)
            if (!is_missing(v) && v < 0.0f)
                throw std::invalid_argument("MapStack: negative irradiance");
    }
}

bool DaylightFilter::hour_in_window(int64_t timestamp) const {
    int h = utc_hour(timestamp);
    return h >= hour_min && h < hour_max;
}

void DaylightFilter::validate() const {
    if (!(hour_min >= 0 && hour_min < hour_max && hour_max <= 24))
        throw std::invalid_argument("DaylightFilter: need 0 <= hour_min < hour_max <= 24");
    if (irradiance_floor < 0) throw std::invalid_argument("DaylightFilter: floor must be >= 0");
}

PixelSeries extract_series(const MapStack& stack, uint32_t i, uint32_t j) {
    if (i >= stack.spec.height || j >= stack.spec.width)
        throw std::out_of_range("extract_series: pixel out of range");
    PixelSeries s;
    s.i = i;
    s.j = j;
    s.kind = stack.kind;
    const std::size_t n = stack.frame_count();
    s.timestamps.reserve(n);
    s.values.reserve(n);
    for (std::size_t t = 0; t < n; ++t) {
        s.timestamps.push_back(stack.spec.timestamp(t));
        s.values.push_back(stack.at(t, i, j));
    }
    return s;
}

PixelSeries apply_filter(const PixelSeries& series, const DaylightFilter& filter) {
    filter.validate();
    PixelSeries out;
    out.i = series.i;
    out.j = series.j;
    out.kind = series.kind;
    for (std::size_t k = 0; k < series.size(); ++k) {
        const double v = series.values[k];
        if (!filter.hour_in_window(series.timestamps[k])) continue;
        if (is_missing(v) || v < filter.irradiance_floor) continue;
        out.timestamps.push_back(series.timestamps[k]);
        out.values.push_back(v);
    }
    return out;
}

std::vector<unsigned char> serialize_stack(const MapStack& stack) {
    stack.spec.validate();
    if (stack.data.size() != std::size_t(stack.spec.frames) * stack.spec.pixel_count())
        throw std::invalid_argument("serialize_stack: payload size does not match spec");
    std::vector<unsigned char> out;
    out.reserve(kSsi1HeaderSize + stack.data.size() * 4);
    for (char m : {'S', 'S', 'I', '1'}) out.push_back(static_cast<unsigned char>(m));
    put_u16le(out, 1);
    out.push_back(static_cast<unsigned char>(stack.kind));
    put_u32le(out, stack.spec.width);
    put_u32le(out, stack.spec.height);
    put_u32le(out, stack.spec.frames);
    put_i64le(out, stack.spec.t0);
    put_u32le(out, stack.spec.step_s);
    put_f32le(out, stack.spec.pixel_size_m);
    put_f64le(out, stack.spec.origin_lat);
    put_f64le(out, stack.spec.origin_lon);
    for (float v : stack.data) put_f32le(out, v);
    return out;
}

MapStack parse_stack(std::span<const unsigned char> bytes) {
    if (bytes.size() < 4 || std::memcmp(bytes.data(), "SSI1", 4) != 0)
        throw FormatError("not an SSI1 file: bad magic");
    ByteReader r(bytes.subspan(4));

    MapStack stack;
    const uint16_t version = r.u16le("version");
    if (version != 1) throw FormatError("unsupported SSI1 version " + std::to_string(version));
    const uint8_t kind = r.u8("kind");
    if (kind > 2) throw FormatError("unknown SSI1 kind byte " + std::to_string(kind));
    stack.kind = static_cast<SeriesKind>(kind);
    stack.spec.width = r.u32le("width");
    stack.spec.height = r.u32le("height");
    stack.spec.frames = r.u32le("frame count");
    stack.spec.t0 = r.i64le("t0");
    stack.spec.step_s = r.u32le("step_s");
    stack.spec.pixel_size_m = r.f32le("pixel_size_m");
    stack.spec.origin_lat = r.f64le("origin_lat");
    stack.spec.origin_lon = r.f64le("origin_lon");
    stack.spec.validate();

    const std::size_t cells = std::size_t(stack.spec.frames) * stack.spec.pixel_count();
    const std::size_t need = cells * 4;
    if (bytes.size() - kSsi1HeaderSize < need)
        throw TruncationError("SSI1 payload truncated", bytes.size());
    stack.data.resize(cells);
    const unsigned char* p = bytes.data() + kSsi1HeaderSize;
    for (std::size_t c = 0; c < cells; ++c) {
        uint32_t bits = uint32_t(p[0]) | uint32_t(p[1]) << 8 | uint32_t(p[2]) << 16 |
                        uint32_t(p[3]) << 24;
        std::memcpy(&stack.data[c], &bits, 4);
        p += 4;
    }
    return stack;
}

void write_stack(const MapStack& stack, const std::string& path) {
    const std::vector<unsigned char> bytes = serialize_stack(stack);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("short write to " + path);
}

MapStack read_stack(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
    try {
        return parse_stack(bytes);
    } catch (const FormatError& e) {
        throw FormatError(path + ": " + e.what());
    }
}

MapStack read_stack_csv(const std::string& path, const GridSpec& spec, SeriesKind kind) {
    spec.validate();
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw FormatError(path + ": empty CSV");
    if (line.rfind("t,i,j,value", 0) != 0)
        throw FormatError(path + ": expected header t,i,j,value");

    MapStack stack(spec, kind, kMissingValue);
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string cell;
        long long t, i, j;
        double value;
        char comma;
        if (!(ss >> t >> comma >> i >> comma >> j >> comma >> value))
            throw FormatError(path + ": bad CSV row at line " + std::to_string(lineno));
        if (t < 0 || t >= static_cast<long long>(spec.frames) || i < 0 ||
            i >= static_cast<long long>(spec.height) || j < 0 ||
            j >= static_cast<long long>(spec.width))
            throw FormatError(path + ": out-of-range sample at line " + std::to_string(lineno));
        stack.at(std::size_t(t), uint32_t(i), uint32_t(j)) = static_cast<float>(value);
    }
    return stack;
}

void write_sidecar(const std::string& artifact_path,
                   const std::vector<std::pair<std::string, std::string>>& entries) {
    const std::string path = artifact_path + ".meta";
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    for (const auto& [k, v] : entries) out << k << "=" << v << "\n";
}

}  // namespace ssicast
