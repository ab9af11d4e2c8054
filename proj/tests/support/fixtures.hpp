#ifndef SSICAST_TESTS_FIXTURES_HPP
#define SSICAST_TESTS_FIXTURES_HPP

#include <functional>

#include "ssicast/grid.hpp"
#include "ssicast/timeutil.hpp"

namespace ssicast::testing {

inline GridSpec make_spec(uint32_t w, uint32_t h, uint32_t frames,
                          int64_t t0 = utc_timestamp(2015, 6, 1), double lat = 42.0,
                          double lon = 8.8) {
    GridSpec spec;
    spec.width = w;
    spec.height = h;
    spec.frames = frames;
    spec.t0 = t0;
    spec.origin_lat = lat;
    spec.origin_lon = lon;
    return spec;
}

inline MapStack make_stack(const GridSpec& spec, SeriesKind kind,
                           const std::function<double(std::size_t, uint32_t, uint32_t)>& fn) {
    MapStack stack(spec, kind);
    for (std::size_t t = 0; t < spec.frames; ++t)
        for (uint32_t i = 0; i < spec.height; ++i)
            for (uint32_t j = 0; j < spec.width; ++j)
                stack.at(t, i, j) = static_cast<float>(fn(t, i, j));
    return stack;
}

inline MapStack constant_stack(const GridSpec& spec, SeriesKind kind, double value) {
    return make_stack(spec, kind, [value](std::size_t, uint32_t, uint32_t) { return value; });
}

}  // namespace ssicast::testing

#endif
