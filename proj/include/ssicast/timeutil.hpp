#ifndef SSICAST_TIMEUTIL_HPP
#define SSICAST_TIMEUTIL_HPP

#include <chrono>
#include <cstdint>

namespace ssicast {

struct UtcParts {
    int year;
    unsigned month;        // 1..12
    unsigned day;          // 1..31
    int day_of_year;       // 1..366
    double hour_fraction;  // [0, 24)
};

inline UtcParts utc_parts(int64_t unix_seconds) {
    using namespace std::chrono;
    const sys_seconds tp{seconds{unix_seconds}};
    const auto dp = floor<days>(tp);
    const year_month_day ymd{dp};
    const auto jan1 = sys_days{ymd.year() / January / 1};
    UtcParts p;
    p.year = static_cast<int>(ymd.year());
    p.month = static_cast<unsigned>(ymd.month());
    p.day = static_cast<unsigned>(ymd.day());
    p.day_of_year = static_cast<int>((dp - jan1).count()) + 1;
    p.hour_fraction = duration<double, std::ratio<3600>>(tp - dp).count();
    return p;
}

/// Whole UTC hour of day, 0..23.
inline int utc_hour(int64_t unix_seconds) {
    int64_t s = ((unix_seconds % 86400) + 86400) % 86400;
    return static_cast<int>(s / 3600);
}

inline unsigned utc_month(int64_t unix_seconds) { return utc_parts(unix_seconds).month; }

/// Unix seconds for a UTC calendar date/time; convenience for fixtures and CLI.
inline int64_t utc_timestamp(int year, unsigned month, unsigned day, int hour = 0,
                             int minute = 0, int second = 0) {
    using namespace std::chrono;
    const sys_days d = sys_days{std::chrono::year{year} / std::chrono::month{month} /
                                std::chrono::day{day}};
    return duration_cast<seconds>(d.time_since_epoch()).count() + hour * 3600 +
           minute * 60 + second;
}

}  // namespace ssicast

#endif
