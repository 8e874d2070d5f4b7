#include "vigil/core/time.hpp"

#include <charconv>
#include <cstdio>

#include "vigil/core/errors.hpp"

namespace vigil {

namespace chr = std::chrono;

Timestamp now_utc() {
    return chr::time_point_cast<chr::microseconds>(chr::system_clock::now());
}

Timestamp from_unix_seconds(std::int64_t seconds) {
    return Timestamp{chr::seconds{seconds}};
}

std::int64_t to_unix_seconds(Timestamp t) {
    return chr::floor<chr::seconds>(t).time_since_epoch().count();
}

std::string format_iso8601(Timestamp t) {
    const auto day = chr::floor<chr::days>(t);
    const chr::year_month_day ymd{day};
    const chr::hh_mm_ss hms{t - day};
    char buf[40];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02d.%06lldZ",
                  static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                  static_cast<unsigned>(ymd.day()), static_cast<int>(hms.hours().count()),
                  static_cast<int>(hms.minutes().count()),
                  static_cast<int>(hms.seconds().count()),
                  static_cast<long long>(hms.subseconds().count()));
    return buf;
}

namespace {

int read_int(std::string_view text, std::size_t pos, std::size_t len) {
    int value = 0;
    if (pos + len > text.size()) throw Error("malformed timestamp: " + std::string(text));
    auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + pos + len, value);
    if (ec != std::errc{} || ptr != text.data() + pos + len)
        throw Error("malformed timestamp: " + std::string(text));
    return value;
}

}  // namespace

Timestamp parse_iso8601(std::string_view text) {
    // YYYY-MM-DDTHH:MM:SS
    if (text.size() < 20 || text[4] != '-' || text[7] != '-' || text[10] != 'T' ||
        text[13] != ':' || text[16] != ':' || text.back() != 'Z')
        throw Error("malformed timestamp: " + std::string(text));
    const chr::year_month_day ymd{chr::year{read_int(text, 0, 4)},
                                  chr::month{static_cast<unsigned>(read_int(text, 5, 2))},
                                  chr::day{static_cast<unsigned>(read_int(text, 8, 2))}};
    if (!ymd.ok()) throw Error("malformed timestamp: " + std::string(text));
    const int hh = read_int(text, 11, 2);
    const int mm = read_int(text, 14, 2);
    const int ss = read_int(text, 17, 2);
    if (hh > 23 || mm > 59 || ss > 60) throw Error("malformed timestamp: " + std::string(text));

    long long micros = 0;
    const std::size_t frac_begin = 19;
    const std::size_t frac_end = text.size() - 1;
    if (frac_end > frac_begin) {
        if (text[frac_begin] != '.' || frac_end - frac_begin - 1 == 0 || frac_end - frac_begin - 1 > 6)
            throw Error("malformed timestamp: " + std::string(text));
        const std::size_t digits = frac_end - frac_begin - 1;
        micros = read_int(text, frac_begin + 1, digits);
        for (std::size_t i = digits; i < 6; ++i) micros *= 10;
    }
    return Timestamp{chr::sys_days{ymd}.time_since_epoch()} + chr::hours{hh} + chr::minutes{mm} +
           chr::seconds{ss} + chr::microseconds{micros};
}

}  // namespace vigil
