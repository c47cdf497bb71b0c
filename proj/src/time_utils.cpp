#include "engram/time_utils.hpp"

#include <cctype>
#include <chrono>
#include <cstdio>

#include "engram/errors.hpp"

namespace engram {

namespace {

// Civil-date conversions on the proleptic Gregorian calendar.
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, std::int64_t& y, unsigned& m, unsigned& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t yr = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = doy - (153 * mp + 2) / 5 + 1;
    m = mp + (mp < 10 ? 3 : -9);
    y = yr + (m <= 2);
}

bool is_digits(const std::string& s, std::size_t from, std::size_t count) {
    if (from + count > s.size()) return false;
    for (std::size_t i = from; i < from + count; ++i) {
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    }
    return true;
}

int to_int(const std::string& s, std::size_t from, std::size_t count) {
    int v = 0;
    for (std::size_t i = from; i < from + count; ++i) v = v * 10 + (s[i] - '0');
    return v;
}

[[noreturn]] void bad_time(const std::string& text) {
    throw ValidationError("unrecognized time '" + text +
                          "' (expected epoch seconds or ISO-8601 like 2024-03-07T12:00:00Z)");
}

}  // namespace

std::string format_iso8601_utc(std::int64_t epoch_seconds) {
    std::int64_t days = epoch_seconds / 86400;
    std::int64_t rem = epoch_seconds % 86400;
    if (rem < 0) {
        rem += 86400;
        days -= 1;
    }
    std::int64_t year = 0;
    unsigned month = 0, day = 0;
    civil_from_days(days, year, month, day);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04lld-%02u-%02uT%02lld:%02lld:%02lldZ",
                  static_cast<long long>(year), month, day,
                  static_cast<long long>(rem / 3600), static_cast<long long>((rem / 60) % 60),
                  static_cast<long long>(rem % 60));
    return buf;
}

std::int64_t parse_time(const std::string& text) {
    std::size_t begin = text.find_first_not_of(" \t");
    std::size_t end = text.find_last_not_of(" \t");
    if (begin == std::string::npos) bad_time(text);
    const std::string s = text.substr(begin, end - begin + 1);

    // Bare (possibly negative) integer: epoch seconds.
    bool all_digits = !s.empty();
    for (std::size_t i = (s[0] == '-' ? 1 : 0); i < s.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) {
            all_digits = false;
            break;
        }
    }
    if (all_digits && (s.size() > (s[0] == '-' ? 1u : 0u))) {
        try {
            return std::stoll(s);
        } catch (const std::exception&) {
            bad_time(text);
        }
    }

    // ISO-8601 date, optional time, optional zone.
    if (!is_digits(s, 0, 4) || s.size() < 10 || s[4] != '-' || !is_digits(s, 5, 2) ||
        s[7] != '-' || !is_digits(s, 8, 2)) {
        bad_time(text);
    }
    const int year = to_int(s, 0, 4);
    const int month = to_int(s, 5, 2);
    const int day = to_int(s, 8, 2);
    if (month < 1 || month > 12 || day < 1 || day > 31) bad_time(text);

    int hour = 0, minute = 0, second = 0;
    std::int64_t zone_offset = 0;
    std::size_t pos = 10;
    if (pos < s.size()) {
        if (s[pos] != 'T' && s[pos] != ' ') bad_time(text);
        ++pos;
        if (!is_digits(s, pos, 2) || pos + 2 >= s.size() + 1) bad_time(text);
        hour = to_int(s, pos, 2);
        pos += 2;
        if (pos >= s.size() || s[pos] != ':' || !is_digits(s, pos + 1, 2)) bad_time(text);
        minute = to_int(s, pos + 1, 2);
        pos += 3;
        if (pos < s.size() && s[pos] == ':') {
            if (!is_digits(s, pos + 1, 2)) bad_time(text);
            second = to_int(s, pos + 1, 2);
            pos += 3;
        }
        if (pos < s.size()) {
            if (s[pos] == 'Z') {
                ++pos;
            } else if (s[pos] == '+' || s[pos] == '-') {
                const int sign = (s[pos] == '+') ? 1 : -1;
                ++pos;
                if (!is_digits(s, pos, 2)) bad_time(text);
                int zh = to_int(s, pos, 2);
                pos += 2;
                int zm = 0;
                if (pos < s.size() && s[pos] == ':') ++pos;
                if (pos + 2 <= s.size() && is_digits(s, pos, 2)) {
                    zm = to_int(s, pos, 2);
                    pos += 2;
                }
                zone_offset = sign * (zh * 3600 + zm * 60);
            } else {
                bad_time(text);
            }
        }
        if (pos != s.size()) bad_time(text);
        if (hour > 23 || minute > 59 || second > 60) bad_time(text);
    }

    const std::int64_t days = days_from_civil(year, static_cast<unsigned>(month),
                                              static_cast<unsigned>(day));
    return days * 86400 + hour * 3600 + minute * 60 + second - zone_offset;
}

std::int64_t now_epoch_seconds() {
    return std::chrono::duration_cast<std::chrono::seconds>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
}

}  // namespace engram
