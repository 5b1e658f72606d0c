#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace transitheat {

// Bad user input (files, flags, config). CLI maps this to exit code 1.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace timeutil {

struct Date {
  int year = 0;
  int month = 0;  // 1..12
  int day = 0;    // 1..31

  friend bool operator==(const Date&, const Date&) = default;
  friend auto operator<=>(const Date& a, const Date& b) {
    if (a.year != b.year) return a.year <=> b.year;
    if (a.month != b.month) return a.month <=> b.month;
    return a.day <=> b.day;
  }
};

inline bool is_leap(int y) {
  return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
}

inline int days_in_month(int y, int m) {
  static constexpr int k[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (m == 2 && is_leap(y)) return 29;
  return k[m - 1];
}

inline bool valid_date(const Date& d) {
  return d.month >= 1 && d.month <= 12 && d.day >= 1 &&
         d.day <= days_in_month(d.year, d.month);
}

// Days since 1970-01-01 (Howard Hinnant's civil-date algorithm).
inline int64_t days_from_civil(const Date& d) {
  int y = d.year;
  y -= d.month <= 2;
  const int era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy =
      (153u * static_cast<unsigned>(d.month + (d.month > 2 ? -3 : 9)) + 2u) / 5u +
      static_cast<unsigned>(d.day) - 1u;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return static_cast<int64_t>(era) * 146097 + static_cast<int64_t>(doe) - 719468;
}

inline Date civil_from_days(int64_t z) {
  z += 719468;
  const int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const int64_t y = static_cast<int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned d = doy - (153 * mp + 2) / 5 + 1;
  const unsigned m = mp < 10 ? mp + 3 : mp - 9;
  return Date{static_cast<int>(y + (m <= 2)), static_cast<int>(m), static_cast<int>(d)};
}

// 0 = Monday .. 6 = Sunday (GTFS calendar column order).
inline int weekday_mon0(const Date& d) {
  const int64_t days = days_from_civil(d);
  return static_cast<int>(((days % 7) + 7 + 3) % 7);  // 1970-01-01 was a Thursday
}

inline int64_t epoch_seconds(const Date& d, int64_t seconds_of_day) {
  return days_from_civil(d) * 86400 + seconds_of_day;
}

// "YYYY-MM-DD"
inline Date parse_date(const std::string& s) {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-')
    throw InputError("bad date '" + s + "' (expected YYYY-MM-DD)");
  Date d;
  try {
    d.year = std::stoi(s.substr(0, 4));
    d.month = std::stoi(s.substr(5, 2));
    d.day = std::stoi(s.substr(8, 2));
  } catch (const std::exception&) {
    throw InputError("bad date '" + s + "'");
  }
  if (!valid_date(d)) throw InputError("bad date '" + s + "'");
  return d;
}

// GTFS "YYYYMMDD"
inline Date parse_date_compact(const std::string& s) {
  if (s.size() != 8) throw InputError("bad date '" + s + "' (expected YYYYMMDD)");
  Date d;
  try {
    d.year = std::stoi(s.substr(0, 4));
    d.month = std::stoi(s.substr(4, 2));
    d.day = std::stoi(s.substr(6, 2));
  } catch (const std::exception&) {
    throw InputError("bad date '" + s + "'");
  }
  if (!valid_date(d)) throw InputError("bad date '" + s + "'");
  return d;
}

inline std::string format_date(const Date& d) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", d.year, d.month, d.day);
  return buf;
}

inline std::string format_date_compact(const Date& d) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d%02d%02d", d.year, d.month, d.day);
  return buf;
}

// "HH:MM:SS", hours may exceed 24 (GTFS seconds-of-service-day). Returns -1 on failure.
inline int32_t parse_hms_or(const std::string& s, int32_t fallback) {
  int h = 0, m = 0, sec = 0;
  const char* p = s.c_str();
  while (*p == ' ') ++p;
  if (*p < '0' || *p > '9') return fallback;
  for (; *p >= '0' && *p <= '9'; ++p) h = h * 10 + (*p - '0');
  if (*p++ != ':') return fallback;
  if (*p < '0' || *p > '9') return fallback;
  for (; *p >= '0' && *p <= '9'; ++p) m = m * 10 + (*p - '0');
  if (*p++ != ':') return fallback;
  if (*p < '0' || *p > '9') return fallback;
  for (; *p >= '0' && *p <= '9'; ++p) sec = sec * 10 + (*p - '0');
  if (*p != '\0' || m > 59 || sec > 59) return fallback;
  return h * 3600 + m * 60 + sec;
}

inline int32_t parse_hms(const std::string& s) {
  const int32_t v = parse_hms_or(s, -1);
  if (v < 0) throw InputError("bad time '" + s + "' (expected HH:MM:SS)");
  return v;
}

inline std::string format_hms(int32_t seconds) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%02d:%02d:%02d", seconds / 3600,
                (seconds % 3600) / 60, seconds % 60);
  return buf;
}

// "YYYY-MM-DD[T ]HH:MM:SS" -> epoch seconds.
inline int64_t parse_iso_timestamp(const std::string& s) {
  if (s.size() < 19 || (s[10] != 'T' && s[10] != ' '))
    throw InputError("bad timestamp '" + s + "' (expected ISO-8601)");
  const Date d = parse_date(s.substr(0, 10));
  const int32_t tod = parse_hms(s.substr(11, 8));
  return epoch_seconds(d, tod);
}

inline std::string format_iso_timestamp(int64_t ts) {
  const int64_t days = ts >= 0 ? ts / 86400 : (ts - 86399) / 86400;
  const Date d = civil_from_days(days);
  return format_date(d) + "T" + format_hms(static_cast<int32_t>(ts - days * 86400));
}

}  // namespace timeutil
}  // namespace transitheat
