// Copyright 2026 The SensorHub Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

namespace sensorhub {

/// UTC instant with millisecond resolution.
using Instant = std::chrono::sys_time<std::chrono::milliseconds>;

struct Interval {
  Instant start;
  Instant end;

  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Either a single instant or a closed interval.
using TimeValue = std::variant<Instant, Interval>;

inline Instant now_utc() {
  return std::chrono::floor<std::chrono::milliseconds>(std::chrono::system_clock::now());
}

inline Instant end_of(const TimeValue& t) {
  if (const auto* iv = std::get_if<Interval>(&t)) return iv->end;
  return std::get<Instant>(t);
}

inline Instant start_of(const TimeValue& t) {
  if (const auto* iv = std::get_if<Interval>(&t)) return iv->start;
  return std::get<Instant>(t);
}

/// Formats as `YYYY-MM-DDTHH:MM:SSZ`, adding `.mmm` only when the
/// millisecond part is non-zero.
inline std::string format_instant(Instant t) {
  using namespace std::chrono;
  const auto day = floor<days>(t);
  const year_month_day ymd{day};
  auto rest = t - day;
  const auto h = duration_cast<hours>(rest);
  rest -= h;
  const auto m = duration_cast<minutes>(rest);
  rest -= m;
  const auto s = duration_cast<seconds>(rest);
  rest -= s;
  const auto ms = rest.count();

  char buf[40];
  int n = std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02lld", static_cast<int>(ymd.year()),
                        static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                        static_cast<int>(h.count()), static_cast<int>(m.count()),
                        static_cast<long long>(s.count()));
  if (ms != 0) n += std::snprintf(buf + n, sizeof buf - n, ".%03lld", static_cast<long long>(ms));
  std::snprintf(buf + n, sizeof buf - n, "Z");
  return buf;
}

namespace detail {

inline bool read_digits(std::string_view s, std::size_t& pos, int count, int& out) {
  if (pos + count > s.size()) return false;
  int v = 0;
  for (int i = 0; i < count; ++i) {
    const char c = s[pos + i];
    if (c < '0' || c > '9') return false;
    v = v * 10 + (c - '0');
  }
  out = v;
  pos += count;
  return true;
}

inline bool expect(std::string_view s, std::size_t& pos, char c) {
  if (pos >= s.size() || s[pos] != c) return false;
  ++pos;
  return true;
}

}  // namespace detail

/// Parses an ISO-8601 date-time with mandatory zone designator
/// (`Z` or `+HH:MM`). Fractional seconds beyond millisecond precision are
/// truncated. Returns nullopt for anything malformed or out of calendar.
inline std::optional<Instant> parse_instant(std::string_view s) {
  using namespace std::chrono;
  std::size_t pos = 0;
  int Y, M, D, h, m, sec;
  if (!detail::read_digits(s, pos, 4, Y) || !detail::expect(s, pos, '-') ||
      !detail::read_digits(s, pos, 2, M) || !detail::expect(s, pos, '-') ||
      !detail::read_digits(s, pos, 2, D) || !detail::expect(s, pos, 'T') ||
      !detail::read_digits(s, pos, 2, h) || !detail::expect(s, pos, ':') ||
      !detail::read_digits(s, pos, 2, m) || !detail::expect(s, pos, ':') ||
      !detail::read_digits(s, pos, 2, sec))
    return std::nullopt;
  if (h > 23 || m > 59 || sec > 59) return std::nullopt;

  const year_month_day ymd{year{Y}, month{static_cast<unsigned>(M)}, day{static_cast<unsigned>(D)}};
  if (!ymd.ok()) return std::nullopt;

  int millis = 0;
  if (pos < s.size() && s[pos] == '.') {
    ++pos;
    int digits = 0;
    while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') {
      if (digits < 3) millis = millis * 10 + (s[pos] - '0');
      ++digits;
      ++pos;
    }
    if (digits == 0) return std::nullopt;
    for (int i = digits; i < 3; ++i) millis *= 10;
  }

  int offset_minutes = 0;
  if (pos >= s.size()) return std::nullopt;
  if (s[pos] == 'Z') {
    ++pos;
  } else if (s[pos] == '+' || s[pos] == '-') {
    const int sign = s[pos] == '-' ? -1 : 1;
    ++pos;
    int oh, om;
    if (!detail::read_digits(s, pos, 2, oh) || !detail::expect(s, pos, ':') ||
        !detail::read_digits(s, pos, 2, om) || oh > 23 || om > 59)
      return std::nullopt;
    offset_minutes = sign * (oh * 60 + om);
  } else {
    return std::nullopt;
  }
  if (pos != s.size()) return std::nullopt;

  Instant t = sys_days{ymd} + hours{h} + minutes{m} + seconds{sec} + milliseconds{millis};
  return t - minutes{offset_minutes};
}

inline std::string format_time_value(const TimeValue& t) {
  if (const auto* iv = std::get_if<Interval>(&t))
    return format_instant(iv->start) + "/" + format_instant(iv->end);
  return format_instant(std::get<Instant>(t));
}

/// Accepts `instant` or `start/end`. Does not check start <= end; that is
/// an entity invariant reported by validation.
inline std::optional<TimeValue> parse_time_value(std::string_view s) {
  if (const auto slash = s.find('/'); slash != std::string_view::npos) {
    auto a = parse_instant(s.substr(0, slash));
    auto b = parse_instant(s.substr(slash + 1));
    if (!a || !b) return std::nullopt;
    return TimeValue{Interval{*a, *b}};
  }
  if (auto a = parse_instant(s)) return TimeValue{*a};
  return std::nullopt;
}

}  // namespace sensorhub
