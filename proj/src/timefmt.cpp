// SPDX-License-Identifier: Apache-2.0
#include "genlog/timefmt.hpp"

#include <chrono>
#include <cstdio>

#include "genlog/error.hpp"

namespace genlog {
namespace {

class Cursor {
 public:
  explicit Cursor(std::string_view s) : s_(s) {}

  int digits(std::size_t n) {
    int v = 0;
    for (std::size_t k = 0; k < n; ++k) {
      if (pos_ >= s_.size() || s_[pos_] < '0' || s_[pos_] > '9') fail();
      v = v * 10 + (s_[pos_++] - '0');
    }
    return v;
  }
  void expect(char c) {
    if (pos_ >= s_.size() || s_[pos_] != c) fail();
    ++pos_;
  }
  bool accept(char c) {
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  bool digit_next() const { return pos_ < s_.size() && s_[pos_] >= '0' && s_[pos_] <= '9'; }
  bool done() const { return pos_ == s_.size(); }
  [[noreturn]] void fail() const { throw Error("invalid timestamp '" + std::string(s_) + "'"); }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace

Timestamp parse_iso8601(std::string_view text) {
  using namespace std::chrono;
  Cursor c(text);
  const int y = c.digits(4);
  c.expect('-');
  const int mo = c.digits(2);
  c.expect('-');
  const int d = c.digits(2);
  if (!c.accept('T')) c.expect(' ');
  const int hh = c.digits(2);
  c.expect(':');
  const int mm = c.digits(2);
  c.expect(':');
  const int ss = c.digits(2);
  int frac_ms = 0;
  if (c.accept('.')) {
    if (!c.digit_next()) c.fail();
    int scale = 100;
    while (c.digit_next()) {
      const int dgt = c.digits(1);
      frac_ms += dgt * scale;
      scale /= 10;
    }
  }
  int offset_min = 0;
  if (!c.accept('Z')) {
    int sign = 0;
    if (c.accept('+')) sign = 1;
    else if (c.accept('-')) sign = -1;
    else c.fail();
    const int oh = c.digits(2);
    c.expect(':');
    const int om = c.digits(2);
    if (oh > 23 || om > 59) c.fail();
    offset_min = sign * (oh * 60 + om);
  }
  if (!c.done()) c.fail();

  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || hh > 23 || mm > 59 || ss > 60) c.fail();
  const auto days = sys_days{ymd}.time_since_epoch().count();
  const Millis ms = (((static_cast<Millis>(days) * 24 + hh) * 60 + mm) * 60 + ss) * 1000 + frac_ms -
                    static_cast<Millis>(offset_min) * 60'000;
  return Timestamp{ms};
}

std::string format_iso8601(Timestamp t) {
  using namespace std::chrono;
  const Millis day_ms = 86'400'000;
  Millis days = t.ms / day_ms;
  Millis rem = t.ms % day_ms;
  if (rem < 0) {
    rem += day_ms;
    --days;
  }
  const year_month_day ymd{sys_days{std::chrono::days{days}}};
  const int hh = static_cast<int>(rem / 3'600'000);
  const int mm = static_cast<int>(rem / 60'000 % 60);
  const int ss = static_cast<int>(rem / 1000 % 60);
  const int ms = static_cast<int>(rem % 1000);
  char buf[40];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02d.%03d+00:00", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()), hh, mm, ss, ms);
  return buf;
}

}  // namespace genlog
