// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <limits>
#include <random>

#include "genlog/error.hpp"
#include "genlog/numfmt.hpp"
#include "genlog/timefmt.hpp"

using namespace genlog;

TEST(Iso8601, ParsesOffsetsAndFractions) {
  EXPECT_EQ(parse_iso8601("1970-01-01T00:00:00Z").ms, 0);
  EXPECT_EQ(parse_iso8601("1970-01-01T00:00:01.5Z").ms, 1500);
  EXPECT_EQ(parse_iso8601("2021-03-04T10:00:00.000+00:00").ms, 1614852000000);
  EXPECT_EQ(parse_iso8601("2021-03-04T11:00:00.000+01:00").ms, 1614852000000);
  EXPECT_EQ(parse_iso8601("2021-03-04T08:30:00.000-01:30").ms, 1614852000000);
  EXPECT_EQ(parse_iso8601("2021-03-04T10:00:00.123999+00:00").ms, 1614852000123);
  EXPECT_EQ(parse_iso8601("2024-02-29T00:00:00Z").ms, 1709164800000);
}

TEST(Iso8601, RejectsMalformed) {
  for (const char* s : {"", "2021-03-04", "2021-03-04T10:00:00", "2021-13-01T00:00:00Z", "2021-02-30T00:00:00Z",
                        "2021-03-04T25:00:00Z", "2021-03-04T10:00:00.Z", "2021-03-04T10:00:00+0100",
                        "2021-03-04T10:00:00Zjunk", "2021-3-04T10:00:00Z"})
    EXPECT_THROW(parse_iso8601(s), Error) << s;
}

TEST(Iso8601, FormatRoundTrips) {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 1000; ++k) {
    const Timestamp t{static_cast<Millis>(rng() % 4102444800000ULL)};
    const std::string s = format_iso8601(t);
    EXPECT_EQ(s.size(), 29u);
    EXPECT_EQ(parse_iso8601(s), t) << s;
  }
  EXPECT_EQ(format_iso8601(Timestamp{1614852000123}), "2021-03-04T10:00:00.123+00:00");
}

TEST(NumFmt, ShortestRoundTrip) {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 10000; ++k) {
    double v;
    const std::uint64_t bits = rng();
    std::memcpy(&v, &bits, sizeof v);
    if (!std::isfinite(v)) continue;
    const auto back = parse_double(format_double(v));
    ASSERT_TRUE(back.has_value());
    EXPECT_EQ(std::memcmp(&*back, &v, sizeof v), 0);
  }
  EXPECT_EQ(format_double(1.5), "1.5");
  EXPECT_EQ(format_double(0.1), "0.1");
}

TEST(NumFmt, StrictParsing) {
  EXPECT_EQ(parse_double("+2.5"), 2.5);
  EXPECT_EQ(parse_double("1.25e1"), 12.5);
  EXPECT_FALSE(parse_double("1.0x"));
  EXPECT_FALSE(parse_double(""));
  EXPECT_FALSE(parse_double(" 1"));
  EXPECT_EQ(parse_int("-42"), -42);
  EXPECT_FALSE(parse_int("4.2"));
}
