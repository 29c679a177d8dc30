#include "doctest.h"

#include <cmath>
#include <vector>

#include "levylab/rng.hpp"

using namespace levylab;

TEST_CASE("philox known-answer vectors") {
  CHECK(philox4x32_10({0, 0, 0, 0}, {0, 0}) ==
        Philox4x32Counter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  CHECK(philox4x32_10({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu}) ==
        Philox4x32Counter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  CHECK(philox4x32_10({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u}) ==
        Philox4x32Counter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("streams are reproducible and distinct") {
  StreamId id{42, StreamPurpose::cell, 7, 3, 11};
  CounterRng a(id), b(id);
  for (int i = 0; i < 100; ++i) CHECK(a() == b());
  StreamId other = id;
  other.replicate = 4;
  CounterRng c(id), d(other);
  int same = 0;
  for (int i = 0; i < 100; ++i) same += c() == d();
  CHECK(same < 3);
}

TEST_CASE("uniform stays inside the open interval") {
  CounterRng rng(StreamId{1});
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform();
    CHECK(u > 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("variate moments") {
  CounterRng rng(StreamId{7});
  const int n = 200000;
  double sn = 0, sn2 = 0, se = 0, sp = 0, sp2 = 0, sq = 0, sq2 = 0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    sn += z;
    sn2 += z * z;
    se += rng.exponential();
    const double k = static_cast<double>(rng.poisson(3.5));
    sp += k;
    sp2 += k * k;
    const double m = static_cast<double>(rng.poisson(40.0));
    sq += m;
    sq2 += m * m;
  }
  CHECK(std::fabs(sn / n) < 0.01);
  CHECK(std::fabs(sn2 / n - 1.0) < 0.015);
  CHECK(std::fabs(se / n - 1.0) < 0.01);
  CHECK(std::fabs(sp / n - 3.5) < 0.02);
  CHECK(std::fabs(sp2 / n - (sp / n) * (sp / n) - 3.5) < 0.05);
  CHECK(std::fabs(sq / n - 40.0) < 0.06);
  CHECK(std::fabs(sq2 / n - (sq / n) * (sq / n) - 40.0) < 0.6);
}

TEST_CASE("poisson with zero mean") {
  CounterRng rng(StreamId{9});
  CHECK(rng.poisson(0.0) == 0u);
}
