#include <doctest.h>

#include <cmath>
#include <vector>

#include "pathcalc/errors.hpp"
#include "pathcalc/path.hpp"
#include "pathcalc/sampling.hpp"

using namespace pathcalc;

TEST_CASE("time grid nodes") {
  const TimeGrid g(1.0, 8);
  CHECK(g.dt() == 0.125);
  CHECK(g.index_of(0.375) == 3);
  CHECK(g.time(8) == 1.0);
  CHECK_THROWS_AS(g.index_of(0.3), GridAlignmentError);
  CHECK_THROWS_AS(g.index_of(1.5), DomainError);
  CHECK_THROWS_AS(g.index_of(-0.125), DomainError);
  CHECK(g.steps_in(0.25) == 2);
}

TEST_CASE("stop_at freezes the continuation") {
  const TimeGrid g(3.0, 3);
  const auto p = StoppedPath::scalar(g, {1, 2, 3, 4});
  const auto s = stop_at(p, 1.0);
  CHECK(s.stop_index() == 1);
  for (int i = 0; i < 4; ++i) CHECK(s.sample(i) == std::vector<double>{1, 2, 2, 2}[i]);
  CHECK(stop_at(p, 3.0) == p);

  const TimeGrid g2(2.0, 2);
  const auto q = stop_at(StoppedPath::scalar(g2, {5, 7, 9}), 0.0);
  CHECK(q.sample(0) == 5);
  CHECK(q.sample(1) == 5);
  CHECK(q.sample(2) == 5);

  CHECK_THROWS_AS(stop_at(p, 0.5), GridAlignmentError);
  CHECK_THROWS_AS(stop_at(p, 4.0), DomainError);
}

TEST_CASE("stop_at is idempotent") {
  const TimeGrid g(1.0, 64);
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto p = random_continuous_path(g, 2, 64, 7, s);
    const double t = g.time(static_cast<int>(5 * s + 3));
    CHECK(stop_at(stop_at(p, t), t) == stop_at(p, t));
  }
}

TEST_CASE("vertical bump is an overlay") {
  const TimeGrid g(1.0, 4);
  const auto p = StoppedPath::scalar(g, {1, 3, 5, 0, 0}, 2);
  const auto b = vertical_bump(p, 2.0);
  CHECK(b.endpoint() == 7.0);
  CHECK(b.value(2) == 7.0);
  for (int i = 0; i < 2; ++i) CHECK(b.value(i) == p.value(i));
  CHECK(b.sample(2) == 5.0);
  CHECK(vertical_bump(p, 0.0) == p);
  CHECK(vertical_bump(vertical_bump(p, 2.0), -2.0) == p);
  const std::vector<double> two{1.0, 1.0};
  CHECK_THROWS_AS(vertical_bump(p, two), DomainError);
}

TEST_CASE("vertical bump leaves earlier values bitwise unchanged") {
  const TimeGrid g(1.0, 32);
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto p = random_continuous_path(g, 1, 20, 3, s);
    const auto b = vertical_bump(p, 0.37 * (s + 1));
    for (int i = 0; i < 20; ++i) CHECK(b.value(i) == p.value(i));
    CHECK(b.left_integral() == p.left_integral());
  }
}

TEST_CASE("horizontal extension") {
  const TimeGrid g(1.0, 4);
  const auto p = StoppedPath::scalar(g, {1, 3, 5, 9, 9}, 2);
  const auto e = horizontal_extend(p, 1.0);
  CHECK(e.stop_index() == 4);
  CHECK(e.value(3) == 5.0);
  CHECK(e.value(4) == 5.0);

  CHECK(horizontal_extend(p, 0.5) == p);
  const auto folded = horizontal_extend(vertical_bump(p, 1.0), 0.5);
  CHECK_FALSE(folded.has_bump());
  CHECK(folded.endpoint() == 6.0);

  const auto e3 = horizontal_extend(vertical_bump(p, 1.0), 0.75);
  CHECK(e3.value(2) == 6.0);
  CHECK(e3.value(3) == 6.0);
  CHECK(e3.value(1) == 3.0);

  CHECK_THROWS_AS(horizontal_extend(p, 0.25), DomainError);
  CHECK_THROWS_AS(horizontal_extend(p, 1.25), DomainError);
}

TEST_CASE("sup norm") {
  const TimeGrid g(1.0, 2);
  CHECK(sup_norm(StoppedPath::scalar(g, {1, -3, 2})) == 3.0);
  CHECK(sup_norm(StoppedPath::scalar(g, {0, 0, 0})) == 0.0);
  CHECK(sup_norm(vertical_bump(StoppedPath::scalar(g, {4, 1, 2}), 3.0)) == 5.0);

  const TimeGrid g2(1.0, 1);
  const auto v = StoppedPath::from_samples(g2, 2, {3, 4, 0, 0}, 0);
  CHECK(sup_norm(v) == doctest::Approx(5.0));
}

TEST_CASE("extension never raises the sup norm beyond the bump") {
  const TimeGrid g(1.0, 64);
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto p = random_continuous_path(g, 1, 16 + static_cast<int>(s), 11, s);
    const double bump = 0.1 * (static_cast<double>(s) - 10.0);
    const auto e = horizontal_extend(vertical_bump(p, bump), g.time(60));
    CHECK(sup_norm(e) <= sup_norm(p) + std::abs(bump));
  }
}

TEST_CASE("d_infinity") {
  const TimeGrid g(2.0, 2);
  const auto zero1 = StoppedPath::scalar(g, {0, 0, 0}, 1);
  const auto zero2 = StoppedPath::scalar(g, {0, 0, 0}, 2);
  CHECK(d_infinity(zero1, zero2) == 1.0);
  CHECK(d_infinity(zero1, zero1) == 0.0);

  const TimeGrid h(1.0, 4);
  const auto p = StoppedPath::scalar(h, {0, 0, 0, 0, 0});
  const auto q = StoppedPath::scalar(h, {3, 3, 3, 3, 3});
  CHECK(d_infinity(p, q) == 3.0);

  const auto v = StoppedPath::from_samples(h, 2, std::vector<double>(10, 0.0), 4);
  CHECK_THROWS_AS(d_infinity(p, v), DomainError);
}

TEST_CASE("d_infinity is a metric on random triples") {
  const TimeGrid g(1.0, 32);
  for (std::uint64_t s = 0; s < 50; ++s) {
    const auto a = random_continuous_path(g, 2, 1 + static_cast<int>(s % 31), 5, 3 * s);
    const auto b = random_continuous_path(g, 2, 1 + static_cast<int>((7 * s) % 31), 5, 3 * s + 1);
    const auto c = random_continuous_path(g, 2, 1 + static_cast<int>((13 * s) % 31), 5, 3 * s + 2);
    CHECK(d_infinity(a, a) == 0.0);
    CHECK(d_infinity(a, b) == d_infinity(b, a));
    CHECK(d_infinity(a, c) <= d_infinity(a, b) + d_infinity(b, c));
  }
}

TEST_CASE("degenerate t = 0 path") {
  const TimeGrid g(1.0, 4);
  const std::vector<double> x0{2.0};
  const auto p = StoppedPath::constant(g, x0, 0);
  CHECK(p.stop_index() == 0);
  CHECK(p.endpoint() == 2.0);
  CHECK(p.left_integral() == 0.0);
}

TEST_CASE("tail tampering does not change the element") {
  const TimeGrid g(1.0, 4);
  const auto p = StoppedPath::scalar(g, {1, 2, 3, 4, 5}, 2);
  const std::vector<double> tail{100, -100};
  const auto t = p.with_tail(tail);
  CHECK(t == p);
  CHECK(t.stored(4) == -100);
  CHECK(t.sample(4) == 3);
}
