#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "pathcalc/catalog.hpp"
#include "pathcalc/errors.hpp"
#include "pathcalc/rng.hpp"
#include "pathcalc/sfde.hpp"

using namespace pathcalc;

namespace {

StoppedPath start(double x0, double t, int n = 64, double horizon = 1.0) {
  const TimeGrid g(horizon, n);
  const std::vector<double> v{x0};
  return StoppedPath::constant(g, v, g.index_of(t));
}

SfdeModel scalar_model(const std::string& name, std::function<double(const StoppedPath&)> b,
                       std::function<double(const StoppedPath&)> s, double c, double k) {
  SfdeModel m;
  m.name = name;
  m.drift = [b](double, const StoppedPath& x) { return Eigen::VectorXd::Constant(1, b(x)); };
  m.diffusion = [s](double, const StoppedPath& x) { return Eigen::MatrixXd::Constant(1, 1, s(x)); };
  m.lipschitz_c = c;
  m.bound_K = k;
  return m;
}

}  // namespace

TEST_CASE("Philox known answers") {
  using W = std::array<std::uint32_t, 4>;
  CHECK(philox4x32({0, 0, 0, 0}, {0, 0}) == W{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
        W{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        W{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("counter-based normals") {
  const CounterRng rng(42);
  CHECK(rng.normal(3, 17) == CounterRng(42).normal(3, 17));
  CHECK(rng.normal(3, 17) != rng.normal(4, 17));
  double sum = 0.0, sq = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal(0, i);
    sum += z;
    sq += z * z;
  }
  CHECK(std::abs(sum / n) < 4.0 / std::sqrt(n));
  CHECK(std::abs(sq / n - 1.0) < 4.0 * std::sqrt(2.0 / n));
  for (int i = 0; i < 1000; ++i) {
    const double u = rng.uniform(1, i);
    CHECK(u > 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("noise on a coarse grid sums the fine draws") {
  const TimeGrid coarse(1.0, 4), fine(1.0, 8);
  const NoisePlan plan{9, 1, 8};
  const auto c = plan.increments(0, coarse, 1, 0, 4);
  const auto f = plan.increments(0, fine, 1, 0, 8);
  for (int i = 0; i < 4; ++i) CHECK(c[i] == f[2 * i] + f[2 * i + 1]);
  const auto part = plan.increments(0, coarse, 1, 2, 4);
  CHECK(part[0] == c[2]);
  CHECK_THROWS_AS((NoisePlan{9, 1, 6}.increments(0, coarse, 1, 0, 4)), GridAlignmentError);
}

TEST_CASE("euler_solve degenerate dynamics") {
  const auto p = start(0.7, 0.25);
  const std::vector<double> noise(48, 0.3);
  const auto z = euler_solve(make_model("zero"), p, 1.0, noise);
  for (int i = 16; i <= 64; ++i) CHECK(z.value(i) == 0.7);

  const auto d = euler_solve(make_model("drift1"), start(0.0, 0.0), 1.0, std::vector<double>(64, 0.0));
  CHECK(d.endpoint() == 1.0);
  CHECK(d.stop_index() == 64);

  const auto b = euler_solve(make_model("bm"), p, 1.0, std::vector<double>(48, 0.0));
  for (int i = 16; i <= 64; ++i) CHECK(b.value(i) == 0.7);

  CHECK_THROWS_AS(euler_solve(make_model("bm"), p, 1.0, std::vector<double>(5, 0.0)), DomainError);
  CHECK_THROWS_AS(euler_solve(make_model("bm"), p, 0.125, {}), DomainError);
}

TEST_CASE("zero noise reduces to explicit Euler") {
  const auto x = euler_solve(make_model("linear-pd"), start(1.0, 0.0, 128), 1.0, std::vector<double>(128, 0.0));
  const double dt = 1.0 / 128;
  std::vector<double> ref{1.0};
  double sum = 0.0;
  for (int i = 0; i < 128; ++i) {
    const double b = std::clamp(sum * dt, -10.0, 10.0);
    ref.push_back(ref.back() + b * dt);
    sum += ref[i];
  }
  for (int i = 0; i <= 128; ++i) CHECK(x.value(i) == ref[i]);
}

TEST_CASE("coefficients never see the initial path after t") {
  const CounterRng rng(77);
  const TimeGrid g(1.0, 32);
  for (std::uint64_t m = 0; m < 50; ++m) {
    const double a = rng.uniform(m, 0), b = rng.uniform(m, 1), c = rng.uniform(m, 2);
    const SfdeModel model = scalar_model(
        "random",
        [a, b](const StoppedPath& x) { return a * std::tanh(x.left_integral()) + b * std::sin(x.endpoint()); },
        [c](const StoppedPath& x) { return c * std::cos(x.value(x.stop_index() / 2)); }, 3.0, 3.0);
    std::vector<double> samples(33);
    for (int i = 0; i <= 32; ++i) samples[i] = rng.normal(m, i);
    const auto initial = StoppedPath::scalar(g, samples, 8 + static_cast<int>(m % 16));
    std::vector<double> tail(static_cast<std::size_t>(32 - initial.stop_index()));
    for (std::size_t i = 0; i < tail.size(); ++i) tail[i] = 1e6 * rng.normal(m, 100 + i);
    const auto noise = NoisePlan{m, 1, 0}.increments(0, g, 1, initial.stop_index(), 32);
    const auto x1 = euler_solve(model, initial, 1.0, noise);
    const auto x2 = euler_solve(model, initial.with_tail(tail), 1.0, noise);
    CHECK(x1 == x2);
  }
}

TEST_CASE("anticipating coefficients are rejected") {
  const SfdeModel peek = scalar_model(
      "peek", [](const StoppedPath& x) { return x.stored(x.grid().steps()); },
      [](const StoppedPath&) { return 1.0; }, 1.0, 1.0);
  CHECK_THROWS_AS(euler_solve(peek, start(0.0, 0.0, 8), 1.0, std::vector<double>(8, 0.0)), CausalityError);
  const NoisePlan plan{1, 3, 0};
  try {
    simulate_ensemble(peek, start(0.0, 0.0, 8), 1.0, plan, 1);
    FAIL("expected CausalityError");
  } catch (const CausalityError& e) {
    CHECK(std::string(e.what()).find("path 0") != std::string::npos);
  }
}

TEST_CASE("blow-up is reported") {
  const SfdeModel boom = scalar_model(
      "boom", [](const StoppedPath& x) { return 1e300 * (1.0 + std::abs(x.endpoint())); },
      [](const StoppedPath&) { return 0.0; }, 1.0, 1.0);
  CHECK_THROWS_AS(euler_solve(boom, start(1.0, 0.0, 8), 1.0, std::vector<double>(8, 0.0)), BlowUpError);
  const SfdeModel nan = scalar_model(
      "nan", [](const StoppedPath&) { return std::numeric_limits<double>::quiet_NaN(); },
      [](const StoppedPath&) { return 0.0; }, 1.0, 1.0);
  CHECK_THROWS_AS(euler_solve(nan, start(1.0, 0.0, 8), 1.0, std::vector<double>(8, 0.0)), BlowUpError);
}

TEST_CASE("ensembles are deterministic and worker independent") {
  const auto p = start(0.5, 0.25, 64);
  const NoisePlan plan{2024, 16, 0};
  const auto a = simulate_ensemble(make_model("tanh-pd"), p, 1.0, plan, 1);
  const auto b = simulate_ensemble(make_model("tanh-pd"), p, 1.0, plan, 1);
  const auto c = simulate_ensemble(make_model("tanh-pd"), p, 1.0, plan, 3);
  REQUIRE(a.size() == 16);
  for (std::size_t j = 0; j < a.size(); ++j) {
    CHECK(a[j] == b[j]);
    CHECK(a[j] == c[j]);
  }
  CHECK_FALSE(a[0] == a[1]);

  const auto d = simulate_ensemble(make_model("drift1"), p, 1.0, plan);
  for (const auto& x : d) CHECK(x == d.front());
}

TEST_CASE("Brownian endpoint is centred") {
  const NoisePlan plan{5, 10000, 0};
  const auto est = mc_expectation(make_functional("endpoint:identity"), make_model("bm"), start(0.0, 0.0, 16), 1.0,
                                  plan);
  CHECK(std::abs(est.mean) <= 4.0 / std::sqrt(1e4));
  CHECK(est.n_paths == 10000);
  CHECK(est.std_error == doctest::Approx(0.01).epsilon(0.05));
}

TEST_CASE("Monte Carlo expectations") {
  const double eps = 0.125;
  const NoisePlan plan{11, 20000, 0};
  const auto sq = mc_expectation(make_functional("endpoint:square"), make_model("bm"), start(0.0, 0.0, 64), eps, plan);
  CHECK(std::abs(sq.mean - eps) <= 3.0 * sq.std_error);

  const auto id = mc_expectation(make_functional("endpoint:identity"), make_model("drift1"), start(0.0, 0.0, 64), eps,
                                 plan);
  CHECK(id.mean == eps);
  CHECK(id.std_error == 0.0);

  const auto c = mc_expectation(make_functional("constant:1.5"), make_model("bm"), start(0.0, 0.0, 64), eps, plan);
  CHECK(c.mean == 1.5);
  CHECK(c.std_error == 0.0);

  const auto w1 = mc_expectation(make_functional("endpoint:square"), make_model("tanh-pd"), start(0.2, 0.25), 0.5,
                                 NoisePlan{3, 500, 0}, 1);
  const auto w3 = mc_expectation(make_functional("endpoint:square"), make_model("tanh-pd"), start(0.2, 0.25), 0.5,
                                 NoisePlan{3, 500, 0}, 3);
  CHECK(w1.mean == w3.mean);
  CHECK(w1.std_error == w3.std_error);
}

TEST_CASE("Lipschitz checker") {
  const auto sine = scalar_model("sine", [](const StoppedPath&) { return 0.0; },
                                 [](const StoppedPath& x) { return std::sin(x.endpoint()); }, 1.0, 1.0);
  CHECK(check_lipschitz(sine, 2000, 1).pass);

  const auto square = scalar_model("square", [](const StoppedPath& x) { return x.endpoint() * x.endpoint(); },
                                   [](const StoppedPath&) { return 0.0; }, 1.0, 100.0);
  const auto r = check_lipschitz(square, 2000, 1);
  CHECK_FALSE(r.pass);
  CHECK(r.max_observed > 5.0);

  const auto constant = check_lipschitz(make_model("bm"), 500, 1);
  CHECK(constant.pass);
  CHECK(constant.max_observed == 0.0);

  for (const auto& id : model_ids()) CHECK_MESSAGE(check_lipschitz(make_model(id), 2000, 3).pass, id);
}

TEST_CASE("boundedness checker") {
  CHECK(check_bounded(make_model("bm"), 500, 1).pass);
  CHECK(check_bounded(make_model("tanh-pd"), 2000, 1).pass);
  const auto lin = scalar_model("linear", [](const StoppedPath& x) { return x.endpoint(); },
                                [](const StoppedPath&) { return 0.0; }, 1.0, 1.0);
  CHECK_FALSE(check_bounded(lin, 2000, 1).pass);
  for (const auto& id : model_ids()) CHECK_MESSAGE(check_bounded(make_model(id), 2000, 3).pass, id);
}

TEST_CASE("model registry") {
  CHECK(model_ids().size() == 5);
  CHECK_THROWS_AS(make_model("ou"), UsageError);
  CHECK_THROWS_AS(make_model("linear-pd", 0.0), DomainError);
  CHECK_THROWS_AS(euler_solve(make_model("bm"), StoppedPath::from_samples(TimeGrid(1.0, 2), 2,
                                                                           std::vector<double>(6, 0.0), 0),
                              1.0, std::vector<double>(2, 0.0)),
                  DomainError);
}
