#include <doctest.h>

#include <cmath>

#include "pathcalc/catalog.hpp"
#include "pathcalc/dupire_diff.hpp"
#include "pathcalc/errors.hpp"
#include "pathcalc/frechet_diff.hpp"
#include "pathcalc/sampling.hpp"

using namespace pathcalc;

namespace {

StoppedPath flat(double c, double t, int n = 64) {
  const TimeGrid g(1.0, n);
  const std::vector<double> v{c};
  return StoppedPath::constant(g, v, g.index_of(t));
}

}  // namespace

TEST_CASE("evaluate") {
  CHECK(evaluate(make_functional("endpoint:square"), flat(3.0, 0.5)) == 9.0);
  CHECK(evaluate(make_functional("integral:identity"), flat(2.0, 0.5)) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(evaluate(make_functional("endpoint:square"), vertical_bump(flat(3.0, 0.5), 1.0)) == 16.0);
  CHECK(evaluate(make_functional("constant:2.5"), flat(1.0, 0.25)) == 2.5);
}

TEST_CASE("unknown ids list the valid ones") {
  try {
    make_functional("nope");
    FAIL("expected UsageError");
  } catch (const UsageError& e) {
    CHECK(std::string(e.what()).find("endpoint:square") != std::string::npos);
  }
  CHECK_THROWS_AS(make_functional("endpoint:tan"), UsageError);
}

TEST_CASE("catalog functionals are non-anticipative") {
  const TimeGrid g(1.0, 64);
  for (const auto& id : functional_ids()) {
    if (id.find('<') != std::string::npos) continue;  // placeholder entry
    const Functional f = make_functional(id);
    for (std::uint64_t s = 0; s < 100; ++s) {
      const auto p = random_continuous_path(g, 1, static_cast<int>(s % 63), 17, s);
      CHECK_MESSAGE(check_non_anticipative(f, p, 1000 + s), id);
    }
  }
}

TEST_CASE("anticipative probe is caught") {
  const Functional probe("probe", [](const StoppedPath& p) { return p.stored(p.grid().steps()); });
  const TimeGrid g(1.0, 8);
  CHECK_FALSE(check_non_anticipative(probe, StoppedPath::scalar(g, std::vector<double>(9, 1.0), 3), 1));
  // tampering only the last node cannot move an endpoint functional
  CHECK(check_non_anticipative(make_functional("endpoint:square"),
                               StoppedPath::scalar(g, std::vector<double>(9, 1.0), 7), 1));
}

TEST_CASE("analytic jets") {
  const auto sq = make_functional("endpoint:square").analytic_jet(flat(2.0, 0.5));
  CHECK(sq.dt == 0.0);
  CHECK(sq.dx(0) == 4.0);
  CHECK(sq.dxx(0, 0) == 2.0);

  const auto ri = make_functional("integral:identity").analytic_jet(flat(3.0, 0.5));
  CHECK(ri.dt == 3.0);
  CHECK(ri.dx(0) == 0.0);
  CHECK(ri.dxx(0, 0) == 0.0);

  const auto sn = make_functional("endpoint:sin").analytic_jet(flat(0.5, 0.5));
  CHECK(sn.dx(0) == doctest::Approx(0.8775826).epsilon(1e-7));

  const Functional user("user", [](const StoppedPath& p) { return p.endpoint(); });
  CHECK(user.smoothness() == Smoothness::Unknown);
  CHECK_THROWS_AS(user.analytic_jet(flat(1.0, 0.5)), UnsupportedError);
  CHECK_THROWS_AS(user.analytic_riesz(flat(1.0, 0.5)), UnsupportedError);
}

TEST_CASE("analytic Riesz representations") {
  const auto p = flat(1.0, 1.0, 16);
  const auto sq = make_functional("endpoint:square").analytic_riesz(p);
  CHECK(sq.atom(0) == 2.0);
  CHECK(sq.weights.cwiseAbs().maxCoeff() == 0.0);

  const double dt = p.grid().dt();
  const auto wl = make_functional("weighted:linear").analytic_riesz(p);
  CHECK(wl.atom(0) == 0.0);
  for (int i = 0; i < 16; ++i) CHECK(wl.weights(i, 0) == doctest::Approx(p.grid().time(i) * dt));

  const auto ri = make_functional("integral:identity").analytic_riesz(p);
  CHECK(ri.atom(0) == 0.0);
  for (int i = 0; i < 16; ++i) CHECK(ri.weights(i, 0) == doctest::Approx(dt));
}

TEST_CASE("analytic representation reproduces the functional on linear entries") {
  const TimeGrid g(1.0, 64);
  const auto p = random_continuous_path(g, 1, 40, 2, 0);
  const auto eta = random_continuous_path(g, 1, 40, 2, 1);
  for (const char* id : {"integral:identity", "weighted:linear", "weighted:one"}) {
    const Functional f = make_functional(id);
    CHECK(f.analytic_riesz(p).apply(eta) == doctest::Approx(evaluate(f, eta)).epsilon(1e-12));
  }
}

TEST_CASE("pure integrals have an exactly zero vertical derivative") {
  const TimeGrid g(1.0, 64);
  for (const char* id : {"integral:identity", "integral:square", "integral:sin", "weighted:linear",
                         "quadratic-integral", "quadratic-integral:linear"}) {
    for (std::uint64_t s = 0; s < 5; ++s) {
      const auto p = random_continuous_path(g, 1, 10 + 9 * static_cast<int>(s), 4, s);
      const Functional f = make_functional(id);
      CHECK_MESSAGE(vertical_derivative(f, p)(0) == 0.0, id);
      CHECK_MESSAGE(vertical_hessian(f, p)(0, 0) == 0.0, id);
    }
  }
}

TEST_CASE("derivatives ignore the direction after t") {
  const TimeGrid g(1.0, 64);
  for (const auto& id : core_catalog_ids()) {
    const Functional f = make_functional(id);
    for (std::uint64_t s = 0; s < 5; ++s) {
      const auto p = random_continuous_path(g, 1, 32, 8, s);
      const auto eta = random_continuous_path(g, 1, 64, 8, 100 + s);
      const double full = directional_derivative(f, p, eta);
      const double cut = directional_derivative(f, p, stop_at_index(eta, 32));
      CHECK_MESSAGE(std::abs(full - cut) <= 1e-9, id);
    }
  }
}

TEST_CASE("endpoint quadratic form") {
  Eigen::MatrixXd a(2, 2);
  a << 2, 1, 1, 3;
  const TimeGrid g(1.0, 4);
  const auto p = StoppedPath::from_samples(g, 2, {0, 0, 0, 0, 1, 2, 0, 0, 0, 0}, 2);
  const Functional f = endpoint_quadratic_form(a);
  CHECK(evaluate(f, p) == doctest::Approx(2 + 4 + 12));
  const auto jet = f.analytic_jet(p);
  CHECK(jet.dx(0) == doctest::Approx(8.0));
  CHECK(jet.dx(1) == doctest::Approx(14.0));
  CHECK(jet.dxx(1, 1) == doctest::Approx(6));
  const auto num = numerical_dupire_jet(f, p);
  CHECK((num.dx - jet.dx).cwiseAbs().maxCoeff() < 1e-8);
  CHECK((num.dxx - jet.dxx).cwiseAbs().maxCoeff() < 1e-4);
  CHECK(num.dxx(0, 1) == num.dxx(1, 0));
}
