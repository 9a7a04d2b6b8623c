#include <doctest.h>

#include <cmath>
#include <numbers>

#include "pathcalc/catalog.hpp"
#include "pathcalc/dupire_diff.hpp"
#include "pathcalc/errors.hpp"
#include "pathcalc/sampling.hpp"

using namespace pathcalc;

namespace {

StoppedPath flat(double c, double t, double horizon = 1.0, int n = 64) {
  const TimeGrid g(horizon, n);
  const std::vector<double> v{c};
  return StoppedPath::constant(g, v, g.index_of(t));
}

FdConfig with_h(double h) {
  FdConfig c;
  c.h_vertical = h;
  return c;
}

FdConfig with_eps(double eps, int levels = 1) {
  FdConfig c;
  c.eps_horizontal = eps;
  c.richardson_levels = levels;
  return c;
}

// (int_0^t gamma ds)^3, outside the catalog.
Functional cubed_integral() {
  return Functional("cubed-integral", [](const StoppedPath& p) { return std::pow(p.left_integral(), 3); });
}

}  // namespace

TEST_CASE("vertical derivative") {
  CHECK(vertical_derivative(make_functional("endpoint:square"), flat(2.0, 0.5), with_h(1e-4))(0) ==
        doctest::Approx(4.0).epsilon(1e-12));
  CHECK(vertical_derivative(make_functional("integral:identity"), flat(2.0, 0.5))(0) == 0.0);
  // truncation is h^2/6 |cos(0.5)|, about 3.3e-9 at the default h; one
  // Richardson level brings it under 1e-9
  const auto sin_p = flat(0.5, 0.5);
  const double h = FdConfig{}.vertical_step(sin_p);
  CHECK(std::abs(vertical_derivative(make_functional("endpoint:sin"), sin_p)(0) - std::cos(0.5)) <=
        h * h / 6.0 * std::cos(0.5) * 1.01 + 1e-11);
  FdConfig rich;
  rich.richardson_levels = 2;
  CHECK(std::abs(vertical_derivative(make_functional("endpoint:sin"), sin_p, rich)(0) - std::cos(0.5)) <= 1e-9);
}

TEST_CASE("vertical hessian") {
  CHECK(vertical_hessian(make_functional("endpoint:square"), flat(2.0, 0.5))(0, 0) ==
        doctest::Approx(2.0).epsilon(1e-8));
  CHECK(std::abs(vertical_hessian(make_functional("endpoint:identity"), flat(2.0, 0.5))(0, 0)) <= 1e-6);
  CHECK(std::abs(vertical_hessian(make_functional("endpoint:exp"), flat(1.0, 0.5), with_h(1e-3))(0, 0) -
                 std::numbers::e) <= 1e-5);
}

TEST_CASE("horizontal derivative") {
  CHECK(horizontal_derivative(make_functional("integral:identity"), flat(3.0, 0.5)) ==
        doctest::Approx(3.0).epsilon(1e-14));
  for (const char* id : {"endpoint:square", "endpoint:sin", "endpoint:exp"})
    CHECK(horizontal_derivative(make_functional(id), flat(1.3, 0.25)) == 0.0);
  for (double t : {0.0, 0.25, 0.75})
    CHECK(std::abs(horizontal_derivative(make_functional("endpoint-time:square"), flat(2.0, t)) - 4.0) <= 1e-8);
  CHECK_THROWS_AS(horizontal_derivative(make_functional("integral:identity"), flat(3.0, 1.0)), BoundaryError);
  CHECK_THROWS_AS(horizontal_derivative(make_functional("integral:identity"), flat(3.0, 0.75), with_eps(0.5)),
                  BoundaryError);
}

TEST_CASE("numerical jet") {
  const auto sq = numerical_dupire_jet(make_functional("endpoint:square"), flat(2.0, 0.5));
  CHECK(sq.dt == 0.0);
  CHECK(sq.dx(0) == doctest::Approx(4.0));
  CHECK(sq.dxx(0, 0) == doctest::Approx(2.0));

  const auto ri = numerical_dupire_jet(make_functional("integral:identity"), flat(3.0, 0.5));
  CHECK(ri.dt == doctest::Approx(3.0));
  CHECK(ri.dx(0) == 0.0);
  CHECK(ri.dxx(0, 0) == 0.0);

  // t = 1 is interior on [0, 2]; on [0, 1] the horizontal derivative is a
  // boundary error.
  const auto pr = numerical_dupire_jet(make_functional("product"), flat(1.0, 1.0, 2.0, 128));
  CHECK(std::abs(pr.dt - 1.0) <= 1e-6);
  CHECK(std::abs(pr.dx(0) - 1.0) <= 1e-6);
  CHECK(std::abs(pr.dxx(0, 0)) <= 1e-6);
}

TEST_CASE("numerical jets match the analytic catalog") {
  const TimeGrid g(1.0, 256);
  for (const auto& id : core_catalog_ids()) {
    const Functional f = make_functional(id);
    for (std::uint64_t s = 0; s < 20; ++s) {
      const auto p = random_continuous_path(g, 1, 64 + 9 * static_cast<int>(s), 99, s);
      auto num = numerical_dupire_jet(f, p);
      // the squared integral's forward quotient is linear in eps, not exact
      if (id == "quadratic-integral") num.dt = horizontal_derivative(f, p, with_eps(2.0 * g.dt(), 2));
      const auto ref = f.analytic_jet(p);
      CHECK_MESSAGE(std::abs(num.dt - ref.dt) <= 1e-6, id);
      CHECK_MESSAGE(std::abs(num.dx(0) - ref.dx(0)) <= 1e-6, id);
      CHECK_MESSAGE(std::abs(num.dxx(0, 0) - ref.dxx(0, 0)) <= 1e-4, id);
    }
  }
}

TEST_CASE("central difference is second order") {
  const Functional f = make_functional("endpoint:sin");
  const auto p = flat(0.7, 0.5);
  const double e1 = std::abs(vertical_derivative(f, p, with_h(0.1))(0) - std::cos(0.7));
  const double e2 = std::abs(vertical_derivative(f, p, with_h(0.05))(0) - std::cos(0.7));
  CHECK(e1 / e2 >= 3.5);
  CHECK(e1 / e2 <= 4.5);

  FdConfig rich = with_h(0.1);
  rich.richardson_levels = 2;
  CHECK(std::abs(vertical_derivative(f, p, rich)(0) - std::cos(0.7)) < e2 / 10.0);
}

TEST_CASE("forward difference is first order, Richardson restores second") {
  const TimeGrid g(1.0, 256);
  const auto p = random_continuous_path(g, 1, 64, 5, 0, 0.5);
  const Functional f = cubed_integral();
  const double i = p.left_integral();
  const double exact = 3.0 * i * i * p.endpoint();
  auto err = [&](double eps, int levels) {
    return std::abs(horizontal_derivative(f, p, with_eps(eps, levels)) - exact);
  };
  const double r1 = err(1.0 / 16, 1) / err(1.0 / 32, 1);
  CHECK(r1 >= 1.7);
  CHECK(r1 <= 2.3);
  const double r2 = err(1.0 / 16, 2) / err(1.0 / 32, 2);
  CHECK(r2 == doctest::Approx(4.0).epsilon(0.15));

  // For a squared integral the forward-difference error is exactly linear in
  // eps, so one Richardson level removes it.
  const Functional q = make_functional("quadratic-integral");
  const double dq = 2.0 * i * p.endpoint();
  const double q1 = std::abs(horizontal_derivative(q, p, with_eps(1.0 / 16)) - dq);
  const double q2 = std::abs(horizontal_derivative(q, p, with_eps(1.0 / 32)) - dq);
  CHECK(q1 / q2 == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(std::abs(horizontal_derivative(q, p, with_eps(1.0 / 16, 2)) - dq) <= 1e-12);
}

TEST_CASE("time-linear functionals have no forward-difference error") {
  // t f(gamma(t)) is linear in t along the flat extension, so every eps gives
  // the exact value and no convergence order can be read off.
  const Functional f = make_functional("endpoint-time:square");
  const auto p = flat(2.0, 0.25);
  for (double eps : {1.0 / 16, 1.0 / 32, 1.0 / 64})
    CHECK(std::abs(horizontal_derivative(f, p, with_eps(eps)) - 4.0) <= 1e-12);
}

TEST_CASE("hessian is exactly symmetric") {
  Eigen::MatrixXd a(3, 3);
  a << 1.0, 0.3, -0.2, 0.1, 2.0, 0.7, 0.4, -0.5, 1.5;
  const Functional f = endpoint_quadratic_form(a);
  const TimeGrid g(1.0, 16);
  const auto p = random_continuous_path(g, 3, 8, 1, 2);
  const auto h = vertical_hessian(f, p);
  CHECK((h - h.transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("step halving diagnostic") {
  const auto d = vertical_step_halving(make_functional("endpoint:sin"), flat(0.5, 0.5), with_h(0.1));
  CHECK(d.spread > 0.0);
  CHECK(d.spread == doctest::Approx(std::abs(d.at_h(0) - d.at_half_h(0))));
}

TEST_CASE("invalid steps are rejected") {
  CHECK_THROWS_AS(vertical_derivative(make_functional("endpoint:square"), flat(1.0, 0.5), with_h(0.0)),
                  DomainError);
  FdConfig bad;
  bad.richardson_levels = 4;
  CHECK_THROWS_AS(numerical_dupire_jet(make_functional("endpoint:square"), flat(1.0, 0.5), bad), DomainError);
  CHECK_THROWS_AS(horizontal_derivative(make_functional("product"), flat(1.0, 0.5), with_eps(0.01)),
                  GridAlignmentError);
}

TEST_CASE("non-finite evaluations are reported") {
  const Functional f("log", [](const StoppedPath& p) { return std::log(p.endpoint()); });
  CHECK_THROWS_AS(vertical_derivative(f, flat(0.0, 0.5), with_h(1e-3)), NumericalError);
}

TEST_CASE("richardson tableau") {
  // estimates a + c h with h halving
  const std::vector<double> lin{1.0 + 0.5, 1.0 + 0.25, 1.0 + 0.125};
  CHECK(richardson(lin, 1, 1) == doctest::Approx(1.0));
  const std::vector<double> quad{2.0 + 0.04, 2.0 + 0.01};
  CHECK(richardson(quad, 2, 2) == doctest::Approx(2.0));
}
