#include <doctest.h>

#include <cmath>

#include "pathcalc/catalog.hpp"
#include "pathcalc/errors.hpp"
#include "pathcalc/sampling.hpp"
#include "pathcalc/verify.hpp"

using namespace pathcalc;

namespace {

StoppedPath start(double x0, double t, int n = 256) {
  const TimeGrid g(1.0, n);
  const std::vector<double> v{x0};
  return StoppedPath::constant(g, v, g.index_of(t));
}

StoppedPath brownian(int n, std::uint64_t seed, std::uint64_t path, const SfdeModel& model) {
  const auto init = start(0.3, 0.0, n);
  const NoisePlan plan{seed, path + 1, 0};
  return euler_solve(model, init, 1.0, plan.increments(path, init.grid(), 1, 0, n));
}

FdConfig quadratic_exact_steps() {
  // second differences of a quadratic are exact for any h; a large h keeps
  // rounding out of the Hessian
  FdConfig cfg;
  cfg.h_vertical = 0.125;
  return cfg;
}

}  // namespace

TEST_CASE("Ito residual telescopes for a squared endpoint") {
  const Functional f = make_functional("endpoint:square");
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto x = brownian(256, 1, s, make_model(s % 2 ? "bm" : "tanh-pd"));
    CHECK(std::abs(ito_residual(f, x, quadratic_exact_steps(), QvMode::Realized)) <= 1e-10);
  }
}

TEST_CASE("Ito residual cancels exactly for a running integral") {
  const Functional f = make_functional("integral:identity");
  const SfdeModel bm = make_model("bm");
  for (std::uint64_t s = 0; s < 5; ++s) {
    const auto x = brownian(256, 2, s, bm);
    CHECK(std::abs(ito_residual(f, x, {}, QvMode::Realized)) <= 1e-12);
    CHECK(std::abs(ito_residual(f, x, {}, QvMode::Dt, &bm)) <= 1e-12);
  }
  const auto x = brownian(64, 2, 0, bm);
  CHECK(ito_residual(make_functional("constant:4"), x, {}, QvMode::Realized) == 0.0);
  CHECK_THROWS_AS(ito_residual(f, x, {}, QvMode::Dt), UsageError);
}

TEST_CASE("Ito convergence study") {
  const SfdeModel bm = make_model("bm");
  const NoisePlan plan{7, 2000, 0};
  ItoStudyConfig cfg;
  const auto quartic = ito_convergence_study(make_functional("endpoint:quartic"), bm, {64, 256, 1024}, plan, cfg);
  REQUIRE(quartic.fitted_order);
  CHECK(*quartic.fitted_order >= 0.4);
  CHECK(*quartic.fitted_order <= 0.6);
  REQUIRE(quartic.levels.size() == 3);
  CHECK(quartic.levels[0].level == 1.0 / 64);

  ItoStudyConfig realized;
  realized.mode = QvMode::Realized;
  realized.fd = quadratic_exact_steps();
  const auto square = ito_convergence_study(make_functional("endpoint:square"), bm, {64, 256, 1024},
                                            NoisePlan{7, 200, 0}, realized);
  CHECK_FALSE(square.fitted_order);
  for (const auto& l : square.levels) CHECK(l.error <= 1e-10);

  const auto c = ito_convergence_study(make_functional("constant:1"), bm, {64, 256}, NoisePlan{7, 50, 0}, cfg);
  for (const auto& l : c.levels) CHECK(l.error == 0.0);

  CHECK_THROWS_AS(ito_convergence_study(make_functional("constant:1"), bm, {64, 96}, plan, cfg), DomainError);
}

TEST_CASE("generator left side") {
  const std::vector<double> eps{0.0625, 0.03125, 0.015625, 0.0078125};
  const auto sq = generator_lhs(make_functional("endpoint:square"), make_model("bm"), start(0.0, 0.5), eps,
                                NoisePlan{3, 20000, 0});
  REQUIRE(sq.levels.size() == 4);
  for (const auto& l : sq.levels) CHECK(std::abs(l.value - 1.0) <= 3.0 * l.std_error);
  CHECK(std::abs(sq.intercept - 1.0) <= 3.0 * sq.intercept_std_error);

  const double c = 0.8;
  const auto ri = generator_lhs(make_functional("integral:identity"), make_model("drift1"), start(c, 0.5), eps,
                                NoisePlan{3, 2, 0});
  // The left-point sum over [t, t + eps] misses the last half step, so the
  // quotient is c + (eps - dt) / 2 and the intercept sits dt / 2 below c.
  const double dt = 1.0 / 256;
  for (const auto& l : ri.levels) CHECK(l.value == doctest::Approx(c + (l.level - dt) / 2.0).epsilon(1e-10));
  CHECK(ri.intercept == doctest::Approx(c - dt / 2.0).epsilon(1e-10));

  const auto k = generator_lhs(make_functional("constant:2"), make_model("bm"), start(0.0, 0.5), eps,
                               NoisePlan{3, 100, 0});
  for (const auto& l : k.levels) CHECK(l.value == 0.0);
  CHECK(k.intercept == 0.0);

  const std::vector<double> off{0.0625, 0.01};
  CHECK_THROWS_AS(generator_lhs(make_functional("constant:2"), make_model("bm"), start(0.0, 0.5), off,
                                NoisePlan{3, 10, 0}),
                  GridAlignmentError);
}

TEST_CASE("generator right side in both forms") {
  const auto p0 = start(0.0, 0.5);
  const auto pc = start(0.8, 0.5);
  CHECK(generator_rhs_dupire(make_functional("endpoint:square"), make_model("bm"), p0) ==
        doctest::Approx(1.0).epsilon(1e-8));
  CHECK(generator_rhs_dupire(make_functional("integral:identity"), make_model("drift1"), pc) ==
        doctest::Approx(0.8).epsilon(1e-12));
  CHECK(generator_rhs_dupire(make_functional("constant:3"), make_model("tanh-pd"), pc) == 0.0);

  CHECK(generator_rhs_frechet(make_functional("endpoint:square"), make_model("bm"), p0) ==
        doctest::Approx(1.0).epsilon(1e-6));
  CHECK(generator_rhs_frechet(make_functional("integral:identity"), make_model("drift1"), pc) ==
        doctest::Approx(0.8).epsilon(1e-9));
  CHECK(generator_rhs_frechet(make_functional("constant:3"), make_model("tanh-pd"), pc) == 0.0);
}

TEST_CASE("two forms of the generator agree across a small matrix") {
  const TimeGrid g(1.0, 256);
  for (const auto& id : core_catalog_ids()) {
    for (const char* model : {"drift1", "bm", "tanh-pd", "linear-pd"}) {
      const auto p = random_continuous_path(g, 1, 128, 31, 0, 0.5);
      const Functional f = make_functional(id);
      const SfdeModel m = make_model(model);
      const double d = generator_rhs_dupire(f, m, p);
      const double r = generator_rhs_frechet(f, m, p);
      CHECK_MESSAGE(std::abs(d - r) <= 1e-3 * (1.0 + std::abs(d)), id << " / " << model);
    }
  }
}

TEST_CASE("coherence report") {
  const auto sq = coherence_report(make_functional("endpoint:square"), start(1.0, 0.5));
  CHECK(sq.atom_mu(0) == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(sq.dx_dupire(0) == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(sq.atom_lambda(0, 0) == doctest::Approx(2.0).epsilon(1e-4));
  CHECK(sq.dxx_dupire(0, 0) == doctest::Approx(2.0).epsilon(1e-4));
  CHECK(sq.dt_frechet == 0.0);
  CHECK(sq.dt_dupire == 0.0);
  CHECK(sq.max_abs_gap <= 1e-3);

  const auto ri = coherence_report(make_functional("integral:identity"), start(3.0, 0.5));
  CHECK(std::abs(ri.atom_mu(0)) <= 1e-6);
  CHECK(ri.dx_dupire(0) == 0.0);
  CHECK(ri.dt_frechet == doctest::Approx(3.0));
  CHECK(ri.dt_dupire == doctest::Approx(3.0));

  const auto c = coherence_report(make_functional("constant:1"), start(3.0, 0.5));
  CHECK(c.max_abs_gap == 0.0);
  CHECK(c.atom_mu(0) == 0.0);
  CHECK(c.dxx_dupire(0, 0) == 0.0);
}

TEST_CASE("coherence holds across the catalog on random paths") {
  const TimeGrid g(1.0, 256);
  for (const auto& id : core_catalog_ids()) {
    const Functional f = make_functional(id);
    for (std::uint64_t s = 0; s < 20; ++s) {
      const auto p = random_continuous_path(g, 1, 64 + 8 * static_cast<int>(s), 13, s);
      const auto r = coherence_report(f, p);
      CHECK_MESSAGE(r.max_abs_gap <= 1e-3, id);
      CHECK_MESSAGE(std::abs(r.dt_frechet - r.dt_dupire) <= 1e-12, id);
    }
  }
}

TEST_CASE("order fitting") {
  std::vector<ConvergenceLevel> levels;
  for (double h : {0.1, 0.05, 0.025}) {
    ConvergenceLevel l;
    l.level = h;
    l.error = 3.0 * h * h;
    levels.push_back(l);
  }
  REQUIRE(fit_order(levels));
  CHECK(*fit_order(levels) == doctest::Approx(2.0));
  for (auto& l : levels) l.error = 1e-14;
  CHECK_FALSE(fit_order(levels));
}
