#include <doctest.h>

#include <cmath>

#include "ek/error.hpp"
#include "ek/experiments.hpp"
#include "ek/theory.hpp"
#include "oracles.hpp"

using namespace ek;

TEST_CASE("nearest-rank quantiles") {
  std::vector<double> v;
  for (int i = 10; i >= 1; --i) v.push_back(i);
  const auto s = summarize(v);
  CHECK(s.q10 == 1.0);
  CHECK(s.q50 == 5.0);
  CHECK(s.q90 == 9.0);
  CHECK(s.mean == 5.5);
  CHECK(s.n == 10);
  CHECK(nearest_rank({3.0}, 0.0) == 3.0);
  CHECK(nearest_rank({1.0, 2.0}, 1.0) == 2.0);
  CHECK_THROWS_AS(nearest_rank({}, 0.5), ParameterError);
  CHECK(summarize({}).n == 0);
}

TEST_CASE("window starts") {
  const ExperimentConfig cfg{1000, 100, 500, 42, 1};
  for (std::uint64_t i = 0; i < 500; ++i) {
    const auto x = window_start(cfg, i);
    CHECK(x >= 1000);
    CHECK(x <= 1900);
    CHECK(x == window_start(cfg, i));
  }
  ExperimentConfig other = cfg;
  other.seed = 43;
  int same = 0;
  for (std::uint64_t i = 0; i < 100; ++i) same += window_start(cfg, i) == window_start(other, i);
  CHECK(same < 10);
  CHECK(window_start(ExperimentConfig{1000, 1000, 1, 7, 1}, 3) == 1000);
}

TEST_CASE("experiment config validation") {
  CHECK_NOTHROW(ExperimentConfig({20, 2, 1, 0, 1}).validate());
  CHECK_THROWS_AS(ExperimentConfig({19, 2, 1, 0, 1}).validate(), ParameterError);
  CHECK_THROWS_AS(ExperimentConfig({100, 1, 1, 0, 1}).validate(), ParameterError);
  CHECK_THROWS_AS(ExperimentConfig({100, 101, 1, 0, 1}).validate(), ParameterError);
  CHECK_THROWS_AS(ExperimentConfig({100, 10, 0, 0, 1}).validate(), ParameterError);
  CHECK_THROWS_AS(ExperimentConfig({(std::int64_t{1} << 61) + 1, 10, 1, 0, 1}).validate(), ParameterError);
}

TEST_CASE("theorem1 windows") {
  const ExperimentConfig cfg{10'000'000, 1000, 30, 11, 1};
  const auto a = run_theorem1(cfg);
  ExperimentConfig threaded = cfg;
  threaded.threads = 3;
  const auto b = run_theorem1(threaded);
  REQUIRE(a.rows.size() == 30);
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].index == i);
    CHECK(a.rows[i].x == window_start(cfg, i));
    CHECK(a.rows[i].disc_phiX == b.rows[i].disc_phiX);
    CHECK(a.rows[i].disc_phi == b.rows[i].disc_phi);
    CHECK(a.rows[i].disc_phiX > 0.0);
    CHECK(a.rows[i].disc_phiX <= 1.0);
  }
  CHECK(a.phiX.q10 <= a.phiX.q50);
  CHECK(a.phiX.q50 <= a.phiX.q90);
  CHECK(a.exceptional_fraction >= 0.0);
  CHECK(a.exceptional_fraction <= 1.0);
  const auto none = run_theorem1(cfg, 2.0);
  CHECK(none.exceptional_fraction == 0.0);

  // h = X covers the dyadic block.
  const auto whole = run_theorem1(ExperimentConfig{1'000'000, 1'000'000, 1, 5, 1});
  const auto p = TheoryParams::from_X(1'000'000);
  const auto F = empirical_cdf(dyadic_stats(1'000'000, SampleMode::full()).histogram, p);
  CHECK(whole.rows[0].disc_phiX == doctest::Approx(sup_discrepancy(F, delange_distribution(p))).epsilon(1e-14));
}

TEST_CASE("theorem2 windows") {
  const ExperimentConfig cfg{1'000'000, 2000, 20, 3, 1};
  CHECK_THROWS_AS(run_theorem2(cfg, Theorem2Options{0}), ParameterError);
  CHECK_THROWS_AS(run_theorem2(cfg, Theorem2Options{16}), ParameterError);
  const auto r = run_theorem2(cfg, Theorem2Options{1});
  const double pred = pik_prediction(1'000'000, 2000, 1);
  for (const auto& row : r.rows) {
    std::uint64_t prime_powers = 0;
    for (std::int64_t n = row.x + 1; n <= row.x + 2000; ++n) prime_powers += oracle::omega(n) == 1;
    CHECK(row.count == prime_powers);
    CHECK(row.prediction == pred);
    CHECK(row.ratio == doctest::Approx(prime_powers / pred));
  }
  CHECK(r.within_band >= 0.0);
  CHECK(r.within_band <= 1.0);
  CHECK(r.k_far_from_T == (std::abs(1 - TheoryParams::from_X(1'000'000).T) >
                           2.0 * std::sqrt(TheoryParams::from_X(1'000'000).T)));
}

TEST_CASE("prop1 grid and integrals") {
  const Prop1Options opts;
  const auto taus = prop1_tau_grid(opts);
  CHECK(taus.size() == 129);
  CHECK(taus.front() == 0.1);
  CHECK(taus.back() == 10.0);
  for (std::size_t i = 1; i < taus.size(); ++i)
    CHECK(std::log(taus[i] / taus[i - 1]) == doctest::Approx(std::log(100.0) / 128).epsilon(1e-12));
  CHECK_THROWS_AS(prop1_tau_grid(Prop1Options{1.0, 10.0}), ParameterError);
  CHECK_THROWS_AS(prop1_tau_grid(Prop1Options{10.0, 0.5}), ParameterError);

  const Histogram h{0, 10, 30, 40, 15, 5};
  const auto self = prop1_integrals(h, h, 3.0, opts);
  CHECK(self.line_integral == 0.0);
  CHECK(self.circle_integral == 0.0);
  const Histogram g{0, 20, 30, 30, 15, 5};
  const auto diff = prop1_integrals(h, g, 3.0, opts);
  CHECK(diff.line_integral > 0.0);
  CHECK(diff.circle_integral > 0.0);
  Prop1Options fine = opts;
  fine.circle_points = 101;
  CHECK(std::abs(prop1_integrals(h, g, 3.0, fine).circle_integral - diff.circle_integral) <= 0.05 * diff.circle_integral);
  Prop1Options coarse = opts;
  coarse.circle_points = 30;
  CHECK_THROWS_AS(prop1_integrals(h, g, 3.0, coarse), ParameterError);

  const auto r = run_prop1(ExperimentConfig{1'000'000, 1'000'000, 2, 9, 1}, opts);
  CHECK(r.reference.mode.is_full());
  CHECK(r.rows[0].line_integral <= 1e-12);
}

TEST_CASE("sd check rows") {
  const auto rows = run_sd_check(1'000'000, {0.0, 0.5, -0.5});
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].rel_err <= 1e-12);
  CHECK(rows[1].rel_err == doctest::Approx(rows[2].rel_err).epsilon(1e-12));
  CHECK(std::abs(rows[1].empirical - std::conj(rows[2].empirical)) <= 1e-15);
  CHECK(rows[1].scale == doctest::Approx(1.0 / std::log(1e6)));
  CHECK(rows[1].rel_err <= 10.0 * rows[1].scale);
  CHECK_THROWS_AS(run_sd_check(200'000'000, {0.5}), ParameterError);
}

TEST_CASE("ladder density experiment") {
  const auto r = run_ladder_density(1'000'000, 1'000'000, 1.2, SampleMode::full());
  CHECK(r.ladder.J() >= 1);
  CHECK(r.report.measured > 0.0);
  CHECK(r.report.measured < 1.0);
  CHECK(r.report.count == 1'000'000);
}
