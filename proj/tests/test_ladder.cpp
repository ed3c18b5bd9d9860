#include <doctest.h>

#include <cmath>

#include "ek/error.hpp"
#include "ek/ladder.hpp"
#include "oracles.hpp"

using namespace ek;
using cplx = std::complex<double>;

namespace {

std::uint32_t naive_mask(std::uint64_t n, const Ladder& L) {
  std::uint32_t mask = 0;
  for (const auto p : oracle::factor(n)) {
    const double lp = std::log(static_cast<double>(p));
    for (int j = 1; j <= L.J(); ++j)
      if (lp >= L.log_p[j - 1] && lp <= L.log_q[j - 1]) mask |= 1u << (j - 1);
  }
  return mask;
}

}  // namespace

TEST_CASE("rung formulas") {
  const Ladder L = make_ladder(1'000'000'000, 0.5, 1.2, 3);
  REQUIRE(L.J() == 3);
  for (int j = 1; j <= 3; ++j) {
    CHECK(L.log_p[j - 1] == doctest::Approx(std::pow(j, 4 * j) * std::pow(1.2, j - 1) * 0.5).epsilon(1e-15));
    CHECK(L.log_q[j - 1] == doctest::Approx(std::pow(j, 4 * j + 2) * std::pow(1.2, j)).epsilon(1e-15));
  }
  CHECK(L.log_p[0] == 0.5);
  CHECK(L.log_q[0] == 1.2);
}

TEST_CASE("build_ladder picks the maximal J under exp(sqrt(log X))") {
  const double log_x = 1e8;
  const Ladder L = build_ladder_from_log(log_x, 0.1, 1.05, 1.0 / 150.0, false);
  const double ceiling = std::sqrt(log_x);
  REQUIRE(L.J() >= 1);
  CHECK(L.log_q.back() <= ceiling);
  const double next = L.J() + 1.0;
  CHECK(std::pow(next, 4 * next + 2) * std::pow(1.05, next) > ceiling);
  CHECK(L.J() == 2);
}

TEST_CASE("ladder constraints") {
  const std::int64_t X = 100'000'000;
  CHECK_THROWS_AS(build_ladder(X, 1.0, 2.0, 0.0, false), ConstraintError);
  CHECK_THROWS_AS(build_ladder(X, 1.0, 2.0, 0.2, false), ConstraintError);
  CHECK_THROWS_AS(build_ladder(X, 3.0, 2.0, 0.01, false), ConstraintError);
  CHECK_THROWS_AS(build_ladder(X, 1.0, 5.0, 0.01, false), ConstraintError);  // sqrt(log 1e8) ~ 4.29
  CHECK_THROWS_AS(build_ladder(X, 1.0, 2.0, 0.01, true), ConstraintError);   // floor fails
  CHECK_THROWS_AS(build_ladder(19, 1.0, 2.0, 0.01, false), ConstraintError);
  const Ladder ok = build_ladder(X, 1.0, 2.0, 0.01, false);
  CHECK_FALSE(ok.floor_ok);
  CHECK(ok.J() == 1);
  // A first interval whose floor holds needs astronomically large X.
  const Ladder huge = build_ladder_from_log(1e10, 70'000.0, 100'000.0, 1.0 / 150.0, true);
  CHECK(huge.floor_ok);
  CHECK(huge.J() == 1);
  CHECK_THROWS_AS(make_ladder(X, 2.0, 1.0, 1), ConstraintError);
  CHECK_THROWS_AS(make_ladder(X, 1.0, 2.0, -1), ConstraintError);
}

TEST_CASE("default_ladder") {
  const Ladder L = default_ladder(100'000'000, 10'000, 0.4);
  REQUIRE(L.J() >= 1);
  CHECK(L.log_q[0] == doctest::Approx(4.291932052578694).epsilon(1e-14));
  CHECK(L.log_p[0] == doctest::Approx(0.42919320525786947).epsilon(1e-14));
  CHECK(L.eta == doctest::Approx(1.0 / 150.0));
  CHECK_FALSE(L.floor_ok);
  // h below exp(sqrt(log X)): P_1 = max(h^{delta/4}, (log h)^{6000}) exceeds Q_1 = h.
  CHECK_THROWS_AS(default_ladder(1'000'000'000'000'000'000, 100, 0.4), ConstraintError);
  CHECK_THROWS_AS(default_ladder(100'000'000, 1, 0.4), ConstraintError);
  CHECK_THROWS_AS(default_ladder(100'000'000, 10'000, 0.0), ConstraintError);
}

TEST_CASE("membership: sieve, trial division and factorisation agree") {
  Ladder L;
  L.X = 1'000'000;
  L.log_x = std::log(1e6);
  L.log_p = {0.6, 2.5};
  L.log_q = {2.2, 4.0};
  const Window w{1'000'000, 5000};
  const auto base = base_primes(2000);
  const auto masks = rung_masks(w, L, base);
  const auto member = membership_window(w, L, base);
  std::uint64_t members = 0;
  for (std::int64_t i = 0; i < w.h; ++i) {
    const auto n = static_cast<std::uint64_t>(w.first() + i);
    const auto want = naive_mask(n, L);
    REQUIRE(masks[i] == want);
    REQUIRE(rung_mask_single(n, L, base) == want);
    REQUIRE(member[i] == (want == full_mask(L)));
    REQUIRE(in_S(n, L, base) == (want == full_mask(L)));
    members += member[i];
  }
  CHECK(members > 0);
  CHECK(members < 5000);
}

TEST_CASE("empty ladder admits every integer") {
  Ladder L;
  L.X = 1'000'000;
  L.log_x = std::log(1e6);
  CHECK(full_mask(L) == 0);
  CHECK(in_S(12345, L, base_primes(100)));
  const auto r = complement_density(1'000'000, L, SampleMode::full());
  CHECK(r.measured == 0.0);
  CHECK(r.predicted == 0.0);
}

TEST_CASE("complement density") {
  const Ladder L = make_ladder(1'000'000, 1.0, 3.0, 1);
  const auto full = complement_density(1'000'000, L, SampleMode::full());
  // Count directly.
  std::uint64_t outside = 0;
  for (std::uint64_t n = 1'000'001; n <= 2'000'000; ++n) {
    bool hit = false;
    for (std::uint64_t p : {3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull})
      if (n % p == 0) hit = true;
    outside += !hit;
  }
  CHECK(full.measured == doctest::Approx(outside / 1e6).epsilon(1e-15));
  CHECK(full.predicted == doctest::Approx(2.0 / 3 * 4.0 / 5 * 6.0 / 7 * 10.0 / 11 * 12.0 / 13 * 16.0 / 17 * 18.0 / 19).epsilon(1e-14));
  CHECK(full.bound_shape == doctest::Approx(1.0 / 3.0));
  CHECK(full.stderr_ == 0.0);

  const auto s1 = complement_density(1'000'000, L, SampleMode::sampled(50'000, 3), 1);
  const auto s3 = complement_density(1'000'000, L, SampleMode::sampled(50'000, 3), 3);
  CHECK(s1.measured == s3.measured);
  CHECK(std::abs(s1.measured - full.measured) <= 3.0 * s1.stderr_);
  CHECK_THROWS_AS(complement_density(1'000'000, L, SampleMode::sampled(999, 3)), ParameterError);
  CHECK_THROWS_AS(complement_density(200'000'000, L, SampleMode::full()), ParameterError);
}

TEST_CASE("complement density rises with log P_1 / log Q_1") {
  double last = -1.0;
  for (double delta : {0.4, 1.2, 3.6}) {
    const Ladder L = default_ladder(1'000'000, 1'000'000, delta);
    const auto r = complement_density(1'000'000, L, SampleMode::full());
    CHECK(r.bound_shape == doctest::Approx(delta / 4.0));
    CHECK(r.measured > last);
    last = r.measured;
  }
}

TEST_CASE("inclusion-exclusion over rung subsets is exact") {
  const auto base = base_primes(2000);
  for (int J : {1, 2, 3}) {
    const Ladder L = make_ladder(1'000'000, 0.5, 1.3, J);
    const Window w{1'000'000, 3000};
    std::vector<cplx> a(3000);
    for (std::size_t i = 0; i < a.size(); ++i) {
      CounterRng rng(17, i);
      a[i] = {rng.uniform01() - 0.5, rng.uniform01() - 0.5};
    }
    const auto r = inclusion_exclusion_check(w, L, a, base);
    CHECK(std::abs(r.lhs - r.rhs) <= 1e-12 * r.weight_l1);
  }
  const Ladder L = make_ladder(1'000'000, 0.5, 1.3, 1);
  std::vector<cplx> short_weights(10);
  CHECK_THROWS_AS(inclusion_exclusion_check(Window{1'000'000, 11}, L, short_weights, base), ParameterError);
}

TEST_CASE("ladder text record") {
  const Ladder L = make_ladder(1'000'000, 0.123456789, 1.987654321, 3, 0.01);
  const auto text = to_text(L);
  const Ladder back = ladder_from_text(text);
  CHECK(back.eta == L.eta);
  CHECK(back.log_p == L.log_p);
  CHECK(back.log_q == L.log_q);
  CHECK(to_text(back) == text);
  CHECK_THROWS_AS(ladder_from_text("eta 0.1\nJ 2\n1 0.5 1.0\n"), ParameterError);
  CHECK_THROWS_AS(ladder_from_text("J 1\n"), ParameterError);
}
