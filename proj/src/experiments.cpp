#include "ek/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ek/error.hpp"
#include "ek/parallel.hpp"
#include "ek/prime_cache.hpp"
#include "ek/theory.hpp"

namespace ek {

namespace {

using cplx = std::complex<double>;

std::shared_ptr<const PrimeTable> block_primes(std::int64_t X) {
  return cached_base_primes(isqrt(2 * static_cast<std::uint64_t>(X)) + 1);
}

double fraction(std::uint64_t hits, std::uint64_t n) {
  return n == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(n);
}

}  // namespace

void ExperimentConfig::validate() const {
  require(X >= 20, "experiment: X must be >= 20");
  require(X <= (std::int64_t{1} << 61), "experiment: X must be <= 2^61");
  require(h >= 2, "experiment: h must be >= 2");
  require(h <= X, "experiment: h must be <= X");
  require(samples >= 1, "experiment: samples must be >= 1");
}

std::int64_t window_start(const ExperimentConfig& cfg, std::uint64_t index) {
  CounterRng rng(cfg.seed, index);
  const auto lo = static_cast<std::uint64_t>(cfg.X);
  const auto hi = static_cast<std::uint64_t>(2 * cfg.X - cfg.h);
  return static_cast<std::int64_t>(rng.uniform(lo, hi));
}

double nearest_rank(std::vector<double> sorted, double q) {
  require(!sorted.empty(), "nearest_rank: no values");
  const auto n = static_cast<double>(sorted.size());
  const auto rank = static_cast<std::size_t>(std::max(1.0, std::ceil(q * n)));
  return sorted[std::min(rank, sorted.size()) - 1];
}

QuantileSummary summarize(std::vector<double> values) {
  QuantileSummary s;
  s.n = values.size();
  if (values.empty()) return s;
  std::sort(values.begin(), values.end());
  double sum = 0.0;
  for (const double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  s.q10 = nearest_rank(values, 0.1);
  s.q50 = nearest_rank(values, 0.5);
  s.q90 = nearest_rank(values, 0.9);
  return s;
}

Theorem1Result run_theorem1(const ExperimentConfig& cfg, double threshold) {
  cfg.validate();
  const auto base = block_primes(cfg.X);
  const TheoryParams p = TheoryParams::from_X(cfg.X);
  const DistributionFn delange = delange_distribution(p);
  const DistributionFn gauss = gaussian_distribution();

  Theorem1Result r;
  r.threshold = threshold;
  r.rows.resize(cfg.samples);
  parallel_for(cfg.samples, cfg.threads, [&](std::size_t i) {
    const std::int64_t x = window_start(cfg, i);
    const OmegaSlice slice = omega_window(Window{x, cfg.h}, *base);
    const EmpiricalCdf F = empirical_cdf(slice, p);
    r.rows[i] = {i, x, sup_discrepancy(F, delange), sup_discrepancy(F, gauss)};
  });

  std::vector<double> a, b;
  std::uint64_t exceptional = 0;
  for (const auto& row : r.rows) {
    a.push_back(row.disc_phiX);
    b.push_back(row.disc_phi);
    exceptional += row.disc_phiX > threshold;
  }
  r.phiX = summarize(a);
  r.phi = summarize(b);
  r.exceptional_fraction = fraction(exceptional, r.rows.size());
  return r;
}

Theorem2Result run_theorem2(const ExperimentConfig& cfg, const Theorem2Options& options) {
  cfg.validate();
  require(options.k >= 1, "theorem2: k must be >= 1");
  require(options.k <= kMaxOmega, "theorem2: k must be <= 15");
  require(options.epsilon >= 0.0, "theorem2: epsilon must be >= 0");
  require(options.band_lo <= options.band_hi, "theorem2: empty band");
  const auto base = block_primes(cfg.X);
  const TheoryParams p = TheoryParams::from_X(cfg.X);
  const double prediction = pik_prediction(cfg.X, cfg.h, options.k);

  Theorem2Result r;
  r.options = options;
  r.k_far_from_T = std::abs(options.k - p.T) > 2.0 * std::sqrt(p.T);
  r.rows.resize(cfg.samples);
  parallel_for(cfg.samples, cfg.threads, [&](std::size_t i) {
    const std::int64_t x = window_start(cfg, i);
    const OmegaSlice slice = omega_window(Window{x, cfg.h}, *base);
    const std::uint64_t count = window_pik(slice, options.k);
    r.rows[i] = {i, x, count, prediction, static_cast<double>(count) / prediction};
  });

  std::vector<double> ratios;
  std::uint64_t eps_hits = 0, band_hits = 0;
  for (const auto& row : r.rows) {
    ratios.push_back(row.ratio);
    eps_hits += std::abs(row.ratio - 1.0) <= options.epsilon;
    band_hits += row.ratio >= options.band_lo && row.ratio <= options.band_hi;
  }
  r.ratio = summarize(ratios);
  r.within_epsilon = fraction(eps_hits, r.rows.size());
  r.within_band = fraction(band_hits, r.rows.size());
  return r;
}

std::vector<double> prop1_tau_grid(const Prop1Options& options) {
  require(options.A > 1.0, "prop1: A must be > 1");
  require(options.B > 1.0, "prop1: B must be > 1");
  require(options.points_per_decade >= 1, "prop1: points_per_decade must be >= 1");
  const double lo = -std::log(options.B);
  const double hi = std::log(options.A);
  const int m = static_cast<int>(std::ceil(options.points_per_decade * std::log10(options.A * options.B)));
  std::vector<double> taus(static_cast<std::size_t>(m) + 1);
  for (int i = 0; i <= m; ++i) taus[i] = std::exp(lo + (hi - lo) * i / m);
  taus.front() = 1.0 / options.B;
  taus.back() = options.A;
  return taus;
}

Prop1Row prop1_integrals(const Histogram& window, const Histogram& reference, double T,
                         const Prop1Options& options) {
  require(options.circle_points > 2 * kMaxOmega, "prop1: circle_points must exceed 30");
  const auto taus = prop1_tau_grid(options);
  const double scale = options.map == ThetaMap::scaled ? 1.0 / std::sqrt(T) : 1.0;
  auto gap = [&](double theta) {
    return std::abs(histogram_mean(window, theta) - histogram_mean(reference, theta));
  };

  // d tau / |tau| = d log|tau|; both half-lines.
  const double step = (std::log(options.A) + std::log(options.B)) / static_cast<double>(taus.size() - 1);
  double line = 0.0;
  for (const double sign : {1.0, -1.0}) {
    double half = 0.0;
    for (std::size_t i = 0; i < taus.size(); ++i) {
      const double w = (i == 0 || i + 1 == taus.size()) ? 0.5 : 1.0;
      half += w * gap(sign * taus[i] * scale);
    }
    line += half * step;
  }

  double circle = 0.0;
  for (int j = 0; j < options.circle_points; ++j)
    circle += gap(2.0 * std::numbers::pi * j / options.circle_points);
  circle *= 2.0 * std::numbers::pi / options.circle_points;

  Prop1Row row;
  row.line_integral = line;
  row.circle_integral = circle;
  return row;
}

Prop1Result run_prop1(const ExperimentConfig& cfg, const Prop1Options& options) {
  cfg.validate();
  Prop1Result r;
  r.taus = prop1_tau_grid(options);
  const TheoryParams p = TheoryParams::from_X(cfg.X);
  const SampleMode mode = cfg.X <= kFullEnumerationLimit
                              ? SampleMode::full()
                              : SampleMode::sampled(options.reference_samples, splitmix64(cfg.seed));
  r.reference = dyadic_stats(cfg.X, mode, cfg.threads);
  const auto base = block_primes(cfg.X);

  r.rows.resize(cfg.samples);
  parallel_for(cfg.samples, cfg.threads, [&](std::size_t i) {
    const std::int64_t x = window_start(cfg, i);
    const OmegaSlice slice = omega_window(Window{x, cfg.h}, *base);
    Prop1Row row = prop1_integrals(slice.histogram, r.reference.histogram, p.T, options);
    row.index = i;
    row.x = x;
    r.rows[i] = row;
  });

  std::vector<double> a, b;
  for (const auto& row : r.rows) {
    a.push_back(row.line_integral);
    b.push_back(row.circle_integral);
  }
  r.line = summarize(a);
  r.circle = summarize(b);
  return r;
}

std::vector<SdRow> run_sd_check(std::int64_t X, const std::vector<double>& ts, unsigned threads) {
  require(X <= kFullEnumerationLimit, "sd-check: X must be <= 1e8 (full enumeration)");
  const TheoryParams p = TheoryParams::from_X(X);
  const DyadicStats stats = dyadic_stats(X, SampleMode::full(), threads);
  std::vector<SdRow> rows;
  for (const double t : ts) {
    SdRow row;
    row.t = t;
    row.empirical = dyadic_charfn(stats, t).value;
    row.theory = sd_mean(t, p).value;
    row.rel_err = std::abs(row.empirical / row.theory - 1.0);
    row.scale = 1.0 / std::log(static_cast<double>(X));
    rows.push_back(row);
  }
  return rows;
}

LadderDensityResult run_ladder_density(std::int64_t X, std::int64_t h, double delta,
                                       SampleMode mode, unsigned threads) {
  LadderDensityResult r;
  r.ladder = default_ladder(X, h, delta);
  r.report = complement_density(X, r.ladder, mode, threads);
  return r;
}

}  // namespace ek
