#pragma once

// Sampled-window experiments: sup-norm discrepancy against Phi_X, window
// counts of integers with k prime factors, the characteristic-function
// integrals that control both, the Selberg-Delange mean check and the
// ladder density. Every per-window value is a function of (config, index).

#include <complex>
#include <cstdint>
#include <vector>

#include "ek/empirics.hpp"
#include "ek/ladder.hpp"
#include "ek/random.hpp"

namespace ek {

struct ExperimentConfig {
  std::int64_t X = 0;
  std::int64_t h = 0;
  std::uint64_t samples = 1;
  std::uint64_t seed = 0;
  unsigned threads = 1;

  // 20 <= X, 2 <= h <= X, samples >= 1.
  void validate() const;
};

// x_i uniform on the integers [X, 2X - h], keyed by (seed, i).
std::int64_t window_start(const ExperimentConfig& cfg, std::uint64_t index);

// Exact order statistics (nearest rank) and the mean.
struct QuantileSummary {
  double q10 = 0.0;
  double q50 = 0.0;
  double q90 = 0.0;
  double mean = 0.0;
  std::uint64_t n = 0;
};
QuantileSummary summarize(std::vector<double> values);
// Smallest element with at least ceil(q n) elements <= it.
double nearest_rank(std::vector<double> sorted, double q);

struct Theorem1Row {
  std::uint64_t index = 0;
  std::int64_t x = 0;
  double disc_phiX = 0.0;
  double disc_phi = 0.0;
};

struct Theorem1Result {
  std::vector<Theorem1Row> rows;
  QuantileSummary phiX;
  QuantileSummary phi;
  double threshold = 0.0;
  double exceptional_fraction = 0.0;  // share of windows with disc_phiX > threshold
};

Theorem1Result run_theorem1(const ExperimentConfig& cfg, double threshold = 0.05);

struct Theorem2Row {
  std::uint64_t index = 0;
  std::int64_t x = 0;
  std::uint64_t count = 0;
  double prediction = 0.0;
  double ratio = 0.0;
};

struct Theorem2Options {
  int k = 1;
  double epsilon = 0.2;
  double band_lo = 0.6;
  double band_hi = 1.6;
};

struct Theorem2Result {
  std::vector<Theorem2Row> rows;
  Theorem2Options options;
  QuantileSummary ratio;
  double within_epsilon = 0.0;  // share with |ratio - 1| <= epsilon
  double within_band = 0.0;     // share with band_lo <= ratio <= band_hi
  bool k_far_from_T = false;    // |k - T| > 2 sqrt(T)
};

Theorem2Result run_theorem2(const ExperimentConfig& cfg, const Theorem2Options& options);

enum class ThetaMap { scaled, identity };  // theta(tau) = tau / sqrt(T) or tau

struct Prop1Options {
  double A = 10.0;
  double B = 10.0;
  ThetaMap map = ThetaMap::scaled;
  int points_per_decade = 64;
  int circle_points = 64;
  // Dyadic reference draws when X exceeds the full-enumeration limit.
  std::uint64_t reference_samples = 1'000'000;
};

struct Prop1Row {
  std::uint64_t index = 0;
  std::int64_t x = 0;
  double line_integral = 0.0;    // over 1/B <= |tau| <= A, d tau / |tau|
  double circle_integral = 0.0;  // over |z| = 1, arc length
};

struct Prop1Result {
  std::vector<Prop1Row> rows;
  QuantileSummary line;
  QuantileSummary circle;
  std::vector<double> taus;  // positive half of the tau grid
  DyadicStats reference;
};

// The grid 1/B = tau_0 < ... < tau_m = A, equally spaced in log tau with
// m = ceil(points_per_decade * log10(A B)).
std::vector<double> prop1_tau_grid(const Prop1Options& options);

// Both integrals for one window histogram against the reference histogram.
Prop1Row prop1_integrals(const Histogram& window, const Histogram& reference, double T,
                         const Prop1Options& options);

Prop1Result run_prop1(const ExperimentConfig& cfg, const Prop1Options& options);

struct SdRow {
  double t = 0.0;
  std::complex<double> empirical;
  std::complex<double> theory;
  double rel_err = 0.0;
  double scale = 0.0;  // 1 / log X
};

// Full enumeration of (X, 2X]; X <= 10^8.
std::vector<SdRow> run_sd_check(std::int64_t X, const std::vector<double>& ts, unsigned threads = 1);

struct LadderDensityResult {
  Ladder ladder;
  DensityReport report;
};

LadderDensityResult run_ladder_density(std::int64_t X, std::int64_t h, double delta,
                                       SampleMode mode, unsigned threads = 1);

}  // namespace ek
