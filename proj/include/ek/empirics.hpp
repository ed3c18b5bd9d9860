#pragma once

// Empirical distribution and characteristic functions of the normalised
// omega(n) on windows and dyadic blocks, sup-norm discrepancies, and
// window counts of integers with exactly k prime factors.

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "ek/charcurve.hpp"
#include "ek/random.hpp"
#include "ek/sieve.hpp"
#include "ek/theory.hpp"

namespace ek {

// Right-continuous step function F(y) = (1/h) #{n : omega(n) <= T + y sqrt(T)}.
struct EmpiricalCdf {
  std::vector<double> locations;   // strictly increasing jump points
  std::vector<double> cumulative;  // value on [locations[i], locations[i+1])
  Window window;
  TheoryParams params;

  double operator()(double y) const;
  double left_limit(double y) const;
  DistributionFn as_distribution() const;

  // Generic step function from atoms (masses should sum to 1).
  static EmpiricalCdf from_steps(std::vector<double> locations, std::vector<double> masses);
};

EmpiricalCdf empirical_cdf(const OmegaSlice& slice, const TheoryParams& p);
EmpiricalCdf empirical_cdf(const Histogram& hist, const TheoryParams& p);

double sup_discrepancy(const EmpiricalCdf& F, const DistributionFn& G);

// (1/h) sum exp(i tau (omega(n) - T)/sqrt T), evaluated from the histogram.
CharCurve empirical_charfn(const OmegaSlice& slice, const TheoryParams& p,
                           std::span<const double> taus);
CharCurve histogram_charfn(const Histogram& hist, const TheoryParams& p,
                           std::span<const double> taus, CurveSource source);

// Mean of exp(i t omega(n)) for n distributed per the histogram.
std::complex<double> histogram_mean(const Histogram& hist, double t);

// omega statistics over the dyadic block (X, 2X].
struct DyadicStats {
  std::int64_t X = 0;
  Histogram histogram{};
  std::uint64_t count = 0;  // integers enumerated or sampled
  SampleMode mode;
};

// Full mode requires X <= 10^8.
inline constexpr std::int64_t kFullEnumerationLimit = 100'000'000;

DyadicStats dyadic_stats(std::int64_t X, SampleMode mode, unsigned threads = 1);

// Mean of exp(i t omega(n)) over the block; `error` is the standard error
// (0 in full mode).
ComplexEstimate dyadic_charfn(const DyadicStats& stats, double t);
ComplexEstimate dyadic_charfn(std::int64_t X, double t, SampleMode mode);

// #{n in window : omega(n) = k}.
std::uint64_t window_pik(const OmegaSlice& slice, int k);

// means[j] = (1/h) sum over the window of z_j^omega(n), z_j = exp(2 pi i j / N),
// accumulated per integer.
std::vector<std::complex<double>> unit_circle_means(const OmegaSlice& slice, int N);

// Inverse discrete transform: count_k = h/N sum_j means[j] z_j^{-k}, k < N.
std::vector<double> counts_from_unit_circle(std::span<const std::complex<double>> means,
                                            std::uint64_t h);

}  // namespace ek
