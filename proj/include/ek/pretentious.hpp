#pragma once

// Pretentious distances between functions that are e^{i theta} p^{i alpha} on
// primes, the Halasz-type bound, the prime sum controlled by the
// Korobov-Vinogradov zero-free region, and the Dirichlet sum R_{v,H}(1 + iu).

#include <complex>
#include <cstdint>
#include <optional>
#include <utility>

#include "ek/ladder.hpp"
#include "ek/sieve.hpp"

namespace ek {

// Primes p with lo < p <= hi.
struct PrimeInterval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double p) const { return p > lo && p <= hi; }
};

// f(p) = e^{i theta} compared against n^{i alpha}:
// D^2 = sum_{p <= x} (1 - cos(theta - alpha log p)) / p.
struct TwistSpec {
  double theta = 0.0;
  double alpha = 0.0;
  std::optional<PrimeInterval> restriction;
};

// A unimodular function on primes, p -> e^{i theta} p^{i alpha}.
struct PrimeCharacter {
  double theta = 0.0;
  double alpha = 0.0;
};

// Needs x <= 10^9 and a table covering min(x, restriction.hi).
double distance_sq(const TwistSpec& spec, std::uint64_t x, const PrimeTable& base);
double distance_sq(const PrimeCharacter& f, const PrimeCharacter& g, std::uint64_t x,
                   const PrimeTable& base);

struct LowerBoundCheck {
  double lhs = 0.0;       // restricted distance
  double rhs = 0.0;       // (1/3 - 1/48 - eps) log log x
  PrimeInterval interval; // (exp((log x)^{2/3+eps}), exp((log x)^{1-1/48})]
};

inline constexpr double kLowerBoundEpsilon = 0.01;

LowerBoundCheck distance_lower_bound_check(double theta, double alpha, std::uint64_t x);
// Same with a caller-supplied table (must cover interval.hi).
LowerBoundCheck distance_lower_bound_check(double theta, double alpha, std::uint64_t x,
                                           const PrimeTable& base);
PrimeInterval lower_bound_interval(std::uint64_t x);

// sum_{a < p <= b} p^{-1 - i alpha}.
std::complex<double> korobov_sum(double alpha, std::uint64_t a, std::uint64_t b,
                                 const PrimeTable& base);

struct RvhOptions {
  // Treat P > Q as the empty prime interval (denominator 1) instead of failing.
  bool allow_inverted = false;
  unsigned threads = 1;
};

// sum over X e^{-v/H} <= n <= 2X e^{-v/H}, n in S, of
//   e^{i theta omega(n)} n^{-1-iu} / (#{p in [P, Q] : p | n} + 1).
std::complex<double> R_vH(double u, std::int64_t X, double v, double H, double P, double Q,
                          const Ladder& ladder, double theta, RvhOptions options = {});

// Summation range of R_vH as integers [first, last]; empty when first > last.
std::pair<std::uint64_t, std::uint64_t> rvh_range(std::int64_t X, double v, double H);

// P = exp((log X)^{1-1/48}), Q = exp(log X / log log X), H = (log X)^{1/48}.
struct RvhDefaults {
  double log_P = 0.0;
  double log_Q = 0.0;
  double H = 0.0;
  bool inverted = false;  // P > Q, the usual situation at desk scale
};
RvhDefaults rvh_defaults(std::int64_t X);

// (1 + m) e^{-m} + 1/T0, for m >= 0, T0 >= 1.
double halasz_bound(double m, double T0);

struct HalaszMinimum {
  double m = 0.0;   // min over the grid of D(e^{i theta}, n^{i t0}, x)^2
  double t0 = 0.0;  // minimiser
  int grid_points = 0;
};

// Grid of ceil(4 T0) (at least 2) equally spaced t0 on [-T0, T0].
HalaszMinimum halasz_min_distance(double theta, std::uint64_t x, double T0,
                                  const PrimeTable& base);

}  // namespace ek
