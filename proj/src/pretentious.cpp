#include "ek/pretentious.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "ek/error.hpp"
#include "ek/parallel.hpp"

namespace ek {

namespace {

using cplx = std::complex<double>;

constexpr std::uint64_t kMaxPrimeSum = 1'000'000'000;

// Table primes p with lo < p <= hi.
std::span<const std::uint32_t> primes_between(double lo, std::uint64_t hi, const PrimeTable& base,
                                              const char* who) {
  if (hi > base.limit)
    throw ParameterError(std::string(who) + ": prime table limit " + std::to_string(base.limit) +
                         " is below " + std::to_string(hi));
  const auto begin = std::upper_bound(base.primes.begin(), base.primes.end(), lo,
                                      [](double v, std::uint32_t p) { return v < p; });
  const auto end = std::upper_bound(base.primes.begin(), base.primes.end(), hi);
  if (begin >= end) return {};
  return {&*begin, static_cast<std::size_t>(end - begin)};
}

double twisted_sum(double dtheta, double dalpha, double lo, std::uint64_t hi,
                   const PrimeTable& base) {
  double sum = 0.0;
  for (const std::uint32_t p : primes_between(lo, hi, base, "distance_sq")) {
    const double pd = p;
    sum += (1.0 - std::cos(dtheta - dalpha * std::log(pd))) / pd;
  }
  return sum;
}

cplx pairwise_sum(std::span<const cplx> v) {
  if (v.empty()) return 0.0;
  if (v.size() == 1) return v[0];
  const std::size_t mid = v.size() / 2;
  return pairwise_sum(v.first(mid)) + pairwise_sum(v.subspan(mid));
}

}  // namespace

double distance_sq(const TwistSpec& spec, std::uint64_t x, const PrimeTable& base) {
  if (x > kMaxPrimeSum) throw ParameterError("distance_sq: x must be <= 1e9");
  double lo = 0.0;
  std::uint64_t hi = x;
  if (spec.restriction) {
    lo = std::max(0.0, spec.restriction->lo);
    if (spec.restriction->hi < static_cast<double>(hi))
      hi = spec.restriction->hi < 0.0 ? 0 : static_cast<std::uint64_t>(std::floor(spec.restriction->hi));
  }
  if (static_cast<double>(hi) <= lo) return 0.0;
  return twisted_sum(spec.theta, spec.alpha, lo, hi, base);
}

double distance_sq(const PrimeCharacter& f, const PrimeCharacter& g, std::uint64_t x,
                   const PrimeTable& base) {
  if (x > kMaxPrimeSum) throw ParameterError("distance_sq: x must be <= 1e9");
  return twisted_sum(f.theta - g.theta, g.alpha - f.alpha, 0.0, x, base);
}

PrimeInterval lower_bound_interval(std::uint64_t x) {
  if (x < 3) throw ParameterError("distance_lower_bound_check: x must be >= 3");
  const double lx = std::log(static_cast<double>(x));
  PrimeInterval iv{std::exp(std::pow(lx, 2.0 / 3.0 + kLowerBoundEpsilon)),
                   std::exp(std::pow(lx, 1.0 - 1.0 / 48.0))};
  if (!(iv.lo < iv.hi))
    throw ParameterError("distance_lower_bound_check: prime interval is empty for x = " +
                         std::to_string(x));
  return iv;
}

LowerBoundCheck distance_lower_bound_check(double theta, double alpha, std::uint64_t x,
                                           const PrimeTable& base) {
  if (x > kMaxPrimeSum) throw ParameterError("distance_lower_bound_check: x must be <= 1e9");
  LowerBoundCheck out;
  out.interval = lower_bound_interval(x);
  out.lhs = distance_sq(TwistSpec{theta, alpha, out.interval}, x, base);
  out.rhs = (1.0 / 3.0 - 1.0 / 48.0 - kLowerBoundEpsilon) * std::log(std::log(static_cast<double>(x)));
  return out;
}

LowerBoundCheck distance_lower_bound_check(double theta, double alpha, std::uint64_t x) {
  if (x > kMaxPrimeSum) throw ParameterError("distance_lower_bound_check: x must be <= 1e9");
  const auto iv = lower_bound_interval(x);
  const auto top = std::min<std::uint64_t>(x, static_cast<std::uint64_t>(std::floor(iv.hi)));
  return distance_lower_bound_check(theta, alpha, x, base_primes(std::max<std::uint64_t>(2, top)));
}

std::complex<double> korobov_sum(double alpha, std::uint64_t a, std::uint64_t b,
                                 const PrimeTable& base) {
  if (b > kMaxPrimeSum) throw ParameterError("korobov_sum: b must be <= 1e9");
  if (b <= a) return 0.0;
  cplx sum = 0.0;
  for (const std::uint32_t p : primes_between(static_cast<double>(a), b, base, "korobov_sum")) {
    const double lp = std::log(static_cast<double>(p));
    sum += std::polar(1.0 / p, -alpha * lp);
  }
  return sum;
}

std::pair<std::uint64_t, std::uint64_t> rvh_range(std::int64_t X, double v, double H) {
  if (X < 1) throw ParameterError("R_vH: X must be >= 1");
  if (!(H > 0.0)) throw ParameterError("R_vH: H must be > 0");
  const double scale = static_cast<double>(X) * std::exp(-v / H);
  if (!std::isfinite(scale) || 2.0 * scale > 9.0e18) throw ParameterError("R_vH: range too large");
  const auto first = static_cast<std::uint64_t>(std::max(1.0, std::ceil(scale)));
  const auto last = static_cast<std::uint64_t>(std::floor(2.0 * scale));
  return {first, last};
}

std::complex<double> R_vH(double u, std::int64_t X, double v, double H, double P, double Q,
                          const Ladder& ladder, double theta, RvhOptions options) {
  const bool inverted = P > Q;
  if (inverted && !options.allow_inverted)
    throw ParameterError("R_vH: P > Q (pass the inverted override to treat [P, Q] as empty)");
  const auto [first, last] = rvh_range(X, v, H);
  if (first > last) return 0.0;

  const PrimeTable base = base_primes(std::max<std::uint64_t>(2, isqrt(last) + 1));
  std::vector<std::uint64_t> counted;  // primes in [P, Q]
  if (!inverted && Q >= 2.0) {
    const auto top = std::min<std::uint64_t>(last, static_cast<std::uint64_t>(std::floor(Q)));
    for (const std::uint64_t p : primes_in_range(0, top, base))
      if (static_cast<double>(p) >= P) counted.push_back(p);
  }

  cplx phase[kMaxOmega + 1];
  for (int k = 0; k <= kMaxOmega; ++k) phase[k] = std::polar(1.0, theta * k);
  const std::uint32_t full = full_mask(ladder);

  const std::uint64_t total = last - first + 1;
  const std::size_t chunks = static_cast<std::size_t>((total + kSegmentLength - 1) / kSegmentLength);
  std::vector<cplx> partial(chunks);
  parallel_for(chunks, options.threads, [&](std::size_t c) {
    const std::uint64_t lo = first + c * kSegmentLength;
    const auto len = static_cast<std::int64_t>(std::min<std::uint64_t>(kSegmentLength, last - lo + 1));
    const Window w{static_cast<std::int64_t>(lo) - 1, len};
    const OmegaSlice slice = omega_window(w, base);
    const auto masks = rung_masks(w, ladder, base);
    std::vector<std::uint8_t> divisors(static_cast<std::size_t>(len), 0);
    const std::uint64_t hi = lo + static_cast<std::uint64_t>(len) - 1;
    for (const std::uint64_t p : counted) {
      if (p > hi) break;
      for (std::uint64_t m = (lo + p - 1) / p * p; m <= hi; m += p) ++divisors[m - lo];
    }
    cplx sum = 0.0;
    for (std::int64_t i = 0; i < len; ++i) {
      if (masks[static_cast<std::size_t>(i)] != full) continue;
      const double n = static_cast<double>(lo + static_cast<std::uint64_t>(i));
      const cplx term = std::polar(1.0 / n, -u * std::log(n)) * phase[slice.omegas[i]];
      sum += term / (divisors[static_cast<std::size_t>(i)] + 1.0);
    }
    partial[c] = sum;
  });
  return pairwise_sum(partial);
}

RvhDefaults rvh_defaults(std::int64_t X) {
  if (X < 20) throw ParameterError("rvh_defaults: X must be >= 20");
  const double lx = std::log(static_cast<double>(X));
  RvhDefaults d;
  d.log_P = std::pow(lx, 1.0 - 1.0 / 48.0);
  d.log_Q = lx / std::log(lx);
  d.H = std::pow(lx, 1.0 / 48.0);
  d.inverted = d.log_P > d.log_Q;
  return d;
}

double halasz_bound(double m, double T0) {
  if (!(m >= 0.0)) throw ParameterError("halasz_bound: m must be >= 0");
  if (!(T0 >= 1.0)) throw ParameterError("halasz_bound: T0 must be >= 1");
  return (1.0 + m) * std::exp(-m) + 1.0 / T0;
}

HalaszMinimum halasz_min_distance(double theta, std::uint64_t x, double T0,
                                  const PrimeTable& base) {
  if (!(T0 >= 1.0)) throw ParameterError("halasz_min_distance: T0 must be >= 1");
  if (x > kMaxPrimeSum) throw ParameterError("halasz_min_distance: x must be <= 1e9");
  const auto primes = primes_between(0.0, x, base, "halasz_min_distance");
  std::vector<double> inv(primes.size()), logs(primes.size());
  for (std::size_t i = 0; i < primes.size(); ++i) {
    inv[i] = 1.0 / primes[i];
    logs[i] = std::log(static_cast<double>(primes[i]));
  }
  HalaszMinimum best;
  best.grid_points = std::max(2, static_cast<int>(std::ceil(4.0 * T0)));
  best.m = INFINITY;
  for (int g = 0; g < best.grid_points; ++g) {
    const double t0 = -T0 + 2.0 * T0 * g / (best.grid_points - 1);
    double sum = 0.0;
    for (std::size_t i = 0; i < inv.size(); ++i) sum += (1.0 - std::cos(theta - t0 * logs[i])) * inv[i];
    if (sum < best.m) {
      best.m = sum;
      best.t0 = t0;
    }
  }
  return best;
}

}  // namespace ek
