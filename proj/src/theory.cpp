#include "ek/theory.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>

#include "ek/error.hpp"
#include "ek/sieve.hpp"

namespace ek {

namespace {

using cplx = std::complex<double>;
constexpr double kPi = std::numbers::pi;

// Prime tables for Euler products, shared between callers. Grows on demand.
std::shared_ptr<const PrimeTable> euler_primes(std::uint64_t cutoff) {
  static std::mutex mutex;
  static std::shared_ptr<const PrimeTable> table;
  std::lock_guard lock(mutex);
  if (!table || table->limit < cutoff)
    table = std::make_shared<const PrimeTable>(base_primes(std::max<std::uint64_t>(cutoff, 1'000'000)));
  return table;
}

// E1(x) = int_x^inf e^{-t}/t dt for x >= 1 (continued fraction, modified Lentz).
double exp_integral_e1(double x) {
  constexpr double kTiny = 1e-300;
  double b = x + 1.0;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 200; ++i) {
    const double a = -static_cast<double>(i) * i;
    b += 2.0;
    d = 1.0 / (a * d + b);
    c = b + a / c;
    const double delta = c * d;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return h * std::exp(-x);
}

// sum_{p > N} 1/p^2 ~ int_N^inf dt/(t^2 log t) = E1(log N).
double inverse_square_prime_tail(std::uint64_t N) {
  return exp_integral_e1(std::log(static_cast<double>(N)));
}

// Rosser-Schoenfeld: pi(t) < 1.25506 t / log t.
constexpr double kPrimeCountingUpper = 1.25506;

// log(1 + w) accurate for small |w|.
cplx log1p_complex(cplx w) {
  const double re = 0.5 * std::log1p(2.0 * w.real() + std::norm(w));
  const double im = std::atan2(w.imag(), 1.0 + w.real());
  return {re, im};
}

std::vector<double> sorted_unique(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

// The index k of the piece of Phi_X containing y, i.e. the largest k with
// delange_jump(k) <= y. Evaluated against the same jump formula so that
// values at jump locations are exactly right-continuous.
long delange_piece(double y, const TheoryParams& p) {
  auto k = static_cast<long>(std::floor(p.T + y * std::sqrt(p.T)));
  while (delange_jump(k + 1, p) <= y) ++k;
  while (delange_jump(k, p) > y) --k;
  return k;
}

double delange_value(double y, const TheoryParams& p, bool left) {
  if (std::isinf(y)) return y < 0 ? 0.0 : 1.0;
  const double sqrtT = std::sqrt(p.T);
  long k = delange_piece(y, p);
  if (left && delange_jump(k, p) == y) --k;
  const double frac = p.T + y * sqrtT - static_cast<double>(k);
  const double gauss = std::exp(-0.5 * y * y) / std::sqrt(2.0 * kPi * p.T);
  return phi(y) + gauss * (2.0 / 3.0 - mertens_c1() - y * y / 6.0 - frac);
}

// sup over y of |d/dy Phi_X| away from the jumps, frac ranging over [0, 1].
double delange_derivative_bound(const TheoryParams& p) {
  const double a = 2.0 / 3.0 - mertens_c1();
  const double sqrtT = std::sqrt(p.T);
  double best = 0.0;
  for (int i = 0; i <= 4800; ++i) {
    const double y = -12.0 + 24.0 * i / 4800.0;
    const double density = std::exp(-0.5 * y * y) / std::sqrt(2.0 * kPi);
    const double gauss = density / sqrtT;
    for (const double frac : {0.0, 1.0}) {
      const double d = density + gauss * (-y * (a - y * y / 6.0 - frac) - y / 3.0 - sqrtT);
      best = std::max(best, std::abs(d));
    }
  }
  return best * 1.01;
}

}  // namespace

TheoryParams TheoryParams::from_X(std::int64_t X) {
  if (X < 20) throw ParameterError("X must be >= 20, got " + std::to_string(X));
  return {X, std::log(std::log(static_cast<double>(X)))};
}

MertensResult mertens_constant(std::uint64_t prime_cutoff) {
  if (prime_cutoff < 10'000) throw ParameterError("mertens_constant: cutoff must be >= 1e4");
  if (prime_cutoff > 1'000'000'000) throw ParameterError("mertens_constant: cutoff must be <= 1e9");
  const auto table = euler_primes(prime_cutoff);
  long double sum = 0.0L;
  for (const std::uint32_t p : table->primes) {
    if (p > prime_cutoff) break;
    const long double inv = 1.0L / p;
    sum += std::log1p(-inv) + inv;
  }
  MertensResult r;
  r.cutoff = prime_cutoff;
  r.truncated = static_cast<double>(std::numbers::egamma_v<long double> + sum);
  const double tail = inverse_square_prime_tail(prime_cutoff);
  r.tail_estimate = -0.5 * tail;
  const double n = static_cast<double>(prime_cutoff);
  r.tail_bound = 0.5 * kPrimeCountingUpper * tail * (n / (n - 1.0)) * (n / (n - 1.0));
  r.value = r.truncated + r.tail_estimate;
  return r;
}

double mertens_c1() {
  static const double c1 = mertens_constant(1'000'000).value;
  return c1;
}

double phi(double y) { return 0.5 * std::erfc(-y / std::numbers::sqrt2); }

double delange_jump(long k, const TheoryParams& p) {
  return (static_cast<double>(k) - p.T) / std::sqrt(p.T);
}

double phi_X(double y, const TheoryParams& p) { return delange_value(y, p, false); }

double phi_X_left(double y, const TheoryParams& p) { return delange_value(y, p, true); }

DistributionFn gaussian_distribution() {
  DistributionFn g;
  g.value = phi;
  g.left_value = phi;
  g.jumps = [](double, double) { return std::vector<double>{}; };
  g.derivative_bound = 1.0 / std::sqrt(2.0 * kPi);
  return g;
}

DistributionFn delange_distribution(const TheoryParams& p) {
  DistributionFn g;
  g.value = [p](double y) { return phi_X(y, p); };
  g.left_value = [p](double y) { return phi_X_left(y, p); };
  g.jumps = [p](double lo, double hi) {
    std::vector<double> out;
    if (!(lo <= hi)) return out;
    const double sqrtT = std::sqrt(p.T);
    const auto k_lo = static_cast<long>(std::floor(p.T + lo * sqrtT)) - 1;
    const auto k_hi = static_cast<long>(std::ceil(p.T + hi * sqrtT)) + 1;
    for (long k = k_lo; k <= k_hi; ++k) {
      const double y = delange_jump(k, p);
      if (y >= lo && y <= hi) out.push_back(y);
    }
    return out;
  };
  g.derivative_bound = delange_derivative_bound(p);
  return g;
}

DistributionFn step_distribution(std::vector<double> locations, std::vector<double> masses) {
  require(locations.size() == masses.size(), "step_distribution: size mismatch");
  std::vector<std::size_t> order(locations.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return locations[a] < locations[b]; });
  // Merge atoms at equal locations; cumulative[i] is the value from loc[i] on.
  std::vector<double> loc, cumulative;
  double total = 0.0;
  for (const auto i : order) {
    total += masses[i];
    if (!loc.empty() && loc.back() == locations[i]) {
      cumulative.back() = total;
    } else {
      loc.push_back(locations[i]);
      cumulative.push_back(total);
    }
  }
  auto value_at = [loc, cumulative](double y, bool left) {
    const auto it = left ? std::lower_bound(loc.begin(), loc.end(), y)
                         : std::upper_bound(loc.begin(), loc.end(), y);
    return it == loc.begin() ? 0.0 : cumulative[static_cast<std::size_t>(it - loc.begin()) - 1];
  };
  DistributionFn g;
  g.value = [value_at](double y) { return value_at(y, false); };
  g.left_value = [value_at](double y) { return value_at(y, true); };
  g.jumps = [loc](double lo, double hi) {
    std::vector<double> out;
    for (const double y : loc)
      if (y >= lo && y <= hi) out.push_back(y);
    return out;
  };
  g.derivative_bound = 0.0;
  g.upper_limit = total;
  return g;
}

double sup_distance(const DistributionFn& F, const DistributionFn& G) {
  std::vector<double> points = F.jumps(-kSupRange, kSupRange);
  const auto gj = G.jumps(-kSupRange, kSupRange);
  points.insert(points.end(), gj.begin(), gj.end());
  constexpr int kGrid = 10'000;
  for (int i = 0; i < kGrid; ++i) points.push_back(-6.0 + 12.0 * i / (kGrid - 1));
  points = sorted_unique(std::move(points));
  double sup = 0.0;
  for (const double y : points) {
    sup = std::max(sup, std::abs(F.value(y) - G.value(y)));
    sup = std::max(sup, std::abs(F.left_value(y) - G.left_value(y)));
  }
  return sup;
}

int default_delta_trunc(double tau, const TheoryParams& p) {
  return static_cast<int>(std::ceil(std::abs(tau) / (2.0 * kPi * std::sqrt(p.T)))) + 5;
}

std::complex<double> delta_X(double tau, const TheoryParams& p, int trunc) {
  require(trunc >= 1, "delta_X: trunc must be >= 1");
  const double sqrtT = std::sqrt(p.T);
  cplx sum = 0.0;
  for (int nu = 1; nu <= trunc; ++nu) {
    const double phase_turns = nu * p.T - std::floor(nu * p.T);
    const cplx rotation = std::polar(1.0, 2.0 * kPi * phase_turns);
    const double shift = 2.0 * kPi * nu * sqrtT;
    const double plus = std::exp(-0.5 * (tau + shift) * (tau + shift));
    const double minus = std::exp(-0.5 * (tau - shift) * (tau - shift));
    // nu and -nu: e^{2i pi nu T}/(i nu) and e^{-2i pi nu T}/(-i nu).
    sum += (rotation * plus - std::conj(rotation) * minus) / cplx(0.0, nu);
  }
  return cplx(0.0, -tau / (2.0 * kPi * sqrtT)) * sum;
}

std::complex<double> delta_X(double tau, const TheoryParams& p) {
  return delta_X(tau, p, default_delta_trunc(tau, p));
}

std::complex<double> char_phi_X(double tau, const TheoryParams& p) {
  const double c1 = mertens_c1();
  const cplx correction(0.0, (tau * c1 - tau * tau * tau / 6.0) / std::sqrt(p.T));
  return std::exp(-0.5 * tau * tau) * (1.0 + correction) + delta_X(tau, p);
}

CharCurve theoretical_charcurve(const TheoryParams& p, std::span<const double> taus) {
  CharCurve c;
  c.source = CurveSource::theoretical;
  c.taus.assign(taus.begin(), taus.end());
  c.values.reserve(taus.size());
  for (const double t : taus) c.values.push_back(char_phi_X(t, p));
  return c;
}

std::complex<double> reciprocal_gamma(std::complex<double> z) {
  if (z.real() < 0.5) {
    // 1/Gamma(z) = Gamma(1 - z) sin(pi z) / pi
    return std::sin(kPi * z) / (kPi * reciprocal_gamma(1.0 - z));
  }
  static constexpr double kG = 7.0;
  static constexpr double kCoef[] = {
      0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
      771.32342877765313,      -176.61502916214059,   12.507343278686905,
      -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};
  z -= 1.0;
  cplx series = kCoef[0];
  for (int i = 1; i < 9; ++i) series += kCoef[i] / (z + static_cast<double>(i));
  const cplx t = z + kG + 0.5;
  const cplx log_gamma = 0.5 * std::log(2.0 * kPi) + (z + 0.5) * std::log(t) - t + std::log(series);
  return std::exp(-log_gamma);
}

ComplexEstimate A_of_z(std::complex<double> z, std::uint64_t prime_cutoff) {
  if (std::abs(z) > 2.0) throw ParameterError("A_of_z: |z| must be <= 2");
  if (prime_cutoff < 10'000) throw ParameterError("A_of_z: cutoff must be >= 1e4");
  const auto table = euler_primes(prime_cutoff);
  cplx log_product = 0.0;
  for (const std::uint32_t p32 : table->primes) {
    if (p32 > prime_cutoff) break;
    const double p = p32;
    log_product += log1p_complex(z / (p - 1.0)) + z * std::log1p(-1.0 / p);
  }
  // Each omitted factor contributes z(1 - z)/(2p^2) + O(p^-3) to the log.
  const double tail = inverse_square_prime_tail(prime_cutoff);
  log_product += 0.5 * z * (1.0 - z) * tail;
  const double n = static_cast<double>(prime_cutoff);
  const double bound = std::abs(z) * (std::abs(z) + 1.0) * kPrimeCountingUpper * tail * n / (n - 1.0);
  return {reciprocal_gamma(z) * std::exp(log_product), bound};
}

ComplexEstimate sd_mean(double t, const TheoryParams& p) {
  const cplx z = std::polar(1.0, t);
  const cplx main = A_of_z(z).value * std::exp((z - 1.0) * p.T);
  return {main, 1.0 / std::log(static_cast<double>(p.X))};
}

double pik_prediction(std::int64_t X, std::int64_t h, int k) {
  if (k < 1) throw ParameterError("pik_prediction: k must be >= 1");
  require(h >= 1, "pik_prediction: h must be >= 1");
  const auto params = TheoryParams::from_X(X);
  const double log_x = std::log(static_cast<double>(X));
  return std::exp(std::log(static_cast<double>(h)) - std::log(log_x) +
                  (k - 1) * std::log(params.T) - std::lgamma(static_cast<double>(k)));
}

SmoothingReport smoothing_bound(const DistributionFn& F, const DistributionFn& G,
                                const CharCurve& f, const CharCurve& g, double Tparam) {
  if (f.taus != g.taus || f.values.size() != f.taus.size() || g.values.size() != g.taus.size())
    throw ParameterError("smoothing_bound: characteristic curves must share a grid");
  require(Tparam > 0.0, "smoothing_bound: T must be positive");
  if (f.taus.empty() || f.taus.front() > -Tparam || f.taus.back() < Tparam)
    throw ParameterError("smoothing_bound: grid does not cover [-T, T]");

  SmoothingReport r;
  r.lhs = sup_distance(F, G);

  std::vector<double> tau, integrand;
  for (std::size_t i = 0; i < f.taus.size(); ++i) {
    if (f.taus[i] < -Tparam || f.taus[i] > Tparam) continue;
    tau.push_back(f.taus[i]);
    integrand.push_back(f.taus[i] == 0.0 ? std::nan("")
                                         : std::abs(f.values[i] - g.values[i]) / std::abs(f.taus[i]));
  }
  // The integrand is continuous at 0; take the mean of the neighbours there.
  for (std::size_t i = 0; i < integrand.size(); ++i) {
    if (!std::isnan(integrand[i])) continue;
    double s = 0.0;
    int n = 0;
    if (i > 0) s += integrand[i - 1], ++n;
    if (i + 1 < integrand.size()) s += integrand[i + 1], ++n;
    integrand[i] = n ? s / n : 0.0;
  }
  for (std::size_t i = 1; i < tau.size(); ++i)
    r.integral += 0.5 * (tau[i] - tau[i - 1]) * (integrand[i] + integrand[i - 1]);

  r.derivative_term = G.derivative_bound / Tparam;
  const double rhs = r.integral + r.derivative_term;
  r.c_obs = rhs > 0.0 ? r.lhs / rhs : 0.0;
  return r;
}

}  // namespace ek
