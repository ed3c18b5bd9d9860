#include "ek/empirics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "ek/error.hpp"
#include "ek/parallel.hpp"

namespace ek {

namespace {

using cplx = std::complex<double>;

std::uint64_t total(const Histogram& hist) {
  std::uint64_t n = 0;
  for (const auto c : hist) n += c;
  return n;
}

cplx root_of_unity(std::int64_t num, int N) {
  const std::int64_t r = ((num % N) + N) % N;
  return std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(r) / N);
}

}  // namespace

double EmpiricalCdf::operator()(double y) const {
  const auto it = std::upper_bound(locations.begin(), locations.end(), y);
  return it == locations.begin() ? 0.0 : cumulative[static_cast<std::size_t>(it - locations.begin()) - 1];
}

double EmpiricalCdf::left_limit(double y) const {
  const auto it = std::lower_bound(locations.begin(), locations.end(), y);
  return it == locations.begin() ? 0.0 : cumulative[static_cast<std::size_t>(it - locations.begin()) - 1];
}

DistributionFn EmpiricalCdf::as_distribution() const {
  DistributionFn g;
  auto self = *this;
  g.value = [self](double y) { return self(y); };
  g.left_value = [self](double y) { return self.left_limit(y); };
  g.jumps = [loc = locations](double lo, double hi) {
    std::vector<double> out;
    for (const double y : loc)
      if (y >= lo && y <= hi) out.push_back(y);
    return out;
  };
  g.derivative_bound = 0.0;
  g.upper_limit = cumulative.empty() ? 0.0 : cumulative.back();
  return g;
}

EmpiricalCdf EmpiricalCdf::from_steps(std::vector<double> locations, std::vector<double> masses) {
  require(locations.size() == masses.size(), "EmpiricalCdf::from_steps: size mismatch");
  std::vector<std::size_t> order(locations.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return locations[a] < locations[b]; });
  EmpiricalCdf F;
  double acc = 0.0;
  for (const auto i : order) {
    acc += masses[i];
    if (!F.locations.empty() && F.locations.back() == locations[i]) {
      F.cumulative.back() = acc;
    } else {
      F.locations.push_back(locations[i]);
      F.cumulative.push_back(acc);
    }
  }
  return F;
}

EmpiricalCdf empirical_cdf(const Histogram& hist, const TheoryParams& p) {
  const std::uint64_t n = total(hist);
  require(n > 0, "empirical_cdf: empty histogram");
  EmpiricalCdf F;
  F.params = p;
  std::uint64_t running = 0;
  for (int k = 0; k <= kMaxOmega; ++k) {
    if (hist[k] == 0) continue;
    running += hist[k];
    F.locations.push_back(delange_jump(k, p));
    F.cumulative.push_back(static_cast<double>(running) / static_cast<double>(n));
  }
  return F;
}

EmpiricalCdf empirical_cdf(const OmegaSlice& slice, const TheoryParams& p) {
  require(slice.size() > 0, "empirical_cdf: empty slice");
  EmpiricalCdf F = empirical_cdf(slice.histogram, p);
  F.window = slice.window;
  return F;
}

double sup_discrepancy(const EmpiricalCdf& F, const DistributionFn& G) {
  return sup_distance(F.as_distribution(), G);
}

CharCurve histogram_charfn(const Histogram& hist, const TheoryParams& p,
                           std::span<const double> taus, CurveSource source) {
  const std::uint64_t n = total(hist);
  require(n > 0, "empirical_charfn: empty histogram");
  const double sqrtT = std::sqrt(p.T);
  CharCurve c;
  c.source = source;
  c.taus.assign(taus.begin(), taus.end());
  c.values.reserve(taus.size());
  for (const double tau : taus) {
    cplx sum = 0.0;
    for (int k = 0; k <= kMaxOmega; ++k)
      if (hist[k]) sum += static_cast<double>(hist[k]) * std::polar(1.0, tau * (k - p.T) / sqrtT);
    c.values.push_back(sum / static_cast<double>(n));
  }
  return c;
}

CharCurve empirical_charfn(const OmegaSlice& slice, const TheoryParams& p,
                           std::span<const double> taus) {
  require(slice.size() > 0, "empirical_charfn: empty slice");
  return histogram_charfn(slice.histogram, p, taus, CurveSource::window_empirical);
}

std::complex<double> histogram_mean(const Histogram& hist, double t) {
  const std::uint64_t n = total(hist);
  require(n > 0, "histogram_mean: empty histogram");
  cplx sum = 0.0;
  for (int k = 0; k <= kMaxOmega; ++k)
    if (hist[k]) sum += static_cast<double>(hist[k]) * std::polar(1.0, t * k);
  return sum / static_cast<double>(n);
}

DyadicStats dyadic_stats(std::int64_t X, SampleMode mode, unsigned threads) {
  require(X >= 1, "dyadic_stats: X must be >= 1");
  DyadicStats stats;
  stats.X = X;
  stats.mode = mode;
  if (mode.is_full()) {
    if (X > kFullEnumerationLimit)
      throw ParameterError("dyadic_stats: full enumeration needs X <= 1e8; use sampled mode");
    const auto base = base_primes(std::max<std::uint64_t>(2, isqrt(2 * static_cast<std::uint64_t>(X)) + 1));
    stats.histogram = omega_histogram(Window{X, X}, base, threads);
    stats.count = static_cast<std::uint64_t>(X);
    return stats;
  }
  require(mode.count >= 2, "dyadic_stats: sampled mode needs at least 2 draws");
  require(X <= std::numeric_limits<std::int64_t>::max() / 2, "dyadic_stats: 2X overflows");
  constexpr std::uint64_t kBlock = 4096;
  const std::size_t blocks = static_cast<std::size_t>((mode.count + kBlock - 1) / kBlock);
  std::vector<Histogram> partial(blocks);
  parallel_for(blocks, threads, [&](std::size_t b) {
    Histogram h{};
    const std::uint64_t end = std::min<std::uint64_t>(mode.count, (b + 1) * kBlock);
    for (std::uint64_t i = b * kBlock; i < end; ++i) {
      CounterRng rng(mode.seed, i);
      const std::uint64_t n = rng.uniform(static_cast<std::uint64_t>(X) + 1, 2 * static_cast<std::uint64_t>(X));
      ++h[omega_single(n)];
    }
    partial[b] = h;
  });
  for (const auto& h : partial)
    for (int k = 0; k <= kMaxOmega; ++k) stats.histogram[k] += h[k];
  stats.count = mode.count;
  return stats;
}

ComplexEstimate dyadic_charfn(const DyadicStats& stats, double t) {
  const cplx mean = histogram_mean(stats.histogram, t);
  if (stats.mode.is_full()) return {mean, 0.0};
  const double n = static_cast<double>(stats.count);
  const double variance = std::max(0.0, (1.0 - std::norm(mean)) * n / (n - 1.0));
  return {mean, std::sqrt(variance / n)};
}

ComplexEstimate dyadic_charfn(std::int64_t X, double t, SampleMode mode) {
  return dyadic_charfn(dyadic_stats(X, mode), t);
}

std::uint64_t window_pik(const OmegaSlice& slice, int k) {
  require(k >= 0, "window_pik: k must be >= 0");
  return k > kMaxOmega ? 0 : slice.histogram[k];
}

std::vector<std::complex<double>> unit_circle_means(const OmegaSlice& slice, int N) {
  require(N > kMaxOmega, "unit_circle_means: need N > max omega");
  require(slice.size() > 0, "unit_circle_means: empty slice");
  std::vector<cplx> means(static_cast<std::size_t>(N));
  std::vector<cplx> powers(kMaxOmega + 1);
  for (int j = 0; j < N; ++j) {
    for (int w = 0; w <= kMaxOmega; ++w) powers[w] = root_of_unity(std::int64_t{j} * w, N);
    cplx sum = 0.0;
    for (const std::uint8_t w : slice.omegas) sum += powers[w];
    means[j] = sum / static_cast<double>(slice.size());
  }
  return means;
}

std::vector<double> counts_from_unit_circle(std::span<const std::complex<double>> means,
                                            std::uint64_t h) {
  const int N = static_cast<int>(means.size());
  require(N > 0, "counts_from_unit_circle: no points");
  std::vector<double> counts(static_cast<std::size_t>(N));
  for (int k = 0; k < N; ++k) {
    cplx sum = 0.0;
    for (int j = 0; j < N; ++j) sum += means[j] * root_of_unity(-std::int64_t{j} * k, N);
    counts[k] = (sum * (static_cast<double>(h) / N)).real();
  }
  return counts;
}

}  // namespace ek
