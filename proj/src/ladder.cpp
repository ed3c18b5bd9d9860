#include "ek/ladder.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <string>

#include "ek/error.hpp"
#include "ek/parallel.hpp"

namespace ek {

namespace {

constexpr int kMaxRungs = 32;

void check_eta(double eta) {
  if (!(eta > 0.0 && eta < 1.0 / 6.0)) throw ConstraintError("ladder: eta must lie in (0, 1/6)");
}

void fill_rungs(Ladder& L, double log_p1, double log_q1, int J) {
  L.log_p.clear();
  L.log_q.clear();
  for (int j = 1; j <= J; ++j) {
    const double jd = j;
    L.log_p.push_back(std::pow(jd, 4 * jd) * std::pow(log_q1, jd - 1) * log_p1);
    L.log_q.push_back(std::pow(jd, 4 * jd + 2) * std::pow(log_q1, jd));
  }
}

bool floor_holds(double log_p1, double log_q1, double eta) {
  // (log Q_1)^{40/eta} <= P_1, in logs; log Q_1 >= 1 keeps the left side >= 1.
  return log_q1 >= 1.0 && (40.0 / eta) * std::log(log_q1) <= log_p1;
}

// Primes <= bound, from the table or sieved from it.
std::vector<std::uint64_t> primes_up_to(std::uint64_t bound, const PrimeTable& base) {
  std::vector<std::uint64_t> out;
  if (bound < 2) return out;
  if (base.limit >= bound) {
    for (const std::uint32_t p : base.primes) {
      if (p > bound) break;
      out.push_back(p);
    }
    return out;
  }
  return primes_in_range(0, bound, base);
}

// Prime lists per rung, each restricted to p <= bound.
std::vector<std::vector<std::uint64_t>> rung_primes(const Ladder& L, std::uint64_t bound,
                                                    const PrimeTable& base) {
  std::vector<std::vector<std::uint64_t>> rungs(static_cast<std::size_t>(L.J()));
  if (L.J() == 0) return rungs;
  for (const std::uint64_t p : primes_up_to(std::min(bound, L.prime_bound(bound)), base))
    for (int j = 1; j <= L.J(); ++j)
      if (L.rung_contains(j, p)) rungs[j - 1].push_back(p);
  return rungs;
}

double rung_density(const std::vector<std::uint64_t>& primes) {
  double prod = 1.0;
  for (const std::uint64_t p : primes) prod *= 1.0 - 1.0 / static_cast<double>(p);
  return prod;
}

}  // namespace

bool Ladder::rung_contains(int j, std::uint64_t p) const {
  const double lp = std::log(static_cast<double>(p));
  return lp >= log_p[j - 1] && lp <= log_q[j - 1];
}

std::uint64_t Ladder::prime_bound(std::uint64_t top) const {
  if (log_q.empty()) return 0;
  const double q = std::exp(*std::max_element(log_q.begin(), log_q.end()));
  if (!(q < static_cast<double>(top))) return top;
  return static_cast<std::uint64_t>(std::floor(q));
}

Ladder build_ladder_from_log(double log_x, double log_p1, double log_q1, double eta,
                             bool enforce_floor) {
  check_eta(eta);
  if (!(log_x >= std::log(20.0))) throw ConstraintError("ladder: X must be >= 20");
  if (!(log_p1 >= 0.0 && log_p1 <= log_q1)) throw ConstraintError("ladder: need 1 <= P_1 <= Q_1");
  const double ceiling = std::sqrt(log_x);
  if (log_q1 > ceiling) throw ConstraintError("ladder: Q_1 exceeds exp(sqrt(log X))");
  const bool floor = floor_holds(log_p1, log_q1, eta);
  if (enforce_floor && !floor) throw ConstraintError("ladder: P_1 is below (log Q_1)^{40/eta}");

  Ladder L;
  L.eta = eta;
  L.log_x = log_x;
  L.floor_ok = floor;
  int J = 0;
  while (J < kMaxRungs) {
    const double j = J + 1;
    const double log_qj = std::pow(j, 4 * j + 2) * std::pow(log_q1, j);
    if (!(log_qj <= ceiling)) break;
    ++J;
  }
  fill_rungs(L, log_p1, log_q1, J);
  return L;
}

Ladder build_ladder(std::int64_t X, double log_p1, double log_q1, double eta, bool enforce_floor) {
  if (X < 20) throw ConstraintError("ladder: X must be >= 20");
  Ladder L = build_ladder_from_log(std::log(static_cast<double>(X)), log_p1, log_q1, eta, enforce_floor);
  L.X = X;
  return L;
}

Ladder make_ladder(std::int64_t X, double log_p1, double log_q1, int J, double eta) {
  check_eta(eta);
  if (X < 20) throw ConstraintError("ladder: X must be >= 20");
  if (J < 0 || J > kMaxRungs) throw ConstraintError("ladder: rung count out of range");
  if (!(log_p1 >= 0.0 && log_p1 <= log_q1)) throw ConstraintError("ladder: need 1 <= P_1 <= Q_1");
  Ladder L;
  L.eta = eta;
  L.X = X;
  L.log_x = std::log(static_cast<double>(X));
  L.floor_ok = floor_holds(log_p1, log_q1, eta);
  fill_rungs(L, log_p1, log_q1, J);
  return L;
}

Ladder default_ladder(std::int64_t X, std::int64_t h, double delta) {
  if (h < 2) throw ConstraintError("default_ladder: need h >= 2");
  if (!(delta > 0.0)) throw ConstraintError("default_ladder: need delta > 0");
  if (X < 20) throw ConstraintError("ladder: X must be >= 20");
  constexpr double eta = 1.0 / 150.0;
  const double log_x = std::log(static_cast<double>(X));
  const double ceiling = std::sqrt(log_x);
  const double log_h = std::log(static_cast<double>(h));
  double log_q1, log_p1;
  if (log_h <= ceiling) {
    log_q1 = log_h;
    log_p1 = std::max(delta / 4.0 * log_h, (40.0 / eta) * std::log(log_h));
  } else {
    log_q1 = ceiling;
    log_p1 = delta / 4.0 * log_q1;
  }
  if (log_p1 > log_q1)
    throw ConstraintError("default_ladder: P_1 > Q_1 for these parameters (log P_1 = " +
                          std::to_string(log_p1) + ", log Q_1 = " + std::to_string(log_q1) + ")");
  return build_ladder(X, log_p1, log_q1, eta, /*enforce_floor=*/false);
}

std::uint32_t rung_mask_single(std::uint64_t n, const Ladder& ladder, const PrimeTable& base) {
  std::uint32_t mask = 0;
  if (ladder.J() == 0 || n < 2) return mask;
  const std::uint64_t bound = ladder.prime_bound(n);
  if (base.limit >= bound) {
    for (const std::uint32_t p : base.primes) {
      if (p > bound) break;
      if (n % p) continue;
      for (int j = 1; j <= ladder.J(); ++j)
        if (ladder.rung_contains(j, p)) mask |= 1u << (j - 1);
    }
    return mask;
  }
  for (const std::uint64_t p : distinct_prime_factors(n, base))
    for (int j = 1; j <= ladder.J(); ++j)
      if (ladder.rung_contains(j, p)) mask |= 1u << (j - 1);
  return mask;
}

bool in_S(std::uint64_t n, const Ladder& ladder, const PrimeTable& base) {
  return rung_mask_single(n, ladder, base) == full_mask(ladder);
}

std::vector<std::uint32_t> rung_masks(const Window& w, const Ladder& ladder, const PrimeTable& base) {
  w.validate();
  std::vector<std::uint32_t> masks(static_cast<std::size_t>(w.h), 0);
  const auto lo = static_cast<std::uint64_t>(w.first());
  const auto hi = static_cast<std::uint64_t>(w.last());
  const auto rungs = rung_primes(ladder, hi, base);
  for (std::size_t j = 0; j < rungs.size(); ++j) {
    const std::uint32_t bit = 1u << j;
    for (const std::uint64_t p : rungs[j])
      for (std::uint64_t m = (lo + p - 1) / p * p; m <= hi; m += p) masks[m - lo] |= bit;
  }
  return masks;
}

std::vector<std::uint8_t> membership_window(const Window& w, const Ladder& ladder,
                                            const PrimeTable& base) {
  const auto masks = rung_masks(w, ladder, base);
  const std::uint32_t full = full_mask(ladder);
  std::vector<std::uint8_t> member(masks.size());
  for (std::size_t i = 0; i < masks.size(); ++i) member[i] = masks[i] == full;
  return member;
}

DensityReport complement_density(std::int64_t X, const Ladder& ladder, SampleMode mode,
                                  unsigned threads) {
  require(X >= 1, "complement_density: X must be >= 1");
  require(X <= std::numeric_limits<std::int64_t>::max() / 2, "complement_density: 2X overflows");
  DensityReport r;
  r.bound_shape = ladder.J() == 0 ? 0.0 : ladder.log_p[0] / ladder.log_q[0];
  const auto top = 2 * static_cast<std::uint64_t>(X);
  const auto base = base_primes(std::max<std::uint64_t>(2, std::min<std::uint64_t>(
                                                              1'000'000'000, isqrt(top) + 1)));

  const auto rungs = rung_primes(ladder, top, base);
  double in_s = 1.0;
  for (const auto& primes : rungs) in_s *= 1.0 - rung_density(primes);
  r.predicted = 1.0 - in_s;

  const std::uint32_t full = full_mask(ladder);
  if (mode.is_full()) {
    if (X > 100'000'000) throw ParameterError("complement_density: full mode needs X <= 1e8");
    const std::uint64_t total = static_cast<std::uint64_t>(X);
    const std::size_t chunks = static_cast<std::size_t>((total + kSegmentLength - 1) / kSegmentLength);
    std::vector<std::uint64_t> outside(chunks, 0);
    parallel_for(chunks, threads, [&](std::size_t c) {
      const std::uint64_t off = c * kSegmentLength;
      const auto len = static_cast<std::int64_t>(std::min<std::uint64_t>(kSegmentLength, total - off));
      const Window w{X + static_cast<std::int64_t>(off), len};
      const auto lo = static_cast<std::uint64_t>(w.first());
      const auto hi = static_cast<std::uint64_t>(w.last());
      std::vector<std::uint32_t> masks(static_cast<std::size_t>(len), 0);
      for (std::size_t j = 0; j < rungs.size(); ++j)
        for (const std::uint64_t p : rungs[j])
          for (std::uint64_t m = (lo + p - 1) / p * p; m <= hi; m += p) masks[m - lo] |= 1u << j;
      outside[c] = static_cast<std::uint64_t>(std::count_if(masks.begin(), masks.end(),
                                                            [&](auto m) { return m != full; }));
    });
    std::uint64_t count = 0;
    for (const auto c : outside) count += c;
    r.count = total;
    r.measured = static_cast<double>(count) / static_cast<double>(total);
    return r;
  }

  if (mode.count < 1000) throw ParameterError("complement_density: sampled mode needs >= 1000 draws");
  constexpr std::uint64_t kBlock = 4096;
  const std::size_t blocks = static_cast<std::size_t>((mode.count + kBlock - 1) / kBlock);
  std::vector<std::uint64_t> outside(blocks, 0);
  parallel_for(blocks, threads, [&](std::size_t b) {
    const std::uint64_t end = std::min<std::uint64_t>(mode.count, (b + 1) * kBlock);
    for (std::uint64_t i = b * kBlock; i < end; ++i) {
      CounterRng rng(mode.seed, i);
      const std::uint64_t n = rng.uniform(static_cast<std::uint64_t>(X) + 1, top);
      if (rung_mask_single(n, ladder, base) != full) ++outside[b];
    }
  });
  std::uint64_t count = 0;
  for (const auto c : outside) count += c;
  r.count = mode.count;
  r.measured = static_cast<double>(count) / static_cast<double>(mode.count);
  r.stderr_ = std::sqrt(r.measured * (1.0 - r.measured) / static_cast<double>(mode.count));
  return r;
}

InclusionExclusion inclusion_exclusion_check(const Window& w, const Ladder& ladder,
                                             std::span<const std::complex<double>> weights,
                                             const PrimeTable& base) {
  w.validate();
  if (weights.size() != static_cast<std::size_t>(w.h))
    throw ParameterError("inclusion_exclusion_check: need one weight per integer");
  if (ladder.J() > 20) throw ParameterError("inclusion_exclusion_check: too many rungs to enumerate");
  InclusionExclusion r;
  for (const auto& a : weights) r.weight_l1 += std::abs(a);

  // Left side from the sieved membership.
  const auto member = membership_window(w, ladder, base);
  for (std::size_t i = 0; i < member.size(); ++i)
    if (member[i]) r.lhs += weights[i];

  // Right side from per-integer factorisation: g_J(n) = 0 iff some prime
  // factor of n lies in a rung indexed by J.
  std::vector<std::uint32_t> masks(member.size());
  for (std::size_t i = 0; i < masks.size(); ++i)
    masks[i] = rung_mask_single(static_cast<std::uint64_t>(w.first()) + i, ladder, base);
  const std::uint32_t subsets = 1u << ladder.J();
  for (std::uint32_t S = 0; S < subsets; ++S) {
    std::complex<double> partial = 0.0;
    for (std::size_t i = 0; i < masks.size(); ++i)
      if ((masks[i] & S) == 0) partial += weights[i];
    r.rhs += (std::popcount(S) % 2 ? -1.0 : 1.0) * partial;
  }
  return r;
}

std::string to_text(const Ladder& ladder) {
  std::ostringstream out;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", ladder.eta);
  out << "eta " << buf << '\n' << "J " << ladder.J() << '\n';
  for (int j = 1; j <= ladder.J(); ++j) {
    out << j;
    std::snprintf(buf, sizeof buf, " %.17g", ladder.log_p[j - 1]);
    out << buf;
    std::snprintf(buf, sizeof buf, " %.17g", ladder.log_q[j - 1]);
    out << buf << '\n';
  }
  return out.str();
}

Ladder ladder_from_text(std::string_view text) {
  std::istringstream in{std::string(text)};
  Ladder L;
  std::string key;
  int J = -1;
  if (!(in >> key >> L.eta) || key != "eta") throw ParameterError("ladder record: missing eta");
  if (!(in >> key >> J) || key != "J" || J < 0 || J > kMaxRungs)
    throw ParameterError("ladder record: bad J");
  for (int j = 1; j <= J; ++j) {
    int idx = 0;
    double lp = 0, lq = 0;
    if (!(in >> idx >> lp >> lq) || idx != j) throw ParameterError("ladder record: bad rung line");
    L.log_p.push_back(lp);
    L.log_q.push_back(lq);
  }
  return L;
}

}  // namespace ek
