#pragma once

// The factor-interval system S_X: integers with at least one prime factor in
// each of the intervals [P_j, Q_j], j = 1..J, where
//   log P_j = j^{4j} (log Q_1)^{j-1} log P_1,
//   log Q_j = j^{4j+2} (log Q_1)^j,
// and J is the largest index with Q_J <= exp(sqrt(log X)).

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ek/random.hpp"
#include "ek/sieve.hpp"

namespace ek {

struct Ladder {
  double eta = 1.0 / 150.0;
  std::int64_t X = 0;  // 0 when built from log X alone
  double log_x = 0.0;
  std::vector<double> log_p;  // log P_j, j = 1..J
  std::vector<double> log_q;  // log Q_j
  // (log Q_1)^{40/eta} <= P_1. Desk-scale parameters almost never meet it.
  bool floor_ok = true;

  int J() const { return static_cast<int>(log_p.size()); }
  // 1-based rung index.
  bool rung_contains(int j, std::uint64_t p) const;
  // Largest prime that can matter for a window ending at `top`.
  std::uint64_t prime_bound(std::uint64_t top) const;
};

// Maximal ladder for the given first interval. Throws ConstraintError if
// eta is outside (0, 1/6), P_1 > Q_1, Q_1 > exp(sqrt(log X)), or (when
// enforce_floor) P_1 < (log Q_1)^{40/eta}.
Ladder build_ladder(std::int64_t X, double log_p1, double log_q1, double eta,
                    bool enforce_floor = true);
Ladder build_ladder_from_log(double log_x, double log_p1, double log_q1, double eta,
                             bool enforce_floor = true);

// Ladder with an explicit rung count. Only eta and P_1 <= Q_1 are checked;
// used for desk-scale experiments outside the asymptotic constraints.
Ladder make_ladder(std::int64_t X, double log_p1, double log_q1, int J, double eta = 1.0 / 150.0);

// eta = 1/150, Q_1 = min(h, exp(sqrt(log X))),
// P_1 = max(h^{delta/4}, (log h)^{40/eta}) if h <= exp(sqrt(log X)),
//       Q_1^{delta/4} otherwise.
// The floor is recorded in floor_ok rather than enforced.
Ladder default_ladder(std::int64_t X, std::int64_t h, double delta);

// Per-integer membership by trial division. Needs base.limit >= min(Q_J, sqrt n).
bool in_S(std::uint64_t n, const Ladder& ladder, const PrimeTable& base);

// Bit j-1 of mask[i] is set iff window.x + 1 + i has a prime factor in rung j.
// Sieved; needs the primes up to min(Q_J, x + h) (taken from base, or
// generated from it when base.limit^2 covers them).
std::vector<std::uint32_t> rung_masks(const Window& w, const Ladder& ladder, const PrimeTable& base);
std::uint32_t rung_mask_single(std::uint64_t n, const Ladder& ladder, const PrimeTable& base);
inline std::uint32_t full_mask(const Ladder& ladder) {
  return ladder.J() == 0 ? 0u : static_cast<std::uint32_t>((std::uint64_t{1} << ladder.J()) - 1);
}

std::vector<std::uint8_t> membership_window(const Window& w, const Ladder& ladder,
                                            const PrimeTable& base);

struct DensityReport {
  double measured = 0.0;     // density of (X, 2X] outside S
  double predicted = 0.0;    // 1 - prod_j (1 - prod_{p in rung j} (1 - 1/p))
  double stderr_ = 0.0;      // 0 in full mode
  double bound_shape = 0.0;  // log P_1 / log Q_1
  std::uint64_t count = 0;
};

// Full mode requires X <= 10^8; sampled mode at least 10^3 draws.
DensityReport complement_density(std::int64_t X, const Ladder& ladder, SampleMode mode,
                                  unsigned threads = 1);

struct InclusionExclusion {
  std::complex<double> lhs;  // sum over members of S
  std::complex<double> rhs;  // sum over subsets of (-1)^|J| sum a_n g_J(n)
  double weight_l1 = 0.0;    // sum |a_n|
};

InclusionExclusion inclusion_exclusion_check(const Window& w, const Ladder& ladder,
                                             std::span<const std::complex<double>> weights,
                                             const PrimeTable& base);

// Flat text record: "eta <v>", "J <n>", then "<j> <log P_j> <log Q_j>" lines.
std::string to_text(const Ladder& ladder);
Ladder ladder_from_text(std::string_view text);

}  // namespace ek
