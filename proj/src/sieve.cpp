#include "ek/sieve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "ek/error.hpp"
#include "ek/parallel.hpp"

namespace ek {

namespace {

constexpr std::uint64_t kMaxInt64 = std::numeric_limits<std::int64_t>::max();
constexpr std::uint64_t kMaxBaseLimit = 1'000'000'000;

// Odd-only sieve of [3, limit] in fixed-size segments.
std::vector<std::uint32_t> sieve_up_to(std::uint64_t limit) {
  std::vector<std::uint32_t> primes;
  if (limit < 2) return primes;
  primes.push_back(2);
  if (limit < 3) return primes;

  const std::uint64_t root = isqrt(limit);
  std::vector<std::uint32_t> small;  // odd primes <= root
  {
    std::vector<char> composite(root + 1, 0);
    for (std::uint64_t i = 3; i <= root; i += 2) {
      if (composite[i]) continue;
      small.push_back(static_cast<std::uint32_t>(i));
      for (std::uint64_t j = i * i; j <= root; j += 2 * i) composite[j] = 1;
    }
  }

  constexpr std::uint64_t kSpan = std::uint64_t{1} << 19;  // odd numbers per segment
  std::vector<char> composite(kSpan);
  std::vector<std::uint64_t> next(small.size());
  for (std::size_t i = 0; i < small.size(); ++i) next[i] = std::uint64_t{small[i]} * small[i];

  // Segment covers odd numbers lo, lo+2, ..., lo + 2*(kSpan-1).
  for (std::uint64_t lo = 3; lo <= limit; lo += 2 * kSpan) {
    const std::uint64_t hi = std::min(limit, lo + 2 * (kSpan - 1));
    const std::uint64_t count = (hi - lo) / 2 + 1;
    std::fill_n(composite.begin(), count, 0);
    for (std::size_t i = 0; i < small.size(); ++i) {
      const std::uint64_t p = small[i];
      std::uint64_t m = next[i];
      for (; m <= hi; m += 2 * p) composite[(m - lo) / 2] = 1;
      next[i] = m;
    }
    for (std::uint64_t k = 0; k < count; ++k)
      if (!composite[k]) primes.push_back(static_cast<std::uint32_t>(lo + 2 * k));
  }
  return primes;
}

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t m) {
  std::uint64_t result = 1 % m;
  base %= m;
  while (exp) {
    if (exp & 1) result = mul_mod(result, base, m);
    base = mul_mod(base, base, m);
    exp >>= 1;
  }
  return result;
}

// Smallest multiple of p that is >= lo.
std::uint64_t first_multiple(std::uint64_t p, std::uint64_t lo) {
  return (lo + p - 1) / p * p;
}

// Sieves omega for n in [lo, lo + len). `product` is scratch holding the
// part of each n built from primes <= sqrt(hi), including multiplicity.
void sieve_chunk(std::uint64_t lo, std::size_t len, std::uint64_t hi,
                 std::span<const std::uint32_t> primes, std::span<std::uint8_t> omegas,
                 std::span<std::uint64_t> product) {
  std::fill_n(omegas.begin(), len, 0);
  std::fill_n(product.begin(), len, 1);
  const std::uint64_t end = lo + len;  // exclusive
  for (const std::uint32_t p32 : primes) {
    const std::uint64_t p = p32;
    for (std::uint64_t m = first_multiple(p, lo); m < end; m += p) {
      omegas[m - lo] += 1;
      product[m - lo] *= p;
    }
    for (std::uint64_t pk = p; pk <= hi / p;) {
      pk *= p;
      for (std::uint64_t m = first_multiple(pk, lo); m < end; m += pk) product[m - lo] *= p;
    }
  }
  // Whatever is left after removing all primes <= sqrt(n) is 1 or a prime.
  for (std::size_t i = 0; i < len; ++i)
    if (product[i] != lo + i) omegas[i] += 1;
}

std::span<const std::uint32_t> sieving_primes(const Window& w, const PrimeTable& base) {
  w.validate();
  const auto hi = static_cast<std::uint64_t>(w.last());
  const std::uint64_t root = isqrt(hi);
  if (base.limit < root)
    throw ParameterError("prime table limit " + std::to_string(base.limit) +
                         " is below sqrt(" + std::to_string(hi) + ")");
  const auto end = std::upper_bound(base.primes.begin(), base.primes.end(), root);
  return {base.primes.data(), static_cast<std::size_t>(end - base.primes.begin())};
}

const PrimeTable& trial_division_table() {
  // Covers the cube root of 2^63 - 1 with margin (next prime above 2^21 is
  // 2097169, whose cube exceeds 2^63).
  static const PrimeTable table = base_primes(2'100'000);
  return table;
}

}  // namespace

void Window::validate() const {
  if (x < 0) throw ParameterError("window start must be >= 0");
  if (h < 1) throw ParameterError("window length must be >= 1");
  if (static_cast<std::uint64_t>(x) > kMaxInt64 - static_cast<std::uint64_t>(h))
    throw ParameterError("window end exceeds 2^63 - 1");
}

std::uint64_t isqrt(std::uint64_t n) {
  auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(n)));
  while (r > 0 && (r > 0xFFFFFFFFull || r * r > n)) --r;
  while (r + 1 <= 0xFFFFFFFFull && (r + 1) * (r + 1) <= n) ++r;
  return r;
}

PrimeTable base_primes(std::uint64_t limit) {
  if (limit < 2 || limit > kMaxBaseLimit)
    throw ParameterError("base_primes: limit must lie in [2, 1e9], got " + std::to_string(limit));
  return PrimeTable{limit, sieve_up_to(limit)};
}

std::vector<std::uint64_t> primes_in_range(std::uint64_t a, std::uint64_t b,
                                           const PrimeTable& base) {
  if (a > b) throw ParameterError("primes_in_range: need a <= b");
  if (static_cast<unsigned __int128>(base.limit) * base.limit < b)
    throw ParameterError("primes_in_range: prime table too small for upper bound");
  std::vector<std::uint64_t> out;
  const std::uint64_t root = isqrt(b);
  std::vector<char> composite;
  for (std::uint64_t lo = std::max<std::uint64_t>(a + 1, 2); lo <= b;) {
    const std::uint64_t len = std::min<std::uint64_t>(kSegmentLength, b - lo + 1);
    composite.assign(len, 0);
    for (const std::uint32_t p32 : base.primes) {
      const std::uint64_t p = p32;
      if (p > root) break;
      for (std::uint64_t m = std::max(p * p, first_multiple(p, lo)); m < lo + len; m += p)
        composite[m - lo] = 1;
    }
    for (std::uint64_t i = 0; i < len; ++i)
      if (!composite[i]) out.push_back(lo + i);
    if (len < kSegmentLength) break;
    lo += len;
  }
  return out;
}

OmegaSlice omega_window(const Window& w, const PrimeTable& base) {
  const auto primes = sieving_primes(w, base);
  const auto hi = static_cast<std::uint64_t>(w.last());
  OmegaSlice slice;
  slice.window = w;
  slice.omegas.resize(static_cast<std::size_t>(w.h));
  std::vector<std::uint64_t> product(std::min<std::size_t>(slice.omegas.size(), kSegmentLength));
  for (std::size_t off = 0; off < slice.omegas.size(); off += kSegmentLength) {
    const std::size_t len = std::min(kSegmentLength, slice.omegas.size() - off);
    sieve_chunk(static_cast<std::uint64_t>(w.first()) + off, len, hi, primes,
                std::span(slice.omegas).subspan(off, len), product);
  }
  slice.histogram = histogram_of(slice.omegas);
  return slice;
}

Histogram omega_histogram(const Window& w, const PrimeTable& base, unsigned threads) {
  const auto primes = sieving_primes(w, base);
  const auto hi = static_cast<std::uint64_t>(w.last());
  const auto total = static_cast<std::uint64_t>(w.h);
  const std::size_t chunks = static_cast<std::size_t>((total + kSegmentLength - 1) / kSegmentLength);
  std::vector<Histogram> partial(chunks);
  parallel_for(chunks, threads, [&](std::size_t c) {
    const std::uint64_t off = c * kSegmentLength;
    const std::size_t len = static_cast<std::size_t>(std::min<std::uint64_t>(kSegmentLength, total - off));
    std::vector<std::uint8_t> omegas(len);
    std::vector<std::uint64_t> product(len);
    sieve_chunk(static_cast<std::uint64_t>(w.first()) + off, len, hi, primes, omegas, product);
    partial[c] = histogram_of(omegas);
  });
  Histogram hist{};
  for (const auto& part : partial)
    for (int k = 0; k <= kMaxOmega; ++k) hist[k] += part[k];
  return hist;
}

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  static constexpr std::uint64_t kBases[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
  for (const std::uint64_t p : kBases) {
    if (n == p) return true;
    if (n % p == 0) return false;
  }
  std::uint64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (const std::uint64_t a : kBases) {
    std::uint64_t x = pow_mod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool witness = true;
    for (int r = 1; r < s && witness; ++r) {
      x = mul_mod(x, x, n);
      if (x == n - 1) witness = false;
    }
    if (witness) return false;
  }
  return true;
}

int omega_single(std::uint64_t n) {
  if (n < 1 || n > kMaxInt64) throw ParameterError("omega_single: n must lie in [1, 2^63 - 1]");
  int count = 0;
  std::uint64_t m = n;
  for (const std::uint32_t p32 : trial_division_table().primes) {
    const std::uint64_t p = p32;
    if (p * p * p > m) break;
    if (m % p == 0) {
      ++count;
      do m /= p;
      while (m % p == 0);
    }
  }
  // m now has at most two prime factors, all larger than the last trial prime.
  if (m == 1) return count;
  if (is_prime(m)) return count + 1;
  const std::uint64_t r = isqrt(m);
  return count + (r * r == m ? 1 : 2);
}

std::vector<std::uint64_t> distinct_prime_factors(std::uint64_t n, const PrimeTable& base) {
  std::vector<std::uint64_t> factors;
  std::uint64_t m = n;
  for (const std::uint32_t p32 : base.primes) {
    const std::uint64_t p = p32;
    if (p * p > m) break;
    if (m % p == 0) {
      factors.push_back(p);
      do m /= p;
      while (m % p == 0);
    }
  }
  if (m > 1) {
    // Either the loop stopped at p^2 > m, or every prime <= limit was tried.
    const std::uint64_t tried = base.primes.empty() ? 1 : base.limit;
    if (static_cast<unsigned __int128>(tried) * tried < m &&
        static_cast<unsigned __int128>(base.largest()) * base.largest() < m)
      throw ParameterError("distinct_prime_factors: prime table too small");
    factors.push_back(m);
  }
  return factors;
}

Histogram histogram_of(std::span<const std::uint8_t> omegas) {
  Histogram hist{};
  for (const std::uint8_t w : omegas) ++hist[w];
  return hist;
}

double turan_kubilius_stat(const OmegaSlice& slice, std::int64_t X) {
  if (slice.omegas.empty()) throw ParameterError("turan_kubilius_stat: empty slice");
  if (X < 3) throw ParameterError("turan_kubilius_stat: need X >= 3");
  const double T = std::log(std::log(static_cast<double>(X)));
  double sum = 0.0;
  for (int k = 0; k <= kMaxOmega; ++k)
    sum += static_cast<double>(slice.histogram[k]) * std::abs(k - T);
  return sum / static_cast<double>(slice.size());
}

}  // namespace ek
