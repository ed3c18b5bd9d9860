#pragma once

// Prime generation and exact omega(n) (number of distinct prime factors)
// over integer windows, by segmented sieving.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace ek {

// omega(n) <= 15 for every n < 2^63 (the product of the first 16 primes
// exceeds 2^63).
inline constexpr int kMaxOmega = 15;

// Integers in one sieve segment; larger windows are processed in chunks.
inline constexpr std::size_t kSegmentLength = std::size_t{1} << 22;

using Histogram = std::array<std::uint64_t, kMaxOmega + 1>;

// The half-open window (x, x + h].
struct Window {
  std::int64_t x = 0;
  std::int64_t h = 1;

  std::int64_t first() const { return x + 1; }
  std::int64_t last() const { return x + h; }

  // Throws ParameterError unless x >= 0, h >= 1 and x + h <= 2^63 - 1.
  void validate() const;

  friend bool operator==(const Window&, const Window&) = default;
};

struct PrimeTable {
  std::uint64_t limit = 0;
  std::vector<std::uint32_t> primes;  // every prime <= limit, increasing

  std::uint64_t largest() const { return primes.empty() ? 0 : primes.back(); }
};

struct OmegaSlice {
  Window window;
  std::vector<std::uint8_t> omegas;  // omegas[i] = omega(window.x + 1 + i)
  Histogram histogram{};             // histogram[k] = #{n : omega(n) = k}

  std::uint64_t size() const { return omegas.size(); }
};

std::uint64_t isqrt(std::uint64_t n);

// All primes <= limit, 2 <= limit <= 10^9.
PrimeTable base_primes(std::uint64_t limit);

// Primes p with a < p <= b. Requires a <= b and base.limit^2 >= b.
std::vector<std::uint64_t> primes_in_range(std::uint64_t a, std::uint64_t b,
                                           const PrimeTable& base);

// Exact omega over the window. Requires base.limit >= floor(sqrt(x + h)).
OmegaSlice omega_window(const Window& w, const PrimeTable& base);

// Histogram of omega over the window without materialising the per-integer
// values; chunks are sieved on up to `threads` workers.
Histogram omega_histogram(const Window& w, const PrimeTable& base, unsigned threads = 1);

// Deterministic Miller-Rabin, exact for every 64-bit n.
bool is_prime(std::uint64_t n);

// omega(n) for 1 <= n <= 2^63 - 1 by trial division up to the cube root of
// the remaining cofactor, then primality / square tests on what is left.
// Independent of the sieve path; used as its oracle.
int omega_single(std::uint64_t n);

// Distinct prime factors of n by trial division with the table's primes.
// Throws ParameterError if the table stops short of sqrt of the cofactor.
std::vector<std::uint64_t> distinct_prime_factors(std::uint64_t n, const PrimeTable& base);

Histogram histogram_of(std::span<const std::uint8_t> omegas);

// (1/h) * sum over the slice of |omega(n) - log log X|.
double turan_kubilius_stat(const OmegaSlice& slice, std::int64_t X);

}  // namespace ek
