#pragma once

// Independent reference computations used only by the tests.

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <utility>
#include <vector>

namespace oracle {

// Distinct prime factors by plain trial division over all d >= 2.
inline std::vector<std::uint64_t> factor(std::uint64_t n) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t d = 2; d * d <= n; d += (d == 2 ? 1 : 2)) {
    if (n % d) continue;
    out.push_back(d);
    while (n % d == 0) n /= d;
  }
  if (n > 1) out.push_back(n);
  return out;
}

inline int omega(std::uint64_t n) { return static_cast<int>(factor(n).size()); }

inline bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

inline std::vector<std::uint64_t> primes_upto(std::uint64_t n) {
  std::vector<char> comp(n + 1, 0);
  std::vector<std::uint64_t> out;
  for (std::uint64_t i = 2; i <= n; ++i) {
    if (comp[i]) continue;
    out.push_back(i);
    for (std::uint64_t j = i * i; j <= n; j += i) comp[j] = 1;
  }
  return out;
}

// omega(n) by trial division over a list of primes covering sqrt(n).
inline int omega_by_primes(std::uint64_t n, const std::vector<std::uint64_t>& primes) {
  int count = 0;
  for (const auto p : primes) {
    if (p * p > n) break;
    if (n % p) continue;
    ++count;
    while (n % p == 0) n /= p;
  }
  return count + (n > 1);
}

// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration.
inline std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n) {
  std::vector<double> x(n), w(n);
  for (int i = 0; i < n; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[i] = z;
    w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
  return {x, w};
}

inline constexpr double kC1 = 0.261497212847642783755;

// The corrected normal law written out directly; only valid off the jumps.
inline double delange_cdf(double y, double T) {
  const double s = std::sqrt(T);
  const double u = T + y * s;
  const double frac = u - std::floor(u);
  const double gauss = std::exp(-0.5 * y * y) / std::sqrt(2.0 * std::numbers::pi * T);
  return 0.5 * std::erfc(-y / std::numbers::sqrt2) + gauss * (2.0 / 3.0 - kC1 - y * y / 6.0 - frac);
}

// int e^{i tau y} dPhi_X(y) over [-L, L] by parts:
// e^{i tau L} F(L) - e^{-i tau L} F(-L) - i tau int F(y) e^{i tau y} dy,
// the last integral by Gauss-Legendre on each smooth piece.
inline std::complex<double> fourier_stieltjes(double tau, double T, double L = 12.0) {
  static const auto gl = gauss_legendre(20);
  const double s = std::sqrt(T);
  std::vector<double> cuts{-L};
  for (long k = static_cast<long>(std::ceil(T - L * s)); k <= static_cast<long>(std::floor(T + L * s)); ++k) {
    const double y = (k - T) / s;
    if (y > -L && y < L) cuts.push_back(y);
  }
  cuts.push_back(L);
  std::complex<double> integral = 0.0;
  for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
    const double a0 = cuts[c], b0 = cuts[c + 1];
    const int pieces = std::max(1, static_cast<int>(std::ceil((b0 - a0) / 0.125)));
    for (int q = 0; q < pieces; ++q) {
      const double a = a0 + (b0 - a0) * q / pieces;
      const double b = a0 + (b0 - a0) * (q + 1) / pieces;
      const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
      for (std::size_t i = 0; i < gl.first.size(); ++i) {
        const double y = mid + half * gl.first[i];
        integral += half * gl.second[i] * delange_cdf(y, T) * std::polar(1.0, tau * y);
      }
    }
  }
  const double upper = delange_cdf(L, T), lower = delange_cdf(-L, T);
  return std::polar(upper, tau * L) - std::polar(lower, -tau * L) -
         std::complex<double>(0.0, tau) * integral;
}

}  // namespace oracle
