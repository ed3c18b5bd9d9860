#pragma once

// Closed-form objects of the short-interval Erdos-Kac problem: the Mertens
// constant c1, the normal law, its Delange-corrected version Phi_X with the
// fractional-part term, their characteristic functions, and the
// Selberg-Delange main term for the mean of exp(i t omega(n)).

#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "ek/charcurve.hpp"

namespace ek {

// X together with T = log log X.
struct TheoryParams {
  std::int64_t X = 0;
  double T = 0.0;

  // Throws ParameterError unless X >= 20.
  static TheoryParams from_X(std::int64_t X);
};

// A real function of bounded variation given by its right-continuous values,
// left limits and the locations of its discontinuities.
struct DistributionFn {
  std::function<double(double)> value;       // right-continuous
  std::function<double(double)> left_value;  // limit from the left
  // Discontinuities inside [lo, hi], strictly increasing.
  std::function<std::vector<double>(double, double)> jumps;
  double derivative_bound = 0.0;  // sup |G'| between jumps
  double lower_limit = 0.0;       // G(-inf)
  double upper_limit = 1.0;       // G(+inf)
};

// Jumps farther out than this are never inspected by sup-norm routines;
// every distribution in this library is within 1e-30 of its limits there.
inline constexpr double kSupRange = 40.0;

// Result of the truncated Euler sum for c1.
struct MertensResult {
  double value = 0.0;            // truncated sum plus tail estimate
  double truncated = 0.0;        // gamma + sum over p <= cutoff only
  double tail_estimate = 0.0;    // -E1(log cutoff)/2, added to `value`
  double tail_bound = 0.0;       // bound on sum_{p > cutoff} 1/(2p(p-1))
  std::uint64_t cutoff = 0;
};

MertensResult mertens_constant(std::uint64_t prime_cutoff);

// c1 at the default cutoff 10^6, computed once.
double mertens_c1();

// Standard normal distribution function.
double phi(double y);

// Phi(y) + exp(-y^2/2)/sqrt(2 pi T) * (2/3 - c1 - y^2/6 - frac(T + y sqrt T)),
// right-continuous; phi_X_left gives the limit from the left.
double phi_X(double y, const TheoryParams& p);
double phi_X_left(double y, const TheoryParams& p);

// Location of the k-th jump of Phi_X, where T + y sqrt(T) = k.
double delange_jump(long k, const TheoryParams& p);

DistributionFn gaussian_distribution();
DistributionFn delange_distribution(const TheoryParams& p);
// Pure step function with the given atoms (locations need not be sorted).
DistributionFn step_distribution(std::vector<double> locations, std::vector<double> masses);

// sup |F - G| over both one-sided values at every jump of F or G in
// [-kSupRange, kSupRange] and a uniform grid of 10^4 points on [-6, 6].
double sup_distance(const DistributionFn& F, const DistributionFn& G);

// Periodic correction term of the characteristic function of Phi_X, summed
// over 0 < |nu| <= trunc.
std::complex<double> delta_X(double tau, const TheoryParams& p, int trunc);
int default_delta_trunc(double tau, const TheoryParams& p);
std::complex<double> delta_X(double tau, const TheoryParams& p);

// Fourier-Stieltjes transform of Phi_X.
std::complex<double> char_phi_X(double tau, const TheoryParams& p);
CharCurve theoretical_charcurve(const TheoryParams& p, std::span<const double> taus);

// 1/Gamma(z), Lanczos (g = 7, 9 terms) with reflection for Re z < 1/2.
std::complex<double> reciprocal_gamma(std::complex<double> z);

// A(z) = 1/Gamma(z) * prod_p (1 + z/(p-1)) (1 - 1/p)^z for |z| <= 2, with the
// product over p <= prime_cutoff plus a second-order tail estimate.
// `error` carries |z|(|z|+1) sum_{p > cutoff} 1/(p(p-1)).
ComplexEstimate A_of_z(std::complex<double> z, std::uint64_t prime_cutoff = 1'000'000);

// Main term A(e^{it}) (log X)^{e^{it} - 1} for the mean of exp(i t omega(n))
// over X < n <= 2X. `error` is the relative remainder scale 1/log X.
ComplexEstimate sd_mean(double t, const TheoryParams& p);

// h/log X * T^{k-1}/(k-1)!, k >= 1.
double pik_prediction(std::int64_t X, std::int64_t h, int k);

struct SmoothingReport {
  double lhs = 0.0;              // sup |F - G|
  double integral = 0.0;         // int_{-T}^{T} |f - g| / |tau|
  double derivative_term = 0.0;  // sup|G'| / T
  double c_obs = 0.0;            // lhs / (integral + derivative_term)
};

// Both sides of the Esseen-type smoothing inequality. f and g must share a
// tau grid covering [-Tparam, Tparam]; the trapezoid rule is used on it.
SmoothingReport smoothing_bound(const DistributionFn& F, const DistributionFn& G,
                                const CharCurve& f, const CharCurve& g, double Tparam);

}  // namespace ek
