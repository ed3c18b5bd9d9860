#include "ek/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>

#include "ek/empirics.hpp"
#include "ek/error.hpp"
#include "ek/experiments.hpp"
#include "ek/ladder.hpp"
#include "ek/parallel.hpp"
#include "ek/pretentious.hpp"
#include "ek/prime_cache.hpp"
#include "ek/report.hpp"
#include "ek/theory.hpp"

namespace ek::cli {

namespace {

using json = nlohmann::ordered_json;
using cplx = std::complex<double>;

struct Common {
  std::string out;
  std::string config;  // consumed by expand_config
  unsigned threads = default_threads();
  std::optional<std::uint64_t> seed;
};

struct Outcome {
  Table table;
  json config = json::object();
  json grids = json::object();
  json summary = json::object();
  std::uint64_t prime_limit = 0;
  std::string extra_suffix;  // optional side file, e.g. ".ladder"
  std::string extra_content;
  bool failed = false;       // selftest only
};

using Runner = std::function<Outcome(std::uint64_t seed, unsigned threads, std::ostream& err)>;

const CLI::Validator kScientificInt(
    [](std::string& s) -> std::string {
      if (s.find_first_of(".eE") == std::string::npos) return {};
      try {
        s = std::to_string(parse_scientific_int(s));
      } catch (const ParameterError& e) {
        return e.what();
      }
      return {};
    },
    "", "scientific integer");

void flatten(json& manifest, const std::string& prefix, const json& obj) {
  for (auto it = obj.begin(); it != obj.end(); ++it) manifest[prefix + it.key()] = it.value();
}

std::uint64_t block_prime_limit(std::int64_t X) {
  return isqrt(2 * static_cast<std::uint64_t>(X)) + 1;
}

json quantiles(const QuantileSummary& q) {
  return json{{"q10", q.q10}, {"q50", q.q50}, {"q90", q.q90}, {"mean", q.mean}, {"n", q.n}};
}

void put_quantiles(json& summary, const std::string& prefix, const QuantileSummary& q) {
  flatten(summary, prefix + ".", quantiles(q));
}

double harmonic_number(std::uint64_t n) {
  if (n == 0) return 0.0;
  if (n < 64) {
    double s = 0.0;
    for (std::uint64_t k = 1; k <= n; ++k) s += 1.0 / static_cast<double>(k);
    return s;
  }
  const double x = static_cast<double>(n);
  return std::log(x) + std::numbers::egamma + 1.0 / (2 * x) - 1.0 / (12 * x * x);
}

// Subcommands -------------------------------------------------------------

Runner add_theorem1(CLI::App& app) {
  auto* sub = app.add_subcommand("theorem1", "Sup-norm discrepancy of sampled windows against Phi_X and Phi");
  struct Opts {
    std::int64_t X = 0, h = 0, samples = 200;
    double threshold = 0.05;
    std::optional<double> alpha;
  };
  auto o = std::make_shared<Opts>();
  sub->add_option("--X", o->X, "Scale X; windows start in [X, 2X - h]")->required()->transform(kScientificInt);
  sub->add_option("--h", o->h, "Window length")->required()->transform(kScientificInt);
  sub->add_option("--samples", o->samples, "Number of windows")->capture_default_str()->transform(kScientificInt);
  sub->add_option("--threshold", o->threshold, "Exceptional-window threshold on disc_phiX")->capture_default_str();
  sub->add_option("--alpha", o->alpha, "Use threshold (log h)^-alpha instead of --threshold");
  return [o](std::uint64_t seed, unsigned threads, std::ostream&) {
    ExperimentConfig cfg{o->X, o->h, static_cast<std::uint64_t>(std::max<std::int64_t>(0, o->samples)), seed, threads};
    double threshold = o->threshold;
    if (o->alpha) threshold = std::pow(std::log(static_cast<double>(o->h)), -*o->alpha);
    const auto r = run_theorem1(cfg, threshold);
    Outcome out;
    out.table.header = {"index", "x", "disc_phiX", "disc_phi"};
    for (const auto& row : r.rows) out.table.add({row.index, row.x, row.disc_phiX, row.disc_phi});
    out.config = {{"X", o->X}, {"h", o->h}, {"samples", o->samples}, {"threshold", threshold}};
    if (o->alpha) out.config["alpha"] = *o->alpha;
    out.grids = {{"sup_grid_points", 10000}, {"sup_grid_lo", -6.0}, {"sup_grid_hi", 6.0},
                 {"sup_jump_range", kSupRange}};
    put_quantiles(out.summary, "disc_phiX", r.phiX);
    put_quantiles(out.summary, "disc_phi", r.phi);
    out.summary["exceptional_fraction"] = r.exceptional_fraction;
    out.prime_limit = block_prime_limit(o->X);
    return out;
  };
}

Runner add_theorem2(CLI::App& app) {
  auto* sub = app.add_subcommand("theorem2", "Window counts of integers with exactly k prime factors");
  struct Opts {
    std::int64_t X = 0, h = 0, samples = 100;
    Theorem2Options t2;
  };
  auto o = std::make_shared<Opts>();
  sub->add_option("--X", o->X, "Scale X")->required()->transform(kScientificInt);
  sub->add_option("--h", o->h, "Window length")->required()->transform(kScientificInt);
  sub->add_option("--k", o->t2.k, "Number of distinct prime factors")->required();
  sub->add_option("--samples", o->samples, "Number of windows")->capture_default_str()->transform(kScientificInt);
  sub->add_option("--epsilon", o->t2.epsilon, "Half-width of the band around ratio 1")->capture_default_str();
  sub->add_option("--band-lo", o->t2.band_lo, "Lower edge of the reporting band")->capture_default_str();
  sub->add_option("--band-hi", o->t2.band_hi, "Upper edge of the reporting band")->capture_default_str();
  return [o](std::uint64_t seed, unsigned threads, std::ostream& err) {
    ExperimentConfig cfg{o->X, o->h, static_cast<std::uint64_t>(std::max<std::int64_t>(0, o->samples)), seed, threads};
    const auto r = run_theorem2(cfg, o->t2);
    if (r.k_far_from_T) err << "warning: |k - log log X| exceeds 2 sqrt(log log X)\n";
    Outcome out;
    out.table.header = {"index", "x", "count", "prediction", "ratio"};
    for (const auto& row : r.rows) out.table.add({row.index, row.x, row.count, row.prediction, row.ratio});
    out.config = {{"X", o->X}, {"h", o->h}, {"k", o->t2.k}, {"samples", o->samples},
                  {"epsilon", o->t2.epsilon}, {"band_lo", o->t2.band_lo}, {"band_hi", o->t2.band_hi}};
    put_quantiles(out.summary, "ratio", r.ratio);
    out.summary["within_epsilon"] = r.within_epsilon;
    out.summary["within_band"] = r.within_band;
    out.summary["k_far_from_T"] = r.k_far_from_T;
    out.prime_limit = block_prime_limit(o->X);
    return out;
  };
}

Runner add_prop1(CLI::App& app) {
  auto* sub = app.add_subcommand("prop1", "Characteristic-function integrals of windows against the dyadic block");
  struct Opts {
    std::int64_t X = 0, h = 0, samples = 100, reference_samples = 1'000'000;
    Prop1Options p;
    std::string map = "scaled";
    std::optional<double> delta;
  };
  auto o = std::make_shared<Opts>();
  sub->add_option("--X", o->X, "Scale X")->required()->transform(kScientificInt);
  sub->add_option("--h", o->h, "Window length")->required()->transform(kScientificInt);
  sub->add_option("--samples", o->samples, "Number of windows")->capture_default_str()->transform(kScientificInt);
  sub->add_option("--A", o->p.A, "Upper end of |tau|")->capture_default_str();
  sub->add_option("--B", o->p.B, "|tau| starts at 1/B")->capture_default_str();
  sub->add_option("--theta-map", o->map, "scaled: theta = tau/sqrt(T); identity: theta = tau")
      ->capture_default_str()
      ->check(CLI::IsMember({"scaled", "identity"}));
  sub->add_option("--reference-samples", o->reference_samples, "Dyadic draws when X > 1e8")
      ->capture_default_str()
      ->transform(kScientificInt);
  sub->add_option("--delta", o->delta, "Report log(AB) (delta + log log h / log h)");
  return [o](std::uint64_t seed, unsigned threads, std::ostream&) {
    ExperimentConfig cfg{o->X, o->h, static_cast<std::uint64_t>(std::max<std::int64_t>(0, o->samples)), seed, threads};
    Prop1Options p = o->p;
    p.map = o->map == "identity" ? ThetaMap::identity : ThetaMap::scaled;
    require(o->reference_samples >= 2, "prop1: reference-samples must be >= 2");
    p.reference_samples = static_cast<std::uint64_t>(o->reference_samples);
    const auto r = run_prop1(cfg, p);
    Outcome out;
    out.table.header = {"index", "x", "line_integral", "circle_integral"};
    for (const auto& row : r.rows) out.table.add({row.index, row.x, row.line_integral, row.circle_integral});
    out.config = {{"X", o->X}, {"h", o->h}, {"samples", o->samples}, {"A", p.A}, {"B", p.B},
                  {"theta_map", o->map}};
    if (o->delta) out.config["delta"] = *o->delta;
    out.grids = {{"tau_points_per_side", r.taus.size()}, {"tau_min", r.taus.front()},
                 {"tau_max", r.taus.back()}, {"points_per_decade", p.points_per_decade},
                 {"circle_points", p.circle_points}};
    put_quantiles(out.summary, "line_integral", r.line);
    put_quantiles(out.summary, "circle_integral", r.circle);
    out.summary["reference_mode"] = r.reference.mode.is_full() ? "full" : "sampled";
    out.summary["reference_count"] = r.reference.count;
    if (o->delta) {
      const double lh = std::log(static_cast<double>(o->h));
      out.summary["bound_shape"] = std::log(p.A * p.B) * (*o->delta + std::log(lh) / lh);
    }
    out.prime_limit = block_prime_limit(o->X);
    return out;
  };
}

Runner add_sd_check(CLI::App& app) {
  auto* sub = app.add_subcommand("sd-check", "Dyadic mean of exp(i t omega(n)) against the Selberg-Delange main term");
  struct Opts {
    std::int64_t X = 0;
    std::vector<double> ts{0.3, 0.7, 1.0};
  };
  auto o = std::make_shared<Opts>();
  sub->add_option("--X", o->X, "Scale X (<= 1e8, full enumeration)")->required()->transform(kScientificInt);
  sub->add_option("--t", o->ts, "Comma-separated t values")->delimiter(',')->capture_default_str();
  return [o](std::uint64_t, unsigned threads, std::ostream&) {
    const auto rows = run_sd_check(o->X, o->ts, threads);
    Outcome out;
    out.table.header = {"t", "re_emp", "im_emp", "re_theory", "im_theory", "rel_err"};
    double worst = 0.0;
    for (const auto& r : rows) {
      out.table.add({r.t, r.empirical.real(), r.empirical.imag(), r.theory.real(), r.theory.imag(), r.rel_err});
      worst = std::max(worst, r.rel_err);
    }
    out.config = {{"X", o->X}, {"t", o->ts}};
    out.grids = {{"euler_product_cutoff", 1'000'000}};
    out.summary["max_rel_err"] = worst;
    out.summary["scale"] = 1.0 / std::log(static_cast<double>(o->X));
    out.prime_limit = block_prime_limit(o->X);
    return out;
  };
}

Runner add_ladder(CLI::App& app) {
  auto* sub = app.add_subcommand("ladder", "Factor-interval ladder and its complement density on (X, 2X]");
  struct Opts {
    std::int64_t X = 0, h = 0, samples = 100'000;
    double delta = 0.4, eta = 1.0 / 150.0;
    std::optional<double> log_p1, log_q1;
    std::optional<int> J;
    std::string mode = "full";
  };
  auto o = std::make_shared<Opts>();
  sub->add_option("--X", o->X, "Scale X")->required()->transform(kScientificInt);
  sub->add_option("--h", o->h, "Window length for the default ladder")->transform(kScientificInt);
  sub->add_option("--delta", o->delta, "delta for the default ladder")->capture_default_str();
  sub->add_option("--logP1", o->log_p1, "Explicit log P_1 (with --logQ1)");
  sub->add_option("--logQ1", o->log_q1, "Explicit log Q_1 (with --logP1)");
  sub->add_option("--J", o->J, "Explicit rung count (default: maximal)");
  sub->add_option("--eta", o->eta, "Ladder exponent eta")->capture_default_str();
  sub->add_option("--mode", o->mode, "full or sampled")->capture_default_str()->check(CLI::IsMember({"full", "sampled"}));
  sub->add_option("--samples", o->samples, "Draws in sampled mode")->capture_default_str()->transform(kScientificInt);
  return [o](std::uint64_t seed, unsigned threads, std::ostream&) {
    Ladder L;
    json config = {{"X", o->X}};
    if (o->log_p1 || o->log_q1) {
      require(o->log_p1 && o->log_q1, "ladder: --logP1 and --logQ1 go together");
      L = o->J ? make_ladder(o->X, *o->log_p1, *o->log_q1, *o->J, o->eta)
               : build_ladder(o->X, *o->log_p1, *o->log_q1, o->eta, /*enforce_floor=*/false);
      config["logP1"] = *o->log_p1;
      config["logQ1"] = *o->log_q1;
      config["eta"] = o->eta;
      if (o->J) config["J"] = *o->J;
    } else {
      require(o->h >= 2, "ladder: --h is required for the default ladder");
      L = default_ladder(o->X, o->h, o->delta);
      config["h"] = o->h;
      config["delta"] = o->delta;
    }
    const SampleMode mode = o->mode == "full" ? SampleMode::full()
                                              : SampleMode::sampled(static_cast<std::uint64_t>(std::max<std::int64_t>(0, o->samples)), seed);
    config["mode"] = o->mode;
    if (!mode.is_full()) config["samples"] = o->samples;
    const auto rep = complement_density(o->X, L, mode, threads);

    Outcome out;
    out.table.header = {"j", "log_P", "log_Q"};
    for (int j = 1; j <= L.J(); ++j) out.table.add({std::int64_t{j}, L.log_p[j - 1], L.log_q[j - 1]});
    out.config = config;
    out.summary = {{"J", L.J()}, {"floor_ok", L.floor_ok}, {"measured", rep.measured},
                   {"predicted", rep.predicted}, {"stderr", rep.stderr_},
                   {"bound_shape", rep.bound_shape}, {"count", rep.count}};
    out.prime_limit = block_prime_limit(o->X);
    out.extra_suffix = ".ladder";
    out.extra_content = to_text(L);
    return out;
  };
}

Runner add_distance(CLI::App& app) {
  auto* sub = app.add_subcommand("distance", "Pretentious distances, the lower-bound interval, Korobov sum and Halasz minimum");
  struct Opts {
    double theta = 0.0, alpha = 0.0, T0 = 10.0;
    std::vector<std::int64_t> xs;
  };
  auto o = std::make_shared<Opts>();
  sub->add_option("--theta", o->theta, "f(p) = exp(i theta)")->required();
  sub->add_option("--alpha", o->alpha, "Comparison twist n^{i alpha}")->capture_default_str();
  sub->add_option("--x", o->xs, "Comma-separated prime bounds x (<= 1e9)")
      ->required()
      ->delimiter(',')
      ->transform(kScientificInt);
  sub->add_option("--T0", o->T0, "Halasz grid half-width")->capture_default_str();
  return [o](std::uint64_t, unsigned, std::ostream&) {
    std::int64_t top = 2;
    for (const auto x : o->xs) {
      require(x >= 3 && x <= 1'000'000'000, "distance: x must lie in [3, 1e9]");
      top = std::max(top, x);
    }
    const auto base = cached_base_primes(static_cast<std::uint64_t>(top));
    Outcome out;
    out.table.header = {"x", "distance_sq", "lb_lo", "lb_hi", "lb_lhs", "lb_rhs", "korobov_re",
                        "korobov_im", "korobov_abs", "halasz_m", "halasz_t0", "halasz_bound"};
    for (const auto xi : o->xs) {
      const auto x = static_cast<std::uint64_t>(xi);
      const double d = distance_sq(TwistSpec{o->theta, o->alpha, std::nullopt}, x, *base);
      const auto lb = distance_lower_bound_check(o->theta, o->alpha, x, *base);
      const auto kor = korobov_sum(o->alpha, static_cast<std::uint64_t>(std::floor(lb.interval.lo)),
                                   static_cast<std::uint64_t>(std::floor(lb.interval.hi)), *base);
      const auto hm = halasz_min_distance(o->theta, x, o->T0, *base);
      out.table.add({xi, d, lb.interval.lo, lb.interval.hi, lb.lhs, lb.rhs, kor.real(), kor.imag(),
                     std::abs(kor), hm.m, hm.t0, halasz_bound(hm.m, o->T0)});
    }
    out.config = {{"theta", o->theta}, {"alpha", o->alpha}, {"x", o->xs}, {"T0", o->T0}};
    out.grids = {{"halasz_t0_points", std::max(2, static_cast<int>(std::ceil(4.0 * o->T0)))},
                 {"lower_bound_epsilon", kLowerBoundEpsilon}};
    out.prime_limit = base->limit;
    return out;
  };
}

Runner add_rvh(CLI::App& app) {
  auto* sub = app.add_subcommand("rvh", "Dirichlet sum R_{v,H}(1 + iu) over the ladder set");
  struct Opts {
    std::int64_t X = 0;
    std::optional<double> u, v, H, log_P, log_Q;
    double theta = 0.0;
    bool allow_inverted = false;
    std::string ladder_file;
  };
  auto o = std::make_shared<Opts>();
  sub->add_option("--X", o->X, "Scale X")->required()->transform(kScientificInt);
  sub->add_option("--u", o->u, "Imaginary part u (default (log X)^{1/15})");
  sub->add_option("--v", o->v, "Shift v (default H log P)");
  sub->add_option("--H", o->H, "H (default (log X)^{1/48})");
  sub->add_option("--logP", o->log_P, "log P (default (log X)^{47/48})");
  sub->add_option("--logQ", o->log_Q, "log Q (default log X / log log X)");
  sub->add_option("--theta", o->theta, "f(n) = exp(i theta omega(n))")->capture_default_str();
  sub->add_flag("--allow-inverted", o->allow_inverted, "Treat P > Q as an empty prime interval");
  sub->add_option("--ladder", o->ladder_file, "Ladder record from the ladder subcommand (default: J = 0)")
      ->check(CLI::ExistingFile);
  return [o](std::uint64_t, unsigned threads, std::ostream&) {
    const RvhDefaults d = rvh_defaults(o->X);
    const double lx = std::log(static_cast<double>(o->X));
    const double u = o->u.value_or(std::pow(lx, 1.0 / 15.0));
    const double H = o->H.value_or(d.H);
    const double log_P = o->log_P.value_or(d.log_P);
    const double log_Q = o->log_Q.value_or(d.log_Q);
    const double v = o->v.value_or(H * log_P);
    Ladder L;
    L.X = o->X;
    L.log_x = lx;
    if (!o->ladder_file.empty()) {
      std::ifstream in(o->ladder_file);
      std::stringstream ss;
      ss << in.rdbuf();
      L = ladder_from_text(ss.str());
      L.X = o->X;
      L.log_x = lx;
    }
    const auto [first, last] = rvh_range(o->X, v, H);
    const cplx R = R_vH(u, o->X, v, H, std::exp(log_P), std::exp(log_Q), L, o->theta,
                        RvhOptions{o->allow_inverted, threads});
    const double harmonic = first > last ? 0.0 : harmonic_number(last) - harmonic_number(first - 1);
    Outcome out;
    out.table.header = {"u", "v", "H", "log_P", "log_Q", "first", "last", "re", "im", "abs", "harmonic_sum"};
    out.table.add({u, v, H, log_P, log_Q, first, last, R.real(), R.imag(), std::abs(R), harmonic});
    out.config = {{"X", o->X}, {"u", u}, {"v", v}, {"H", H}, {"logP", log_P}, {"logQ", log_Q},
                  {"theta", o->theta}, {"allow_inverted", o->allow_inverted},
                  {"ladder", o->ladder_file}, {"J", L.J()}};
    out.summary = {{"abs", std::abs(R)}, {"harmonic_sum", harmonic}, {"inverted", log_P > log_Q},
                   {"defaults_inverted", d.inverted}};
    out.prime_limit = isqrt(last) + 1;
    return out;
  };
}

Runner add_charfn(CLI::App& app) {
  auto* sub = app.add_subcommand("charfn", "Window, dyadic and theoretical characteristic functions on a tau grid");
  struct Opts {
    std::int64_t X = 0, h = 0, points = 201, reference_samples = 1'000'000;
    std::optional<std::int64_t> x;
    double tau_min = -5.0, tau_max = 5.0;
  };
  auto o = std::make_shared<Opts>();
  sub->add_option("--X", o->X, "Scale X")->required()->transform(kScientificInt);
  sub->add_option("--h", o->h, "Window length")->required()->transform(kScientificInt);
  sub->add_option("--x", o->x, "Window start (default: drawn from the seed)")->transform(kScientificInt);
  sub->add_option("--tau-min", o->tau_min, "First tau")->capture_default_str();
  sub->add_option("--tau-max", o->tau_max, "Last tau")->capture_default_str();
  sub->add_option("--points", o->points, "Grid points")->capture_default_str();
  sub->add_option("--reference-samples", o->reference_samples, "Dyadic draws when X > 1e8")
      ->capture_default_str()
      ->transform(kScientificInt);
  return [o](std::uint64_t seed, unsigned threads, std::ostream&) {
    ExperimentConfig cfg{o->X, o->h, 1, seed, threads};
    cfg.validate();
    require(o->points >= 2, "charfn: need at least 2 points");
    require(o->tau_min < o->tau_max, "charfn: need tau-min < tau-max");
    require(o->reference_samples >= 2, "charfn: reference-samples must be >= 2");
    const std::int64_t x = o->x.value_or(window_start(cfg, 0));
    const TheoryParams p = TheoryParams::from_X(o->X);
    std::vector<double> taus(static_cast<std::size_t>(o->points));
    for (std::int64_t i = 0; i < o->points; ++i)
      taus[i] = o->tau_min + (o->tau_max - o->tau_min) * static_cast<double>(i) / static_cast<double>(o->points - 1);
    const auto base = cached_base_primes(isqrt(static_cast<std::uint64_t>(x + o->h)) + 1);
    const OmegaSlice slice = omega_window(Window{x, o->h}, *base);
    const SampleMode mode = o->X <= kFullEnumerationLimit
                                ? SampleMode::full()
                                : SampleMode::sampled(static_cast<std::uint64_t>(o->reference_samples), splitmix64(seed));
    const DyadicStats stats = dyadic_stats(o->X, mode, threads);
    const auto w = empirical_charfn(slice, p, taus);
    const auto dy = histogram_charfn(stats.histogram, p, taus, CurveSource::dyadic_empirical);
    const auto th = theoretical_charcurve(p, taus);
    Outcome out;
    out.table.header = {"tau", "re_window", "im_window", "re_dyadic", "im_dyadic", "re_theory", "im_theory"};
    for (std::size_t i = 0; i < taus.size(); ++i)
      out.table.add({taus[i], w.values[i].real(), w.values[i].imag(), dy.values[i].real(),
                     dy.values[i].imag(), th.values[i].real(), th.values[i].imag()});
    out.config = {{"X", o->X}, {"h", o->h}, {"x", x}};
    out.grids = {{"tau_min", o->tau_min}, {"tau_max", o->tau_max}, {"points", o->points}};
    out.summary = {{"T", p.T}, {"reference_mode", mode.is_full() ? "full" : "sampled"},
                   {"reference_count", stats.count}};
    out.prime_limit = base->limit;
    return out;
  };
}

// selftest ----------------------------------------------------------------

struct Check {
  std::string name;
  bool passed = false;
  double value = 0.0;
};

std::vector<Check> self_checks(unsigned threads) {
  std::vector<Check> checks;
  auto add = [&](std::string name, bool ok, double value) { checks.push_back({std::move(name), ok, value}); };

  {
    const Window w{1'000'000'000, 5000};
    const auto slice = omega_window(w, base_primes(isqrt(w.last()) + 1));
    std::uint64_t mismatches = 0;
    for (std::int64_t i = 0; i < w.h; ++i)
      mismatches += slice.omegas[i] != omega_single(static_cast<std::uint64_t>(w.first() + i));
    add("sieve_matches_trial_division", mismatches == 0, static_cast<double>(mismatches));
    std::uint64_t total = 0;
    for (const auto c : slice.histogram) total += c;
    add("histogram_sums_to_h", total == static_cast<std::uint64_t>(w.h), static_cast<double>(total));

    const auto means = unit_circle_means(slice, 64);
    const auto counts = counts_from_unit_circle(means, static_cast<std::uint64_t>(w.h));
    double worst = 0.0;
    for (int k = 0; k < 64; ++k) {
      const double truth = k <= kMaxOmega ? static_cast<double>(slice.histogram[k]) : 0.0;
      worst = std::max(worst, std::abs(counts[k] - truth));
    }
    add("unit_circle_recovers_counts", worst <= 1e-9, worst);
  }

  const double c1 = mertens_c1();
  add("mertens_constant", std::abs(c1 - 0.2614972128476428) <= 1e-9, c1);

  {
    const TheoryParams p = TheoryParams::from_X(1'000'000);
    const auto stats = dyadic_stats(1'000'000, SampleMode::full(), threads);
    const double period = 2.0 * std::numbers::pi * std::sqrt(p.T);
    const double rt = std::sqrt(p.T);
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
      const double tau = -10.0 + i;
      const std::vector<double> pair{tau, tau + period};
      const auto f = histogram_charfn(stats.histogram, p, pair, CurveSource::dyadic_empirical);
      const cplx a = std::polar(1.0, tau * rt) * f.values[0];
      const cplx b = std::polar(1.0, (tau + period) * rt) * f.values[1];
      worst = std::max(worst, std::abs(a - b));
    }
    add("charfn_periodicity", worst <= 1e-9, worst);
    add("char_phi_X_at_zero", std::abs(char_phi_X(0.0, p) - 1.0) <= 1e-15, std::abs(char_phi_X(0.0, p) - 1.0));
  }

  {
    const auto base = base_primes(10'000);
    double worst = 0.0;
    bool nonneg = true;
    for (std::uint64_t i = 0; i < 50; ++i) {
      CounterRng rng(7, i);
      PrimeCharacter f{6.3 * rng.uniform01(), 20.0 * rng.uniform01() - 10.0};
      PrimeCharacter g{6.3 * rng.uniform01(), 20.0 * rng.uniform01() - 10.0};
      PrimeCharacter h{6.3 * rng.uniform01(), 20.0 * rng.uniform01() - 10.0};
      const double fg = distance_sq(f, g, 10'000, base), gh = distance_sq(g, h, 10'000, base),
                   fh = distance_sq(f, h, 10'000, base);
      nonneg = nonneg && fg >= 0.0 && gh >= 0.0 && fh >= 0.0;
      worst = std::max({worst, std::sqrt(fh) - std::sqrt(fg) - std::sqrt(gh), distance_sq(f, f, 10'000, base)});
    }
    add("distance_nonnegative", nonneg, 0.0);
    add("distance_triangle_and_self", worst <= 1e-12, worst);
  }

  {
    const Ladder L = make_ladder(10'000'000, 1.0, 2.0, 2);
    const Ladder back = ladder_from_text(to_text(L));
    add("ladder_text_round_trip", back.log_p == L.log_p && back.log_q == L.log_q && back.eta == L.eta, L.J());
  }

  {
    ExperimentConfig cfg{1'000'000, 1000, 8, 11, 1};
    const auto a = run_theorem1(cfg);
    cfg.threads = std::max(2u, threads);
    const auto b = run_theorem1(cfg);
    bool same = a.rows.size() == b.rows.size();
    for (std::size_t i = 0; same && i < a.rows.size(); ++i)
      same = a.rows[i].x == b.rows[i].x && a.rows[i].disc_phiX == b.rows[i].disc_phiX;
    add("theorem1_thread_independent", same, 0.0);
  }
  return checks;
}

Runner add_selftest(CLI::App& app) {
  app.add_subcommand("selftest", "Run the built-in invariant checks");
  return [](std::uint64_t, unsigned threads, std::ostream& err) {
    const auto checks = self_checks(threads);
    Outcome out;
    out.table.header = {"check", "passed", "value"};
    std::int64_t failures = 0;
    for (const auto& c : checks) {
      out.table.add({c.name, std::int64_t{c.passed}, c.value});
      err << (c.passed ? "PASS " : "FAIL ") << c.name << " (" << format_real(c.value) << ")\n";
      failures += !c.passed;
    }
    out.summary = {{"checks", checks.size()}, {"failures", failures}};
    out.failed = failures > 0;
    return out;
  };
}

// Lines "key = value" of the --config file become "--key value" arguments
// unless the key is already given on the command line. '#' starts a comment.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    else if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return args;
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot read config file " + path);
  auto trim = [](std::string t) {
    const auto b = t.find_first_not_of(" \t\r");
    const auto e = t.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string{} : t.substr(b, e - b + 1);
  };
  auto given = [&](const std::string& flag) {
    return std::any_of(args.begin(), args.end(), [&](const std::string& a) {
      return a == flag || a.rfind(flag + "=", 0) == 0;
    });
  };
  std::vector<std::string> extra;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ParameterError(path + ":" + std::to_string(lineno) + ": expected key=value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    while (!key.empty() && key.front() == '-') key.erase(0, 1);
    if (key.empty() || key == "config") continue;
    if (given("--" + key)) continue;
    extra.push_back("--" + key);
    extra.push_back(value);
  }
  std::vector<std::string> out = args;
  out.insert(out.end(), extra.begin(), extra.end());
  return out;
}

std::uint64_t entropy_seed() {
  std::random_device rd;
  return (std::uint64_t{rd()} << 32) ^ rd();
}

void write_outputs(const std::string& out_base, const std::string& name, const Outcome& o,
                   std::uint64_t seed, unsigned threads, const std::string& started) {
  const std::filesystem::path base(out_base);
  if (base.has_parent_path()) std::filesystem::create_directories(base.parent_path());
  const auto csv_path = std::filesystem::path(out_base + ".csv");
  write_csv(csv_path, o.table);
  if (!o.extra_suffix.empty()) {
    std::ofstream extra(out_base + o.extra_suffix, std::ios::binary | std::ios::trunc);
    extra << o.extra_content;
  }
  json m;
  m["tool_version"] = kToolVersion;
  m["subcommand"] = name;
  flatten(m, "config.", o.config);
  m["seed"] = seed;
  m["threads"] = threads;
  flatten(m, "grid.", o.grids);
  m["prime_table.limit"] = o.prime_limit;
  const char* cache = std::getenv("EK_PRIME_CACHE");
  m["prime_table.cache"] = cache ? cache : "";
  m["started_at"] = started;
  m["finished_at"] = utc_timestamp();
  flatten(m, "summary.", o.summary);
  m["csv_file"] = csv_path.filename().string();
  m["csv_schema"] = "ek." + name + ".v" + std::to_string(kCsvSchemaVersion);
  std::string header;
  for (std::size_t i = 0; i < o.table.header.size(); ++i) header += (i ? "," : "") + o.table.header[i];
  m["csv_columns"] = header;
  write_json(out_base + ".json", m);
}

}  // namespace

std::int64_t parse_scientific_int(const std::string& text) {
  const std::string s = [&] {
    auto b = text.find_first_not_of(" \t");
    auto e = text.find_last_not_of(" \t");
    return b == std::string::npos ? std::string{} : text.substr(b, e - b + 1);
  }();
  if (s.empty()) throw ParameterError("expected an integer, got an empty string");
  if (s.find_first_of(".eE") == std::string::npos) {
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(s, &used, 10);
    } catch (const std::exception&) {
      throw ParameterError("not an integer: " + text);
    }
    if (used != s.size()) throw ParameterError("not an integer: " + text);
    return v;
  }
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || !std::isfinite(v)) throw ParameterError("not a number: " + text);
  if (std::abs(v) > 9007199254740992.0) throw ParameterError("exceeds 2^53: " + text);
  if (v != std::floor(v)) throw ParameterError("not an integer: " + text);
  return static_cast<std::int64_t>(v);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Erdos-Kac short-interval experiments", "ektool"};
  app.require_subcommand(1);
  // -h is taken by the window length.
  app.set_help_flag("--help", "Print this help message and exit");
  app.set_version_flag("--version", kToolVersion);

  std::vector<std::pair<CLI::App*, Runner>> commands;
  auto wire = [&](Runner r) {
    CLI::App* sub = app.get_subcommands({}).back();
    commands.emplace_back(sub, std::move(r));
  };
  wire(add_theorem1(app));
  wire(add_theorem2(app));
  wire(add_prop1(app));
  wire(add_sd_check(app));
  wire(add_ladder(app));
  wire(add_distance(app));
  wire(add_rvh(app));
  wire(add_charfn(app));
  wire(add_selftest(app));

  auto common = std::make_shared<Common>();
  for (auto& [sub, runner] : commands) {
    sub->add_option("--out", common->out, "Output path prefix (default: subcommand name)");
    sub->add_option("--threads", common->threads, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--seed", common->seed, "64-bit seed (default: drawn from entropy and recorded)")
        ->transform(kScientificInt);
    sub->add_option("--config", common->config, "Flat key=value file; command-line flags take precedence");
  }

  std::vector<std::string> expanded;
  try {
    expanded = expand_config(args);
  } catch (const ParameterError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  std::vector<std::string> reversed(expanded.rbegin(), expanded.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    const auto chosen = app.get_subcommands();
    out << (chosen.empty() ? app.help() : chosen.front()->help());
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    const auto chosen = app.get_subcommands();
    err << (chosen.empty() ? app.help() : chosen.front()->help());
    err << "error: " << e.what() << '\n';
    return 2;
  }

  CLI::App* chosen = app.get_subcommands().front();
  const auto it = std::find_if(commands.begin(), commands.end(), [&](const auto& c) { return c.first == chosen; });
  const std::string name = chosen->get_name();
  const std::uint64_t seed = common->seed.value_or(entropy_seed());
  const std::string started = utc_timestamp();
  try {
    const Outcome o = it->second(seed, common->threads, err);
    write_outputs(common->out.empty() ? name : common->out, name, o, seed, common->threads, started);
    return o.failed ? 1 : 0;
  } catch (const ParameterError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return 1;
  }
}

int run(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, std::cout, std::cerr);
}

}  // namespace ek::cli
