#include <doctest.h>

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ek/cli.hpp"
#include "ek/error.hpp"
#include "ek/prime_cache.hpp"
#include "ek/report.hpp"

namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("ek_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

int call(std::vector<std::string> args, std::string* err_text = nullptr) {
  std::ostringstream out, err;
  const int code = ek::cli::run(args, out, err);
  if (err_text) *err_text = err.str();
  return code;
}

std::string first_line(const std::string& text) { return text.substr(0, text.find('\n')); }

}  // namespace

TEST_CASE("parse_scientific_int") {
  using ek::cli::parse_scientific_int;
  CHECK(parse_scientific_int("250000") == 250000);
  CHECK(parse_scientific_int("1e9") == 1'000'000'000);
  CHECK(parse_scientific_int("2.5e3") == 2500);
  CHECK(parse_scientific_int(" 1E6 ") == 1'000'000);
  CHECK(parse_scientific_int("9007199254740992") == 9007199254740992);
  CHECK(parse_scientific_int("4611686018427387904") == 4611686018427387904);
  CHECK_THROWS_AS(parse_scientific_int("1.5"), ek::ParameterError);
  CHECK_THROWS_AS(parse_scientific_int("1e17"), ek::ParameterError);
  CHECK_THROWS_AS(parse_scientific_int("12abc"), ek::ParameterError);
  CHECK_THROWS_AS(parse_scientific_int(""), ek::ParameterError);
  CHECK_THROWS_AS(parse_scientific_int("1e"), ek::ParameterError);
}

TEST_CASE("csv and number formatting") {
  CHECK(ek::format_real(0.1) == "0.10000000000000001");
  CHECK(ek::format_real(1.0) == "1");
  CHECK(ek::format_real(NAN) == "nan");
  CHECK(ek::format_real(-INFINITY) == "-inf");
  CHECK(std::stod(ek::format_real(M_PI)) == M_PI);
  CHECK(ek::csv_escape("plain") == "plain");
  CHECK(ek::csv_escape("a,b") == "\"a,b\"");
  CHECK(ek::csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(ek::csv_escape("two\nlines") == "\"two\nlines\"");
  ek::Table t;
  t.header = {"a", "b"};
  t.add({std::int64_t{-3}, std::string{"x,y"}});
  t.add({std::uint64_t{18446744073709551615ull}, 0.5});
  CHECK_THROWS_AS(t.add({0.5}), ek::ParameterError);
  std::ostringstream s;
  ek::write_csv(s, t);
  CHECK(s.str() == "a,b\n-3,\"x,y\"\n18446744073709551615,0.5\n");
}

TEST_CASE("prime table cache file") {
  TempDir dir;
  const auto table = ek::base_primes(200'000);
  ek::write_prime_table(table, dir / "p.bin");
  const auto back = ek::read_prime_table(dir / "p.bin");
  CHECK(back.limit == table.limit);
  CHECK(back.primes == table.primes);
  {
    std::ofstream trunc(dir / "bad.bin", std::ios::binary);
    trunc << "short";
  }
  CHECK_THROWS_AS(ek::read_prime_table(dir / "bad.bin"), std::runtime_error);
  CHECK_THROWS_AS(ek::read_prime_table(dir / "missing.bin"), std::runtime_error);
  const auto a = ek::cached_base_primes(5000);
  const auto b = ek::cached_base_primes(5000);
  CHECK(a == b);
  CHECK(a->primes == ek::base_primes(5000).primes);
}

TEST_CASE("subcommands write csv and manifest") {
  TempDir dir;
  const std::string base = dir / "t1";
  REQUIRE(call({"theorem1", "--X", "1e6", "--h", "1000", "--samples", "5", "--seed", "3", "--out", base,
                "--threads", "1"}) == 0);
  const auto csv = slurp(base + ".csv");
  CHECK(first_line(csv) == "index,x,disc_phiX,disc_phi");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 6);
  const auto m = nlohmann::json::parse(slurp(base + ".json"));
  CHECK(m["subcommand"] == "theorem1");
  CHECK(m["seed"] == 3);
  CHECK(m["config.X"] == 1'000'000);
  CHECK(m["csv_schema"] == "ek.theorem1.v1");
  CHECK(m["csv_columns"] == "index,x,disc_phiX,disc_phi");
  CHECK(m.contains("summary.disc_phiX.q50"));

  REQUIRE(call({"sd-check", "--X", "100000", "--t", "0.5", "1.0", "--out", dir / "sd", "--seed", "1"}) == 0);
  CHECK(first_line(slurp(dir / "sd.csv")) == "t,re_emp,im_emp,re_theory,im_theory,rel_err");
}

TEST_CASE("bad input exits with status 2") {
  TempDir dir;
  std::string err;
  CHECK(call({"theorem1", "--X", "1e6", "--h", "100", "--bogus", "1"}, &err) == 2);
  CHECK(err.find("error:") != std::string::npos);
  CHECK(call({"theorem1", "--X", "1e6", "--h", "1e7", "--out", dir / "x"}, &err) == 2);
  CHECK(call({"theorem1", "--h", "100"}, &err) == 2);
  CHECK(call({"theorem2", "--X", "1e6", "--h", "100", "--k", "0", "--out", dir / "y"}, &err) == 2);
  CHECK(call({"theorem1", "--X", "1.5", "--h", "1"}, &err) == 2);
  CHECK(call({}, &err) == 2);
  CHECK(call({"--version"}) == 0);
  CHECK(call({"theorem1", "--help"}) == 0);
}

TEST_CASE("selftest passes") {
  TempDir dir;
  std::string err;
  CHECK(call({"selftest", "--out", dir / "self", "--seed", "1"}, &err) == 0);
  CHECK(err.find("FAIL") == std::string::npos);
}

TEST_CASE("csv bytes do not depend on the thread count") {
  TempDir dir;
  for (const std::string sub : {"theorem1", "theorem2", "prop1"}) {
    std::vector<std::string> args{sub, "--X", "1e6", "--h", "5000", "--samples", "12", "--seed", "77"};
    if (sub == "theorem2") args.insert(args.end(), {"--k", "3"});
    auto one = args, four = args;
    one.insert(one.end(), {"--threads", "1", "--out", dir / (sub + "_1")});
    four.insert(four.end(), {"--threads", "4", "--out", dir / (sub + "_4")});
    REQUIRE(call(one) == 0);
    REQUIRE(call(four) == 0);
    CHECK(slurp(dir / (sub + "_1.csv")) == slurp(dir / (sub + "_4.csv")));
  }
}

TEST_CASE("config file supplies flags the command line omits") {
  TempDir dir;
  {
    std::ofstream cfg(dir / "run.cfg");
    cfg << "# sample config\nX = 1e6\nh=2000\nsamples = 4\nseed = \"9\"\n--threads = 2\n";
  }
  REQUIRE(call({"theorem1", "--config", dir / "run.cfg", "--h", "3000", "--out", dir / "c"}) == 0);
  const auto m = nlohmann::json::parse(slurp(dir / "c.json"));
  CHECK(m["config.X"] == 1'000'000);
  CHECK(m["config.h"] == 3000);
  CHECK(m["config.samples"] == 4);
  CHECK(m["seed"] == 9);
  CHECK(m["threads"] == 2);
  {
    std::ofstream bad(dir / "bad.cfg");
    bad << "X 1e6\n";
  }
  CHECK(call({"theorem1", "--config", dir / "bad.cfg", "--h", "10"}) == 2);
  CHECK(call({"theorem1", "--config", dir / "absent.cfg", "--h", "10"}) == 2);
}

TEST_CASE("an omitted seed is drawn and recorded") {
  TempDir dir;
  REQUIRE(call({"theorem1", "--X", "1e6", "--h", "500", "--samples", "3", "--out", dir / "a"}) == 0);
  const auto m = nlohmann::json::parse(slurp(dir / "a.json"));
  REQUIRE(m["seed"].is_number_unsigned());
  const auto seed = m["seed"].get<std::uint64_t>();
  REQUIRE(call({"theorem1", "--X", "1e6", "--h", "500", "--samples", "3", "--seed", std::to_string(seed), "--out",
                dir / "b"}) == 0);
  CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));
}
