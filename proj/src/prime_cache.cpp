#include "ek/prime_cache.hpp"

#include <array>
#include <cstdlib>
#include <fstream>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>

namespace ek {

namespace {

void put_u64(std::ostream& out, std::uint64_t v) {
  std::array<char, 8> b;
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  out.write(b.data(), 8);
}

std::uint64_t get_u64(std::istream& in) {
  std::array<unsigned char, 8> b;
  if (!in.read(reinterpret_cast<char*>(b.data()), 8)) throw std::runtime_error("prime table: truncated header");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= std::uint64_t{b[i]} << (8 * i);
  return v;
}

}  // namespace

void write_prime_table(const PrimeTable& table, const std::filesystem::path& path) {
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("prime table: cannot write " + tmp);
    put_u64(out, table.limit);
    put_u64(out, table.primes.size());
    std::uint32_t prev = 0;
    for (const std::uint32_t p : table.primes) {
      const std::uint32_t gap = p - prev;
      if (gap > 0xFFFF) throw std::runtime_error("prime table: gap exceeds 16 bits");
      const char b[2] = {static_cast<char>(gap & 0xFF), static_cast<char>(gap >> 8)};
      out.write(b, 2);
      prev = p;
    }
    if (!out) throw std::runtime_error("prime table: write failed for " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

PrimeTable read_prime_table(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("prime table: cannot open " + path.string());
  PrimeTable table;
  table.limit = get_u64(in);
  const std::uint64_t count = get_u64(in);
  if (count > table.limit) throw std::runtime_error("prime table: count exceeds limit");
  table.primes.resize(count);
  std::uint64_t p = 0;
  for (std::uint64_t i = 0; i < count; ++i) {
    unsigned char b[2];
    if (!in.read(reinterpret_cast<char*>(b), 2)) throw std::runtime_error("prime table: truncated body");
    p += b[0] | (unsigned{b[1]} << 8);
    if (p > table.limit) throw std::runtime_error("prime table: prime exceeds limit");
    table.primes[i] = static_cast<std::uint32_t>(p);
  }
  return table;
}

std::shared_ptr<const PrimeTable> cached_base_primes(std::uint64_t limit) {
  static std::mutex mutex;
  static std::map<std::uint64_t, std::shared_ptr<const PrimeTable>> memo;
  std::lock_guard lock(mutex);
  if (const auto it = memo.find(limit); it != memo.end()) return it->second;

  std::shared_ptr<const PrimeTable> table;
  const char* dir = std::getenv("EK_PRIME_CACHE");
  if (dir && *dir) {
    const std::filesystem::path file =
        std::filesystem::path(dir) / ("primes_" + std::to_string(limit) + ".bin");
    std::error_code ec;
    if (std::filesystem::exists(file, ec)) {
      try {
        auto loaded = read_prime_table(file);
        if (loaded.limit == limit) table = std::make_shared<const PrimeTable>(std::move(loaded));
      } catch (const std::runtime_error&) {
        // Rebuilt and overwritten below.
      }
    }
    if (!table) {
      table = std::make_shared<const PrimeTable>(base_primes(limit));
      std::filesystem::create_directories(dir, ec);
      try {
        write_prime_table(*table, file);
      } catch (const std::exception&) {
      }
    }
  } else {
    table = std::make_shared<const PrimeTable>(base_primes(limit));
  }
  memo.emplace(limit, table);
  return table;
}

}  // namespace ek
