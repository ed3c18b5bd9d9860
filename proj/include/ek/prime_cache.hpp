#pragma once

// Prime tables persisted across runs. When the environment variable
// EK_PRIME_CACHE names a directory, tables are stored there as
// primes_<limit>.bin: little-endian uint64 limit, uint64 count, then the
// gaps between consecutive primes (starting from 0) as uint16.

#include <cstdint>
#include <filesystem>
#include <memory>

#include "ek/sieve.hpp"

namespace ek {

void write_prime_table(const PrimeTable& table, const std::filesystem::path& path);
// Throws std::runtime_error on a malformed or truncated file.
PrimeTable read_prime_table(const std::filesystem::path& path);

// base_primes(limit), shared within the process and backed by EK_PRIME_CACHE.
std::shared_ptr<const PrimeTable> cached_base_primes(std::uint64_t limit);

}  // namespace ek
