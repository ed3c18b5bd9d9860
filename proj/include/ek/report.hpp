#pragma once

// CSV tables and JSON run manifests. Reals are written with 17 significant
// digits so that reruns diff cleanly; integers are written exactly.

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace ek {

inline constexpr int kCsvSchemaVersion = 1;

using Cell = std::variant<std::int64_t, std::uint64_t, double, std::string>;

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row);
};

std::string format_real(double v);
std::string format_cell(const Cell& c);
// Quotes fields containing a comma, quote, CR or LF; CRLF line ends are not used.
std::string csv_escape(const std::string& field);

void write_csv(std::ostream& out, const Table& table);
void write_csv(const std::filesystem::path& path, const Table& table);
void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& doc);

// UTC, ISO 8601 with seconds.
std::string utc_timestamp();

}  // namespace ek
