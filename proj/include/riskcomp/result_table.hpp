#ifndef RISKCOMP_RESULT_TABLE_HPP
#define RISKCOMP_RESULT_TABLE_HPP

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

namespace riskcomp::io {

inline constexpr const char* kToolVersion = "riskcomp 0.1.0";

enum class ColumnType { Int, Real, Str };

using Cell = std::variant<std::int64_t, double, std::string>;

/// Schema'd result rows plus the metadata needed to reproduce them
/// (config echo, seed, tool version). Serialization is deterministic:
/// reals carry 17 significant digits so parse(write(t)) == t exactly.
struct ResultTable {
  std::vector<std::string> columns;
  std::vector<ColumnType> types;
  std::vector<std::vector<Cell>> rows;
  nlohmann::json metadata = nlohmann::json::object();

  void add_row(std::vector<Cell> row);

  friend bool operator==(const ResultTable&, const ResultTable&) = default;
};

std::string to_csv(const ResultTable& table);
std::string to_json_text(const ResultTable& table);

ResultTable parse_csv(const std::string& text);
ResultTable parse_json_text(const std::string& text);

/// %.17g rendering used for every real in the tables.
std::string format_real(double value);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

}  // namespace riskcomp::io

#endif  // RISKCOMP_RESULT_TABLE_HPP
