#include "riskcomp/result_table.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace riskcomp::io {

namespace {

char type_code(ColumnType type) {
  switch (type) {
    case ColumnType::Int:
      return 'i';
    case ColumnType::Real:
      return 'f';
    case ColumnType::Str:
      return 's';
  }
  return '?';
}

ColumnType type_from_code(char code) {
  switch (code) {
    case 'i':
      return ColumnType::Int;
    case 'f':
      return ColumnType::Real;
    case 's':
      return ColumnType::Str;
  }
  throw std::runtime_error("result table: unknown column type code");
}

std::string cell_to_string(const Cell& cell, ColumnType type) {
  switch (type) {
    case ColumnType::Int:
      return std::to_string(std::get<std::int64_t>(cell));
    case ColumnType::Real:
      return format_real(std::get<double>(cell));
    case ColumnType::Str: {
      const std::string& s = std::get<std::string>(cell);
      if (s.find_first_of(",\"\n") != std::string::npos)
        throw std::runtime_error("result table: string cells must not contain , \" or newline");
      return s;
    }
  }
  return {};
}

Cell cell_from_string(const std::string& text, ColumnType type) {
  switch (type) {
    case ColumnType::Int:
      return Cell{static_cast<std::int64_t>(std::stoll(text))};
    case ColumnType::Real:
      return Cell{std::stod(text)};
    case ColumnType::Str:
      return Cell{text};
  }
  return {};
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

}  // namespace

std::string format_real(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

void ResultTable::add_row(std::vector<Cell> row) {
  if (row.size() != columns.size())
    throw std::invalid_argument("result table: row width does not match schema");
  for (std::size_t i = 0; i < row.size(); ++i) {
    const bool ok = (types[i] == ColumnType::Int && std::holds_alternative<std::int64_t>(row[i])) ||
                    (types[i] == ColumnType::Real && std::holds_alternative<double>(row[i])) ||
                    (types[i] == ColumnType::Str && std::holds_alternative<std::string>(row[i]));
    if (!ok) throw std::invalid_argument("result table: cell type does not match schema");
  }
  rows.push_back(std::move(row));
}

std::string to_csv(const ResultTable& table) {
  std::string out;
  out += "# riskcomp-table v1\n";
  out += "# meta ";
  out += table.metadata.dump();
  out += '\n';
  out += "# types ";
  for (std::size_t i = 0; i < table.types.size(); ++i) {
    if (i) out += ',';
    out += type_code(table.types[i]);
  }
  out += '\n';
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    if (i) out += ',';
    out += table.columns[i];
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += cell_to_string(row[i], table.types[i]);
    }
    out += '\n';
  }
  return out;
}

ResultTable parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "# riskcomp-table v1")
    throw std::runtime_error("result table: bad csv header");
  ResultTable table;
  if (!std::getline(in, line) || line.rfind("# meta ", 0) != 0)
    throw std::runtime_error("result table: missing meta line");
  table.metadata = nlohmann::json::parse(line.substr(7));
  if (!std::getline(in, line) || line.rfind("# types ", 0) != 0)
    throw std::runtime_error("result table: missing types line");
  for (const std::string& code : split(line.substr(8), ','))
    table.types.push_back(type_from_code(code.empty() ? '?' : code[0]));
  if (!std::getline(in, line)) throw std::runtime_error("result table: missing column line");
  table.columns = split(line, ',');
  if (table.columns.size() != table.types.size())
    throw std::runtime_error("result table: column/type count mismatch");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> cells = split(line, ',');
    if (cells.size() != table.columns.size())
      throw std::runtime_error("result table: row width mismatch");
    std::vector<Cell> row;
    row.reserve(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i)
      row.push_back(cell_from_string(cells[i], table.types[i]));
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::string to_json_text(const ResultTable& table) {
  nlohmann::json doc;
  doc["format"] = "riskcomp-table";
  doc["version"] = 1;
  doc["metadata"] = table.metadata;
  nlohmann::json columns = nlohmann::json::array();
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    columns.push_back({{"name", table.columns[i]},
                       {"type", std::string(1, type_code(table.types[i]))}});
  }
  doc["columns"] = columns;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : table.rows) {
    nlohmann::json jrow = nlohmann::json::array();
    for (std::size_t i = 0; i < row.size(); ++i) {
      switch (table.types[i]) {
        case ColumnType::Int:
          jrow.push_back(std::get<std::int64_t>(row[i]));
          break;
        case ColumnType::Real:
          jrow.push_back(std::get<double>(row[i]));
          break;
        case ColumnType::Str:
          jrow.push_back(std::get<std::string>(row[i]));
          break;
      }
    }
    rows.push_back(std::move(jrow));
  }
  doc["rows"] = rows;
  return doc.dump(2) + "\n";
}

ResultTable parse_json_text(const std::string& text) {
  const nlohmann::json doc = nlohmann::json::parse(text);
  if (doc.value("format", "") != "riskcomp-table")
    throw std::runtime_error("result table: bad json format tag");
  ResultTable table;
  table.metadata = doc.at("metadata");
  for (const auto& column : doc.at("columns")) {
    table.columns.push_back(column.at("name").get<std::string>());
    const std::string code = column.at("type").get<std::string>();
    table.types.push_back(type_from_code(code.empty() ? '?' : code[0]));
  }
  for (const auto& jrow : doc.at("rows")) {
    std::vector<Cell> row;
    row.reserve(jrow.size());
    for (std::size_t i = 0; i < jrow.size(); ++i) {
      switch (table.types[i]) {
        case ColumnType::Int:
          row.push_back(Cell{jrow[i].get<std::int64_t>()});
          break;
        case ColumnType::Real:
          row.push_back(Cell{jrow[i].get<double>()});
          break;
        case ColumnType::Str:
          row.push_back(Cell{jrow[i].get<std::string>()});
          break;
      }
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace riskcomp::io
