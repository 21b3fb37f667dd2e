#pragma once

// Curve tables as CSV (`k,<names>`) or JSON (`{"k": [...], "<name>": [...]}`).
// Numbers are written with 9 significant digits.

#include <cmath>
#include <cstddef>
#include <cstdio>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "elolab/errors.hpp"
#include "json.hpp"

namespace elolab {

struct CurveTable {
  std::string key_name = "k";
  std::vector<double> key;
  std::vector<std::pair<std::string, std::vector<double>>> columns;

  CurveTable& add(std::string name, std::vector<double> values) {
    detail::require(values.size() == key.size(), "curve '" + name + "' does not match the key length");
    columns.emplace_back(std::move(name), std::move(values));
    return *this;
  }

  template <typename Int>
  static CurveTable with_key(std::string name, const std::vector<Int>& key) {
    CurveTable t;
    t.key_name = std::move(name);
    t.key.assign(key.begin(), key.end());
    return t;
  }
};

inline std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

inline void write_curves_csv(std::ostream& out, const CurveTable& table) {
  out << table.key_name;
  for (const auto& [name, _] : table.columns) out << ',' << name;
  out << '\n';
  for (std::size_t r = 0; r < table.key.size(); ++r) {
    out << format_number(table.key[r]);
    for (const auto& [_, values] : table.columns) out << ',' << format_number(values[r]);
    out << '\n';
  }
}

// Round-trips through the 9-digit text form so the JSON serializer emits the
// same digits as the CSV writer. Non-finite values become null.
inline nlohmann::ordered_json json_number(double x) {
  if (!std::isfinite(x)) return nullptr;
  return std::stod(format_number(x));
}

inline nlohmann::ordered_json curves_to_json(const CurveTable& table) {
  auto column = [](const std::vector<double>& values) {
    auto arr = nlohmann::ordered_json::array();
    for (double x : values) arr.push_back(json_number(x));
    return arr;
  };
  nlohmann::ordered_json j;
  j[table.key_name] = column(table.key);
  for (const auto& [name, values] : table.columns) j[name] = column(values);
  return j;
}

}  // namespace elolab
