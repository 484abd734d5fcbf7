#pragma once

// Column tables with CSV, JSON and aligned-text renderings, and the sweep
// syntax used on the command line.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "jnb/errors.hpp"
#include "jnb/format.hpp"
#include "jnb/json.hpp"

namespace jnb {

using Cell = std::variant<double, std::string>;

struct Table {
  std::string kind;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add_row(std::vector<Cell> row) {
    if (row.size() != columns.size()) {
      throw InternalError("row has " + std::to_string(row.size()) + " cells, table has " +
                          std::to_string(columns.size()) + " columns");
    }
    rows.push_back(std::move(row));
  }

  friend bool operator==(const Table&, const Table&) = default;
};

namespace detail {

/// Whole-string numeric parse; accepts inf and nan.
inline bool parse_real(std::string_view s, double& out) {
  if (s.empty() || std::isspace(static_cast<unsigned char>(s.front()))) return false;
  const std::string buf(s);
  char* end = nullptr;
  const double v = std::strtod(buf.c_str(), &end);
  if (end != buf.c_str() + buf.size()) return false;
  out = v;
  return true;
}

inline bool csv_needs_quotes(const std::string& s) {
  double ignored;
  if (parse_real(s, ignored)) return true;
  if (!s.empty() && (std::isspace(static_cast<unsigned char>(s.front())) ||
                     std::isspace(static_cast<unsigned char>(s.back())))) {
    return true;
  }
  return s.find_first_of(",\"\r\n") != std::string::npos;
}

inline std::string csv_field(const std::string& s) {
  if (!csv_needs_quotes(s)) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + '"';
}

inline std::string cell_text(const Cell& c, int digits) {
  if (const double* v = std::get_if<double>(&c)) return format_real(*v, digits);
  return std::get<std::string>(c);
}

}  // namespace detail

inline std::string to_csv(const Table& t) {
  std::string out;
  auto line = [&](const auto& cells, auto&& render) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += render(cells[i]);
    }
    out += '\n';
  };
  line(t.columns, [](const std::string& s) { return detail::csv_field(s); });
  for (const auto& row : t.rows) {
    line(row, [](const Cell& c) {
      if (const double* v = std::get_if<double>(&c)) return format_real(*v);
      return detail::csv_field(std::get<std::string>(c));
    });
  }
  return out;
}

/// Quoted fields are strings; unquoted fields that parse as numbers are doubles.
inline Table table_from_csv(std::string_view text, std::string kind = {}) {
  std::vector<std::vector<std::pair<std::string, bool>>> records;
  std::vector<std::pair<std::string, bool>> record;
  std::string field;
  bool quoted = false, in_quotes = false, any = false;
  auto end_field = [&] {
    record.emplace_back(std::move(field), quoted);
    field.clear();
    quoted = false;
  };
  auto end_record = [&] {
    end_field();
    records.push_back(std::move(record));
    record.clear();
    any = false;
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (in_quotes) {
      if (ch != '"') {
        field += ch;
      } else if (i + 1 < text.size() && text[i + 1] == '"') {
        field += '"';
        ++i;
      } else {
        in_quotes = false;
      }
      continue;
    }
    any = true;
    if (ch == '"') {
      if (!field.empty() || quoted) throw DomainError("stray quote in CSV field");
      quoted = in_quotes = true;
    } else if (ch == ',') {
      end_field();
    } else if (ch == '\n') {
      end_record();
    } else if (ch != '\r') {
      if (quoted) throw DomainError("text after a closing quote in CSV");
      field += ch;
    }
  }
  if (in_quotes) throw DomainError("unterminated quoted CSV field");
  if (any) end_record();
  if (records.empty()) throw DomainError("CSV has no header line");

  Table t;
  t.kind = std::move(kind);
  for (auto& [name, q] : records.front()) t.columns.push_back(std::move(name));
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != t.columns.size()) {
      throw DomainError("CSV line " + std::to_string(r + 1) + " has " + std::to_string(records[r].size()) +
                        " fields, expected " + std::to_string(t.columns.size()));
    }
    std::vector<Cell> row;
    for (auto& [s, q] : records[r]) {
      double v;
      if (!q && detail::parse_real(s, v)) {
        row.emplace_back(v);
      } else {
        row.emplace_back(std::move(s));
      }
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

inline Json to_json(const Table& t) {
  Json rows = Json::array();
  for (const auto& row : t.rows) {
    Json r = Json::array();
    for (const auto& c : row) {
      if (const double* v = std::get_if<double>(&c)) {
        r.push_back(real_to_json(*v));
      } else {
        r.push_back(std::get<std::string>(c));
      }
    }
    rows.push_back(std::move(r));
  }
  return {{"schema", kSchema}, {"table", t.kind}, {"columns", t.columns}, {"rows", std::move(rows)}};
}

inline std::string to_json_text(const Table& t) { return to_json(t).dump(2) + "\n"; }

/// Strings "inf", "-inf" and "nan" read back as doubles.
inline Table table_from_json(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::exception& e) {
    throw DomainError(std::string("malformed JSON: ") + e.what());
  }
  const Json& schema = detail::field(j, "schema");
  if (schema != kSchema) throw DomainError("unsupported schema " + schema.dump());
  Table t;
  try {
    t.kind = detail::field(j, "table").get<std::string>();
    t.columns = detail::field(j, "columns").get<std::vector<std::string>>();
    for (const auto& r : detail::field(j, "rows")) {
      if (!r.is_array() || r.size() != t.columns.size()) throw DomainError("row width does not match the columns");
      std::vector<Cell> row;
      for (const auto& c : r) {
        if (c.is_number()) {
          row.emplace_back(c.get<double>());
        } else if (c.is_string()) {
          const auto& s = c.get_ref<const std::string&>();
          if (s == "inf" || s == "-inf" || s == "nan") {
            row.emplace_back(real_from_json(c));
          } else {
            row.emplace_back(s);
          }
        } else {
          throw DomainError("table cells must be numbers or strings");
        }
      }
      t.rows.push_back(std::move(row));
    }
  } catch (const Json::exception& e) {
    throw DomainError(std::string("malformed table JSON: ") + e.what());
  }
  return t;
}

/// Right-aligned columns with 6 significant digits.
inline std::string to_pretty(const Table& t) {
  std::vector<std::vector<std::string>> text;
  text.push_back(t.columns);
  for (const auto& row : t.rows) {
    std::vector<std::string> line;
    for (const auto& c : row) line.push_back(detail::cell_text(c, kPrettyDigits));
    text.push_back(std::move(line));
  }
  std::vector<std::size_t> width(t.columns.size(), 0);
  for (const auto& line : text) {
    for (std::size_t i = 0; i < line.size(); ++i) width[i] = std::max(width[i], line[i].size());
  }
  std::string out;
  for (const auto& line : text) {
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (i) out += "  ";
      out.append(width[i] - line[i].size(), ' ');
      out += line[i];
    }
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sweeps

/// k, or k * eps when `relative`.
struct SweepValue {
  double k = 0.0;
  bool relative = false;

  double resolve(double eps) const noexcept { return relative ? k * eps : k; }
  friend bool operator==(const SweepValue&, const SweepValue&) = default;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

inline SweepValue sweep_term(std::string_view s, bool allow_relative) {
  s = trim(s);
  SweepValue v;
  if (!s.empty() && s.back() == 'e') {
    if (!allow_relative) throw DomainError("the 'e' suffix is not allowed here: '" + std::string(s) + "'");
    v.relative = true;
    s.remove_suffix(1);
    if (s.empty()) {
      v.k = 1.0;
      return v;
    }
  }
  if (!parse_real(s, v.k) || !std::isfinite(v.k)) throw DomainError("not a finite number: '" + std::string(s) + "'");
  return v;
}

}  // namespace detail

inline constexpr std::size_t kMaxSweepPoints = 10'000'000;

/// Comma-separated list of values and ranges `start:stop:step`. Ranges step
/// from start and end exactly at stop; a last grid point within half a step
/// of stop is replaced by stop. With `allow_relative`, a trailing 'e' scales
/// a value by eps ("2e" is 2 eps); a range is either all relative or all
/// absolute, with a bare 0 fitting both.
inline std::vector<SweepValue> parse_sweep(std::string_view text, bool allow_relative = false) {
  std::vector<SweepValue> out;
  if (detail::trim(text).empty()) throw DomainError("empty sweep");
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = std::min(text.find(',', pos), text.size());
    const std::string_view item = text.substr(pos, comma - pos);
    pos = comma + 1;
    std::vector<std::string_view> parts;
    for (std::size_t p = 0;;) {
      const std::size_t colon = std::min(item.find(':', p), item.size());
      parts.push_back(item.substr(p, colon - p));
      if (colon == item.size()) break;
      p = colon + 1;
    }
    if (parts.size() == 1) {
      out.push_back(detail::sweep_term(parts[0], allow_relative));
      continue;
    }
    if (parts.size() != 3) throw DomainError("a range is start:stop:step, got '" + std::string(item) + "'");
    SweepValue start = detail::sweep_term(parts[0], allow_relative);
    SweepValue stop = detail::sweep_term(parts[1], allow_relative);
    const SweepValue step = detail::sweep_term(parts[2], allow_relative);
    // 0 is the same value either way
    if (start.k == 0.0) start.relative = step.relative;
    if (stop.k == 0.0) stop.relative = step.relative;
    if (start.relative != stop.relative || start.relative != step.relative) {
      throw DomainError("range '" + std::string(item) + "' mixes absolute values and multiples of eps");
    }
    if (!(step.k > 0.0)) throw DomainError("range step must be positive in '" + std::string(item) + "'");
    if (stop.k < start.k) throw DomainError("range stop is below start in '" + std::string(item) + "'");
    const double steps = std::floor((stop.k - start.k) / step.k + 0.5);
    if (steps + 1 > static_cast<double>(kMaxSweepPoints)) {
      throw DomainError("range '" + std::string(item) + "' has more than " + std::to_string(kMaxSweepPoints) +
                        " points");
    }
    const auto n = static_cast<std::size_t>(steps);
    for (std::size_t k = 0; k < n; ++k) {
      out.push_back({start.k + static_cast<double>(k) * step.k, start.relative});
    }
    out.push_back(stop);
    if (out.size() > kMaxSweepPoints) throw DomainError("sweep has too many points");
  }
  return out;
}

/// Sweep without the 'e' suffix, as plain numbers.
inline std::vector<double> parse_values(std::string_view text) {
  std::vector<double> out;
  for (const auto& v : parse_sweep(text, false)) out.push_back(v.k);
  return out;
}

}  // namespace jnb
