#include "srgeo/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <system_error>

namespace srgeo::io {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) v = 0.0;  // drop the sign of -0
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::string json_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size() + 2);
  out += '"';
  for (const char ch : s) {
    switch (ch) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(ch) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", ch);
          out += buf;
        } else {
          out += ch;
        }
    }
  }
  out += '"';
  return out;
}

void Table::add(std::vector<Cell> row) {
  require(row.size() == columns.size(), ErrorCode::PreconditionViolated,
          "row width does not match the header");
  rows.push_back(std::move(row));
}

std::string Table::csv() const {
  auto quote = [](const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) {
      if (ch == '"') q += '"';
      q += ch;
    }
    return q + '"';
  };
  std::string out;
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (c) out += ',';
    out += quote(columns[c]);
  }
  out += '\n';
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      out += row[c].kind == Cell::Kind::Null ? std::string() : quote(row[c].text);
    }
    out += '\n';
  }
  return out;
}

std::string Table::json() const {
  std::vector<std::size_t> order(columns.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return columns[a] < columns[b]; });
  std::string out = "[";
  for (std::size_t r = 0; r < rows.size(); ++r) {
    out += r ? ",\n  {" : "\n  {";
    for (std::size_t n = 0; n < order.size(); ++n) {
      const Cell& cell = rows[r][order[n]];
      if (n) out += ", ";
      out += json_escape(columns[order[n]]);
      out += ": ";
      if (cell.kind == Cell::Kind::String) {
        out += json_escape(cell.text);
      } else if (cell.kind == Cell::Kind::Number &&
                 (cell.text == "nan" || cell.text.find("inf") != std::string::npos)) {
        out += "null";
      } else {
        out += cell.text;
      }
    }
    out += "}";
  }
  out += rows.empty() ? "]\n" : "\n]\n";
  return out;
}

Table catalog_table(const std::vector<ClosedGeodesicRecord>& records) {
  Table t;
  t.columns = {"c", "regime", "lambda", "p", "q", "length", "spiraling", "closure_residual"};
  for (const auto& r : records) {
    t.add({Cell::number(r.torus.c), Cell::string(std::string(to_string(r.torus.regime.tag))),
           r.torus.hclass ? Cell::number(r.torus.hclass->lambda) : Cell::null(),
           Cell::integer(r.p), Cell::integer(r.q), Cell::number(r.length),
           Cell::integer(r.spiraling), Cell::number(r.closure_residual)});
  }
  return t;
}

void atomic_write(const std::filesystem::path& path, std::string_view content) {
  namespace fs = std::filesystem;
  const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
  require(fs::is_directory(dir), ErrorCode::PreconditionViolated,
          "output directory does not exist: " + dir.string());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    require(bool(f), ErrorCode::PreconditionViolated, "cannot open " + tmp.string());
    f.write(content.data(), std::streamsize(content.size()));
    f.flush();
    require(bool(f), ErrorCode::PreconditionViolated, "write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(ErrorCode::PreconditionViolated, "cannot replace " + path.string());
  }
}

}  // namespace srgeo::io
