#pragma once

// Deterministic text output: CSV tables, flat JSON records and atomic file
// replacement.

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "srgeo/catalog.hpp"

namespace srgeo::io {

/// Shortest form that keeps 17 significant digits ("%.17g" without locale).
std::string format_double(double v);

/// A cell that is already rendered: numbers are raw, strings are quoted in
/// JSON output and null stays null.
struct Cell {
  enum class Kind { Number, String, Null, Bool };
  Kind kind = Kind::Null;
  std::string text;

  static Cell number(double v) { return {Kind::Number, format_double(v)}; }
  static Cell integer(long v) { return {Kind::Number, std::to_string(v)}; }
  static Cell string(std::string s) { return {Kind::String, std::move(s)}; }
  static Cell boolean(bool b) { return {Kind::Bool, b ? "true" : "false"}; }
  static Cell null() { return {Kind::Null, "null"}; }
};

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row);
  /// Comma separated, header row, LF line endings.
  std::string csv() const;
  /// Array of objects with keys sorted, one object per line.
  std::string json() const;
};

std::string json_escape(std::string_view s);

/// Catalog records as a JSON array with the fields c, regime, lambda, p, q,
/// length, spiraling, closure_residual (lambda is null for the identity class).
Table catalog_table(const std::vector<ClosedGeodesicRecord>& records);

/// Writes to a sibling temporary file and renames it over `path`.
void atomic_write(const std::filesystem::path& path, std::string_view content);

}  // namespace srgeo::io
