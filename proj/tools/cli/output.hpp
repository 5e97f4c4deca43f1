#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "stit/geometry.hpp"
#include "stit/tessellation.hpp"

namespace stit::cli {

/// Minimal CSV table: a header and rows of preformatted cells.
class CsvTable {
public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  CsvTable& row(std::vector<std::string> cells);
  void write(std::ostream& os) const;
  void save(const std::filesystem::path& path) const;

private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// Cell text: quoted when it contains a comma, quote or newline.
std::string csv_escape(const std::string& cell);

std::string real(double x);
std::string integer(std::int64_t x);
std::string flag(bool b);

/// "lo_1:hi_1|lo_2:hi_2" for [lo, hi[.
std::string region_label(const CuboidRegion& v);

/// 64-bit FNV-1a, printed as 16 hex digits.
std::string fnv1a_hex(const std::string& text);

/// Window frame plus every internal facet, one user unit per length unit,
/// y axis pointing up. 2D only.
void write_svg(std::ostream& os, const Tessellation& y);

void save_text(const std::filesystem::path& path, const std::string& text);

} // namespace stit::cli
