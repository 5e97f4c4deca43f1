#include "output.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "stit/tessellation_io.hpp"

namespace stit::cli {

CsvTable& CsvTable::row(std::vector<std::string> cells) {
  if (cells.size() != header_.size()) throw std::logic_error("csv row width differs from the header");
  rows_.push_back(std::move(cells));
  return *this;
}

void CsvTable::write(std::ostream& os) const {
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << csv_escape(cells[i]);
    os << '\n';
  };
  line(header_);
  for (const auto& r : rows_) line(r);
}

void CsvTable::save(const std::filesystem::path& path) const {
  std::ostringstream ss;
  write(ss);
  save_text(path, ss.str());
}

std::string csv_escape(const std::string& cell) {
  if (cell.find_first_of(",\"\n") == std::string::npos) return cell;
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string real(double x) { return format_real(x); }
std::string integer(std::int64_t x) { return std::to_string(x); }
std::string flag(bool b) { return b ? "true" : "false"; }

std::string region_label(const CuboidRegion& v) {
  std::string out;
  for (int r = 0; r < v.dim(); ++r) {
    if (r) out += '|';
    out += format_real(v.lower[r]) + ":" + format_real(v.upper[r]);
  }
  return out;
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void write_svg(std::ostream& os, const Tessellation& y) {
  if (y.dim() != 2) throw std::invalid_argument("SVG export needs a 2D tessellation");
  const auto verts = y.window.vertices();
  double x0 = verts[0][0], x1 = x0, y0 = verts[0][1], y1 = y0;
  for (const auto& v : verts) {
    x0 = std::min(x0, v[0]);
    x1 = std::max(x1, v[0]);
    y0 = std::min(y0, v[1]);
    y1 = std::max(y1, v[1]);
  }
  const double stroke = 2e-3 * std::max(x1 - x0, y1 - y0);
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << real(x0) << ' ' << real(y0) << ' ' << real(x1 - x0)
     << ' ' << real(y1 - y0) << "\" width=\"" << real(x1 - x0) << "\" height=\"" << real(y1 - y0) << "\">\n";
  os << "<g transform=\"matrix(1 0 0 -1 0 " << real(y0 + y1) << ")\" fill=\"none\" stroke=\"black\" stroke-width=\""
     << real(stroke) << "\">\n";
  os << "<polygon id=\"window\" points=\"";
  for (std::size_t i = 0; i < verts.size(); ++i)
    os << (i ? " " : "") << real(verts[i][0]) << ',' << real(verts[i][1]);
  os << "\"/>\n";
  for (const auto& ev : y.events) {
    if (ev.facet.points.size() != 2) continue;
    const auto& a = ev.facet.points[0];
    const auto& b = ev.facet.points[1];
    os << "<line x1=\"" << real(a[0]) << "\" y1=\"" << real(a[1]) << "\" x2=\"" << real(b[0]) << "\" y2=\""
       << real(b[1]) << "\"/>\n";
  }
  os << "</g>\n</svg>\n";
}

void save_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
  if (!f) throw std::runtime_error("error while writing " + path.string());
}

} // namespace stit::cli
