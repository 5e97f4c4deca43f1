#include "stit/tessellation_io.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace stit {

std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

void write_points(std::ostream& os, const std::vector<Vector>& pts, int dim) {
  os << ' ' << pts.size();
  for (const auto& p : pts)
    for (int r = 0; r < dim; ++r) os << ' ' << format_real(p[r]);
}

class LineReader {
public:
  explicit LineReader(std::istream& is) : is_(is) {}

  std::istringstream next(const std::string& expected_tag) {
    std::string line;
    do {
      if (!std::getline(is_, line)) fail("unexpected end of input, expected '" + expected_tag + "'");
      ++line_no_;
    } while (line.empty());
    std::istringstream ss(line);
    std::string tag;
    ss >> tag;
    if (tag != expected_tag) fail("expected '" + expected_tag + "', found '" + tag + "'");
    return ss;
  }

  template <class T>
  T read(std::istringstream& ss, const char* what) {
    T v{};
    if (!(ss >> v)) fail(std::string("could not read ") + what);
    return v;
  }

  double read_real(std::istringstream& ss, const char* what) {
    std::string tok;
    if (!(ss >> tok)) fail(std::string("could not read ") + what);
    try {
      std::size_t used = 0;
      const double v = std::stod(tok, &used);
      if (used != tok.size()) fail(std::string("malformed number for ") + what);
      return v;
    } catch (const std::logic_error&) {
      fail(std::string("malformed number for ") + what);
    }
  }

  std::vector<Vector> read_points(std::istringstream& ss, int dim) {
    const auto n = read<std::size_t>(ss, "point count");
    std::vector<Vector> pts;
    for (std::size_t i = 0; i < n; ++i) {
      Vector v(dim);
      for (int r = 0; r < dim; ++r) v[r] = read_real(ss, "coordinate");
      pts.push_back(v);
    }
    return pts;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw std::runtime_error("tessellation file line " + std::to_string(line_no_) + ": " + msg);
  }

private:
  std::istream& is_;
  int line_no_ = 0;
};

} // namespace

void write_tessellation(std::ostream& os, const Tessellation& y) {
  const int dim = y.dim();
  os << "stit-tessellation 1\n";
  os << "dim " << dim << '\n';
  os << "t " << format_real(y.time) << '\n';
  os << "seed " << y.seed << '\n';
  os << "window";
  write_points(os, {y.window.vertices().begin(), y.window.vertices().end()}, dim);
  os << '\n';
  os << "cells " << y.cells.size() << '\n';
  os << "events " << y.events.size() << '\n';
  for (const auto& c : y.cells) {
    os << "cell " << c.id << ' ' << (c.parent_id ? *c.parent_id : -1) << ' ' << format_real(c.birth_time);
    write_points(os, {c.polytope.vertices().begin(), c.polytope.vertices().end()}, dim);
    os << '\n';
  }
  for (const auto& ev : y.events) {
    os << "event " << format_real(ev.time) << ' ' << ev.cell_id;
    for (int r = 0; r < dim; ++r) os << ' ' << format_real(ev.hyperplane.normal()[r]);
    os << ' ' << format_real(ev.hyperplane.offset()) << ' ' << (ev.censored ? 1 : 0);
    write_points(os, ev.facet.points, dim);
    os << '\n';
  }
}

TessellationRecord read_tessellation(std::istream& is) {
  LineReader in(is);
  TessellationRecord rec;
  {
    auto ss = in.next("stit-tessellation");
    if (in.read<int>(ss, "format version") != 1) in.fail("unsupported format version");
  }
  {
    auto ss = in.next("dim");
    rec.dim = in.read<int>(ss, "dimension");
    if (rec.dim != 2 && rec.dim != 3) in.fail("dimension must be 2 or 3");
  }
  {
    auto ss = in.next("t");
    rec.t = in.read_real(ss, "t");
  }
  {
    auto ss = in.next("seed");
    rec.seed = in.read<std::uint64_t>(ss, "seed");
  }
  {
    auto ss = in.next("window");
    rec.window = in.read_points(ss, rec.dim);
  }
  std::size_t n_cells = 0, n_events = 0;
  {
    auto ss = in.next("cells");
    n_cells = in.read<std::size_t>(ss, "cell count");
  }
  {
    auto ss = in.next("events");
    n_events = in.read<std::size_t>(ss, "event count");
  }
  for (std::size_t i = 0; i < n_cells; ++i) {
    auto ss = in.next("cell");
    TessellationRecord::CellRow row;
    row.id = in.read<std::int64_t>(ss, "cell id");
    row.parent = in.read<std::int64_t>(ss, "parent id");
    row.birth_time = in.read_real(ss, "birth time");
    row.vertices = in.read_points(ss, rec.dim);
    rec.cells.push_back(std::move(row));
  }
  for (std::size_t i = 0; i < n_events; ++i) {
    auto ss = in.next("event");
    TessellationRecord::EventRow row;
    row.time = in.read_real(ss, "event time");
    row.cell_id = in.read<std::int64_t>(ss, "cell id");
    row.normal = Vector(rec.dim);
    for (int r = 0; r < rec.dim; ++r) row.normal[r] = in.read_real(ss, "normal");
    row.offset = in.read_real(ss, "offset");
    row.censored = in.read<int>(ss, "censored flag") != 0;
    row.facet = in.read_points(ss, rec.dim);
    rec.events.push_back(std::move(row));
  }
  std::string extra;
  while (std::getline(is, extra))
    if (!extra.empty()) in.fail("trailing content after the declared rows");
  return rec;
}

} // namespace stit
