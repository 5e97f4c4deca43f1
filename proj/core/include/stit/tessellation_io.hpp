#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "stit/tessellation.hpp"

namespace stit {

/// Shortest-safe decimal rendering: 17 significant digits, round-trips exactly.
std::string format_real(double x);

/// Writes the text format:
///
///   stit-tessellation 1
///   dim <l>
///   t <t>
///   seed <seed>
///   window <nv> <x_1 .. x_l> ...
///   cells <n>
///   events <m>
///   cell <id> <parent|-1> <birth> <nv> <vertex coords> ...      (n rows)
///   event <time> <cell> <normal> <offset> <censored> <np> <facet coords> (m rows)
///
/// Reals are printed with 17 significant digits.
void write_tessellation(std::ostream& os, const Tessellation& y);

/// Parsed form of the text format; plain numbers, no geometry rebuilt.
struct TessellationRecord {
  struct CellRow {
    std::int64_t id = 0;
    std::int64_t parent = -1;
    double birth_time = 0.0;
    std::vector<Vector> vertices;
  };
  struct EventRow {
    double time = 0.0;
    std::int64_t cell_id = 0;
    Vector normal;
    double offset = 0.0;
    bool censored = false;
    std::vector<Vector> facet;
  };

  int dim = 2;
  double t = 0.0;
  std::uint64_t seed = 0;
  std::vector<Vector> window;
  std::vector<CellRow> cells;
  std::vector<EventRow> events;
};

/// Throws std::runtime_error with the offending line number on malformed input.
TessellationRecord read_tessellation(std::istream& is);

} // namespace stit
