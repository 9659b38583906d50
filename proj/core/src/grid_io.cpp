#include "rotflow/grid_io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "rotflow/error.hpp"

namespace rotflow {

namespace {

std::uint64_t byteswap64(std::uint64_t v) {
  std::uint64_t out = 0;
  for (int i = 0; i < 8; ++i) {
    out = (out << 8) | (v & 0xffu);
    v >>= 8;
  }
  return out;
}

void to_little_endian(std::vector<double> &buf) {
  if constexpr (std::endian::native == std::endian::big) {
    for (double &d : buf) d = std::bit_cast<double>(byteswap64(std::bit_cast<std::uint64_t>(d)));
  }
}

} // namespace

GridSpec GridSpec::square(std::size_t n, double half_width) {
  if (n < 2) throw InvalidInput("square grid needs at least 2 nodes per side");
  const double h = 2.0 * half_width / static_cast<double>(n - 1);
  return {n, n, -half_width, -half_width, h, h};
}

void write_grid(const std::filesystem::path &path, const Grid2D &grid) {
  if (grid.values.size() != grid.spec.size())
    throw InvalidInput("grid '" + grid.name + "': value count does not match its header");
  if (grid.name.empty() || grid.name.find_first_of(" \t\n") != std::string::npos)
    throw InvalidInput("grid field name must be a single non-empty token");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write " + path.string());
  const GridSpec &s = grid.spec;
  out << fmt::format("{} {} {:.17g} {:.17g} {:.17g} {:.17g} {}\n", s.nx, s.ny, s.x0, s.y0, s.dx,
                     s.dy, grid.name);
  std::vector<double> buf = grid.values;
  to_little_endian(buf);
  out.write(reinterpret_cast<const char *>(buf.data()),
            static_cast<std::streamsize>(buf.size() * sizeof(double)));
  if (!out) throw InvalidInput("short write to " + path.string());
}

Grid2D read_grid(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open grid " + path.string());
  std::string header;
  if (!std::getline(in, header)) throw InvalidInput(path.string() + ": missing header line");
  std::istringstream hs(header);
  Grid2D g;
  if (!(hs >> g.spec.nx >> g.spec.ny >> g.spec.x0 >> g.spec.y0 >> g.spec.dx >> g.spec.dy >> g.name))
    throw InvalidInput(path.string() + ": malformed header '" + header + "'");
  if (g.spec.nx == 0 || g.spec.ny == 0 || !(g.spec.dx > 0.0) || !(g.spec.dy > 0.0))
    throw InvalidInput(path.string() + ": degenerate grid header");
  g.values.resize(g.spec.size());
  in.read(reinterpret_cast<char *>(g.values.data()),
          static_cast<std::streamsize>(g.values.size() * sizeof(double)));
  if (in.gcount() != static_cast<std::streamsize>(g.values.size() * sizeof(double)))
    throw InvalidInput(path.string() + ": truncated payload");
  to_little_endian(g.values);
  return g;
}

} // namespace rotflow
