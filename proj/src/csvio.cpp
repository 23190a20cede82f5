#include "compconj/csvio.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace compconj {

namespace {
std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}
std::string fmt_ext(ExtReal v) {
  if (v.is_plus_inf()) return "inf";
  if (v.is_minus_inf()) return "-inf";
  return fmt(v.value());
}
double parse_value(const std::string& tok) {
  if (tok == "inf") return std::numeric_limits<double>::infinity();
  if (tok == "-inf") return -std::numeric_limits<double>::infinity();
  return std::stod(tok);
}
}  // namespace

void write_grid_csv(const GridFn& fn, std::ostream& os) {
  const Grid& g = fn.grid();
  for (int a = 0; a < g.dim(); ++a) {
    os << "axis_" << (a + 1) << "_lo,axis_" << (a + 1) << "_hi,axis_" << (a + 1)
       << "_count\n";
    os << fmt(g.axis(a).lo) << "," << fmt(g.axis(a).hi) << "," << g.axis(a).count
       << "\n";
  }
  os << "values\n";
  std::size_t run = static_cast<std::size_t>(g.axis(g.dim() - 1).count);
  for (std::size_t i = 0; i < fn.size(); i += run) {
    for (std::size_t j = 0; j < run; ++j) {
      if (j) os << ",";
      os << fmt_ext(fn[i + j]);
    }
    os << "\n";
  }
}

void write_grid_csv_file(const GridFn& fn, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  write_grid_csv(fn, os);
}

GridFn read_grid_csv(std::istream& is) {
  std::vector<Axis> axes;
  std::string line;
  while (std::getline(is, line)) {
    if (line == "values") break;
    if (line.rfind("axis_", 0) == 0) {
      if (!std::getline(is, line)) throw std::runtime_error("truncated axis line");
      std::stringstream ss(line);
      std::string lo, hi, count;
      std::getline(ss, lo, ',');
      std::getline(ss, hi, ',');
      std::getline(ss, count, ',');
      axes.push_back(Axis{parse_value(lo), parse_value(hi), std::stoi(count)});
    }
  }
  Grid grid(axes);
  std::vector<ExtReal> vals;
  vals.reserve(grid.size());
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ','))
      vals.push_back(ExtReal::from_double(parse_value(tok)));
  }
  return GridFn(grid, std::move(vals));
}

GridFn read_grid_csv_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  return read_grid_csv(is);
}

}  // namespace compconj
