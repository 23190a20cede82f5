#pragma once

#include <iosfwd>
#include <string>

#include "compconj/grid.hpp"

namespace compconj {

// Grid dump format: per axis a header line `axis_<i>_lo,axis_<i>_hi,
// axis_<i>_count` followed by the three values, then a `values` line and the
// row-major samples (one line per run of the last axis). Numbers use %.17g
// and infinities the literals inf / -inf, so a reload is bit-exact.
void write_grid_csv(const GridFn& fn, std::ostream& os);
void write_grid_csv_file(const GridFn& fn, const std::string& path);
GridFn read_grid_csv(std::istream& is);
GridFn read_grid_csv_file(const std::string& path);

}  // namespace compconj
