#pragma once

#include "sbts/core.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>

namespace sbts::io {

// Long-form panel CSV:
//
//   sample,t_index,f0,...,f{d-1}
//   0,0,0.1,...
//
// Rows are sorted by (sample, t_index) and every (sample, t_index) pair is
// present. Grid times are not stored; the caller supplies the grid.

void write_panel_csv(std::ostream& out, const Panel& panel);
Panel read_panel_csv(std::istream& in, const TimeGrid& grid);

Panel read_panel_csv(const std::filesystem::path& path, const TimeGrid& grid);

//! Shortest text that parses back to exactly `value`.
std::string format_double(double value);

//! Writes `contents` to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path,
                       const std::string& contents);

std::string read_file(const std::filesystem::path& path);

} // namespace sbts::io
