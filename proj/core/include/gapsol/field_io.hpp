#pragma once

#include <filesystem>
#include <string>

#include "gapsol/grid.hpp"

namespace gapsol {

/// Writes `path` as CSV (`x,re,im`, 17 significant digits) and a JSON sidecar
/// `path + ".json"` holding domain_length, num_points and description.
void write_field(const std::filesystem::path& path, const ComplexField& f,
                 const std::string& description = "");

struct LoadedField {
  ComplexField field;
  std::string description;
};

/// Reads a field written by write_field. The grid is rebuilt from the sidecar.
LoadedField read_field(const std::filesystem::path& path);

}  // namespace gapsol
