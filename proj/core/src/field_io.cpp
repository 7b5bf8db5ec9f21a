#include "gapsol/field_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include "json.hpp"
#include <sstream>
#include <vector>

#include "gapsol/errors.hpp"

namespace gapsol {

namespace {

std::filesystem::path sidecar(const std::filesystem::path& path) {
  return std::filesystem::path(path.string() + ".json");
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(std::string_view s, const std::filesystem::path& path) {
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw InvalidArgument("malformed number '" + std::string(s) + "' in " + path.string());
  return v;
}

}  // namespace

void write_field(const std::filesystem::path& path, const ComplexField& f,
                 const std::string& description) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot open " + path.string() + " for writing");
  out << "x,re,im\n";
  const Grid& g = f.grid();
  for (std::size_t i = 0; i < f.size(); ++i)
    out << fmt17(g.x(i)) << ',' << fmt17(f[i].real()) << ',' << fmt17(f[i].imag()) << '\n';

  nlohmann::json meta = {{"domain_length", g.length()},
                         {"num_points", g.size()},
                         {"description", description}};
  std::ofstream js(sidecar(path));
  js << meta.dump(2) << '\n';
  if (!out || !js) throw InvalidArgument("failed writing " + path.string());
}

LoadedField read_field(const std::filesystem::path& path) {
  std::ifstream js(sidecar(path));
  if (!js) throw InvalidArgument("missing sidecar for " + path.string());
  nlohmann::json meta;
  try {
    js >> meta;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument("bad sidecar for " + path.string() + ": " + e.what());
  }
  auto grid = make_grid(meta.at("domain_length").get<double>(),
                        meta.at("num_points").get<std::size_t>());

  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path.string());
  std::string line;
  std::getline(in, line);
  if (line != "x,re,im") throw InvalidArgument("unexpected header in " + path.string());
  std::vector<cplx> values;
  values.reserve(grid->size());
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
      throw InvalidArgument("malformed row in " + path.string());
    std::string_view sv(line);
    values.emplace_back(parse_double(sv.substr(c1 + 1, c2 - c1 - 1), path),
                        parse_double(sv.substr(c2 + 1), path));
  }
  return {ComplexField(grid, std::move(values)), meta.value("description", std::string())};
}

}  // namespace gapsol
