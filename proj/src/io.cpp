#include "gafs/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

namespace gafs {

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void CsvTable::add_row(std::vector<std::string> row) {
  if (row.size() != header_.size())
    throw InvalidDimension("CSV row has " + std::to_string(row.size()) + " fields, header has " +
                           std::to_string(header_.size()));
  rows_.push_back(std::move(row));
}

std::string CsvTable::str() const {
  std::ostringstream os;
  auto line = [&](const std::vector<std::string>& xs) {
    for (std::size_t i = 0; i < xs.size(); ++i) os << (i ? "," : "") << xs[i];
    os << '\n';
  };
  line(header_);
  for (const auto& r : rows_) line(r);
  return os.str();
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + tmp.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw Error("write to " + tmp.string() + " failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error("rename " + tmp.string() + " -> " + path.string() + ": " + ec.message());
}

CsvTable points_csv(const PointSet& points) {
  CsvTable t({"re", "im", "provenance"});
  for (Complex z : points.points) t.add_row({format_double(z.real()), format_double(z.imag()), to_string(points.provenance)});
  return t;
}

CsvTable spectral_csv(const SpectralData& data) {
  CsvTable t({"phase_re", "phase_im", "weight"});
  for (Index k = 0; k < data.phases.size(); ++k)
    t.add_row({format_double(data.phases[k].real()), format_double(data.phases[k].imag()),
               format_double(data.weights[k])});
  return t;
}

CsvTable trajectories_table() { return CsvTable({"sample_id", "t", "path_id", "re", "im"}); }

void append_trajectories(CsvTable& table, Index sample_id, const TrajectoryBundle& bundle) {
  for (std::size_t i = 0; i < bundle.t_grid.size(); ++i)
    for (Index j = 0; j < bundle.paths.rows(); ++j) {
      const Complex z = bundle.paths(j, static_cast<Index>(i));
      table.add_row({std::to_string(sample_id), format_double(bundle.t_grid[i]), std::to_string(j),
                     format_double(z.real()), format_double(z.imag())});
    }
}

CsvTable separation_csv(const SeparationResult& result) {
  CsvTable t({"n", "t", "alpha", "inner_count", "annulus_count", "outer_count", "pass"});
  for (const auto& r : result.rows)
    t.add_row({std::to_string(r.n), format_double(r.t), format_double(r.alpha), std::to_string(r.inner_count),
               std::to_string(r.annulus_count), std::to_string(r.outer_count), r.pass ? "1" : "0"});
  return t;
}

}  // namespace gafs
