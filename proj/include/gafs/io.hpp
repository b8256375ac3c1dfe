#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "gafs/dynamics.hpp"
#include "gafs/models.hpp"
#include "gafs/types.hpp"

namespace gafs {

/// Round-trip decimal formatting (%.17g); identical doubles give identical text.
std::string format_double(double x);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  void add_row(std::vector<std::string> row);
  const std::vector<std::string>& header() const { return header_; }
  std::size_t rows() const { return rows_.size(); }
  std::string str() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// Writes to a temporary sibling, then renames over the target.
void write_atomic(const std::filesystem::path& path, const std::string& content);

CsvTable points_csv(const PointSet& points);
CsvTable spectral_csv(const SpectralData& data);
/// Appends one bundle under `sample_id`.
void append_trajectories(CsvTable& table, Index sample_id, const TrajectoryBundle& bundle);
CsvTable trajectories_table();
CsvTable separation_csv(const SeparationResult& result);

}  // namespace gafs
