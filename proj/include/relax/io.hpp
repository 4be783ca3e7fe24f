#pragma once

#include "relax/diagnostics.hpp"
#include "relax/validator.hpp"

#include <filesystem>
#include <ostream>

namespace relax {

/// Quotes a CSV field if it contains a comma, quote or newline.
std::string csv_field(const std::string& s);

void write_report_csv(std::ostream& os, const ValidationReport& report);
void write_snapshot_csv(std::ostream& os, const SpatialGrid& grid, const FieldState& state);
void write_reference_csv(std::ostream& os, const SpatialGrid& grid, const Matrix& u);
void write_step_log_csv(std::ostream& os, const Trajectory& traj);
void write_convergence_csv(std::ostream& os, const ConvergenceTable& table);

/// Opens `path` for writing (creating parent directories) and calls `body`.
void write_file(const std::filesystem::path& path, const std::function<void(std::ostream&)>& body);

}  // namespace relax
