#include "relax/io.hpp"

#include <cmath>
#include <fstream>

namespace relax {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void write_report_csv(std::ostream& os, const ValidationReport& report) {
  os << "check,pass,margin,witness\n";
  for (const auto& e : report.entries) {
    std::string witness;
    if (e.witness) {
      const Witness& w = *e.witness;
      if (w.x.size()) witness += "x=" + format_vector(w.x);
      if (w.xi.size()) witness += " xi=" + format_vector(w.xi);
      if (w.u.size()) witness += " u=" + format_vector(w.u);
      witness += " value=" + format_double(w.value);
      if (witness.front() == ' ') witness.erase(0, 1);
    }
    if (!e.note.empty()) witness += (witness.empty() ? "" : " ") + std::string("note=") + e.note;
    os << e.name << ',' << (e.passed ? "true" : "false") << ',' << format_double(e.margin) << ','
       << csv_field(witness) << '\n';
  }
}

namespace {

void coordinate_header(std::ostream& os, const SpatialGrid& grid) {
  os << 'x';
  if (grid.dim() == 2) os << ",y";
}

void coordinates(std::ostream& os, const SpatialGrid& grid, int c) {
  const Point x = grid.point(c);
  os << format_double(x[0]);
  if (grid.dim() == 2) os << ',' << format_double(x[1]);
}

}  // namespace

void write_snapshot_csv(std::ostream& os, const SpatialGrid& grid, const FieldState& state) {
  coordinate_header(os, grid);
  for (int r = 0; r < state.uI.rows(); ++r) os << ",uI_" << r + 1;
  for (int r = 0; r < state.uII.rows(); ++r) os << ",uII_" << r + 1;
  os << '\n';
  for (int c = 0; c < grid.size(); ++c) {
    coordinates(os, grid, c);
    for (int r = 0; r < state.uI.rows(); ++r) os << ',' << format_double(state.uI(r, c));
    for (int r = 0; r < state.uII.rows(); ++r) os << ',' << format_double(state.uII(r, c));
    os << '\n';
  }
}

void write_reference_csv(std::ostream& os, const SpatialGrid& grid, const Matrix& u) {
  coordinate_header(os, grid);
  for (int r = 0; r < u.rows(); ++r) os << ",u_" << r + 1;
  os << '\n';
  for (int c = 0; c < grid.size(); ++c) {
    coordinates(os, grid, c);
    for (int r = 0; r < u.rows(); ++r) os << ',' << format_double(u(r, c));
    os << '\n';
  }
}

void write_step_log_csv(std::ostream& os, const Trajectory& traj) {
  os << "t,dt,energy,max_speed\n";
  for (const auto& r : traj.steps) {
    os << format_double(r.t) << ',' << format_double(r.dt) << ',' << format_double(r.energy) << ','
       << format_double(r.max_speed) << '\n';
  }
}

void write_convergence_csv(std::ostream& os, const ConvergenceTable& table) {
  os << "epsilon,errI,errII_weak,sup_eps_uII,observed_order\n";
  for (const auto& r : table.rows) {
    os << format_double(r.eps) << ',' << format_double(r.errI) << ',' << format_double(r.errII_weak)
       << ',' << format_double(r.sup_eps_uII) << ',';
    if (!std::isnan(r.observed_order)) os << format_double(r.observed_order);
    os << '\n';
  }
}

void write_file(const std::filesystem::path& path, const std::function<void(std::ostream&)>& body) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open " + path.string() + " for writing");
  body(os);
  if (!os) throw Error("failed writing " + path.string());
}

}  // namespace relax
