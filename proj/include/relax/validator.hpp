#pragma once

#include "relax/symbol.hpp"

#include <optional>

namespace relax {

/// Discretisation of "for all (x, xi, u)": grid points, unit wave-vectors and
/// states drawn from a declared box.
struct SampleSet {
  std::vector<Point> points;
  std::vector<Point> directions;  // unit norm
  std::vector<Vector> states;     // conserved states inside `box`
  StateBox box;
  /// Half-width of the box of non-conserved states z probed by dissipativity.
  double nonconserved_radius = 0.5;

  /// Uniform angular sweep (`directions` in 2D, {-1, +1} in 1D), at most
  /// `max_points` grid points, and a tensor lattice of states in `box`.
  static SampleSet make(const SpatialGrid& grid, const StateBox& box, int directions = 64,
                        int max_points = 8);
};

struct Witness {
  Point x;
  Point xi;
  Vector u;
  double value = 0.0;
};

struct CheckEntry {
  std::string name;
  bool passed = false;
  double margin = 0.0;
  std::optional<Witness> witness;  // always present on failure
  std::string note;
};

struct ValidationReport {
  std::vector<CheckEntry> entries;

  bool passed() const;
  const CheckEntry* find(const std::string& name) const;
  int failures() const;
};

enum class ParabolicityMode { strong, petrowski };

// Tolerances shared by the checks.
inline constexpr double kSpectrumTolerance = 1e-9;
inline constexpr double kDeterminantFloor = 1e-10;

CheckEntry check_hyperbolicity(const RelaxationSystem& sys, const SampleSet& samples);
CheckEntry check_conserved_block(const RelaxationSystem& sys, const SampleSet& samples);
CheckEntry check_rank_condition(const RelaxationSystem& sys, const SampleSet& samples);
/// Margin is the certified lambda_0 = -max eig(sym Q_nu) over the box.
CheckEntry check_dissipativity(const RelaxationSystem& sys, const SampleSet& samples);
CheckEntry check_symmetrizer(const RelaxationSystem& sys, const Symmetrizer& r,
                             const SampleSet& samples);
/// Margin is alpha_0 (petrowski) or c_0 (strong).
CheckEntry check_petrowski(const ParabolicTarget& target, const SampleSet& samples,
                           ParabolicityMode mode);
CheckEntry check_petrowski(const RelaxationSystem& sys, const SampleSet& samples,
                           ParabolicityMode mode);
CheckEntry check_coefficient_regularity(const RelaxationSystem& sys, const SampleSet& samples);
CheckEntry check_lower_order(const RelaxationSystem& sys, const SampleSet& samples);

/// Every applicable check, in a fixed order. The symmetrizer defaults to the identity.
ValidationReport validate_all(const RelaxationSystem& sys, const ParabolicTarget* target,
                              const Symmetrizer* r, const SampleSet& samples);

}  // namespace relax
