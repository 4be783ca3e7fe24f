#pragma once

#include "relax/grid.hpp"

#include <unsupported/Eigen/FFT>

namespace relax {

/// Discrete Fourier machinery on a SpatialGrid: transforms of real fields,
/// angular wavenumbers per mode, spectral derivatives.
///
/// Coefficients are normalised so that `forward(f)[0]` is the mean of f.
/// Mode ordering follows the cell ordering of the grid.
class FourierGrid {
 public:
  explicit FourierGrid(const SpatialGrid& grid);

  const SpatialGrid& grid() const { return grid_; }
  int size() const { return grid_.size(); }

  /// Angular wavenumber of mode `mode`. With `odd` set, the Nyquist wavenumber
  /// is reported as zero so that odd-order operators keep real fields real.
  Point wavenumber(int mode, bool odd = false) const;
  bool is_nyquist(int mode, int axis) const;

  CVector forward(const Vector& field) const;
  Vector inverse(const CVector& coeffs) const;

  /// Spectral partial derivative along `axis`.
  Vector derivative(const Vector& field, int axis) const;

  /// Sum of |c|^2 / (1 + |kappa|^2) times the domain volume.
  double hminus1_norm_squared(const Vector& field) const;

 private:
  void transform(CVector& data, bool inverse) const;

  SpatialGrid grid_;
  mutable Eigen::FFT<double> fft_;
};

}  // namespace relax
