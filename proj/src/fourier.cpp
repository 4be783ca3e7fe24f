#include "relax/fourier.hpp"

#include <numbers>

namespace relax {

FourierGrid::FourierGrid(const SpatialGrid& grid) : grid_(grid) {}

bool FourierGrid::is_nyquist(int mode, int axis) const {
  const int n = grid_.cells(axis);
  const int i = axis == 0 ? mode % grid_.cells(0) : mode / grid_.cells(0);
  return n % 2 == 0 && i == n / 2;
}

Point FourierGrid::wavenumber(int mode, bool odd) const {
  Point kappa(grid_.dim());
  for (int axis = 0; axis < grid_.dim(); ++axis) {
    const int n = grid_.cells(axis);
    const int i = axis == 0 ? mode % grid_.cells(0) : mode / grid_.cells(0);
    const int signed_index = i <= n / 2 ? i : i - n;
    kappa[axis] = 2.0 * std::numbers::pi * signed_index / grid_.period(axis);
    if (odd && is_nyquist(mode, axis)) kappa[axis] = 0.0;
  }
  return kappa;
}

void FourierGrid::transform(CVector& data, bool inverse) const {
  const int nx = grid_.cells(0);
  const int ny = grid_.dim() == 2 ? grid_.cells(1) : 1;
  std::vector<Complex> in(nx), out(nx);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) in[i] = data[i + nx * j];
    if (inverse) {
      fft_.inv(out, in);
    } else {
      fft_.fwd(out, in);
    }
    for (int i = 0; i < nx; ++i) data[i + nx * j] = out[i];
  }
  if (grid_.dim() == 2) {
    std::vector<Complex> col(ny), res(ny);
    for (int i = 0; i < nx; ++i) {
      for (int j = 0; j < ny; ++j) col[j] = data[i + nx * j];
      if (inverse) {
        fft_.inv(res, col);
      } else {
        fft_.fwd(res, col);
      }
      for (int j = 0; j < ny; ++j) data[i + nx * j] = res[j];
    }
  }
}

CVector FourierGrid::forward(const Vector& field) const {
  if (field.size() != size()) throw DimensionError("fourier: field size does not match grid");
  CVector data = field.cast<Complex>();
  transform(data, false);
  data /= static_cast<double>(size());
  return data;
}

Vector FourierGrid::inverse(const CVector& coeffs) const {
  if (coeffs.size() != size()) throw DimensionError("fourier: coefficient size does not match grid");
  // Eigen's inverse transform already divides by n per axis; undo it.
  CVector data = coeffs * static_cast<double>(size());
  transform(data, true);
  return data.real();
}

Vector FourierGrid::derivative(const Vector& field, int axis) const {
  CVector c = forward(field);
  for (int mode = 0; mode < size(); ++mode) c[mode] *= Complex(0.0, wavenumber(mode, true)[axis]);
  return inverse(c);
}

double FourierGrid::hminus1_norm_squared(const Vector& field) const {
  const CVector c = forward(field);
  double volume = grid_.period(0) * (grid_.dim() == 2 ? grid_.period(1) : 1.0);
  double acc = 0.0;
  for (int mode = 0; mode < size(); ++mode) {
    acc += std::norm(c[mode]) / (1.0 + wavenumber(mode).squaredNorm());
  }
  return acc * volume;
}

}  // namespace relax
