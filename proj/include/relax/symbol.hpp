#pragma once

#include "relax/system.hpp"

namespace relax {

/// Symmetric part (A + A^*) / 2 of any square Eigen expression.
template <typename Derived>
auto symmetric_part(const Eigen::MatrixBase<Derived>& a) {
  using Plain = typename Derived::PlainObject;
  return Plain((a + a.adjoint()) / typename Derived::Scalar(2));
}

/// Largest eigenvalue of the symmetric part of a real square matrix.
template <typename Derived>
double max_symmetric_eigenvalue(const Eigen::MatrixBase<Derived>& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetric_part(a.template cast<double>()),
                                           Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

/// Sum_j xi_j M_j(x) for each block (real coefficient matrices, differential systems only).
TransportBlocks contracted_blocks(const RelaxationSystem& sys, const Point& x, const Point& xi);

/// Symbol of the transport operator M(x,D) in `Z_t + M(x,D) Z = ...`:
/// i sum_j xi_j M_j(x) for differential systems, [[0, B], [-B, 0]] for multipliers.
CMatrix operator_symbol(const RelaxationSystem& sys, const Point& x, const Point& xi);

/// Principal symbol with the -i convention. For differential systems this is
/// -i sum_j xi_j M_j(x), whose product with i has the real coefficient matrix
/// as its value. Multiplier systems report [[0, B(xi)], [-B(xi), 0]].
CMatrix principal_symbol(const RelaxationSystem& sys, const Point& x, const Point& xi);

/// Q_nu(x, u, z); falls back to central differences of Q when no Jacobian is supplied.
Matrix stiff_jacobian(const RelaxationSystem& sys, const Point& x, const Vector& u,
                      const Vector& z);

/// Second-order generator of the formal limit: in Fourier variables
/// U_t = G U + lower order, with G = (sum xi_j M12_j) Q_nu(x,u,0)^{-1} (sum xi_j M21_j).
/// Throws SingularMatrixError carrying the smallest singular value of Q_nu.
Matrix limit_generator(const RelaxationSystem& sys, const Point& x, const Vector& u,
                       const Point& xi);

/// -sum_{j,l} A_{jl}(x) xi_j xi_l (reaction-diffusion) or -sum xi_i xi_j B_ij(u) (quasilinear).
Matrix target_generator(const ParabolicTarget& target, const Point& x, const Vector& u,
                        const Point& xi);

/// Block (row, col) of size k x k out of a kd x kd block matrix.
inline auto block_of(const Matrix& big, int k, int row, int col) {
  return big.block(row * k, col * k, k, k);
}

}  // namespace relax
