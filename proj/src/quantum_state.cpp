#include "qdspin/quantum_state.hpp"

#include <Eigen/Eigenvalues>

namespace qdspin {

Eigen::Vector3d QuantumState::bloch() const {
  const auto& r = rho_;
  return Eigen::Vector3d(2.0 * r(1, 0).real(), 2.0 * r(1, 0).imag(),
                         (r(1, 1) - r(0, 0)).real());
}

QuantumState QuantumState::from_bloch(const Eigen::Vector3d& v) {
  Eigen::MatrixXcd r(2, 2);
  r(0, 0) = 0.5 * (1.0 - v.z());
  r(1, 1) = 0.5 * (1.0 + v.z());
  r(1, 0) = 0.5 * std::complex<double>(v.x(), v.y());
  r(0, 1) = std::conj(r(1, 0));
  return QuantumState(r);
}

void QuantumState::check_valid(double tol) const {
  const double tr = rho_.trace().real();
  if (std::abs(tr - 1.0) > tol)
    throw StateError("density matrix trace deviates from 1");
  if ((rho_ - rho_.adjoint()).cwiseAbs().maxCoeff() > tol)
    throw StateError("density matrix not Hermitian");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho_, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -tol)
    throw StateError("density matrix not positive semidefinite");
}

}  // namespace qdspin
