// Density matrices for the hole/trion system.
//
// Level order for the four-level model: 0 = spin-down (dark, the
// initialized state), 1 = spin-up (bright, the read-out state),
// 2 = trion with electron up, 3 = trion with electron down. The reduced
// qubit lives on levels {0, 1}.
#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>

namespace qdspin {

struct StateError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class QuantumState {
 public:
  explicit QuantumState(int dim = 2)
      : rho_(Eigen::MatrixXcd::Zero(dim, dim)) {
    rho_(0, 0) = 1.0;
  }
  explicit QuantumState(Eigen::MatrixXcd rho) : rho_(std::move(rho)) {}

  static QuantumState pure(int dim, int level) {
    QuantumState s(dim);
    s.rho_.setZero();
    s.rho_(level, level) = 1.0;
    return s;
  }

  int dim() const { return int(rho_.rows()); }
  const Eigen::MatrixXcd& rho() const { return rho_; }
  Eigen::MatrixXcd& rho() { return rho_; }

  double population(int level) const { return rho_(level, level).real(); }

  // Bloch vector of the {0,1} block: x = 2 Re rho10, y = 2 Im rho10,
  // z = rho11 - rho00 (z = +1 means spin-up / bright).
  Eigen::Vector3d bloch() const;
  static QuantumState from_bloch(const Eigen::Vector3d& v);

  // Trace within tol of 1, Hermitian within tol, eigenvalues >= -tol.
  void check_valid(double tol = 1e-9) const;

 private:
  Eigen::MatrixXcd rho_;
};

inline Eigen::Matrix2cd pauli_x() {
  Eigen::Matrix2cd m;
  m << 0, 1, 1, 0;
  return m;
}
inline Eigen::Matrix2cd pauli_y() {
  Eigen::Matrix2cd m;
  m << 0, std::complex<double>(0, -1), std::complex<double>(0, 1), 0;
  return m;
}
inline Eigen::Matrix2cd pauli_z() {
  // Level 1 (spin-up) is the +1 eigenstate.
  Eigen::Matrix2cd m;
  m << -1, 0, 0, 1;
  return m;
}

}  // namespace qdspin
