// Master-equation integration.
//
// drho/dt = -i[H, rho] + sum_k rate_k (L rho L+ - 1/2 {L+L, rho})
// with H in units of rad/ns and rates in 1/ns. The integrator is the
// shared adaptive RK from numeric.hpp; rtol 1e-8 is used for oracle runs
// and 1e-6 for production paths.
#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "qdspin/quantum_state.hpp"

namespace qdspin {

struct Dissipator {
  double rate;  // 1/ns, must be >= 0
  Eigen::MatrixXcd op;
};

struct LindbladOptions {
  double rtol = 1e-8;
  double atol = 1e-12;
  double max_dt_ns = 0.0;
};

// Constant Hamiltonian. Observer (optional) is called at every accepted
// step with (t, rho).
using StateObserver = std::function<void(double, const Eigen::MatrixXcd&)>;

QuantumState evolve_lindblad(const QuantumState& state, const Eigen::MatrixXcd& h,
                             const std::vector<Dissipator>& dissipators, double t_ns,
                             const LindbladOptions& opt = {},
                             const StateObserver& observe = nullptr);

// Time-dependent Hamiltonian variant.
QuantumState evolve_lindblad_td(const QuantumState& state,
                                const std::function<Eigen::MatrixXcd(double)>& h_of_t,
                                const std::vector<Dissipator>& dissipators, double t_ns,
                                const LindbladOptions& opt = {},
                                const StateObserver& observe = nullptr);

// Exact propagation of a driven, damped qubit over one constant-parameter
// interval, via the matrix exponential of the affine Bloch generator.
//
//   omega_ghz, phase: transverse drive (RWA), H = pi*Omega*(cos,sin) + pi*delta*sz
//   gamma_flip:   incoherent spin flip rate per direction (1/ns)
//   gamma_t1:     1/T1 longitudinal relaxation toward z=0 (1/ns)
//   gamma_extra:  additional symmetric flip-like channel (1/ns)
Eigen::Vector3d evolve_bloch_damped(const Eigen::Vector3d& bloch, double omega_ghz,
                                    double delta_ghz, double phase_rad, double t_ns,
                                    double gamma_flip, double gamma_t1,
                                    double gamma_extra);

// Same generator, but diagonalized once so a full trace against one
// constant-parameter drive costs one eigen-decomposition plus O(1) per
// sample point.
class BlochPropagator {
 public:
  BlochPropagator(double omega_ghz, double delta_ghz, double phase_rad,
                  double gamma_flip, double gamma_t1, double gamma_extra);
  Eigen::Vector3d at(const Eigen::Vector3d& bloch0, double t_ns) const;

 private:
  Eigen::Matrix3cd vecs_;
  Eigen::Matrix3cd vecs_inv_;
  Eigen::Vector3cd vals_;
};

}  // namespace qdspin
