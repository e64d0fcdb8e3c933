// Shared numerics: radix-2 FFT, adaptive Runge-Kutta, parallel loops.
#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

namespace qdspin {

using cdouble = std::complex<double>;

// In-place iterative radix-2 FFT; size must be a power of two.
// sign = -1 forward, +1 inverse (inverse is unscaled).
void fft_pow2(std::vector<cdouble>& data, int sign);

std::size_t next_pow2(std::size_t n);

// Forward DFT of a real series, zero-padded to a power of two.
// Returns the complex half-spectrum (bins 0..N/2), with the bin spacing
// 1/(N*dt) reported through df_out.
std::vector<cdouble> real_spectrum(const std::vector<double>& x, double dt,
                                   double* df_out);

// Dormand-Prince 5(4) adaptive integrator over a flat complex state.
// Steps from t0 to t1 and invokes observe (if set) after every accepted
// step. Error control is per-component: atol + rtol * |y|.
struct OdeOptions {
  double rtol = 1e-8;
  double atol = 1e-10;
  double max_dt = 0.0;  // 0 = unlimited
  double initial_dt = 0.0;
};

using OdeRhs =
    std::function<void(double t, const std::vector<cdouble>& y, std::vector<cdouble>& dydt)>;
using OdeObserver = std::function<void(double t, const std::vector<cdouble>& y)>;

void integrate_adaptive(const OdeRhs& rhs, std::vector<cdouble>& y, double t0,
                        double t1, const OdeOptions& opt,
                        const OdeObserver& observe = nullptr);

// Runs fn(i) for i in [0, n) on up to `threads` workers in fixed chunks.
// Each index is processed exactly once; any shared output must be
// per-index slots so the result is order-independent.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn,
                  int threads = 0);

int default_thread_count();
void set_default_thread_count(int threads);

// Spearman rank correlation of y against its index order.
double spearman_rho(const std::vector<double>& y);

}  // namespace qdspin
