#include "qdspin/numeric.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <thread>

namespace qdspin {

void fft_pow2(std::vector<cdouble>& a, int sign) {
  const std::size_t n = a.size();
  if (n == 0 || (n & (n - 1)) != 0)
    throw std::invalid_argument("fft_pow2: size must be a power of two");
  // bit-reversal permutation
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = sign * 2.0 * 3.14159265358979323846 / double(len);
    const cdouble wlen(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      cdouble w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        cdouble u = a[i + k];
        cdouble v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
}

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

std::vector<cdouble> real_spectrum(const std::vector<double>& x, double dt,
                                   double* df_out) {
  const std::size_t n = next_pow2(std::max<std::size_t>(x.size(), 2));
  std::vector<cdouble> buf(n, cdouble(0.0, 0.0));
  for (std::size_t i = 0; i < x.size(); ++i) buf[i] = cdouble(x[i], 0.0);
  fft_pow2(buf, -1);
  buf.resize(n / 2 + 1);
  if (df_out) *df_out = 1.0 / (double(n) * dt);
  return buf;
}

namespace {
// Dormand-Prince coefficients.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                 a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                 e4 = 125.0 / 192 - 393.0 / 640, e5 = -2187.0 / 6784 + 92097.0 / 339200,
                 e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;
}  // namespace

void integrate_adaptive(const OdeRhs& rhs, std::vector<cdouble>& y, double t0,
                        double t1, const OdeOptions& opt, const OdeObserver& observe) {
  if (t1 <= t0) {
    if (observe) observe(t0, y);
    return;
  }
  const std::size_t n = y.size();
  std::vector<cdouble> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), y5(n);
  double t = t0;
  double span = t1 - t0;
  double h = opt.initial_dt > 0 ? opt.initial_dt : span / 100.0;
  if (opt.max_dt > 0) h = std::min(h, opt.max_dt);
  rhs(t, y, k1);
  int rejects_in_row = 0;
  while (t < t1) {
    h = std::min(h, t1 - t);
    auto stage = [&](const std::vector<double>& coef,
                     const std::vector<const std::vector<cdouble>*>& ks) {
      for (std::size_t i = 0; i < n; ++i) {
        cdouble acc = y[i];
        for (std::size_t s = 0; s < ks.size(); ++s) acc += h * coef[s] * (*ks[s])[i];
        ytmp[i] = acc;
      }
    };
    stage({a21}, {&k1});
    rhs(t + c2 * h, ytmp, k2);
    stage({a31, a32}, {&k1, &k2});
    rhs(t + c3 * h, ytmp, k3);
    stage({a41, a42, a43}, {&k1, &k2, &k3});
    rhs(t + c4 * h, ytmp, k4);
    stage({a51, a52, a53, a54}, {&k1, &k2, &k3, &k4});
    rhs(t + c5 * h, ytmp, k5);
    stage({a61, a62, a63, a64, a65}, {&k1, &k2, &k3, &k4, &k5});
    rhs(t + h, ytmp, k6);
    for (std::size_t i = 0; i < n; ++i)
      y5[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    rhs(t + h, y5, k7);

    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      cdouble e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                       e6 * k6[i] + e7 * k7[i]);
      double sc = opt.atol + opt.rtol * std::max(std::abs(y[i]), std::abs(y5[i]));
      double r = std::abs(e) / sc;
      err = std::max(err, r);
    }
    if (err <= 1.0) {
      t += h;
      y.swap(y5);
      k1.swap(k7);  // FSAL
      if (observe) observe(t, y);
      rejects_in_row = 0;
      double fac = err > 0 ? 0.9 * std::pow(err, -0.2) : 5.0;
      h *= std::clamp(fac, 0.2, 5.0);
    } else {
      double fac = 0.9 * std::pow(err, -0.2);
      h *= std::clamp(fac, 0.1, 0.9);
      if (++rejects_in_row > 200)
        throw std::runtime_error("integrate_adaptive: step size collapsed");
      rhs(t, y, k1);  // k1 must match current y again
    }
    if (opt.max_dt > 0) h = std::min(h, opt.max_dt);
    if (h < span * 1e-14)
      throw std::runtime_error("integrate_adaptive: step size underflow");
  }
}

namespace {
int g_default_threads = 0;
}

int default_thread_count() {
  if (g_default_threads > 0) return g_default_threads;
  unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : int(hc);
}

void set_default_thread_count(int threads) { g_default_threads = threads; }

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn,
                  int threads) {
  if (threads <= 0) threads = default_thread_count();
  if (threads <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= n) break;
      fn(i);
    }
  };
  std::vector<std::thread> pool;
  const int nw = std::min<std::size_t>(threads, n);
  pool.reserve(nw - 1);
  for (int w = 1; w < nw; ++w) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
}

double spearman_rho(const std::vector<double>& y) {
  const std::size_t n = y.size();
  if (n < 2) return 0.0;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return y[a] < y[b]; });
  // mid-ranks for ties
  std::vector<double> rank(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && y[order[j + 1]] == y[order[i]]) ++j;
    double r = 0.5 * (double(i) + double(j)) + 1.0;
    for (std::size_t k = i; k <= j; ++k) rank[order[k]] = r;
    i = j + 1;
  }
  double mean = 0.5 * (n + 1);
  double num = 0, den_x = 0, den_y = 0;
  for (std::size_t k = 0; k < n; ++k) {
    double dx = double(k + 1) - mean;
    double dy = rank[k] - mean;
    num += dx * dy;
    den_x += dx * dx;
    den_y += dy * dy;
  }
  if (den_x == 0 || den_y == 0) return 0.0;
  return num / std::sqrt(den_x * den_y);
}

}  // namespace qdspin
