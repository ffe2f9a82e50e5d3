#include "pcf/torus.hpp"

#include <fftw3.h>

#include <bit>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>

namespace pcf {

namespace {

void validate_grid(int n, double mu, double fraction) {
  if (n < 8 || !std::has_single_bit(static_cast<unsigned>(n)))
    throw std::invalid_argument("grid size must be a power of two >= 8, got " +
                                std::to_string(n));
  if (!(mu > 0.0) || !std::isfinite(mu))
    throw std::invalid_argument("mu must be positive and finite");
  if (!(fraction > 0.0) || fraction > 1.0)
    throw std::invalid_argument("dealias_fraction must lie in (0, 1]");
}

// One forward/backward plan pair per grid size. Plans are created under a
// mutex with FFTW_ESTIMATE (measurement-free, so reruns are bit-identical)
// and executed through the new-array interface, which is thread-safe on
// per-worker buffers.
struct PlanPair {
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
};

PlanPair& plans_for(int n) {
  static std::mutex m;
  static std::map<int, PlanPair> cache;
  std::lock_guard<std::mutex> lock(m);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  PlanPair p;
  fftw_complex* scratch = fftw_alloc_complex(static_cast<size_t>(n) * n);
  p.fwd = fftw_plan_dft_2d(n, n, scratch, scratch, FFTW_FORWARD,
                           FFTW_ESTIMATE | FFTW_UNALIGNED);
  p.bwd = fftw_plan_dft_2d(n, n, scratch, scratch, FFTW_BACKWARD,
                           FFTW_ESTIMATE | FFTW_UNALIGNED);
  fftw_free(scratch);
  if (!p.fwd || !p.bwd) throw std::runtime_error("fftw plan creation failed");
  return cache.emplace(n, p).first->second;
}

fftw_complex* as_fftw(std::complex<double>* p) {
  return reinterpret_cast<fftw_complex*>(p);
}

}  // namespace

GridSpec::GridSpec(int n_, double mu_, double fraction)
    : n(n_), mu(mu_), dealias_fraction(fraction) {
  validate_grid(n_, mu_, fraction);
}

RealField::RealField(const GridSpec& g, std::vector<double> data)
    : grid(g), v(std::move(data)) {
  if (static_cast<int>(v.size()) != g.size())
    throw std::invalid_argument("field data size does not match grid");
}

SpectralField fft_forward(const RealField& f) {
  const int n = f.grid.n;
  SpectralField out(f.grid);
  double probe = 0.0;
  for (size_t i = 0; i < f.v.size(); ++i) {
    probe += std::abs(f.v[i]);
    out.c[i] = f.v[i];
  }
  if (!std::isfinite(probe))
    throw std::invalid_argument("fft_forward: non-finite input field");
  fftw_execute_dft(plans_for(n).fwd, as_fftw(out.c.data()), as_fftw(out.c.data()));
  const double scale = 1.0 / (static_cast<double>(n) * n);
  for (auto& z : out.c) z *= scale;
  return out;
}

RealField fft_inverse(const SpectralField& s) {
  const int n = s.grid.n;
  std::vector<std::complex<double>> buf(s.c);
  fftw_execute_dft(plans_for(n).bwd, as_fftw(buf.data()), as_fftw(buf.data()));
  RealField out(s.grid);
  double probe = 0.0;
  for (size_t i = 0; i < buf.size(); ++i) {
    out.v[i] = buf[i].real();
    probe += std::abs(out.v[i]);
  }
  if (!std::isfinite(probe))
    throw std::invalid_argument("fft_inverse: non-finite spectrum");
  return out;
}

void apply_L_spectral(SpectralField& s) {
  const int n = s.grid.n;
  for (int m1 = 0; m1 < n; ++m1) {
    const int k1 = freq_of_index(m1, n);
    for (int m2 = 0; m2 < n; ++m2) {
      s.c[static_cast<size_t>(m1) * n + m2] *=
          lap_symbol(s.grid, k1, freq_of_index(m2, n));
    }
  }
}

void apply_L_inverse_spectral(SpectralField& s) {
  const int n = s.grid.n;
  for (int m1 = 0; m1 < n; ++m1) {
    const int k1 = freq_of_index(m1, n);
    for (int m2 = 0; m2 < n; ++m2) {
      s.c[static_cast<size_t>(m1) * n + m2] /=
          lap_symbol(s.grid, k1, freq_of_index(m2, n));
    }
  }
}

RealField apply_L(const RealField& f) {
  SpectralField s = fft_forward(f);
  apply_L_spectral(s);
  return fft_inverse(s);
}

RealField apply_L_inverse(const RealField& f) {
  SpectralField s = fft_forward(f);
  apply_L_inverse_spectral(s);
  return fft_inverse(s);
}

RealField derivative(const RealField& f, int axis) {
  if (axis != 0 && axis != 1)
    throw std::invalid_argument("derivative: axis must be 0 or 1");
  const int n = f.grid.n;
  const double two_pi = 6.283185307179586476925286766559;
  SpectralField s = fft_forward(f);
  for (int m1 = 0; m1 < n; ++m1) {
    const int k1 = freq_of_index(m1, n);
    for (int m2 = 0; m2 < n; ++m2) {
      const int k2 = freq_of_index(m2, n);
      const int ka = axis == 0 ? k1 : k2;
      std::complex<double>& z = s.c[static_cast<size_t>(m1) * n + m2];
      if (ka == -n / 2) {
        z = 0.0;  // Nyquist plane: no real-valued odd multiplier exists
      } else {
        z *= std::complex<double>(0.0, two_pi * ka);
      }
    }
  }
  return fft_inverse(s);
}

bool mode_kept(const GridSpec& g, int k1, int k2) {
  const double cut = g.dealias_fraction * (g.n / 2) + 1e-9;
  const int m = std::max(std::abs(k1), std::abs(k2));
  return m <= cut;
}

void dealias_spectral(SpectralField& s) {
  const int n = s.grid.n;
  for (int m1 = 0; m1 < n; ++m1) {
    const int k1 = freq_of_index(m1, n);
    for (int m2 = 0; m2 < n; ++m2) {
      if (!mode_kept(s.grid, k1, freq_of_index(m2, n)))
        s.c[static_cast<size_t>(m1) * n + m2] = 0.0;
    }
  }
}

RealField dealias(const RealField& f) {
  SpectralField s = fft_forward(f);
  dealias_spectral(s);
  return fft_inverse(s);
}

double inner(const RealField& f, const RealField& g) {
  if (f.grid != g.grid) throw std::invalid_argument("inner: grid mismatch");
  long double acc = 0.0L;
  for (size_t i = 0; i < f.v.size(); ++i)
    acc += static_cast<long double>(f.v[i]) * g.v[i];
  return static_cast<double>(acc / f.grid.size());
}

double lp_norm(const RealField& f, int p) {
  long double acc = 0.0L;
  switch (p) {
    case 1:
      for (double x : f.v) acc += std::fabs(x);
      return static_cast<double>(acc / f.grid.size());
    case 2:
      for (double x : f.v) acc += static_cast<long double>(x) * x;
      return static_cast<double>(std::sqrt(static_cast<double>(acc / f.grid.size())));
    case 0: {
      double m = 0.0;
      for (double x : f.v) m = std::max(m, std::fabs(x));
      return m;
    }
    default:
      throw std::invalid_argument("lp_norm: p must be 1, 2 or 0 (= infinity)");
  }
}

double hermitian_defect(const SpectralField& s) {
  const int n = s.grid.n;
  double worst = 0.0;
  for (int m1 = 0; m1 < n; ++m1) {
    const int p1 = (n - m1) % n;
    for (int m2 = 0; m2 < n; ++m2) {
      const int p2 = (n - m2) % n;
      const std::complex<double> a = s.c[static_cast<size_t>(m1) * n + m2];
      const std::complex<double> b = s.c[static_cast<size_t>(p1) * n + p2];
      worst = std::max(worst, std::abs(a - std::conj(b)));
    }
  }
  return worst;
}

RealField operator+(const RealField& a, const RealField& b) {
  if (a.grid != b.grid) throw std::invalid_argument("field add: grid mismatch");
  RealField out = a;
  for (size_t i = 0; i < out.v.size(); ++i) out.v[i] += b.v[i];
  return out;
}

RealField operator-(const RealField& a, const RealField& b) {
  if (a.grid != b.grid) throw std::invalid_argument("field sub: grid mismatch");
  RealField out = a;
  for (size_t i = 0; i < out.v.size(); ++i) out.v[i] -= b.v[i];
  return out;
}

RealField operator*(double s, const RealField& a) {
  RealField out = a;
  for (auto& x : out.v) x *= s;
  return out;
}

RealField pointwise(const RealField& a, const RealField& b) {
  if (a.grid != b.grid) throw std::invalid_argument("pointwise: grid mismatch");
  RealField out = a;
  for (size_t i = 0; i < out.v.size(); ++i) out.v[i] *= b.v[i];
  return out;
}

void axpy(RealField& y, double a, const RealField& x) {
  if (y.grid != x.grid) throw std::invalid_argument("axpy: grid mismatch");
  for (size_t i = 0; i < y.v.size(); ++i) y.v[i] += a * x.v[i];
}

}  // namespace pcf
