#pragma once

#include <complex>
#include <cstdint>
#include <vector>

// Pseudo-spectral fields on the unit 2-torus, grid x_j = j/n.
//
// Conventions (fixed project-wide):
//  * synthesis  f(x) = sum_k fhat(k) e^{+2 pi i k.x},  k in {-n/2..n/2-1}^2
//  * analysis   fhat(k) = (1/n^2) sum_x f(x) e^{-2 pi i k.x}
//  * quadrature weight 1/n^2, so inner(f,g) = sum_k fhat conj(ghat) (Parseval)
//  * L = -Laplace + mu acts as the symbol sigma(k) = (2 pi |k|)^2 + mu
//  * derivative multiplies by 2 pi i k_axis and zeroes the Nyquist plane of
//    that axis (the only convention under which real fields stay real and
//    d/dx is skew-adjoint on the grid)
//  * dealias zeroes modes with max(|k1|,|k2|) > dealias_fraction * n/2

namespace pcf {

struct GridSpec {
  int n = 128;
  double mu = 1.0;
  double dealias_fraction = 2.0 / 3.0;

  GridSpec() = default;
  GridSpec(int n_, double mu_, double fraction = 2.0 / 3.0);

  int size() const { return n * n; }
  bool operator==(const GridSpec& o) const {
    return n == o.n && mu == o.mu && dealias_fraction == o.dealias_fraction;
  }
  bool operator!=(const GridSpec& o) const { return !(*this == o); }
};

struct RealField {
  GridSpec grid;
  std::vector<double> v;

  RealField() = default;
  explicit RealField(const GridSpec& g) : grid(g), v(g.size(), 0.0) {}
  RealField(const GridSpec& g, std::vector<double> data);

  double& at(int i1, int i2) { return v[static_cast<size_t>(i1) * grid.n + i2]; }
  double at(int i1, int i2) const { return v[static_cast<size_t>(i1) * grid.n + i2]; }
};

struct SpectralField {
  GridSpec grid;
  std::vector<std::complex<double>> c;

  SpectralField() = default;
  explicit SpectralField(const GridSpec& g) : grid(g), c(g.size()) {}

  std::complex<double>& at(int m1, int m2) {
    return c[static_cast<size_t>(m1) * grid.n + m2];
  }
  const std::complex<double>& at(int m1, int m2) const {
    return c[static_cast<size_t>(m1) * grid.n + m2];
  }
};

// storage index m in [0,n) <-> signed frequency k in [-n/2, n/2-1]
inline int freq_of_index(int m, int n) { return m < n / 2 ? m : m - n; }
inline int index_of_freq(int k, int n) { return k >= 0 ? k : k + n; }

inline double lap_symbol(const GridSpec& g, int k1, int k2) {
  const double two_pi = 6.283185307179586476925286766559;
  double kk = static_cast<double>(k1) * k1 + static_cast<double>(k2) * k2;
  return two_pi * two_pi * kk + g.mu;
}

SpectralField fft_forward(const RealField& f);
RealField fft_inverse(const SpectralField& s);

RealField apply_L(const RealField& f);
RealField apply_L_inverse(const RealField& f);
RealField derivative(const RealField& f, int axis);
RealField dealias(const RealField& f);

void apply_L_spectral(SpectralField& s);
void apply_L_inverse_spectral(SpectralField& s);
void dealias_spectral(SpectralField& s);
bool mode_kept(const GridSpec& g, int k1, int k2);

double inner(const RealField& f, const RealField& g);
// p in {1, 2}; p = 0 stands for infinity
double lp_norm(const RealField& f, int p);

// max_k |fhat(k) - conj(fhat at mirrored k)|; 0 for spectra of real fields
double hermitian_defect(const SpectralField& s);

RealField operator+(const RealField& a, const RealField& b);
RealField operator-(const RealField& a, const RealField& b);
RealField operator*(double s, const RealField& a);
RealField pointwise(const RealField& a, const RealField& b);
void axpy(RealField& y, double a, const RealField& x);  // y += a*x

}  // namespace pcf
