#pragma once

#include <cmath>
#include <complex>

#include "pcf/noise.hpp"
#include "pcf/torus.hpp"

namespace testutil {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

// real cosine mode amp*cos(2 pi (k1 x1 + k2 x2))
inline pcf::RealField cosine_mode(const pcf::GridSpec& g, int k1, int k2,
                                  double amp = 1.0) {
  pcf::RealField f(g);
  for (int i1 = 0; i1 < g.n; ++i1)
    for (int i2 = 0; i2 < g.n; ++i2)
      f.at(i1, i2) = amp * std::cos(kTwoPi * (k1 * i1 + k2 * i2) / g.n);
  return f;
}

inline std::complex<double> coef(const pcf::SpectralField& s, int k1, int k2) {
  const int n = s.grid.n;
  return s.at(pcf::index_of_freq(k1, n), pcf::index_of_freq(k2, n));
}

// deterministic rough field (Gaussian modes, variance 1 per mode)
inline pcf::RealField rough_field(const pcf::GridSpec& g, std::uint64_t seed) {
  return pcf::sample_white_noise(g, seed);
}

// deterministic smooth field: mollified white noise decays fast enough for
// every norm in play
inline pcf::RealField smooth_field(const pcf::GridSpec& g, std::uint64_t seed,
                                   double eps = 0.35) {
  return pcf::mollify(pcf::sample_white_noise(g, seed), eps);
}

inline double rel_err(double got, double want) {
  return std::abs(got - want) / (1.0 + std::abs(want));
}

inline double max_abs_diff(const pcf::RealField& a, const pcf::RealField& b) {
  double m = 0.0;
  for (size_t i = 0; i < a.v.size(); ++i)
    m = std::max(m, std::abs(a.v[i] - b.v[i]));
  return m;
}

}  // namespace testutil
