#include "pcf/noise.hpp"

#include <cmath>
#include <complex>
#include <cstdint>

#include "pcf/errors.hpp"
#include "pcf/paracalc.hpp"
#include "pcf/parallel.hpp"
#include "pcf/rng.hpp"

namespace pcf {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

struct Gaussians {
  double x;
  double y;
};

// One Box-Muller pair per mode, keyed by (seed, k1, k2) only.
Gaussians mode_gaussians(std::uint64_t seed, int k1, int k2) {
  std::uint64_t h = mix64(seed ^ kSeedStride);
  h = mix64(h ^ (static_cast<std::uint64_t>(static_cast<std::int64_t>(k1)) *
                 0x9E3779B97F4A7C15ull));
  h = mix64(h ^ (static_cast<std::uint64_t>(static_cast<std::int64_t>(k2)) *
                 0xC2B2AE3D27D4EB4Full));
  SplitMix sm{h};
  const double u1 = sm.uniform_pos();
  const double u2 = sm.uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  return {r * std::cos(kTwoPi * u2), r * std::sin(kTwoPi * u2)};
}

}  // namespace

SpectralField noise_spectrum(const GridSpec& grid, std::uint64_t seed) {
  const int n = grid.n;
  SpectralField s(grid);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (int m1 = 0; m1 < n; ++m1) {
    const int k1 = freq_of_index(m1, n);
    const int p1 = (k1 == -n / 2) ? k1 : -k1;
    for (int m2 = 0; m2 < n; ++m2) {
      const int k2 = freq_of_index(m2, n);
      const int p2 = (k2 == -n / 2) ? k2 : -k2;
      std::complex<double> c;
      if (k1 == p1 && k2 == p2) {
        c = mode_gaussians(seed, k1, k2).x;  // self-conjugate, real draw
      } else if (k1 > p1 || (k1 == p1 && k2 > p2)) {
        const Gaussians g = mode_gaussians(seed, k1, k2);
        c = std::complex<double>(g.x * inv_sqrt2, g.y * inv_sqrt2);
      } else {
        const Gaussians g = mode_gaussians(seed, p1, p2);
        c = std::complex<double>(g.x * inv_sqrt2, -g.y * inv_sqrt2);
      }
      s.c[static_cast<std::size_t>(m1) * n + m2] = c;
    }
  }
  return s;
}

RealField sample_white_noise(const GridSpec& grid, std::uint64_t seed) {
  return fft_inverse(noise_spectrum(grid, seed));
}

double mollifier_symbol(double eps, int k1, int k2) {
  if (eps == 0.0) return 1.0;
  const double r2 = static_cast<double>(k1) * k1 + static_cast<double>(k2) * k2;
  return std::exp(-0.5 * eps * eps * r2);
}

void mollify_spectral(SpectralField& s, double eps) {
  if (eps == 0.0) return;
  if (eps < 0.0) throw validation_error("mollifier width must be >= 0");
  const int n = s.grid.n;
  for (int m1 = 0; m1 < n; ++m1) {
    const int k1 = freq_of_index(m1, n);
    for (int m2 = 0; m2 < n; ++m2) {
      const int k2 = freq_of_index(m2, n);
      s.c[static_cast<std::size_t>(m1) * n + m2] *= mollifier_symbol(eps, k1, k2);
    }
  }
}

RealField mollify(const RealField& f, double eps) {
  if (eps == 0.0) return f;
  SpectralField s = fft_forward(f);
  mollify_spectral(s, eps);
  return fft_inverse(s);
}

double renorm_constant(const GridSpec& grid, double eps) {
  if (eps < 0.0) throw validation_error("mollifier width must be >= 0");
  const int n = grid.n;
  long double acc = 0.0L;
  for (int m1 = 0; m1 < n; ++m1) {
    const int k1 = freq_of_index(m1, n);
    for (int m2 = 0; m2 < n; ++m2) {
      const int k2 = freq_of_index(m2, n);
      const double m = mollifier_symbol(eps, k1, k2);
      acc += static_cast<long double>(m * m) / lap_symbol(grid, k1, k2);
    }
  }
  return static_cast<double>(acc);
}

NoiseEnhancement enhance(const GridSpec& grid, const DyadicPartition& part,
                         std::uint64_t seed, double eps) {
  SpectralField s = noise_spectrum(grid, seed);
  mollify_spectral(s, eps);
  SpectralField t = s;
  const int n = grid.n;
  for (int m1 = 0; m1 < n; ++m1) {
    const int k1 = freq_of_index(m1, n);
    for (int m2 = 0; m2 < n; ++m2) {
      const int k2 = freq_of_index(m2, n);
      t.c[static_cast<std::size_t>(m1) * n + m2] /= lap_symbol(grid, k1, k2);
    }
  }
  NoiseEnhancement enh;
  enh.grid = grid;
  enh.seed = seed;
  enh.eps = eps;
  enh.renorm_const = renorm_constant(grid, eps);
  enh.xi = fft_inverse(s);
  enh.theta = fft_inverse(t);
  enh.wick_area = resonant(enh.theta, enh.xi, part);
  for (double& v : enh.wick_area.v) v -= enh.renorm_const;
  return enh;
}

NoiseEnhancement zero_enhancement(const GridSpec& grid) {
  NoiseEnhancement enh;
  enh.grid = grid;
  enh.seed = 0;
  enh.eps = 0.0;
  enh.renorm_const = 0.0;
  RealField z(grid);
  enh.xi = z;
  enh.theta = z;
  enh.wick_area = z;
  return enh;
}

ConvergenceStudy convergence_study(const GridSpec& grid, const DyadicPartition& part,
                                   std::uint64_t root_seed,
                                   const std::vector<double>& eps_list,
                                   int seed_count, double kappa) {
  if (eps_list.size() < 2) throw validation_error("need at least two eps values");
  for (std::size_t j = 0; j < eps_list.size(); ++j) {
    if (eps_list[j] < 0.0) throw validation_error("eps must be >= 0");
    if (j > 0 && eps_list[j] >= eps_list[j - 1])
      throw validation_error("eps values must be strictly decreasing");
  }
  if (seed_count < 1) throw validation_error("seed count must be positive");
  if (kappa <= 0.0) throw validation_error("kappa must be positive");

  const std::size_t pairs = eps_list.size() - 1;
  const BesovIndex ix{-2.0 * kappa, 0, 0};
  ConvergenceStudy st;
  st.eps = eps_list;
  st.mean_distance.assign(pairs, 0.0);
  st.mean_control.assign(pairs, 0.0);
  long double ratio_acc = 0.0L, control_ratio_acc = 0.0L;
  long long ratio_count = 0, control_ratio_count = 0;

  std::vector<std::vector<double>> all_dist(seed_count), all_ctrl(seed_count);
  parallel_for(seed_count, [&](int i) {
    const std::uint64_t seed = derive_seed(root_seed, static_cast<std::uint64_t>(i));
    std::vector<double> dist(pairs), ctrl(pairs);
    NoiseEnhancement prev = enhance(grid, part, seed, eps_list[0]);
    for (std::size_t j = 1; j < eps_list.size(); ++j) {
      NoiseEnhancement cur = enhance(grid, part, seed, eps_list[j]);
      RealField diff = cur.wick_area - prev.wick_area;
      dist[j - 1] = besov_norm(diff, part, ix);
      const double dc = cur.renorm_const - prev.renorm_const;
      for (double& v : diff.v) v += dc;  // un-renormalized resonant difference
      ctrl[j - 1] = besov_norm(diff, part, ix);
      prev = std::move(cur);
    }
    all_dist[i] = std::move(dist);
    all_ctrl[i] = std::move(ctrl);
  });
  for (int i = 0; i < seed_count; ++i) {
    const std::vector<double>& dist = all_dist[i];
    const std::vector<double>& ctrl = all_ctrl[i];
    for (std::size_t j = 0; j < pairs; ++j) {
      st.mean_distance[j] += dist[j] / seed_count;
      st.mean_control[j] += ctrl[j] / seed_count;
      if (j > 0 && dist[j - 1] > 0.0) {
        ratio_acc += dist[j] / dist[j - 1];
        ++ratio_count;
      }
      if (j > 0 && ctrl[j - 1] > 0.0) {
        control_ratio_acc += ctrl[j] / ctrl[j - 1];
        ++control_ratio_count;
      }
    }
  }
  st.mean_ratio = ratio_count ? static_cast<double>(ratio_acc / ratio_count) : 0.0;
  st.mean_control_ratio =
      control_ratio_count ? static_cast<double>(control_ratio_acc / control_ratio_count) : 0.0;
  return st;
}

}  // namespace pcf
