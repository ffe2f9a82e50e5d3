#pragma once

#include <cstdint>
#include <vector>

#include "pcf/partition.hpp"
#include "pcf/torus.hpp"

// White noise, mollification and the renormalized enhancement.
//
// Fourier coefficients are keyed by (seed, k1, k2) through the counter hash
// in rng.hpp, independent of the grid size: refining n keeps every strictly
// interior mode bit-identical and fills the new modes with fresh Gaussians.
// Hermitian pairs {k, -k} share one complex draw z = (x + iy)/sqrt(2) taken
// at the lexicographically larger representative; self-conjugate modes (0 and
// Nyquist corners) carry a real unit-variance draw.
//
// The mollifier is Gaussian, mhat(y) = exp(-|y|^2/2), so eps = 0 is exactly
// the sharp grid cutoff (identity on stored spectra). The renormalization
// constant is the direct grid sum
//   C_eps = sum_k |mhat(eps k)|^2 / ((2 pi |k|)^2 + mu),
// including the k = 0 term 1/mu; it matches E[theta_eps * xi_eps] exactly on
// the grid because the same symbol is used to build theta.

namespace pcf {

SpectralField noise_spectrum(const GridSpec& grid, std::uint64_t seed);
RealField sample_white_noise(const GridSpec& grid, std::uint64_t seed);

double mollifier_symbol(double eps, int k1, int k2);
RealField mollify(const RealField& f, double eps);
void mollify_spectral(SpectralField& s, double eps);

double renorm_constant(const GridSpec& grid, double eps);

struct NoiseEnhancement {
  GridSpec grid;
  std::uint64_t seed = 0;
  double eps = 0.0;
  double renorm_const = 0.0;
  RealField xi;         // mollified noise realization
  RealField theta;      // L^{-1} xi
  RealField wick_area;  // theta resonant xi - renorm_const
};

NoiseEnhancement enhance(const GridSpec& grid, const DyadicPartition& part,
                         std::uint64_t seed, double eps);
NoiseEnhancement zero_enhancement(const GridSpec& grid);

struct ConvergenceStudy {
  std::vector<double> eps;               // decreasing mollification widths
  std::vector<double> mean_distance;     // renormalized pair distances
  std::vector<double> mean_control;      // un-renormalized pair distances
  double mean_ratio = 0.0;               // consecutive renormalized ratios
  double mean_control_ratio = 0.0;
};

// Coupled-seed Cauchy study of the Wick area in the Hoelder norm of
// exponent -2*kappa over consecutive eps pairs.
ConvergenceStudy convergence_study(const GridSpec& grid, const DyadicPartition& part,
                                   std::uint64_t root_seed,
                                   const std::vector<double>& eps_list,
                                   int seed_count, double kappa);

}  // namespace pcf
