#pragma once

#include <vector>

#include "pcf/torus.hpp"

// Dyadic Littlewood-Paley partition on grid frequencies.
//
// phi(r) = 1 for r <= 1, exp(1 - 1/(1 - (r-1)^2)) for 1 < r < 2, 0 for r >= 2.
// Level functions lambda_j(k) = phi(|k| / 2^j) are evaluated once per (k, j);
// chi = lambda_{-1} and rho_j = lambda_j - lambda_{j-1}, so the partition sum
// telescopes to lambda_{j_max} = 1 bit-exactly at every covered frequency.
// j_max is the smallest J with 2^J >= sqrt(2) n/2 (all grid frequencies lie
// on the final plateau). Blocks j and j' with |j - j'| >= 2 have disjoint
// supports: supp rho_j is {2^{j-1} <= |k| <= 2^{j+1}}, supp chi is |k| <= 1.

namespace pcf {

double lp_bump(double r);  // the phi above

struct DyadicPartition {
  GridSpec grid;
  int j_max = 0;
  // mult[j+1][idx] is the block-j multiplier at storage index idx; j = -1 is chi
  std::vector<std::vector<double>> mult;
  // level[j+1] = lambda_j, kept for exact localization cutoffs
  std::vector<std::vector<double>> level;

  int block_count() const { return j_max + 2; }
  const std::vector<double>& block_multiplier(int j) const { return mult[j + 1]; }
  const std::vector<double>& level_multiplier(int j) const { return level[j + 1]; }
};

DyadicPartition make_partition(const GridSpec& grid);

// max_k |chi(k) + sum_j rho_j(k) - 1|
double partition_residual(const DyadicPartition& part);

RealField lp_block(const RealField& f, const DyadicPartition& part, int j);
std::vector<RealField> lp_blocks(const RealField& f, const DyadicPartition& part);
std::vector<RealField> lp_blocks_spectral(const SpectralField& s,
                                          const DyadicPartition& part);

struct BesovIndex {
  double alpha = 0.0;
  int p = 2;  // 1, 2, or 0 for infinity
  int q = 2;
};

double besov_norm(const RealField& f, const DyadicPartition& part, BesovIndex ix);
double sobolev_norm(const RealField& f, const DyadicPartition& part, double alpha);
double holder_norm(const RealField& f, const DyadicPartition& part, double alpha);

// spectral weight table w(k) = sum_j 2^{2 alpha j} rho_j(k)^2 such that
// sobolev_norm(f)^2 = sum_k w(k) |fhat(k)|^2 (blockwise Parseval)
std::vector<double> sobolev_weights(const DyadicPartition& part, double alpha);
double sobolev_norm_spectral(const SpectralField& s, const std::vector<double>& w);

struct DecayFit {
  double slope = 0.0;     // of log2 ||block_j|| against j
  double r2 = 0.0;
  double exponent = 0.0;  // fitted regularity exponent, -slope
};

// least-squares fit over j in [j_lo, j_hi]; requires j_hi - j_lo >= 3 and all
// fitted block norms above 1e-300
DecayFit block_decay_fit(const RealField& f, const DyadicPartition& part, int p,
                         int j_lo, int j_hi);
DecayFit decay_fit_from_norms(const std::vector<double>& norms, int j_lo, int j_hi);

// default fit window: j in [1, j_max - 2] (drops chi, the few-mode first
// octave, and the top blocks); falls back to j_lo = 0 on coarse grids where
// the shortened window would dip under the 3-octave minimum
int decay_fit_lo(const DyadicPartition& part);
int decay_fit_hi(const DyadicPartition& part);

// ||grad block_j f||_{L^q} / (2^{j(1 + 2(1/p - 1/q))} ||block_j f||_{L^p})
double bernstein_probe(const RealField& f, const DyadicPartition& part, int j,
                       int p, int q);

}  // namespace pcf
