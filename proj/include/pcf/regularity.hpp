#pragma once

#include <cstdint>
#include <vector>

#include "pcf/anderson.hpp"
#include "pcf/noise.hpp"
#include "pcf/variational.hpp"

// Regularity diagnostics: a-priori L^2 estimate ratios, ensemble Schauder
// exponent reports on minimizers, and coupled resolution sweeps.

namespace pcf {

// ||u_sharp||_{H^2} / (||H u||_{L^2} + lambda ||u||_{L^2}); 0 when the
// denominator vanishes.
double l2_estimate_check(const ParacontrolledTriple& t, const NoiseEnhancement& enh,
                         const DyadicPartition& part, const LocalizationParams& loc,
                         const GammaConfig& cfg, double lambda);

// sup-norm block-decay fit over the default window, with a smooth-field
// sentinel: components whose largest block norm is below 1e-250 report
// exponent 9 and r2 = 1.
DecayFit decay_exponent(const RealField& f, const DyadicPartition& part);

struct SchauderRow {
  std::uint64_t seed = 0;
  double alpha_u = 0.0, alpha_r = 0.0, alpha_sharp = 0.0;
  double r2_u = 0.0, r2_r = 0.0, r2_sharp = 0.0;
  bool ordering_ok = false;  // sharp >= r + 0.3 >= u + 0.6, or all >= 3
  bool pass = false;         // ordering_ok and min r2 >= 0.8
};

struct SchauderReport {
  std::vector<SchauderRow> rows;
  double pass_fraction = 0.0;
};

SchauderReport schauder_report(const GridSpec& grid, const Nonlinearity& nl,
                               std::uint64_t root_seed, int count, double eps,
                               const GammaConfig& cfg, const MinimizeOptions& opt);

struct SweepRow {
  int n = 0;
  int seed_index = 0;
  std::uint64_t seed = 0;
  double contraction = 0.0;  // realized threshold certificate
  double loc_L = 0.0, loc_K = 0.0;
  double form_err = 0.0;  // assembled vs direct quadratic form, relative
  double grad_err = 0.0;  // central finite difference vs <g, v>, relative
  double ground_energy = 0.0, lambda_est = 0.0;
  double l2_ratio = 0.0;
  double alpha_u = 0.0, alpha_r = 0.0, alpha_sharp = 0.0;
};

// same seeds across all resolutions; the mode-keyed noise makes the rows
// couple automatically
std::vector<SweepRow> resolution_sweep(const std::vector<int>& ns, double mu,
                                       std::uint64_t root_seed, int count,
                                       const Nonlinearity& nl, double eps,
                                       const GammaConfig& cfg,
                                       const MinimizeOptions& opt);

}  // namespace pcf
