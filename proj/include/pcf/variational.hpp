#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pcf/anderson.hpp"
#include "pcf/noise.hpp"
#include "pcf/partition.hpp"
#include "pcf/torus.hpp"

// Energy functional and descent for the renormalized problem
//   E(u) = 1/2 B(u,u) - integral F(u),   B(u,u) = <u, L u - u wick* xi>,
// minimized over the dealiased subspace. On that subspace the Wick
// potential application V(u) = dealias(xi u) - renorm_const * dealias(u)
// satisfies <u, V(u)> = <u, xi u> - renorm_const <u, u> pointwise, so one
// energy evaluation costs a single transform.
//
// bilinear_B assembles the quadratic form through the paracontrolled
// decomposition of both arguments (seven terms); the assembly telescopes to
// <v, L u> - <v, wick_product(u)> exactly at grid level, which is the
// cross-validation against the direct form.

namespace pcf {

struct Nonlinearity {
  enum class Kind { zero, cubic_minus, double_well, custom };
  Kind kind = Kind::zero;
  double c3 = 0.0;             // cubic_minus: f(s) = -c3 s^3
  double a = 0.0, b = 0.0;     // double_well: f(s) = a s - b s^3
  std::vector<double> ts, fs;  // custom: nodes and values, linear interpolation

  double f(double s) const;
  double F(double s) const;  // antiderivative, F(0) = 0
  double fprime(double s) const;
};

Nonlinearity zero_nonlinearity();
Nonlinearity cubic_minus(double c3);
Nonlinearity double_well(double a, double b);
Nonlinearity custom_nonlinearity(std::vector<double> ts, std::vector<double> fs);

// "zero" | "cubic:<c3>" | "dwell:<a>,<b>" | "custom:<csv path>"
Nonlinearity parse_nonlinearity(const std::string& text);

struct AssumptionParams {
  double l = 3.0;   // growth order of f
  double k = 4.0;   // coercivity order of F
  double C0 = 1.0;  // F(s) <= slack*(1 + C0) - (C1/slack)|s|^k
  double C1 = 0.0;
  double slack = 3.0;
  double range = 10.0;
  int samples = 1024;
};

struct AssumptionReport {
  bool growth_ok = false;
  double worst_growth = 0.0;  // max |f(s)| / (1 + |s|^l)
  bool coercivity_ok = false;
  double worst_margin = 0.0;  // max of F(s) minus the allowed bound
  // set when the upper bound fails but holds for -F: the inequality was
  // probably supplied with the wrong orientation
  bool direction_flag = false;
};

AssumptionReport check_assumptions(const Nonlinearity& nl, const AssumptionParams& ap);

// V(u) = dealias(xi u) - renorm_const * dealias(u)
RealField wick_apply(const RealField& u, const NoiseEnhancement& enh);

struct EnergyReport {
  double total = 0.0;
  double quadratic = 0.0;  // 1/2 (<u, L u> - <u, V(u)>)
  double nonlinear = 0.0;  // -mean F(u)
  double grad_norm = 0.0;  // sqrt(<g, L^{-1} g>), the descent stopping metric
};

EnergyReport energy(const RealField& u, const Nonlinearity& nl,
                    const NoiseEnhancement& enh);

// gradient of E restricted to the dealiased subspace:
// dealias(L u - xi u + renorm_const u - f(u))
RealField frechet_gradient(const RealField& u, const Nonlinearity& nl,
                           const NoiseEnhancement& enh);

double bilinear_B(const ParacontrolledTriple& vt, const ParacontrolledTriple& ut,
                  const NoiseEnhancement& enh, const DyadicPartition& part,
                  const LocalizationParams& loc, const GammaConfig& cfg);

struct MinimizeOptions {
  double tol = 1e-8;  // on sqrt(<g, L^{-1} g>)
  int max_iter = 5000;
  double armijo_c1 = 1e-4;
  double backtrack = 0.5;
  double step_init = 1.0;
  double min_step = 1e-14;
  double divergence_floor = -1e12;
  double init_amplitude = 0.1;  // H^1 norm of the random start
  std::uint64_t init_salt = 0;
};

struct MinimizeResult {
  ParacontrolledTriple triple;
  bool converged = false;
  int iterations = 0;
  double residual = 0.0;
  EnergyReport energy;
  std::vector<double> energy_trace;  // initial energy, then one per step
};

// preconditioned Armijo descent: direction L^{-1} g, fresh unit initial step
// each iteration, backtracking by 1/2 with sufficient-decrease 1e-4
MinimizeResult minimize(const Nonlinearity& nl, const NoiseEnhancement& enh,
                        const DyadicPartition& part, const LocalizationParams& loc,
                        const GammaConfig& cfg, const MinimizeOptions& opt);

// max over paracontrolled probes v of |B(v,u) - <v, f(u)>| / ||v||_D with
// ||v||_D^2 = ||v||_{H^gamma}^2 + ||v_sharp||_{H^1}^2
double weak_residual(const ParacontrolledTriple& t, const Nonlinearity& nl,
                     const NoiseEnhancement& enh, const DyadicPartition& part,
                     const LocalizationParams& loc, const GammaConfig& cfg,
                     int n_probes = 64, std::uint64_t probe_salt = 0);

struct CoercivityReport {
  double ground_energy = 0.0;  // smallest eigenvalue of H on the subspace
  double lambda_est = 0.0;     // max(0, -ground_energy) + 0.1
  double c_est = 0.0;          // slope of B + lambda ||.||^2 against ||.||_D^2
  double min_shifted_quotient = 0.0;
  int matvecs = 0;
};

// Lanczos warm start plus shifted inverse power iteration with
// L-preconditioned conjugate-gradient solves.
CoercivityReport coercivity_probe(const NoiseEnhancement& enh,
                                  const DyadicPartition& part,
                                  const LocalizationParams& loc,
                                  const GammaConfig& cfg, int quad_probes = 100,
                                  std::uint64_t probe_salt = 0);

}  // namespace pcf
