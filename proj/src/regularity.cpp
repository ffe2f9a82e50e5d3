#include "pcf/regularity.hpp"

#include <algorithm>
#include <cmath>

#include "pcf/errors.hpp"
#include "pcf/parallel.hpp"
#include "pcf/rng.hpp"

namespace pcf {

namespace {

constexpr std::uint64_t kSweepDirSalt = 0x73776565706469ull;

bool ordering_holds(double au, double ar, double as) {
  const double tol = 1e-9;
  const bool spaced = (as >= ar + 0.3 - tol) && (ar >= au + 0.3 - tol);
  const bool smooth = au >= 3.0 && ar >= 3.0 && as >= 3.0;
  return spaced || smooth;
}

SchauderRow fit_row(const ParacontrolledTriple& t, const DyadicPartition& part) {
  SchauderRow row;
  const DecayFit fu = decay_exponent(t.u, part);
  const DecayFit fr = decay_exponent(t.remainder, part);
  const DecayFit fs = decay_exponent(t.sharp, part);
  row.alpha_u = fu.exponent;
  row.alpha_r = fr.exponent;
  row.alpha_sharp = fs.exponent;
  row.r2_u = fu.r2;
  row.r2_r = fr.r2;
  row.r2_sharp = fs.r2;
  row.ordering_ok = ordering_holds(row.alpha_u, row.alpha_r, row.alpha_sharp);
  row.pass = row.ordering_ok &&
             std::min({row.r2_u, row.r2_r, row.r2_sharp}) >= 0.8;
  return row;
}

}  // namespace

double l2_estimate_check(const ParacontrolledTriple& t, const NoiseEnhancement& enh,
                         const DyadicPartition& part, const LocalizationParams& loc,
                         const GammaConfig& cfg, double lambda) {
  if (lambda < 0.0) throw validation_error("lambda must be >= 0");
  const RealField Hu = apply_H(t, enh, part, loc, cfg);
  const double den = lp_norm(Hu, 2) + lambda * lp_norm(t.u, 2);
  if (den == 0.0) return 0.0;
  return sobolev_norm(t.sharp, part, 2.0) / den;
}

DecayFit decay_exponent(const RealField& f, const DyadicPartition& part) {
  const std::vector<RealField> blocks = lp_blocks(f, part);
  double peak = 0.0;
  std::vector<double> norms(blocks.size());
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    norms[i] = lp_norm(blocks[i], 0);
    peak = std::max(peak, norms[i]);
  }
  if (peak < 1e-250) {
    DecayFit fit;
    fit.slope = -9.0;
    fit.exponent = 9.0;
    fit.r2 = 1.0;
    return fit;
  }
  return decay_fit_from_norms(norms, decay_fit_lo(part), decay_fit_hi(part));
}

SchauderReport schauder_report(const GridSpec& grid, const Nonlinearity& nl,
                               std::uint64_t root_seed, int count, double eps,
                               const GammaConfig& cfg, const MinimizeOptions& opt) {
  if (count < 1) throw validation_error("seed count must be positive");
  const DyadicPartition part = make_partition(grid);
  SchauderReport rep;
  rep.rows.resize(count);
  parallel_for(count, [&](int i) {
    const std::uint64_t seed = derive_seed(root_seed, static_cast<std::uint64_t>(i));
    const NoiseEnhancement enh = enhance(grid, part, seed, eps);
    const ThresholdCert cert = choose_thresholds(enh, part, cfg);
    const MinimizeResult mr = minimize(nl, enh, part, cert.loc, cfg, opt);
    SchauderRow row = fit_row(mr.triple, part);
    row.seed = seed;
    row.pass = row.pass && mr.converged;
    rep.rows[i] = row;
  });
  int passed = 0;
  for (const SchauderRow& row : rep.rows) passed += row.pass ? 1 : 0;
  rep.pass_fraction = static_cast<double>(passed) / count;
  return rep;
}

std::vector<SweepRow> resolution_sweep(const std::vector<int>& ns, double mu,
                                       std::uint64_t root_seed, int count,
                                       const Nonlinearity& nl, double eps,
                                       const GammaConfig& cfg,
                                       const MinimizeOptions& opt) {
  if (ns.empty()) throw validation_error("need at least one resolution");
  if (count < 1) throw validation_error("seed count must be positive");
  std::vector<SweepRow> rows;
  for (const int n : ns) {
    const GridSpec grid(n, mu);
    const DyadicPartition part = make_partition(grid);
    std::vector<SweepRow> batch(count);
    parallel_for(count, [&](int i) {
      const std::uint64_t seed = derive_seed(root_seed, static_cast<std::uint64_t>(i));
      const NoiseEnhancement enh = enhance(grid, part, seed, eps);
      const ThresholdCert cert = choose_thresholds(enh, part, cfg);
      const MinimizeResult mr = minimize(nl, enh, part, cert.loc, cfg, opt);
      const ParacontrolledTriple& t = mr.triple;

      SweepRow row;
      row.n = n;
      row.seed_index = i;
      row.seed = seed;
      row.contraction = cert.realized;
      row.loc_L = cert.loc.L;
      row.loc_K = cert.loc.K;

      const double asm_form = bilinear_B(t, t, enh, part, cert.loc, cfg);
      const RealField wick = wick_product(t, enh, part, cert.loc, cfg);
      const double direct = inner(t.u, apply_L(t.u) - wick);
      row.form_err = std::abs(asm_form - direct) / (1.0 + std::abs(direct));

      // central finite difference along one random dealiased direction
      {
        RealField v = dealias(sample_white_noise(
            grid, derive_seed(mix64(seed ^ kSweepDirSalt), 0)));
        const double nv = lp_norm(v, 2);
        if (nv > 0.0) v = (1.0 / nv) * v;
        const double h = 1e-5;
        RealField up = t.u, dn = t.u;
        axpy(up, h, v);
        axpy(dn, -h, v);
        const double fd = (energy(up, nl, enh).total - energy(dn, nl, enh).total) /
                          (2.0 * h);
        const double gv = inner(frechet_gradient(t.u, nl, enh), v);
        row.grad_err = std::abs(fd - gv) / (1.0 + std::abs(gv));
      }

      const CoercivityReport cr = coercivity_probe(enh, part, cert.loc, cfg, 16);
      row.ground_energy = cr.ground_energy;
      row.lambda_est = cr.lambda_est;
      row.l2_ratio = l2_estimate_check(t, enh, part, cert.loc, cfg, cr.lambda_est);

      const SchauderRow sr = fit_row(t, part);
      row.alpha_u = sr.alpha_u;
      row.alpha_r = sr.alpha_r;
      row.alpha_sharp = sr.alpha_sharp;
      batch[i] = row;
    });
    rows.insert(rows.end(), batch.begin(), batch.end());
  }
  return rows;
}

}  // namespace pcf
