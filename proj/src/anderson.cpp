#include "pcf/anderson.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>

#include "pcf/errors.hpp"
#include "pcf/rng.hpp"

namespace pcf {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr std::uint64_t kThresholdProbeSalt = 0x74687265736831ull;

void check_grid(const GridSpec& a, const GridSpec& b, const char* what) {
  if (!(a == b)) throw validation_error(std::string("grid mismatch in ") + what);
}

void check_loc(const LocalizationParams& loc, const DyadicPartition& part) {
  if (loc.L < -1.0 || loc.L > part.j_max || loc.K < -1.0 || loc.K > part.j_max)
    throw validation_error("localization thresholds outside [-1, j_max]");
}

// one paraproduct side: dyadic blocks plus their running prefix sums
struct Family {
  std::vector<RealField> blocks;
  std::vector<RealField> prefix;
};

Family make_family(std::vector<RealField> blocks) {
  Family f;
  f.prefix = block_prefix_sums(blocks);
  f.blocks = std::move(blocks);
  return f;
}

SpectralField deriv_spectral(const SpectralField& s, int axis) {
  SpectralField o = s;
  const int n = o.grid.n;
  for (int m1 = 0; m1 < n; ++m1) {
    const int k1 = freq_of_index(m1, n);
    for (int m2 = 0; m2 < n; ++m2) {
      const int k2 = freq_of_index(m2, n);
      const int ka = axis == 0 ? k1 : k2;
      std::complex<double>& z = o.c[static_cast<std::size_t>(m1) * n + m2];
      if (ka == -n / 2)
        z = 0.0;
      else
        z *= std::complex<double>(0.0, kTwoPi * ka);
    }
  }
  return o;
}

// blocks of U_> s at integer threshold T: ifft(rho_j (1 - lambda_T) shat)
std::vector<RealField> high_blocks(const SpectralField& s, const DyadicPartition& part,
                                   int T) {
  const auto& lvl = part.level_multiplier(T);
  std::vector<RealField> out;
  out.reserve(part.block_count());
  SpectralField tmp(s.grid);
  for (int j = -1; j <= part.j_max; ++j) {
    const auto& blk = part.block_multiplier(j);
    for (std::size_t i = 0; i < tmp.c.size(); ++i)
      tmp.c[i] = s.c[i] * (blk[i] * (1.0 - lvl[i]));
    out.push_back(fft_inverse(tmp));
  }
  return out;
}

Family complement_family(const Family& full, const Family& hi) {
  Family lo;
  lo.blocks.reserve(full.blocks.size());
  lo.prefix.reserve(full.prefix.size());
  for (std::size_t i = 0; i < full.blocks.size(); ++i) {
    lo.blocks.push_back(full.blocks[i] - hi.blocks[i]);
    lo.prefix.push_back(full.prefix[i] - hi.prefix[i]);
  }
  return lo;
}

// acc += coeff * sum_{j >= 1} S_{j-2} f * Delta_j g, raw (no dealias)
void accumulate_para(RealField& acc, const std::vector<RealField>& f_prefix,
                     const std::vector<RealField>& g_blocks,
                     const DyadicPartition& part, double coeff) {
  const std::size_t sz = acc.v.size();
  for (int j = 1; j <= part.j_max; ++j) {
    const auto& S = f_prefix[static_cast<std::size_t>(j - 2) + 1].v;
    const auto& B = g_blocks[static_cast<std::size_t>(j) + 1].v;
    double* a = acc.v.data();
    for (std::size_t i = 0; i < sz; ++i) a[i] += coeff * S[i] * B[i];
  }
}

// acc += coeff * sum_{|i-j| <= 1} Delta_i f * Delta_j g, raw
void accumulate_resonant(RealField& acc, const std::vector<RealField>& f_blocks,
                         const std::vector<RealField>& g_blocks,
                         const DyadicPartition& part, double coeff) {
  const std::size_t sz = acc.v.size();
  for (int i = -1; i <= part.j_max; ++i) {
    for (int j = std::max(-1, i - 1); j <= std::min(part.j_max, i + 1); ++j) {
      const auto& F = f_blocks[static_cast<std::size_t>(i) + 1].v;
      const auto& G = g_blocks[static_cast<std::size_t>(j) + 1].v;
      double* a = acc.v.data();
      for (std::size_t m = 0; m < sz; ++m) a[m] += coeff * F[m] * G[m];
    }
  }
}

struct Workspace {
  GridSpec grid;
  const DyadicPartition* part = nullptr;
  LocalizationParams loc;
  GammaConfig cfg;
  Family xi, xi_hi, xi_lo;
  Family w, w_hi, w_lo;
  std::vector<RealField> th_blocks, d0th_blocks, d1th_blocks;
  RealField res_theta_xi;  // wick_area + renorm_const
  std::vector<double> wgamma;
};

Workspace make_workspace(const NoiseEnhancement& enh, const DyadicPartition& part,
                         const LocalizationParams& loc, const GammaConfig& cfg) {
  check_grid(enh.grid, part.grid, "enhancement/partition");
  check_loc(loc, part);
  if (cfg.max_iter < 1 || cfg.tol <= 0.0 || cfg.gamma_exp <= 0.0)
    throw validation_error("bad gamma configuration");
  Workspace ws;
  ws.grid = enh.grid;
  ws.part = &part;
  ws.loc = loc;
  ws.cfg = cfg;

  SpectralField xh = fft_forward(enh.xi);
  ws.xi = make_family(lp_blocks_spectral(xh, part));
  ws.xi_hi = make_family(high_blocks(xh, part, static_cast<int>(std::floor(loc.L))));
  ws.xi_lo = complement_family(ws.xi, ws.xi_hi);

  SpectralField th = xh;
  apply_L_inverse_spectral(th);
  ws.th_blocks = lp_blocks_spectral(th, part);
  ws.d0th_blocks = lp_blocks_spectral(deriv_spectral(th, 0), part);
  ws.d1th_blocks = lp_blocks_spectral(deriv_spectral(th, 1), part);

  SpectralField wh = fft_forward(enh.wick_area);
  ws.w = make_family(lp_blocks_spectral(wh, part));
  ws.w_hi = make_family(high_blocks(wh, part, static_cast<int>(std::floor(loc.K))));
  ws.w_lo = complement_family(ws.w, ws.w_hi);

  ws.res_theta_xi = enh.wick_area;
  for (double& v : ws.res_theta_xi.v) v += enh.renorm_const;
  ws.wgamma = sobolev_weights(part, cfg.gamma_exp);
  return ws;
}

struct UTables {
  SpectralField uhat;
  std::vector<RealField> blocks, prefix;
  std::vector<RealField> prefix_L, prefix_d0, prefix_d1;  // aux, map only
};

UTables build_utables(const RealField& u, const DyadicPartition& part, bool with_aux) {
  UTables t;
  t.uhat = fft_forward(u);
  t.blocks = lp_blocks_spectral(t.uhat, part);
  t.prefix = block_prefix_sums(t.blocks);
  if (with_aux) {
    SpectralField lhat = t.uhat;
    apply_L_spectral(lhat);
    t.prefix_L = block_prefix_sums(lp_blocks_spectral(lhat, part));
    t.prefix_d0 = block_prefix_sums(lp_blocks_spectral(deriv_spectral(t.uhat, 0), part));
    t.prefix_d1 = block_prefix_sums(lp_blocks_spectral(deriv_spectral(t.uhat, 1), part));
  }
  return t;
}

// raw accumulators of the paracontrolled map: para_raw = u para< theta,
// integ_raw = the remainder integrand before dealias and L^{-1}
void eval_map_raw(const Workspace& ws, const UTables& ut, RealField& para_raw,
                  RealField& integ_raw) {
  const DyadicPartition& P = *ws.part;
  para_raw = RealField(ws.grid);
  integ_raw = RealField(ws.grid);
  accumulate_para(para_raw, ut.prefix, ws.th_blocks, P, 1.0);
  accumulate_para(integ_raw, ut.prefix, ws.xi_lo.blocks, P, -1.0);
  accumulate_para(integ_raw, ws.xi_hi.prefix, ut.blocks, P, 1.0);
  accumulate_para(integ_raw, ws.w_hi.prefix, ut.blocks, P, 1.0);
  accumulate_para(integ_raw, ut.prefix, ws.w_hi.blocks, P, 1.0);
  accumulate_para(integ_raw, ut.prefix_L, ws.th_blocks, P, -1.0);
  accumulate_para(integ_raw, ut.prefix_d0, ws.d0th_blocks, P, ws.cfg.grad_coeff);
  accumulate_para(integ_raw, ut.prefix_d1, ws.d1th_blocks, P, ws.cfg.grad_coeff);
}

RealField finish_dealias(const RealField& raw) {
  SpectralField s = fft_forward(raw);
  dealias_spectral(s);
  return fft_inverse(s);
}

RealField finish_linverse(const RealField& raw) {
  SpectralField s = fft_forward(raw);
  dealias_spectral(s);
  apply_L_inverse_spectral(s);
  return fft_inverse(s);
}

// ||mask (para_hat + integ_hat / sigma)||_{H^gamma} without forming fields
double map_norm_spectral(const Workspace& ws, const SpectralField& para_hat,
                         const SpectralField& integ_hat) {
  const GridSpec& g = ws.grid;
  const int n = g.n;
  long double acc = 0.0L;
  for (int m1 = 0; m1 < n; ++m1) {
    const int k1 = freq_of_index(m1, n);
    for (int m2 = 0; m2 < n; ++m2) {
      const int k2 = freq_of_index(m2, n);
      if (!mode_kept(g, k1, k2)) continue;
      const std::size_t idx = static_cast<std::size_t>(m1) * n + m2;
      const std::complex<double> z =
          para_hat.c[idx] + integ_hat.c[idx] / lap_symbol(g, k1, k2);
      acc += static_cast<long double>(ws.wgamma[idx]) * std::norm(z);
    }
  }
  return std::sqrt(static_cast<double>(acc));
}

}  // namespace

ThresholdCert choose_thresholds(const NoiseEnhancement& enh, const DyadicPartition& part,
                                const GammaConfig& cfg, int n_probes,
                                std::uint64_t probe_salt) {
  check_grid(enh.grid, part.grid, "enhancement/partition");
  if (n_probes < 1) throw validation_error("need at least one probe");
  const GridSpec& grid = enh.grid;
  const int jmax = part.j_max;

  // unit-H^gamma dealiased white-noise probes
  const std::uint64_t root =
      mix64(enh.seed ^ kThresholdProbeSalt ^ mix64(probe_salt));
  std::vector<RealField> probes;
  probes.reserve(n_probes);
  for (int i = 0; i < n_probes; ++i) {
    RealField p = dealias(sample_white_noise(grid, derive_seed(root, i)));
    const double nn = sobolev_norm(p, part, cfg.gamma_exp);
    if (nn <= 0.0) throw numerical_error("degenerate probe");
    probes.push_back((1.0 / nn) * p);
  }

  // loc-independent noise spectra and per-K Wick-area families
  SpectralField xh = fft_forward(enh.xi);
  Family xi_full = make_family(lp_blocks_spectral(xh, part));
  SpectralField th = xh;
  apply_L_inverse_spectral(th);
  const std::vector<RealField> th_blocks = lp_blocks_spectral(th, part);
  const std::vector<RealField> d0th = lp_blocks_spectral(deriv_spectral(th, 0), part);
  const std::vector<RealField> d1th = lp_blocks_spectral(deriv_spectral(th, 1), part);
  SpectralField wh = fft_forward(enh.wick_area);
  std::vector<Family> w_hi_by;
  w_hi_by.reserve(jmax + 2);
  for (int K = -1; K <= jmax; ++K)
    w_hi_by.push_back(make_family(high_blocks(wh, part, K)));

  const std::vector<double> wgamma = sobolev_weights(part, cfg.gamma_exp);

  // cached per-probe tables: u blocks/prefixes and the loc-independent
  // accumulators (u para< theta spectrum, base integrand)
  struct ProbeTab {
    std::vector<RealField> blocks, prefix;
    SpectralField para_hat;
    RealField base_integ;
  };
  std::vector<ProbeTab> cache;
  std::vector<int> cache_idx;
  const std::size_t cache_cap = 8;
  auto probe_tab = [&](int i) -> const ProbeTab& {
    for (std::size_t c = 0; c < cache_idx.size(); ++c)
      if (cache_idx[c] == i) return cache[c];
    UTables ut = build_utables(probes[i], part, true);
    ProbeTab tab;
    RealField para_raw(grid);
    accumulate_para(para_raw, ut.prefix, th_blocks, part, 1.0);
    tab.para_hat = fft_forward(para_raw);
    tab.base_integ = RealField(grid);
    accumulate_para(tab.base_integ, ut.prefix_L, th_blocks, part, -1.0);
    accumulate_para(tab.base_integ, ut.prefix_d0, d0th, part, cfg.grad_coeff);
    accumulate_para(tab.base_integ, ut.prefix_d1, d1th, part, cfg.grad_coeff);
    tab.blocks = std::move(ut.blocks);
    tab.prefix = std::move(ut.prefix);
    if (cache.size() < cache_cap) {
      cache.push_back(std::move(tab));
      cache_idx.push_back(i);
      return cache.back();
    }
    static thread_local ProbeTab scratch;
    scratch = std::move(tab);
    return scratch;
  };

  Workspace ws;  // only the fields map_norm_spectral needs
  ws.grid = grid;
  ws.part = &part;
  ws.cfg = cfg;
  ws.wgamma = wgamma;

  for (int L = -1; L <= jmax; ++L) {
    const Family xi_hi = make_family(high_blocks(xh, part, L));
    const Family xi_lo = complement_family(xi_full, xi_hi);
    for (int K = -1; K <= jmax; ++K) {
      const Family& w_hi = w_hi_by[static_cast<std::size_t>(K) + 1];
      double worst = 0.0;
      bool ok = true;
      for (int i = 0; i < n_probes && ok; ++i) {
        const ProbeTab& tab = probe_tab(i);
        RealField integ = tab.base_integ;
        accumulate_para(integ, tab.prefix, xi_lo.blocks, part, -1.0);
        accumulate_para(integ, xi_hi.prefix, tab.blocks, part, 1.0);
        accumulate_para(integ, w_hi.prefix, tab.blocks, part, 1.0);
        accumulate_para(integ, tab.prefix, w_hi.blocks, part, 1.0);
        const double nrm = map_norm_spectral(ws, tab.para_hat, fft_forward(integ));
        worst = std::max(worst, nrm);
        if (nrm > 0.5) ok = false;
      }
      if (ok) {
        ThresholdCert cert;
        cert.loc.L = static_cast<double>(L);
        cert.loc.K = static_cast<double>(K);
        cert.realized = worst;
        cert.probes = n_probes;
        return cert;
      }
    }
  }
  throw numerical_error("no admissible localization thresholds");
}

double contraction_norm(const RealField& u, const NoiseEnhancement& enh,
                        const DyadicPartition& part, const LocalizationParams& loc,
                        const GammaConfig& cfg) {
  check_grid(u.grid, enh.grid, "field/enhancement");
  Workspace ws = make_workspace(enh, part, loc, cfg);
  UTables ut = build_utables(u, part, true);
  RealField para_raw, integ_raw;
  eval_map_raw(ws, ut, para_raw, integ_raw);
  return map_norm_spectral(ws, fft_forward(para_raw), fft_forward(integ_raw));
}

RealField remainder_R(const RealField& u, const NoiseEnhancement& enh,
                      const DyadicPartition& part, const LocalizationParams& loc,
                      const GammaConfig& cfg) {
  check_grid(u.grid, enh.grid, "field/enhancement");
  Workspace ws = make_workspace(enh, part, loc, cfg);
  UTables ut = build_utables(u, part, true);
  RealField para_raw, integ_raw;
  eval_map_raw(ws, ut, para_raw, integ_raw);
  return finish_linverse(integ_raw);
}

GammaResult gamma_map(const RealField& sharp, const NoiseEnhancement& enh,
                      const DyadicPartition& part, const LocalizationParams& loc,
                      const GammaConfig& cfg) {
  check_grid(sharp.grid, enh.grid, "field/enhancement");
  Workspace ws = make_workspace(enh, part, loc, cfg);
  GammaResult r;
  RealField u = sharp;
  double prev_inc = -1.0;
  bool converged = false;
  for (int m = 0; m < cfg.max_iter; ++m) {
    UTables ut = build_utables(u, part, true);
    RealField para_raw, integ_raw;
    eval_map_raw(ws, ut, para_raw, integ_raw);
    RealField unew = sharp + finish_dealias(para_raw) + finish_linverse(integ_raw);
    const double inc = sobolev_norm(unew - u, part, cfg.gamma_exp);
    const double nn = sobolev_norm(unew, part, cfg.gamma_exp);
    if (prev_inc > 0.0)
      r.realized_contraction = std::max(r.realized_contraction, inc / prev_inc);
    prev_inc = inc;
    u = std::move(unew);
    r.iterations = m + 1;
    r.residual = nn > 0.0 ? inc / nn : inc;
    if (r.residual <= cfg.tol) {
      converged = true;
      break;
    }
  }
  if (!converged) throw numerical_error("paracontrolled fixed point did not converge");
  r.triple = gamma_inverse(u, enh, part, loc, cfg);
  return r;
}

ParacontrolledTriple gamma_inverse(const RealField& u, const NoiseEnhancement& enh,
                                   const DyadicPartition& part,
                                   const LocalizationParams& loc,
                                   const GammaConfig& cfg) {
  check_grid(u.grid, enh.grid, "field/enhancement");
  Workspace ws = make_workspace(enh, part, loc, cfg);
  UTables ut = build_utables(u, part, true);
  RealField para_raw, integ_raw;
  eval_map_raw(ws, ut, para_raw, integ_raw);
  ParacontrolledTriple t;
  t.u = u;
  t.para = finish_dealias(para_raw);
  t.remainder = finish_linverse(integ_raw);
  t.sharp = t.u - t.para - t.remainder;
  return t;
}

HamiltonianParts hamiltonian_parts(const ParacontrolledTriple& t,
                                   const NoiseEnhancement& enh,
                                   const DyadicPartition& part,
                                   const LocalizationParams& loc,
                                   const GammaConfig& cfg) {
  check_grid(t.u.grid, enh.grid, "triple/enhancement");
  Workspace ws = make_workspace(enh, part, loc, cfg);
  UTables ut = build_utables(t.u, part, false);
  const GridSpec& grid = enh.grid;
  HamiltonianParts parts;

  RealField phi_raw(grid);
  accumulate_para(phi_raw, ut.prefix, ws.xi_hi.blocks, part, 1.0);
  accumulate_para(phi_raw, ws.xi_hi.prefix, ut.blocks, part, 1.0);
  accumulate_para(phi_raw, ws.w_hi.prefix, ut.blocks, part, 1.0);
  accumulate_para(phi_raw, ut.prefix, ws.w_hi.blocks, part, 1.0);
  parts.phi = finish_dealias(phi_raw);

  RealField g_raw(grid);
  accumulate_para(g_raw, ut.prefix, ws.xi_lo.blocks, part, 1.0);
  accumulate_para(g_raw, ws.xi_lo.prefix, ut.blocks, part, 1.0);
  accumulate_para(g_raw, ws.w_lo.prefix, ut.blocks, part, 1.0);
  accumulate_para(g_raw, ut.prefix, ws.w_lo.blocks, part, 1.0);
  accumulate_resonant(g_raw, lp_blocks(t.remainder, part), ws.xi.blocks, part, 1.0);
  accumulate_resonant(g_raw, lp_blocks(t.para, part), ws.xi.blocks, part, 1.0);
  accumulate_resonant(g_raw, ut.blocks, ws.w.blocks, part, 1.0);
  for (std::size_t i = 0; i < g_raw.v.size(); ++i)
    g_raw.v[i] -= t.u.v[i] * ws.res_theta_xi.v[i];
  parts.g_low = finish_dealias(g_raw);

  RealField sr_raw(grid);
  accumulate_resonant(sr_raw, lp_blocks(t.sharp, part), ws.xi.blocks, part, 1.0);
  parts.sharp_res = finish_dealias(sr_raw);

  SpectralField s = fft_forward(t.para + t.remainder);
  apply_L_spectral(s);
  parts.balance = fft_inverse(s) - parts.phi;
  return parts;
}

RealField wick_product(const ParacontrolledTriple& t, const NoiseEnhancement& enh,
                       const DyadicPartition& part, const LocalizationParams& loc,
                       const GammaConfig& cfg) {
  HamiltonianParts parts = hamiltonian_parts(t, enh, part, loc, cfg);
  return parts.phi + parts.g_low + parts.sharp_res;
}

PhiPsi phi_psi(const ParacontrolledTriple& t, const NoiseEnhancement& enh,
               const DyadicPartition& part, const LocalizationParams& loc,
               const GammaConfig& cfg) {
  HamiltonianParts parts = hamiltonian_parts(t, enh, part, loc, cfg);
  PhiPsi out;
  out.phi = std::move(parts.phi);
  out.psi = parts.g_low + parts.sharp_res;
  return out;
}

RealField apply_H(const ParacontrolledTriple& t, const NoiseEnhancement& enh,
                  const DyadicPartition& part, const LocalizationParams& loc,
                  const GammaConfig& cfg) {
  HamiltonianParts parts = hamiltonian_parts(t, enh, part, loc, cfg);
  SpectralField s = fft_forward(t.sharp);
  apply_L_spectral(s);
  return fft_inverse(s) - parts.sharp_res - parts.g_low + parts.balance;
}

double remainder_defect(const ParacontrolledTriple& t, const NoiseEnhancement& enh,
                        const DyadicPartition& part, const LocalizationParams& loc,
                        const GammaConfig& cfg) {
  const double un = sobolev_norm(t.u, part, 1.0);
  if (un == 0.0) return 0.0;
  HamiltonianParts parts = hamiltonian_parts(t, enh, part, loc, cfg);
  return sobolev_norm(parts.balance, part, -1.0) / un;
}

}  // namespace pcf
