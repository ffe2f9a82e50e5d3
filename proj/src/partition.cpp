#include "pcf/partition.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace pcf {

double lp_bump(double r) {
  r = std::fabs(r);
  if (r <= 1.0) return 1.0;
  if (r >= 2.0) return 0.0;
  const double t = r - 1.0;
  return std::exp(1.0 - 1.0 / (1.0 - t * t));
}

DyadicPartition make_partition(const GridSpec& grid) {
  DyadicPartition part;
  part.grid = grid;
  const double r_max = std::sqrt(2.0) * (grid.n / 2);
  int J = 0;
  while (static_cast<double>(1 << J) < r_max) ++J;
  part.j_max = J;

  const int n = grid.n;
  std::vector<double> radius(static_cast<size_t>(n) * n);
  for (int m1 = 0; m1 < n; ++m1) {
    const double k1 = freq_of_index(m1, n);
    for (int m2 = 0; m2 < n; ++m2) {
      const double k2 = freq_of_index(m2, n);
      radius[static_cast<size_t>(m1) * n + m2] = std::sqrt(k1 * k1 + k2 * k2);
    }
  }

  part.level.resize(part.block_count());
  for (int j = -1; j <= J; ++j) {
    std::vector<double>& lam = part.level[j + 1];
    lam.resize(radius.size());
    const double scale = std::ldexp(1.0, -j);  // 2^{-j}
    for (size_t i = 0; i < radius.size(); ++i) lam[i] = lp_bump(radius[i] * scale);
  }

  part.mult.resize(part.block_count());
  part.mult[0] = part.level[0];  // chi
  for (int j = 0; j <= J; ++j) {
    std::vector<double>& rho = part.mult[j + 1];
    rho.resize(radius.size());
    const std::vector<double>& hi = part.level[j + 1];
    const std::vector<double>& lo = part.level[j];
    for (size_t i = 0; i < radius.size(); ++i) rho[i] = hi[i] - lo[i];
  }
  return part;
}

double partition_residual(const DyadicPartition& part) {
  double worst = 0.0;
  const size_t sz = part.mult[0].size();
  for (size_t i = 0; i < sz; ++i) {
    double s = 0.0;
    for (int j = -1; j <= part.j_max; ++j) s += part.mult[j + 1][i];
    worst = std::max(worst, std::fabs(s - 1.0));
  }
  return worst;
}

namespace {

void check_block_index(const DyadicPartition& part, int j) {
  if (j < -1 || j > part.j_max)
    throw std::invalid_argument("block index " + std::to_string(j) +
                                " outside [-1, " + std::to_string(part.j_max) + "]");
}

void check_same_grid(const DyadicPartition& part, const GridSpec& g) {
  if (part.grid != g)
    throw std::invalid_argument("partition grid does not match field grid");
}

}  // namespace

RealField lp_block(const RealField& f, const DyadicPartition& part, int j) {
  check_block_index(part, j);
  check_same_grid(part, f.grid);
  SpectralField s = fft_forward(f);
  const std::vector<double>& w = part.block_multiplier(j);
  for (size_t i = 0; i < s.c.size(); ++i) s.c[i] *= w[i];
  return fft_inverse(s);
}

std::vector<RealField> lp_blocks_spectral(const SpectralField& s,
                                          const DyadicPartition& part) {
  check_same_grid(part, s.grid);
  std::vector<RealField> out;
  out.reserve(part.block_count());
  SpectralField scratch(s.grid);
  for (int j = -1; j <= part.j_max; ++j) {
    const std::vector<double>& w = part.block_multiplier(j);
    for (size_t i = 0; i < s.c.size(); ++i) scratch.c[i] = s.c[i] * w[i];
    out.push_back(fft_inverse(scratch));
  }
  return out;
}

std::vector<RealField> lp_blocks(const RealField& f, const DyadicPartition& part) {
  return lp_blocks_spectral(fft_forward(f), part);
}

namespace {

double q_combine(const std::vector<double>& weighted, int q) {
  switch (q) {
    case 1: {
      long double s = 0.0L;
      for (double x : weighted) s += x;
      return static_cast<double>(s);
    }
    case 2: {
      long double s = 0.0L;
      for (double x : weighted) s += static_cast<long double>(x) * x;
      return std::sqrt(static_cast<double>(s));
    }
    case 0: {
      double m = 0.0;
      for (double x : weighted) m = std::max(m, x);
      return m;
    }
    default:
      throw std::invalid_argument("besov q must be 1, 2 or 0 (= infinity)");
  }
}

}  // namespace

double besov_norm(const RealField& f, const DyadicPartition& part, BesovIndex ix) {
  check_same_grid(part, f.grid);
  if (ix.p == 2 && ix.q == 2) {
    SpectralField s = fft_forward(f);
    return sobolev_norm_spectral(s, sobolev_weights(part, ix.alpha));
  }
  std::vector<RealField> blocks = lp_blocks(f, part);
  std::vector<double> weighted(blocks.size());
  for (int j = -1; j <= part.j_max; ++j)
    weighted[j + 1] = std::pow(2.0, ix.alpha * j) * lp_norm(blocks[j + 1], ix.p);
  return q_combine(weighted, ix.q);
}

double sobolev_norm(const RealField& f, const DyadicPartition& part, double alpha) {
  return besov_norm(f, part, BesovIndex{alpha, 2, 2});
}

double holder_norm(const RealField& f, const DyadicPartition& part, double alpha) {
  return besov_norm(f, part, BesovIndex{alpha, 0, 0});
}

std::vector<double> sobolev_weights(const DyadicPartition& part, double alpha) {
  const size_t sz = part.mult[0].size();
  std::vector<double> w(sz, 0.0);
  for (int j = -1; j <= part.j_max; ++j) {
    const double a = std::pow(2.0, 2.0 * alpha * j);
    const std::vector<double>& rho = part.block_multiplier(j);
    for (size_t i = 0; i < sz; ++i) w[i] += a * rho[i] * rho[i];
  }
  return w;
}

double sobolev_norm_spectral(const SpectralField& s, const std::vector<double>& w) {
  if (s.c.size() != w.size())
    throw std::invalid_argument("sobolev weight table does not match spectrum");
  long double acc = 0.0L;
  for (size_t i = 0; i < w.size(); ++i) acc += w[i] * std::norm(s.c[i]);
  return std::sqrt(static_cast<double>(acc));
}

DecayFit decay_fit_from_norms(const std::vector<double>& norms, int j_lo, int j_hi) {
  if (j_hi - j_lo < 3)
    throw std::invalid_argument("decay fit needs j_hi - j_lo >= 3");
  long double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  const int m = j_hi - j_lo + 1;
  for (int j = j_lo; j <= j_hi; ++j) {
    const double b = norms[static_cast<size_t>(j + 1)];
    if (!(b > 1e-300))
      throw std::domain_error("decay fit degenerate: vanishing block norm at j=" +
                              std::to_string(j));
    const double y = std::log2(b);
    sx += j;
    sy += y;
    sxx += static_cast<long double>(j) * j;
    sxy += static_cast<long double>(j) * y;
    syy += static_cast<long double>(y) * y;
  }
  const long double det = m * sxx - sx * sx;
  DecayFit fit;
  fit.slope = static_cast<double>((m * sxy - sx * sy) / det);
  const long double ss_tot = syy - sy * sy / m;
  const long double intercept = (sy - fit.slope * sx) / m;
  long double ss_res = 0;
  for (int j = j_lo; j <= j_hi; ++j) {
    const double y = std::log2(norms[static_cast<size_t>(j + 1)]);
    const long double r = y - (intercept + fit.slope * j);
    ss_res += r * r;
  }
  fit.r2 = ss_tot > 0 ? static_cast<double>(1.0L - ss_res / ss_tot) : 1.0;
  fit.exponent = -fit.slope;
  return fit;
}

DecayFit block_decay_fit(const RealField& f, const DyadicPartition& part, int p,
                         int j_lo, int j_hi) {
  check_block_index(part, j_lo);
  check_block_index(part, j_hi);
  std::vector<RealField> blocks = lp_blocks(f, part);
  std::vector<double> norms(blocks.size());
  for (size_t i = 0; i < blocks.size(); ++i) norms[i] = lp_norm(blocks[i], p);
  return decay_fit_from_norms(norms, j_lo, j_hi);
}

// the first octave holds only a handful of lattice modes and its sup-norm is
// far from the scaling regime; skip it whenever a >= 3-octave window survives
int decay_fit_lo(const DyadicPartition& part) {
  return part.j_max - 2 >= 4 ? 1 : 0;
}
int decay_fit_hi(const DyadicPartition& part) { return part.j_max - 2; }

double bernstein_probe(const RealField& f, const DyadicPartition& part, int j,
                       int p, int q) {
  check_block_index(part, j);
  RealField b = lp_block(f, part, j);
  const double base = lp_norm(b, p);
  if (!(base > 1e-300))
    throw std::domain_error("bernstein probe: block is numerically zero");
  RealField d1 = derivative(b, 0);
  RealField d2 = derivative(b, 1);
  RealField gmag(b.grid);
  for (size_t i = 0; i < gmag.v.size(); ++i)
    gmag.v[i] = std::hypot(d1.v[i], d2.v[i]);
  const double inv_p = p == 0 ? 0.0 : 1.0 / p;
  const double inv_q = q == 0 ? 0.0 : 1.0 / q;
  const double scale = std::pow(2.0, j * (1.0 + 2.0 * (inv_p - inv_q)));
  return lp_norm(gmag, q) / (scale * base);
}

}  // namespace pcf
