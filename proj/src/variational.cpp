#include "pcf/variational.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>

#include "pcf/errors.hpp"
#include "pcf/rng.hpp"

namespace pcf {

namespace {

constexpr std::uint64_t kInitSalt = 0x6d696e696e697461ull;
constexpr std::uint64_t kWeakProbeSalt = 0x7765616b70726f62ull;
constexpr std::uint64_t kCoerciveSalt = 0x636f657263697665ull;

void check_grid(const GridSpec& a, const GridSpec& b, const char* what) {
  if (!(a == b)) throw validation_error(std::string("grid mismatch in ") + what);
}

// piecewise-linear interpolation index: largest i with ts[i] <= s
std::size_t seg_index(const std::vector<double>& ts, double s) {
  auto it = std::upper_bound(ts.begin(), ts.end(), s);
  if (it == ts.begin()) return 0;
  std::size_t i = static_cast<std::size_t>(it - ts.begin()) - 1;
  return std::min(i, ts.size() - 2);
}

}  // namespace

double Nonlinearity::f(double s) const {
  switch (kind) {
    case Kind::zero:
      return 0.0;
    case Kind::cubic_minus:
      return -c3 * s * s * s;
    case Kind::double_well:
      return a * s - b * s * s * s;
    case Kind::custom: {
      if (s <= ts.front()) return fs.front();
      if (s >= ts.back()) return fs.back();
      const std::size_t i = seg_index(ts, s);
      const double t = (s - ts[i]) / (ts[i + 1] - ts[i]);
      return fs[i] + t * (fs[i + 1] - fs[i]);
    }
  }
  return 0.0;
}

double Nonlinearity::F(double s) const {
  switch (kind) {
    case Kind::zero:
      return 0.0;
    case Kind::cubic_minus:
      return -0.25 * c3 * s * s * s * s;
    case Kind::double_well:
      return 0.5 * a * s * s - 0.25 * b * s * s * s * s;
    case Kind::custom: {
      // A(s) = integral of the clamped interpolant from ts[0]; F = A(s) - A(0)
      auto A = [&](double x) -> double {
        if (x <= ts.front()) return (x - ts.front()) * fs.front();
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
          const double hi = std::min(x, ts[i + 1]);
          const double h = hi - ts[i];
          const double fh = fs[i] + (fs[i + 1] - fs[i]) * (h / (ts[i + 1] - ts[i]));
          acc += 0.5 * (fs[i] + fh) * h;
          if (x <= ts[i + 1]) return acc;
        }
        return acc + (x - ts.back()) * fs.back();
      };
      return A(s) - A(0.0);
    }
  }
  return 0.0;
}

double Nonlinearity::fprime(double s) const {
  switch (kind) {
    case Kind::zero:
      return 0.0;
    case Kind::cubic_minus:
      return -3.0 * c3 * s * s;
    case Kind::double_well:
      return a - 3.0 * b * s * s;
    case Kind::custom: {
      if (s < ts.front() || s > ts.back()) return 0.0;
      const std::size_t i = seg_index(ts, s);
      return (fs[i + 1] - fs[i]) / (ts[i + 1] - ts[i]);
    }
  }
  return 0.0;
}

Nonlinearity zero_nonlinearity() { return Nonlinearity{}; }

Nonlinearity cubic_minus(double c3) {
  if (!(c3 >= 0.0) || !std::isfinite(c3))
    throw validation_error("cubic coefficient must be finite and >= 0");
  Nonlinearity nl;
  nl.kind = Nonlinearity::Kind::cubic_minus;
  nl.c3 = c3;
  return nl;
}

Nonlinearity double_well(double a, double b) {
  if (!std::isfinite(a) || !(b > 0.0) || !std::isfinite(b))
    throw validation_error("double well needs finite a and b > 0");
  Nonlinearity nl;
  nl.kind = Nonlinearity::Kind::double_well;
  nl.a = a;
  nl.b = b;
  return nl;
}

Nonlinearity custom_nonlinearity(std::vector<double> ts, std::vector<double> fs) {
  if (ts.size() < 2 || ts.size() != fs.size())
    throw validation_error("custom nonlinearity needs >= 2 matching nodes");
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (!std::isfinite(ts[i]) || !std::isfinite(fs[i]))
      throw validation_error("custom nonlinearity nodes must be finite");
    if (i > 0 && ts[i] <= ts[i - 1])
      throw validation_error("custom nonlinearity nodes must be strictly increasing");
  }
  Nonlinearity nl;
  nl.kind = Nonlinearity::Kind::custom;
  nl.ts = std::move(ts);
  nl.fs = std::move(fs);
  return nl;
}

Nonlinearity parse_nonlinearity(const std::string& text) {
  if (text == "zero") return zero_nonlinearity();
  auto colon = text.find(':');
  const std::string head = text.substr(0, colon);
  const std::string rest = colon == std::string::npos ? "" : text.substr(colon + 1);
  auto parse_num = [&](const std::string& s) {
    try {
      std::size_t pos = 0;
      const double v = std::stod(s, &pos);
      if (pos != s.size()) throw validation_error("");
      return v;
    } catch (...) {
      throw validation_error("bad number '" + s + "' in nonlinearity '" + text + "'");
    }
  };
  if (head == "cubic") return cubic_minus(parse_num(rest));
  if (head == "dwell") {
    auto comma = rest.find(',');
    if (comma == std::string::npos)
      throw validation_error("dwell needs two comma-separated coefficients");
    return double_well(parse_num(rest.substr(0, comma)), parse_num(rest.substr(comma + 1)));
  }
  if (head == "custom") {
    std::ifstream in(rest);
    if (!in) throw validation_error("cannot open nonlinearity table '" + rest + "'");
    std::vector<double> ts, fs;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty() || line[0] == '#') continue;
      std::replace(line.begin(), line.end(), ',', ' ');
      std::istringstream ls(line);
      double t, f;
      if (!(ls >> t >> f))
        throw validation_error("bad nonlinearity table line " + std::to_string(lineno));
      ts.push_back(t);
      fs.push_back(f);
    }
    return custom_nonlinearity(std::move(ts), std::move(fs));
  }
  throw validation_error("unknown nonlinearity '" + text + "'");
}

AssumptionReport check_assumptions(const Nonlinearity& nl, const AssumptionParams& ap) {
  if (ap.samples < 2 || ap.range <= 0.0 || ap.slack <= 0.0)
    throw validation_error("bad assumption-check parameters");
  AssumptionReport rep;
  double worst_growth = 0.0, worst_margin = -1e300, worst_margin_rev = -1e300;
  for (int i = 0; i < ap.samples; ++i) {
    const double s = -ap.range + 2.0 * ap.range * i / (ap.samples - 1);
    const double as = std::abs(s);
    worst_growth = std::max(worst_growth,
                            std::abs(nl.f(s)) / (1.0 + std::pow(as, ap.l)));
    const double bound =
        ap.slack * (1.0 + ap.C0) - (ap.C1 / ap.slack) * std::pow(as, ap.k);
    worst_margin = std::max(worst_margin, nl.F(s) - bound);
    worst_margin_rev = std::max(worst_margin_rev, -nl.F(s) - bound);
  }
  rep.worst_growth = worst_growth;
  rep.growth_ok = worst_growth <= ap.slack;
  rep.worst_margin = worst_margin;
  rep.coercivity_ok = worst_margin <= 0.0;
  rep.direction_flag = !rep.coercivity_ok && worst_margin_rev <= 0.0;
  return rep;
}

RealField wick_apply(const RealField& u, const NoiseEnhancement& enh) {
  check_grid(u.grid, enh.grid, "wick_apply");
  RealField w(u.grid);
  for (std::size_t i = 0; i < w.v.size(); ++i)
    w.v[i] = enh.xi.v[i] * u.v[i] - enh.renorm_const * u.v[i];
  return dealias(w);
}

namespace {

// one-transform energy on the dealiased subspace; also hands back the spectrum
double energy_lite(const RealField& w, const Nonlinearity& nl,
                   const NoiseEnhancement& enh, SpectralField& what) {
  const GridSpec& g = w.grid;
  const int n = g.n;
  what = fft_forward(w);
  long double quad = 0.0L;
  for (int m1 = 0; m1 < n; ++m1) {
    const int k1 = freq_of_index(m1, n);
    for (int m2 = 0; m2 < n; ++m2) {
      const int k2 = freq_of_index(m2, n);
      quad += static_cast<long double>(lap_symbol(g, k1, k2)) *
              std::norm(what.c[static_cast<std::size_t>(m1) * n + m2]);
    }
  }
  long double pot = 0.0L, mass = 0.0L, fint = 0.0L;
  for (std::size_t i = 0; i < w.v.size(); ++i) {
    const double s = w.v[i];
    pot += static_cast<long double>(enh.xi.v[i]) * s * s;
    mass += static_cast<long double>(s) * s;
    fint += nl.F(s);
  }
  const double inv = 1.0 / (static_cast<double>(n) * n);
  return 0.5 * static_cast<double>(quad) -
         0.5 * (static_cast<double>(pot) - enh.renorm_const * static_cast<double>(mass)) * inv -
         static_cast<double>(fint) * inv;
}

// masked gradient spectrum ghat = sigma uhat - fft(xi u - C u + f(u)); returns
// <g, L^{-1} g> and fills dhat = ghat / sigma on kept modes (zero elsewhere)
double gradient_spectral(const RealField& u, const SpectralField& uhat,
                         const Nonlinearity& nl, const NoiseEnhancement& enh,
                         SpectralField& dhat) {
  const GridSpec& g = u.grid;
  const int n = g.n;
  RealField q(g);
  for (std::size_t i = 0; i < q.v.size(); ++i) {
    const double s = u.v[i];
    q.v[i] = enh.xi.v[i] * s - enh.renorm_const * s + nl.f(s);
  }
  SpectralField qhat = fft_forward(q);
  dhat = SpectralField(g);
  long double slope = 0.0L;
  for (int m1 = 0; m1 < n; ++m1) {
    const int k1 = freq_of_index(m1, n);
    for (int m2 = 0; m2 < n; ++m2) {
      const int k2 = freq_of_index(m2, n);
      const std::size_t idx = static_cast<std::size_t>(m1) * n + m2;
      if (!mode_kept(g, k1, k2)) continue;
      const double sig = lap_symbol(g, k1, k2);
      const std::complex<double> gh = sig * uhat.c[idx] - qhat.c[idx];
      slope += std::norm(gh) / sig;
      dhat.c[idx] = gh / sig;
    }
  }
  return static_cast<double>(slope);
}

}  // namespace

EnergyReport energy(const RealField& u, const Nonlinearity& nl,
                    const NoiseEnhancement& enh) {
  check_grid(u.grid, enh.grid, "energy");
  const GridSpec& g = u.grid;
  const int n = g.n;
  EnergyReport rep;
  SpectralField uhat = fft_forward(u);
  long double quad = 0.0L;
  for (int m1 = 0; m1 < n; ++m1) {
    const int k1 = freq_of_index(m1, n);
    for (int m2 = 0; m2 < n; ++m2) {
      const int k2 = freq_of_index(m2, n);
      quad += static_cast<long double>(lap_symbol(g, k1, k2)) *
              std::norm(uhat.c[static_cast<std::size_t>(m1) * n + m2]);
    }
  }
  const RealField V = wick_apply(u, enh);
  rep.quadratic = 0.5 * (static_cast<double>(quad) - inner(u, V));
  long double fint = 0.0L;
  for (const double s : u.v) fint += nl.F(s);
  rep.nonlinear = -static_cast<double>(fint) / (static_cast<double>(n) * n);
  rep.total = rep.quadratic + rep.nonlinear;
  SpectralField dhat;
  rep.grad_norm = std::sqrt(gradient_spectral(u, uhat, nl, enh, dhat));
  return rep;
}

RealField frechet_gradient(const RealField& u, const Nonlinearity& nl,
                           const NoiseEnhancement& enh) {
  check_grid(u.grid, enh.grid, "frechet_gradient");
  const GridSpec& g = u.grid;
  const int n = g.n;
  SpectralField uhat = fft_forward(u);
  SpectralField dhat;
  gradient_spectral(u, uhat, nl, enh, dhat);
  // dhat holds ghat / sigma; undo the preconditioner for the raw gradient
  for (int m1 = 0; m1 < n; ++m1) {
    const int k1 = freq_of_index(m1, n);
    for (int m2 = 0; m2 < n; ++m2) {
      const int k2 = freq_of_index(m2, n);
      dhat.c[static_cast<std::size_t>(m1) * n + m2] *= lap_symbol(g, k1, k2);
    }
  }
  return fft_inverse(dhat);
}

MinimizeResult minimize(const Nonlinearity& nl, const NoiseEnhancement& enh,
                        const DyadicPartition& part, const LocalizationParams& loc,
                        const GammaConfig& cfg, const MinimizeOptions& opt) {
  check_grid(enh.grid, part.grid, "minimize");
  if (opt.tol <= 0.0 || opt.max_iter < 1 || opt.backtrack <= 0.0 ||
      opt.backtrack >= 1.0 || opt.armijo_c1 <= 0.0 || opt.step_init <= 0.0)
    throw validation_error("bad minimizer options");

  RealField u = dealias(sample_white_noise(
      enh.grid, derive_seed(mix64(enh.seed ^ kInitSalt) ^ mix64(opt.init_salt), 0)));
  const double n0 = sobolev_norm(u, part, 1.0);
  if (n0 > 0.0) u = (opt.init_amplitude / n0) * u;

  MinimizeResult res;
  SpectralField uhat;
  double E = energy_lite(u, nl, enh, uhat);
  res.energy_trace.push_back(E);

  for (int it = 1; it <= opt.max_iter; ++it) {
    SpectralField dhat;
    const double slope = gradient_spectral(u, uhat, nl, enh, dhat);
    res.residual = std::sqrt(slope);
    res.iterations = it - 1;
    if (res.residual <= opt.tol) {
      res.converged = true;
      break;
    }
    const RealField d = fft_inverse(dhat);
    double step = opt.step_init;
    RealField w;
    SpectralField what;
    double Ew = 0.0;
    while (true) {
      w = u;
      axpy(w, -step, d);
      Ew = energy_lite(w, nl, enh, what);
      if (Ew <= E - opt.armijo_c1 * step * slope) break;
      step *= opt.backtrack;
      if (step < opt.min_step)
        throw numerical_error("descent line search failed");
    }
    u = std::move(w);
    uhat = std::move(what);
    E = Ew;
    res.energy_trace.push_back(E);
    if (E < opt.divergence_floor) throw numerical_error("energy diverged");
    res.iterations = it;
  }
  res.energy = energy(u, nl, enh);
  res.triple = gamma_inverse(u, enh, part, loc, cfg);
  return res;
}

namespace {

struct BilinearContext {
  const NoiseEnhancement* enh;
  const DyadicPartition* part;
  const ParacontrolledTriple* ut;
  HamiltonianParts parts;
  RealField res_sharp_xi;  // u_sharp res xi
  RealField du_sharp0, du_sharp1;
};

BilinearContext make_bilinear_context(const ParacontrolledTriple& ut,
                                      const NoiseEnhancement& enh,
                                      const DyadicPartition& part,
                                      const LocalizationParams& loc,
                                      const GammaConfig& cfg) {
  BilinearContext c;
  c.enh = &enh;
  c.part = &part;
  c.ut = &ut;
  c.parts = hamiltonian_parts(ut, enh, part, loc, cfg);
  c.res_sharp_xi = resonant(ut.sharp, enh.xi, part);
  c.du_sharp0 = derivative(ut.sharp, 0);
  c.du_sharp1 = derivative(ut.sharp, 1);
  return c;
}

double bilinear_eval(const BilinearContext& c, const ParacontrolledTriple& vt) {
  const NoiseEnhancement& enh = *c.enh;
  const DyadicPartition& part = *c.part;
  const ParacontrolledTriple& ut = *c.ut;
  const double t1 = inner(derivative(vt.sharp, 0), c.du_sharp0) +
                    inner(derivative(vt.sharp, 1), c.du_sharp1);
  const double t2 = enh.grid.mu * inner(vt.sharp, ut.sharp);
  const double t3 = inner(apply_L(vt.remainder), ut.sharp);
  const RealField vxi = para_lt(vt.u, enh.xi, part);
  const double t4 = -(inner(vt.u, c.res_sharp_xi) - inner(vxi, ut.sharp));
  const double t5 = inner(apply_L(vt.para) - vxi, ut.sharp);
  const double t6 = -inner(vt.u, c.parts.g_low);
  const double t7 = inner(vt.u, c.parts.balance);
  return t1 + t2 + t3 + t4 + t5 + t6 + t7;
}

}  // namespace

double bilinear_B(const ParacontrolledTriple& vt, const ParacontrolledTriple& ut,
                  const NoiseEnhancement& enh, const DyadicPartition& part,
                  const LocalizationParams& loc, const GammaConfig& cfg) {
  check_grid(vt.u.grid, ut.u.grid, "bilinear_B");
  BilinearContext c = make_bilinear_context(ut, enh, part, loc, cfg);
  return bilinear_eval(c, vt);
}

double weak_residual(const ParacontrolledTriple& t, const Nonlinearity& nl,
                     const NoiseEnhancement& enh, const DyadicPartition& part,
                     const LocalizationParams& loc, const GammaConfig& cfg,
                     int n_probes, std::uint64_t probe_salt) {
  if (n_probes < 1) throw validation_error("need at least one probe");
  BilinearContext c = make_bilinear_context(t, enh, part, loc, cfg);
  RealField fu(enh.grid);
  for (std::size_t i = 0; i < fu.v.size(); ++i) fu.v[i] = nl.f(t.u.v[i]);
  fu = dealias(fu);
  const std::uint64_t root = mix64(enh.seed ^ kWeakProbeSalt ^ mix64(probe_salt));
  double worst = 0.0;
  for (int i = 0; i < n_probes; ++i) {
    RealField sharp = dealias(sample_white_noise(enh.grid, derive_seed(root, i)));
    const double nn = sobolev_norm(sharp, part, 1.0);
    if (nn <= 0.0) continue;
    sharp = (1.0 / nn) * sharp;
    const GammaResult gr = gamma_map(sharp, enh, part, loc, cfg);
    const ParacontrolledTriple& vt = gr.triple;
    const double num = std::abs(bilinear_eval(c, vt) - inner(vt.u, fu));
    const double den =
        std::sqrt(std::pow(sobolev_norm(vt.u, part, cfg.gamma_exp), 2) +
                  std::pow(sobolev_norm(vt.sharp, part, 1.0), 2));
    if (den > 0.0) worst = std::max(worst, num / den);
  }
  return worst;
}

namespace {

// eigenvalues of a symmetric tridiagonal matrix (implicit QL with shifts)
std::vector<double> tridiag_eigenvalues(std::vector<double> d, std::vector<double> e) {
  const int n = static_cast<int>(d.size());
  if (n == 0) return d;
  e.resize(n, 0.0);
  for (int l = 0; l < n; ++l) {
    int iter = 0;
    while (true) {
      int m = l;
      for (; m < n - 1; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= 1e-15 * dd) break;
      }
      if (m == l) break;
      if (++iter > 100) throw numerical_error("tridiagonal eigensolve stalled");
      double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
      double r = std::hypot(g, 1.0);
      g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
      double s = 1.0, cth = 1.0, p = 0.0;
      for (int i = m - 1; i >= l; --i) {
        double ff = s * e[i], bb = cth * e[i];
        r = std::hypot(ff, g);
        e[i + 1] = r;
        if (r == 0.0) {
          d[i + 1] -= p;
          e[m] = 0.0;
          break;
        }
        s = ff / r;
        cth = g / r;
        g = d[i + 1] - p;
        r = (d[i] - g) * s + 2.0 * cth * bb;
        p = s * r;
        d[i + 1] = g + p;
        g = cth * r - bb;
      }
      if (r == 0.0 && m - 1 >= l) continue;
      d[l] -= p;
      e[l] = g;
      e[m] = 0.0;
    }
  }
  std::sort(d.begin(), d.end());
  return d;
}

struct HOperator {
  const NoiseEnhancement* enh;
  mutable int matvecs = 0;

  RealField apply(const RealField& u) const {
    ++matvecs;
    const GridSpec& g = u.grid;
    const int n = g.n;
    SpectralField uhat = fft_forward(u);
    RealField q(g);
    for (std::size_t i = 0; i < q.v.size(); ++i)
      q.v[i] = enh->xi.v[i] * u.v[i] - enh->renorm_const * u.v[i];
    SpectralField qhat = fft_forward(q);
    SpectralField out(g);
    for (int m1 = 0; m1 < n; ++m1) {
      const int k1 = freq_of_index(m1, n);
      for (int m2 = 0; m2 < n; ++m2) {
        const int k2 = freq_of_index(m2, n);
        const std::size_t idx = static_cast<std::size_t>(m1) * n + m2;
        if (mode_kept(g, k1, k2))
          out.c[idx] = lap_symbol(g, k1, k2) * uhat.c[idx] - qhat.c[idx];
      }
    }
    return fft_inverse(out);
  }
};

RealField precond_apply(const RealField& r, double shift) {
  const GridSpec& g = r.grid;
  const int n = g.n;
  SpectralField rh = fft_forward(r);
  for (int m1 = 0; m1 < n; ++m1) {
    const int k1 = freq_of_index(m1, n);
    for (int m2 = 0; m2 < n; ++m2) {
      const int k2 = freq_of_index(m2, n);
      const std::size_t idx = static_cast<std::size_t>(m1) * n + m2;
      if (mode_kept(g, k1, k2))
        rh.c[idx] /= std::max(lap_symbol(g, k1, k2) - shift, 0.25);
      else
        rh.c[idx] = 0.0;
    }
  }
  return fft_inverse(rh);
}

// L-preconditioned CG on (H - shift); returns false on indefiniteness
bool shifted_solve(const HOperator& H, double shift, const RealField& b,
                   RealField& x, int max_iter, double rel_tol) {
  x = RealField(b.grid);
  RealField r = b;
  RealField z = precond_apply(r, shift);
  RealField p = z;
  double rz = inner(r, z);
  const double bnorm = lp_norm(b, 2);
  if (bnorm == 0.0) return true;
  for (int it = 0; it < max_iter; ++it) {
    RealField Ap = H.apply(p);
    axpy(Ap, -shift, p);
    const double pAp = inner(p, Ap);
    if (pAp <= 0.0) return false;
    const double alpha = rz / pAp;
    axpy(x, alpha, p);
    axpy(r, -alpha, Ap);
    if (lp_norm(r, 2) <= rel_tol * bnorm) return true;
    RealField z2 = precond_apply(r, shift);
    const double rz2 = inner(r, z2);
    const double beta = rz2 / rz;
    rz = rz2;
    p = z2 + beta * p;
  }
  return true;  // loose solve is fine for inverse iteration
}

}  // namespace

CoercivityReport coercivity_probe(const NoiseEnhancement& enh,
                                  const DyadicPartition& part,
                                  const LocalizationParams& loc,
                                  const GammaConfig& cfg, int quad_probes,
                                  std::uint64_t probe_salt) {
  check_grid(enh.grid, part.grid, "coercivity_probe");
  if (quad_probes < 2) throw validation_error("need at least two quadratic probes");
  const GridSpec& grid = enh.grid;
  const std::uint64_t root = mix64(enh.seed ^ kCoerciveSalt ^ mix64(probe_salt));
  HOperator H{&enh};
  CoercivityReport rep;

  // Lanczos warm start with full reorthogonalization
  const int m_steps = 40;
  std::vector<RealField> basis;
  std::vector<double> alpha, beta;
  {
    RealField v = dealias(sample_white_noise(grid, derive_seed(root, 0)));
    const double nv = lp_norm(v, 2);
    if (nv <= 0.0) throw numerical_error("degenerate start vector");
    v = (1.0 / nv) * v;
    basis.push_back(v);
    for (int j = 0; j < m_steps; ++j) {
      RealField w = H.apply(basis[j]);
      if (j > 0) axpy(w, -beta[j - 1], basis[j - 1]);
      const double a = inner(w, basis[j]);
      alpha.push_back(a);
      axpy(w, -a, basis[j]);
      for (std::size_t i = 0; i < basis.size(); ++i)
        axpy(w, -inner(w, basis[i]), basis[i]);
      const double b = lp_norm(w, 2);
      if (b < 1e-12 * (1.0 + std::abs(a))) break;
      beta.push_back(b);
      basis.push_back((1.0 / b) * w);
    }
  }
  const std::vector<double> ritz = tridiag_eigenvalues(alpha, beta);
  const double lam1 = ritz.front();

  // shifted inverse power iteration
  double shift = lam1 - std::max(0.1, 0.01 * std::abs(lam1));
  double ground = lam1;
  bool got = false;
  for (int attempt = 0; attempt < 6 && !got; ++attempt) {
    RealField x = basis.front();
    bool indefinite = false;
    for (int outer = 0; outer < 40; ++outer) {
      RealField y;
      if (!shifted_solve(H, shift, x, y, 400, 1e-10)) {
        indefinite = true;
        break;
      }
      const double ny = lp_norm(y, 2);
      if (ny <= 0.0) {
        indefinite = true;
        break;
      }
      x = (1.0 / ny) * y;
      RealField Hx = H.apply(x);
      ground = inner(x, Hx);
      axpy(Hx, -ground, x);
      if (lp_norm(Hx, 2) <= 1e-9 * (1.0 + std::abs(ground))) {
        got = true;
        break;
      }
    }
    if (indefinite) shift -= std::max(1.0, std::abs(shift));
  }
  if (!got) throw numerical_error("ground state iteration did not converge");
  rep.ground_energy = ground;
  rep.lambda_est = std::max(0.0, -ground) + 0.1;

  // through-origin regression of B + lambda ||.||^2 on the domain norm
  long double sxy = 0.0L, sxx = 0.0L;
  double minq = 1e300;
  const int n = grid.n;
  for (int i = 0; i < quad_probes; ++i) {
    RealField sharp = dealias(sample_white_noise(grid, derive_seed(root, 1 + i)));
    const double nn = sobolev_norm(sharp, part, cfg.gamma_exp);
    if (nn <= 0.0) continue;
    sharp = (1.0 / nn) * sharp;
    const GammaResult gr = gamma_map(sharp, enh, part, loc, cfg);
    const RealField& u = gr.triple.u;
    SpectralField uhat = fft_forward(u);
    long double quad = 0.0L;
    for (int m1 = 0; m1 < n; ++m1) {
      const int k1 = freq_of_index(m1, n);
      for (int m2 = 0; m2 < n; ++m2) {
        const int k2 = freq_of_index(m2, n);
        quad += static_cast<long double>(lap_symbol(grid, k1, k2)) *
                std::norm(uhat.c[static_cast<std::size_t>(m1) * n + m2]);
      }
    }
    long double pot = 0.0L, mass = 0.0L;
    for (std::size_t j = 0; j < u.v.size(); ++j) {
      pot += static_cast<long double>(enh.xi.v[j]) * u.v[j] * u.v[j];
      mass += static_cast<long double>(u.v[j]) * u.v[j];
    }
    const double inv = 1.0 / (static_cast<double>(n) * n);
    const double Bdir = static_cast<double>(quad) -
                        (static_cast<double>(pot) -
                         enh.renorm_const * static_cast<double>(mass)) * inv;
    const double l2sq = static_cast<double>(mass) * inv;
    const double y = Bdir + rep.lambda_est * l2sq;
    const double x = std::pow(sobolev_norm(u, part, cfg.gamma_exp), 2) +
                     std::pow(sobolev_norm(gr.triple.sharp, part, 1.0), 2);
    sxy += static_cast<long double>(x) * y;
    sxx += static_cast<long double>(x) * x;
    if (l2sq > 0.0) minq = std::min(minq, y / l2sq);
  }
  if (!(sxx > 0.0L)) throw numerical_error("quadratic probes degenerate");
  rep.c_est = static_cast<double>(sxy / sxx);
  rep.min_shifted_quotient = minq;
  rep.matvecs = H.matvecs;
  return rep;
}

}  // namespace pcf
