// End-to-end acceptance checks. Each criterion prints exactly one line,
//   [PASS|FAIL] criterion N: <name> -- <measurements>
// and the binary exits nonzero if any executed criterion fails.
//
// Run all by default; --only 3,7 restricts to a subset. The two long
// statistical criteria print their wall time and fail if they exceed their
// stated budget.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "pcf/anderson.hpp"
#include "pcf/errors.hpp"
#include "pcf/io.hpp"
#include "pcf/noise.hpp"
#include "pcf/paracalc.hpp"
#include "pcf/partition.hpp"
#include "pcf/regularity.hpp"
#include "pcf/rng.hpp"
#include "pcf/torus.hpp"
#include "pcf/variational.hpp"

using namespace pcf;

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

std::string fmt(double x) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

double sup_scale(const RealField& f) { return 1.0 + lp_norm(f, 0); }

double max_abs_diff(const RealField& a, const RealField& b) {
  double m = 0.0;
  for (size_t i = 0; i < a.v.size(); ++i)
    m = std::max(m, std::abs(a.v[i] - b.v[i]));
  return m;
}

// ---------------------------------------------------------------- criterion 1

Outcome check_partition_bony() {
  double worst_res = 0.0, worst_bony = 0.0;
  for (int n : {64, 128, 256}) {
    const GridSpec g(n, 1.0);
    const DyadicPartition part = make_partition(g);
    worst_res = std::max(worst_res, partition_residual(part));
    const RealField f = sample_white_noise(g, derive_seed(11, n));
    const RealField h = mollify(sample_white_noise(g, derive_seed(12, n)), 0.1);
    const RealField sum = para_lt(f, h, part) + para_gt(f, h, part) +
                          resonant(f, h, part);
    const RealField want = prod_dealias(f, h);
    worst_bony = std::max(worst_bony,
                          max_abs_diff(sum, want) / sup_scale(want));
  }
  Outcome out;
  out.pass = worst_res <= 1e-12 && worst_bony <= 1e-10;
  out.detail = "partition residual " + fmt(worst_res) +
               " (<= 1e-12), bony reassembly " + fmt(worst_bony) + " (<= 1e-10)";
  return out;
}

// ---------------------------------------------------------------- criterion 2

Outcome check_renormalization() {
  // (a) ensemble mean of the resonant pairing against the constant, n = 64
  const GridSpec g(64, 1.0);
  const DyadicPartition part = make_partition(g);
  const double C = renorm_constant(g, 0.0);
  const int count = 200;
  std::vector<double> means(count);
  RealField one(g);
  for (double& x : one.v) x = 1.0;
  for (int i = 0; i < count; ++i) {
    const NoiseEnhancement enh = enhance(g, part, derive_seed(21, i), 0.0);
    means[i] = inner(enh.wick_area, one) + C;
  }
  double m = 0.0;
  for (double x : means) m += x / count;
  double var = 0.0;
  for (double x : means) var += (x - m) * (x - m) / (count - 1);
  const double se = std::sqrt(var / count);
  const bool mean_ok = std::abs(m - C) <= 3.0 * se;

  // (b) doubling difference against log 2 / (2 pi), N = 256, unmollified
  const double target = std::log(2.0) / kTwoPi;
  const double diff = renorm_constant(GridSpec(512, 1.0), 0.0) -
                      renorm_constant(GridSpec(256, 1.0), 0.0);
  const bool diff_ok = std::abs(diff - target) <= 0.10 * target;

  Outcome out;
  out.pass = mean_ok && diff_ok;
  out.detail = "mean " + fmt(m) + " vs C " + fmt(C) + " (|dev| " +
               fmt(std::abs(m - C)) + " <= 3 SE = " + fmt(3.0 * se) +
               "), C(512)-C(256) = " + fmt(diff) + " vs " + fmt(target) +
               " (10% window)";
  return out;
}

// ---------------------------------------------------------------- criterion 3

Outcome check_wick_cauchy() {
  const auto t0 = std::chrono::steady_clock::now();
  const GridSpec g(256, 1.0);
  const DyadicPartition part = make_partition(g);
  const ConvergenceStudy st =
      convergence_study(g, part, 31, {0.2, 0.1, 0.05, 0.025}, 50, 0.1);
  const double elapsed = seconds_since(t0);
  Outcome out;
  const bool cauchy = st.mean_ratio <= 0.9;
  const bool control = st.mean_control_ratio >= 0.95;
  const bool timed = elapsed <= 600.0;
  out.pass = cauchy && control && timed;
  out.detail = "renormalized ratio " + fmt(st.mean_ratio) +
               " (<= 0.9), uncentered ratio " + fmt(st.mean_control_ratio) +
               " (>= 0.95), " + fmt(elapsed) + " s (<= 600)";
  return out;
}

// ---------------------------------------------------------------- criterion 4

Outcome check_contraction() {
  const GridSpec g(128, 1.0);
  const DyadicPartition part = make_partition(g);
  const GammaConfig cfg{};
  double worst_cert = 0.0, worst_fresh = 0.0, worst_orbit = 0.0, worst_gain = 0.0;
  for (int i = 0; i < 5; ++i) {
    const NoiseEnhancement enh = enhance(g, part, derive_seed(41, i), 0.0);
    const ThresholdCert cert = choose_thresholds(enh, part, cfg);
    worst_cert = std::max(worst_cert, cert.realized);
    const ThresholdCert fresh = choose_thresholds(enh, part, cfg, 32, 1);
    // fresh probes at the SAME thresholds: reuse only if the scan landed on
    // the certified pair, otherwise measure the certified pair directly
    double fresh_here = 0.0;
    if (fresh.loc.L == cert.loc.L && fresh.loc.K == cert.loc.K) {
      fresh_here = fresh.realized;
    } else {
      for (int p = 0; p < 32; ++p) {
        RealField probe = dealias(sample_white_noise(
            g, derive_seed(mix64(enh.seed ^ 0x66726573686572ull), p)));
        const double np = sobolev_norm(probe, part, cfg.gamma_exp);
        probe = (1.0 / np) * probe;
        fresh_here = std::max(
            fresh_here, contraction_norm(probe, enh, part, cert.loc, cfg));
      }
    }
    worst_fresh = std::max(worst_fresh, fresh_here);

    const RealField sharp = dealias(sample_white_noise(g, derive_seed(42, i)));
    const GammaResult gr = gamma_map(sharp, enh, part, cert.loc, cfg);
    worst_orbit = std::max(worst_orbit, gr.realized_contraction);
    const double ns = sobolev_norm(sharp, part, cfg.gamma_exp);
    const double nu = sobolev_norm(gr.triple.u, part, cfg.gamma_exp);
    worst_gain = std::max(worst_gain, nu / ns);
  }
  Outcome out;
  out.pass = worst_cert <= 0.5 && worst_fresh <= 0.6 && worst_orbit <= 0.55 &&
             worst_gain <= 2.000001;
  out.detail = "certified " + fmt(worst_cert) + " (<= 0.5), fresh " +
               fmt(worst_fresh) + " (<= 0.6), orbit " + fmt(worst_orbit) +
               " (<= 0.55), norm gain " + fmt(worst_gain) + " (<= 2.000001)";
  return out;
}

// ---------------------------------------------------------------- criterion 5

Outcome check_wick_identity() {
  const GridSpec g(128, 1.0);
  const DyadicPartition part = make_partition(g);
  const GammaConfig cfg{};
  double worst_wick = 0.0, worst_h = 0.0;
  for (int i = 0; i < 3; ++i) {
    const NoiseEnhancement enh = enhance(g, part, derive_seed(51, i), 0.0);
    const ThresholdCert cert = choose_thresholds(enh, part, cfg);
    const RealField sharp = dealias(sample_white_noise(g, derive_seed(52, i)));
    const ParacontrolledTriple t =
        gamma_map(sharp, enh, part, cert.loc, cfg).triple;

    const RealField wick = wick_product(t, enh, part, cert.loc, cfg);
    RealField direct = prod_dealias(t.u, enh.xi);
    axpy(direct, -enh.renorm_const, dealias(t.u));
    worst_wick = std::max(worst_wick,
                          max_abs_diff(wick, direct) / sup_scale(direct));

    const RealField hu = apply_H(t, enh, part, cert.loc, cfg);
    const RealField hd = apply_L(t.u) - wick;
    worst_h = std::max(worst_h, max_abs_diff(hu, hd) / sup_scale(hd));
  }
  Outcome out;
  out.pass = worst_wick <= 1e-8 && worst_h <= 1e-8;
  out.detail = "wick telescoping " + fmt(worst_wick) +
               " (<= 1e-8), hamiltonian routes " + fmt(worst_h) + " (<= 1e-8)";
  return out;
}

// ---------------------------------------------------------------- criterion 6

Outcome check_bilinear_and_gradient() {
  const GridSpec g(64, 1.0);
  const DyadicPartition part = make_partition(g);
  const GammaConfig cfg{};
  const Nonlinearity nl = cubic_minus(0.5);
  double worst_form = 0.0, worst_grad = 0.0;
  for (int i = 0; i < 10; ++i) {
    const NoiseEnhancement enh = enhance(g, part, derive_seed(61, i), 0.0);
    const ThresholdCert cert = choose_thresholds(enh, part, cfg);
    const RealField sharp_u = dealias(sample_white_noise(g, derive_seed(62, i)));
    const RealField sharp_v = dealias(sample_white_noise(g, derive_seed(63, i)));
    const ParacontrolledTriple ut =
        gamma_map(sharp_u, enh, part, cert.loc, cfg).triple;
    const ParacontrolledTriple vt =
        gamma_map(sharp_v, enh, part, cert.loc, cfg).triple;

    const double assembled = bilinear_B(vt, ut, enh, part, cert.loc, cfg);
    const RealField wick = wick_product(ut, enh, part, cert.loc, cfg);
    const double direct = inner(vt.u, apply_L(ut.u) - wick);
    worst_form = std::max(worst_form,
                          std::abs(assembled - direct) / (1.0 + std::abs(direct)));

    const RealField u = 0.5 * ut.u;
    const RealField grad = frechet_gradient(u, nl, enh);
    for (int d = 0; d < 5; ++d) {
      RealField v = dealias(sample_white_noise(g, derive_seed(64, 10 * i + d)));
      v = (1.0 / lp_norm(v, 2)) * v;
      const double h = 1e-5;
      RealField up = u, dn = u;
      axpy(up, h, v);
      axpy(dn, -h, v);
      const double fd =
          (energy(up, nl, enh).total - energy(dn, nl, enh).total) / (2.0 * h);
      const double gv = inner(grad, v);
      worst_grad = std::max(worst_grad,
                            std::abs(fd - gv) / (1.0 + std::abs(gv)));
    }
  }
  Outcome out;
  out.pass = worst_form <= 1e-6 && worst_grad <= 1e-5;
  out.detail = "form assembly " + fmt(worst_form) +
               " (<= 1e-6), gradient vs finite differences " + fmt(worst_grad) +
               " (<= 1e-5, 10 states x 5 directions)";
  return out;
}

// ---------------------------------------------------------------- criterion 7

Outcome check_descent() {
  const GridSpec g(128, 1.0);
  const DyadicPartition part = make_partition(g);
  const GammaConfig cfg{};
  const Nonlinearity nl = cubic_minus(1.0);

  // without noise the cubic energy is nonnegative with minimum 0
  MinimizeOptions opt;
  opt.tol = 1e-8;
  const NoiseEnhancement z = zero_enhancement(g);
  const MinimizeResult zero_run = minimize(nl, z, part, LocalizationParams{}, cfg, opt);
  const bool zero_ok = zero_run.converged && std::abs(zero_run.energy.total) <= 1e-10;

  int converged = 0;
  bool monotone = true;
  double worst_weak = 0.0;
  for (int i = 0; i < 10; ++i) {
    const NoiseEnhancement enh = enhance(g, part, derive_seed(71, i), 0.0);
    const ThresholdCert cert = choose_thresholds(enh, part, cfg);
    const MinimizeResult mr = minimize(nl, enh, part, cert.loc, cfg, opt);
    if (mr.converged && mr.residual <= 1e-6) ++converged;
    for (size_t k = 1; k < mr.energy_trace.size(); ++k)
      if (mr.energy_trace[k] > mr.energy_trace[k - 1] + 1e-12) monotone = false;
    if (i == 0) {
      worst_weak = weak_residual(mr.triple, nl, enh, part, cert.loc, cfg, 64);
    }
  }
  Outcome out;
  out.pass = zero_ok && converged == 10 && monotone && worst_weak <= 1e-5;
  out.detail = "|E_min| without noise " + fmt(std::abs(zero_run.energy.total)) +
               " (<= 1e-10), converged " + std::to_string(converged) +
               "/10, monotone " + (monotone ? "yes" : "no") +
               ", weak residual over 64 probes " + fmt(worst_weak) + " (<= 1e-5)";
  return out;
}

// ---------------------------------------------------------------- criterion 8

Outcome check_coercivity() {
  const GridSpec g(128, 1.0);
  const DyadicPartition part = make_partition(g);
  const GammaConfig cfg{};
  const NoiseEnhancement enh = enhance(g, part, 81, 0.0);
  const ThresholdCert cert = choose_thresholds(enh, part, cfg);
  const CoercivityReport cr = coercivity_probe(enh, part, cert.loc, cfg, 100);
  const bool nonneg = cr.min_shifted_quotient >= -1e-9;
  const bool cpos = cr.c_est > 0.0;

  const NoiseEnhancement z = zero_enhancement(g);
  const CoercivityReport zr = coercivity_probe(z, part, LocalizationParams{}, cfg, 4);
  const bool ground_ok = std::abs(zr.ground_energy - 1.0) <= 1e-8;

  Outcome out;
  out.pass = nonneg && cpos && ground_ok;
  out.detail = "min shifted quotient " + fmt(cr.min_shifted_quotient) +
               " (>= 0 within 1e-9, 100 probes), c_est " + fmt(cr.c_est) +
               " (> 0), noiseless ground " + fmt(zr.ground_energy) +
               " (= mu +- 1e-8)";
  return out;
}

// ---------------------------------------------------------------- criterion 9

Outcome check_l2_across_resolutions() {
  const GammaConfig cfg{};
  MinimizeOptions opt;
  opt.tol = 1e-7;
  const std::vector<SweepRow> rows =
      resolution_sweep({64, 128, 256}, 1.0, 91, 3, double_well(5.0, 1.0), 0.0, cfg, opt);
  // rows are grouped by n, same seeds in the same order inside each group
  bool ok = true;
  double worst = 0.0;
  for (int i = 0; i < 3; ++i) {
    const double r64 = rows[static_cast<size_t>(i)].l2_ratio;
    const double r128 = rows[static_cast<size_t>(3 + i)].l2_ratio;
    const double r256 = rows[static_cast<size_t>(6 + i)].l2_ratio;
    worst = std::max({worst, r128 / r64, r256 / r128});
    if (r128 > 2.0 * r64 || r256 > 2.0 * r128) ok = false;
  }
  Outcome out;
  out.pass = ok;
  out.detail = "worst consecutive growth of the sharp-regularity ratio " +
               fmt(worst) + " across 64 -> 128 -> 256 (< 2 means no doubling)";
  return out;
}

// --------------------------------------------------------------- criterion 10

Outcome check_schauder() {
  const auto t0 = std::chrono::steady_clock::now();
  const GridSpec g(256, 1.0);
  const GammaConfig cfg{};
  MinimizeOptions opt;
  opt.tol = 1e-7;
  const SchauderReport rep =
      schauder_report(g, double_well(5.0, 1.0), 101, 50, 0.0, cfg, opt);
  const double elapsed = seconds_since(t0);
  double min_r2 = 1.0;
  int r2_ok = 0;
  for (const SchauderRow& row : rep.rows) {
    const double r2 = std::min({row.r2_u, row.r2_r, row.r2_sharp});
    min_r2 = std::min(min_r2, r2);
    if (r2 >= 0.8) ++r2_ok;
  }
  Outcome out;
  const bool timed = elapsed <= 1200.0;
  out.pass = rep.pass_fraction >= 0.9 && timed;
  out.detail = "pass fraction " + fmt(rep.pass_fraction) +
               " (>= 0.9 over 50 seeds at n = 256), fits with r2 >= 0.8: " +
               std::to_string(r2_ok) + "/50, " + fmt(elapsed) + " s (<= 1200)";
  return out;
}

// --------------------------------------------------------------- criterion 11

Outcome check_determinism() {
  Outcome out;
  const char* bin = std::getenv("PCF_BIN");
  if (!bin || !*bin) {
    out.pass = false;
    out.detail = "PCF_BIN is not set";
    return out;
  }
  auto slurp = [](const std::string& p) -> std::string {
    std::ifstream in(p, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)),
                       std::istreambuf_iterator<char>());
  };
  const std::string base = "acc11";
  const std::string cmd1 = std::string("\"") + bin +
                           "\" noise --n 64 --seed 7 --eps 0.1 --out " + base +
                           "_a > /dev/null 2>&1";
  const std::string cmd2 = std::string("\"") + bin +
                           "\" noise --n 64 --seed 7 --eps 0.1 --out " + base +
                           "_b > /dev/null 2>&1";
  if (std::system(cmd1.c_str()) != 0 || std::system(cmd2.c_str()) != 0) {
    out.pass = false;
    out.detail = "noise subcommand failed";
    return out;
  }
  bool same = true;
  for (const char* suffix : {".xi.pcf", ".theta.pcf", ".wick.pcf", ".json"}) {
    const std::string a = slurp(base + "_a" + suffix);
    const std::string b = slurp(base + "_b" + suffix);
    if (a.empty() || a != b) same = false;
  }

  // container round trip is bit exact
  const GridSpec g(64, 1.0);
  const RealField f = sample_white_noise(g, 117);
  write_field(base + "_f.pcf", f, FieldKind::u, 117);
  const StoredField back = read_field(base + "_f.pcf");
  write_field(base + "_g.pcf", back.field, FieldKind::u, 117);
  const bool round = slurp(base + "_f.pcf") == slurp(base + "_g.pcf") &&
                     back.field.v == f.v;

  for (const char* p :
       {"_a.xi.pcf", "_a.theta.pcf", "_a.wick.pcf", "_a.json",
        "_b.xi.pcf", "_b.theta.pcf", "_b.wick.pcf", "_b.json",
        "_f.pcf", "_g.pcf"})
    std::remove((base + p).c_str());

  out.pass = same && round;
  out.detail = std::string("rerun outputs byte-identical: ") +
               (same ? "yes" : "no") + ", container round trip bit-exact: " +
               (round ? "yes" : "no");
  return out;
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--only" && i + 1 < argc) {
      std::stringstream ss(argv[++i]);
      std::string item;
      while (std::getline(ss, item, ',')) only.insert(std::atoi(item.c_str()));
    } else {
      std::cerr << "usage: acceptance [--only N[,M...]]\n";
      return 2;
    }
  }

  const std::vector<Criterion> criteria = {
      {1, "dyadic partition and product reassembly", check_partition_bony},
      {2, "renormalization constant", check_renormalization},
      {3, "coupled wick-area convergence", check_wick_cauchy},
      {4, "localization contraction", check_contraction},
      {5, "renormalized product identities", check_wick_identity},
      {6, "quadratic form assembly and gradient", check_bilinear_and_gradient},
      {7, "energy descent", check_descent},
      {8, "coercivity lower bound", check_coercivity},
      {9, "sharp-part regularity across resolutions", check_l2_across_resolutions},
      {10, "schauder-type ensemble", check_schauder},
      {11, "bit determinism and container round trip", check_determinism},
  };

  int failures = 0, ran = 0;
  for (const Criterion& c : criteria) {
    if (!only.empty() && !only.count(c.id)) continue;
    ++ran;
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail = std::string("exception: ") + e.what();
    }
    std::printf("[%s] criterion %d: %s -- %s\n", out.pass ? "PASS" : "FAIL",
                c.id, c.name, out.detail.c_str());
    std::fflush(stdout);
    if (!out.pass) ++failures;
  }
  if (ran == 0) {
    std::cerr << "no criteria selected\n";
    return 2;
  }
  return failures == 0 ? 0 : 1;
}
