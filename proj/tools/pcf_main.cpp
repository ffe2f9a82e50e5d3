// pcf: command line driver.
//
// Subcommands: noise, renorm, gamma, minimize, diagnose, sweep.  Every run is
// deterministic given the config; all artifacts are written atomically.  The
// optional run log is the only output that contains wall-clock timestamps.
//
// Exit codes: 0 ok, 2 bad input (flags, config, file contents), 3 numerical
// failure (no admissible thresholds, non-convergence, ...).

#include <cinttypes>
#include <cstdio>
#include <ctime>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "pcf/anderson.hpp"
#include "pcf/config.hpp"
#include "pcf/errors.hpp"
#include "pcf/io.hpp"
#include "pcf/noise.hpp"
#include "pcf/partition.hpp"
#include "pcf/regularity.hpp"
#include "pcf/rng.hpp"
#include "pcf/torus.hpp"
#include "pcf/variational.hpp"

namespace {

using nlohmann::json;

constexpr std::uint64_t kCliSharpSalt = 0x73686172706773ull;

std::string fmt_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string utc_now() {
  std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) throw pcf::validation_error("empty entry in list: " + text);
    std::size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &pos);
    } catch (const std::exception&) {
      throw pcf::validation_error("bad number in list: " + item);
    }
    if (pos != item.size()) throw pcf::validation_error("bad number in list: " + item);
    out.push_back(v);
  }
  if (out.empty()) throw pcf::validation_error("empty list: " + text);
  return out;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  for (double v : parse_double_list(text)) {
    const int n = static_cast<int>(v);
    if (static_cast<double>(n) != v) throw pcf::validation_error("expected integer list");
    out.push_back(n);
  }
  return out;
}

// Config file (if any) provides the base; explicit flags override it.
struct Common {
  std::string config_path;
  pcf::RunConfig flags;
  CLI::Option* o_n = nullptr;
  CLI::Option* o_mu = nullptr;
  CLI::Option* o_seed = nullptr;
  CLI::Option* o_eps = nullptr;
  CLI::Option* o_kappa = nullptr;
  CLI::Option* o_alpha = nullptr;
  CLI::Option* o_frac = nullptr;
  CLI::Option* o_tol = nullptr;
  CLI::Option* o_maxit = nullptr;
  CLI::Option* o_gc = nullptr;
  CLI::Option* o_nl = nullptr;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config_path, "key=value config file");
  c.o_n = cmd->add_option("--n", c.flags.n, "grid size (power of two, >= 8)");
  c.o_mu = cmd->add_option("--mu", c.flags.mu, "mass shift mu > 0");
  c.o_seed = cmd->add_option("--seed", c.flags.seed, "root seed");
  c.o_eps = cmd->add_option("--eps", c.flags.eps, "mollifier width (0 = none)");
  c.o_kappa = cmd->add_option("--kappa", c.flags.kappa, "regularity defect kappa");
  c.o_alpha = cmd->add_option("--alpha", c.flags.alpha, "working exponent in (2/3, 1)");
  c.o_frac = cmd->add_option("--dealias-fraction", c.flags.dealias_fraction,
                             "kept fraction of the spectrum");
  c.o_tol = cmd->add_option("--tol", c.flags.tol, "descent tolerance");
  c.o_maxit = cmd->add_option("--max-iter", c.flags.max_iter, "descent iteration cap");
  c.o_gc = cmd->add_option("--grad-coeff", c.flags.grad_coeff,
                           "gradient pairing coefficient in the remainder map");
  c.o_nl = cmd->add_option("--nonlinearity", c.flags.nonlinearity,
                           "zero | cubic:<c> | dwell:<a>,<b> | custom:<csv>");
}

pcf::RunConfig resolve(const Common& c) {
  pcf::RunConfig rc;
  if (!c.config_path.empty()) rc = pcf::load_config(c.config_path);
  if (c.o_n->count()) rc.n = c.flags.n;
  if (c.o_mu->count()) rc.mu = c.flags.mu;
  if (c.o_seed->count()) rc.seed = c.flags.seed;
  if (c.o_eps->count()) rc.eps = c.flags.eps;
  if (c.o_kappa->count()) rc.kappa = c.flags.kappa;
  if (c.o_alpha->count()) rc.alpha = c.flags.alpha;
  if (c.o_frac->count()) rc.dealias_fraction = c.flags.dealias_fraction;
  if (c.o_tol->count()) rc.tol = c.flags.tol;
  if (c.o_maxit->count()) rc.max_iter = c.flags.max_iter;
  if (c.o_gc->count()) rc.grad_coeff = c.flags.grad_coeff;
  if (c.o_nl->count()) rc.nonlinearity = c.flags.nonlinearity;
  pcf::validate_config(rc);
  return rc;
}

pcf::GammaConfig gamma_config(const pcf::RunConfig& rc) {
  pcf::GammaConfig cfg;
  cfg.grad_coeff = rc.grad_coeff;
  cfg.gamma_exp = rc.alpha;
  return cfg;
}

void write_json(const std::string& path, const json& j) {
  pcf::write_text_atomic(path, j.dump(2) + "\n");
}

void write_triple(const std::string& prefix, const pcf::ParacontrolledTriple& t,
                  std::uint64_t seed) {
  pcf::write_field(prefix + ".u.pcf", t.u, pcf::FieldKind::u, seed);
  pcf::write_field(prefix + ".sharp.pcf", t.sharp, pcf::FieldKind::u_sharp, seed);
  pcf::write_field(prefix + ".remainder.pcf", t.remainder, pcf::FieldKind::generic, seed);
}

int run_noise(const pcf::RunConfig& rc, const std::string& prefix, bool with_log) {
  std::string log;
  if (with_log) log += utc_now() + " noise start n=" + std::to_string(rc.n) + "\n";
  const pcf::GridSpec grid = pcf::grid_of(rc);
  const pcf::DyadicPartition part = pcf::make_partition(grid);
  const pcf::NoiseEnhancement enh = pcf::enhance(grid, part, rc.seed, rc.eps);
  pcf::write_field(prefix + ".xi.pcf", enh.xi, pcf::FieldKind::xi, rc.seed);
  pcf::write_field(prefix + ".theta.pcf", enh.theta, pcf::FieldKind::theta, rc.seed);
  pcf::write_field(prefix + ".wick.pcf", enh.wick_area, pcf::FieldKind::wick, rc.seed);
  json j;
  j["n"] = rc.n;
  j["mu"] = rc.mu;
  j["seed"] = rc.seed;
  j["eps"] = rc.eps;
  j["renorm_const"] = enh.renorm_const;
  write_json(prefix + ".json", j);
  if (with_log) {
    log += utc_now() + " renorm_const=" + fmt_double(enh.renorm_const) + "\n";
    log += utc_now() + " noise done\n";
    pcf::write_text_atomic(prefix + ".log", log);
  }
  return 0;
}

int run_renorm(const pcf::RunConfig& rc, const std::string& eps_list,
               const std::string& out) {
  const std::vector<double> eps = parse_double_list(eps_list);
  const pcf::GridSpec grid = pcf::grid_of(rc);
  std::string csv = "eps,C\n";
  for (double e : eps) {
    if (e < 0.0) throw pcf::validation_error("eps must be >= 0");
    csv += fmt_double(e) + "," + fmt_double(pcf::renorm_constant(grid, e)) + "\n";
  }
  pcf::write_text_atomic(out, csv);
  return 0;
}

int run_gamma(const pcf::RunConfig& rc, const std::string& sharp_path,
              const std::string& prefix) {
  pcf::GridSpec grid = pcf::grid_of(rc);
  pcf::RealField sharp(grid);
  if (!sharp_path.empty()) {
    const pcf::StoredField sf = pcf::read_field(sharp_path);
    grid = pcf::GridSpec(sf.field.grid.n, sf.field.grid.mu, rc.dealias_fraction);
    sharp = pcf::RealField(grid);
    sharp.v = sf.field.v;
  } else {
    // no input: deterministic unit-size random profile derived from the seed
    sharp = pcf::dealias(pcf::sample_white_noise(
        grid, pcf::derive_seed(pcf::mix64(rc.seed ^ kCliSharpSalt), 0)));
  }
  const pcf::DyadicPartition part = pcf::make_partition(grid);
  const double ns = pcf::sobolev_norm(sharp, part, 1.0);
  if (ns <= 0.0) throw pcf::validation_error("input profile is identically zero");
  if (sharp_path.empty()) sharp = (1.0 / ns) * sharp;

  const pcf::NoiseEnhancement enh = pcf::enhance(grid, part, rc.seed, rc.eps);
  const pcf::GammaConfig cfg = gamma_config(rc);
  const pcf::ThresholdCert cert = pcf::choose_thresholds(enh, part, cfg);
  const pcf::GammaResult gr = pcf::gamma_map(sharp, enh, part, cert.loc, cfg);
  write_triple(prefix, gr.triple, rc.seed);
  json j;
  j["n"] = grid.n;
  j["mu"] = grid.mu;
  j["seed"] = rc.seed;
  j["eps"] = rc.eps;
  j["L"] = cert.loc.L;
  j["K"] = cert.loc.K;
  j["contraction"] = cert.realized;
  j["realized_contraction"] = gr.realized_contraction;
  j["iterations"] = gr.iterations;
  j["residual"] = gr.residual;
  write_json(prefix + ".json", j);
  return 0;
}

int run_minimize(const pcf::RunConfig& rc, const std::string& prefix, int quad_probes) {
  const pcf::GridSpec grid = pcf::grid_of(rc);
  const pcf::DyadicPartition part = pcf::make_partition(grid);
  const pcf::Nonlinearity nl = pcf::parse_nonlinearity(rc.nonlinearity);
  const pcf::NoiseEnhancement enh = pcf::enhance(grid, part, rc.seed, rc.eps);
  const pcf::GammaConfig cfg = gamma_config(rc);
  const pcf::ThresholdCert cert = pcf::choose_thresholds(enh, part, cfg);
  pcf::MinimizeOptions opt;
  opt.tol = rc.tol;
  opt.max_iter = rc.max_iter;
  const pcf::MinimizeResult mr = pcf::minimize(nl, enh, part, cert.loc, cfg, opt);
  const pcf::CoercivityReport cr =
      pcf::coercivity_probe(enh, part, cert.loc, cfg, quad_probes);
  write_triple(prefix, mr.triple, rc.seed);
  json j;
  j["n"] = grid.n;
  j["mu"] = grid.mu;
  j["seed"] = rc.seed;
  j["eps"] = rc.eps;
  j["L"] = cert.loc.L;
  j["K"] = cert.loc.K;
  j["converged"] = mr.converged;
  j["iterations"] = mr.iterations;
  j["residual"] = mr.residual;
  j["energy"] = mr.energy.total;
  j["c_est"] = cr.c_est;
  j["lambda_est"] = cr.lambda_est;
  j["ground_energy"] = cr.ground_energy;
  write_json(prefix + ".json", j);
  if (!mr.converged) {
    std::cerr << "error: descent did not reach tolerance " << rc.tol << " in "
              << rc.max_iter << " iterations\n";
    return 3;
  }
  return 0;
}

int run_diagnose(const pcf::RunConfig& rc, const std::string& prefix,
                 const std::string& out, double lambda) {
  const pcf::StoredField su = pcf::read_field(prefix + ".u.pcf");
  const pcf::StoredField ss = pcf::read_field(prefix + ".sharp.pcf");
  const pcf::StoredField sr = pcf::read_field(prefix + ".remainder.pcf");
  if (!(su.field.grid == ss.field.grid) || !(su.field.grid == sr.field.grid))
    throw pcf::validation_error("triple files disagree on grid");

  std::ifstream side(prefix + ".json");
  if (!side) throw pcf::validation_error("missing sidecar " + prefix + ".json");
  json meta = json::parse(side, nullptr, false);
  if (meta.is_discarded() || !meta.contains("L") || !meta.contains("K") ||
      !meta.contains("eps"))
    throw pcf::validation_error("sidecar " + prefix + ".json is not usable");

  const pcf::GridSpec grid(su.field.grid.n, su.field.grid.mu, rc.dealias_fraction);
  const pcf::DyadicPartition part = pcf::make_partition(grid);
  pcf::LocalizationParams loc;
  loc.L = meta["L"].get<double>();
  loc.K = meta["K"].get<double>();
  const double eps = meta["eps"].get<double>();
  const pcf::NoiseEnhancement enh = pcf::enhance(grid, part, su.seed, eps);
  const pcf::GammaConfig cfg = gamma_config(rc);

  pcf::ParacontrolledTriple t;
  t.u = pcf::RealField(grid);
  t.u.v = su.field.v;
  t.sharp = pcf::RealField(grid);
  t.sharp.v = ss.field.v;
  t.remainder = pcf::RealField(grid);
  t.remainder.v = sr.field.v;
  t.para = t.u - t.remainder - t.sharp;

  const double nu = pcf::lp_norm(t.u, 2);
  const double scale = nu > 0.0 ? nu : 1.0;

  // file consistency: re-derive the decomposition from u alone
  const pcf::ParacontrolledTriple ref = pcf::gamma_inverse(t.u, enh, part, loc, cfg);
  const double sharp_err = pcf::lp_norm(ref.sharp - t.sharp, 2) / scale;
  const double rem_err = pcf::lp_norm(ref.remainder - t.remainder, 2) / scale;

  const pcf::RealField wick = pcf::wick_product(t, enh, part, loc, cfg);
  pcf::RealField direct = pcf::prod_dealias(t.u, enh.xi);
  pcf::axpy(direct, -enh.renorm_const, pcf::dealias(t.u));
  const double wick_err = pcf::lp_norm(wick - direct, 2) / scale;

  const pcf::RealField hu = pcf::apply_H(t, enh, part, loc, cfg);
  const double h_err = pcf::lp_norm(hu - (pcf::apply_L(t.u) - wick), 2) / scale;

  const pcf::PhiPsi pp = pcf::phi_psi(t, enh, part, loc, cfg);
  const double split_err = pcf::lp_norm((pp.phi + pp.psi) - wick, 2) / scale;

  const pcf::DecayFit fu = pcf::decay_exponent(t.u, part);
  const pcf::DecayFit fr = pcf::decay_exponent(t.remainder, part);
  const pcf::DecayFit fs = pcf::decay_exponent(t.sharp, part);

  json j;
  j["n"] = grid.n;
  j["mu"] = grid.mu;
  j["seed"] = su.seed;
  j["eps"] = eps;
  j["L"] = loc.L;
  j["K"] = loc.K;
  j["sharp_err"] = sharp_err;
  j["remainder_err"] = rem_err;
  j["wick_identity_err"] = wick_err;
  j["hamiltonian_route_err"] = h_err;
  j["phi_psi_split_err"] = split_err;
  j["remainder_defect"] = pcf::remainder_defect(t, enh, part, loc, cfg);
  j["l2_ratio"] = pcf::l2_estimate_check(t, enh, part, loc, cfg, lambda);
  j["lambda"] = lambda;
  j["alpha_u"] = fu.exponent;
  j["alpha_remainder"] = fr.exponent;
  j["alpha_sharp"] = fs.exponent;
  j["ordering_ok"] = fs.exponent >= fr.exponent - 1e-9 &&
                     fr.exponent >= fu.exponent - 1e-9;
  write_json(out, j);
  return 0;
}

int run_sweep(const pcf::RunConfig& rc, const std::string& ns_list, int count,
              const std::string& out) {
  const std::vector<int> ns = parse_int_list(ns_list);
  const pcf::Nonlinearity nl = pcf::parse_nonlinearity(rc.nonlinearity);
  const pcf::GammaConfig cfg = gamma_config(rc);
  pcf::MinimizeOptions opt;
  opt.tol = rc.tol;
  opt.max_iter = rc.max_iter;
  const std::vector<pcf::SweepRow> rows =
      pcf::resolution_sweep(ns, rc.mu, rc.seed, count, nl, rc.eps, cfg, opt);
  std::string csv =
      "n,seed_index,seed,contraction,loc_L,loc_K,form_err,grad_err,"
      "ground_energy,lambda_est,l2_ratio,alpha_u,alpha_r,alpha_sharp\n";
  for (const pcf::SweepRow& r : rows) {
    char head[96];
    std::snprintf(head, sizeof head, "%d,%d,%" PRIu64 ",", r.n, r.seed_index, r.seed);
    csv += head;
    csv += fmt_double(r.contraction) + "," + fmt_double(r.loc_L) + "," +
           fmt_double(r.loc_K) + "," + fmt_double(r.form_err) + "," +
           fmt_double(r.grad_err) + "," + fmt_double(r.ground_energy) + "," +
           fmt_double(r.lambda_est) + "," + fmt_double(r.l2_ratio) + "," +
           fmt_double(r.alpha_u) + "," + fmt_double(r.alpha_r) + "," +
           fmt_double(r.alpha_sharp) + "\n";
  }
  pcf::write_text_atomic(out, csv);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pseudo-spectral paracontrolled solver on the 2-torus"};
  app.require_subcommand(1);

  Common c_noise, c_renorm, c_gamma, c_min, c_diag, c_sweep;
  std::string noise_prefix, renorm_eps, renorm_out = "renorm.csv";
  std::string gamma_sharp, gamma_prefix, min_prefix;
  std::string diag_prefix, diag_out = "report.json", sweep_ns, sweep_out = "sweep.csv";
  bool noise_log = false;
  int min_probes = 16, sweep_count = 2;
  double diag_lambda = 0.1;

  CLI::App* noise = app.add_subcommand("noise", "sample the enhanced noise data");
  add_common(noise, c_noise);
  noise->add_option("--out", noise_prefix, "output prefix")->required();
  noise->add_flag("--log", noise_log, "also write a timestamped run log");

  CLI::App* renorm = app.add_subcommand("renorm", "tabulate the renormalization constant");
  add_common(renorm, c_renorm);
  renorm->add_option("--eps-list", renorm_eps, "comma separated widths")->required();
  renorm->add_option("--out", renorm_out, "output csv path");

  CLI::App* gamma = app.add_subcommand("gamma", "solve the paracontrolled fixed point");
  add_common(gamma, c_gamma);
  gamma->add_option("--sharp", gamma_sharp, "input profile (PCF1); random if omitted");
  gamma->add_option("--out", gamma_prefix, "output prefix")->required();

  CLI::App* minimize = app.add_subcommand("minimize", "descend the renormalized energy");
  add_common(minimize, c_min);
  minimize->add_option("--out", min_prefix, "output prefix")->required();
  minimize->add_option("--quad-probes", min_probes, "coercivity probe count")
      ->check(CLI::Range(2, 1000));

  CLI::App* diagnose = app.add_subcommand("diagnose", "check invariants of a stored triple");
  add_common(diagnose, c_diag);
  diagnose->add_option("--prefix", diag_prefix, "prefix written by gamma/minimize")
      ->required();
  diagnose->add_option("--out", diag_out, "report path");
  diagnose->add_option("--lambda", diag_lambda, "shift for the L2 bound")
      ->check(CLI::NonNegativeNumber);

  CLI::App* sweep = app.add_subcommand("sweep", "repeat the pipeline across resolutions");
  add_common(sweep, c_sweep);
  sweep->add_option("--ns", sweep_ns, "comma separated grid sizes")->required();
  sweep->add_option("--count", sweep_count, "seeds per resolution")
      ->check(CLI::PositiveNumber);
  sweep->add_option("--out", sweep_out, "output csv path");

  try {
    app.parse(argc, argv);
    if (noise->parsed()) return run_noise(resolve(c_noise), noise_prefix, noise_log);
    if (renorm->parsed()) return run_renorm(resolve(c_renorm), renorm_eps, renorm_out);
    if (gamma->parsed()) return run_gamma(resolve(c_gamma), gamma_sharp, gamma_prefix);
    if (minimize->parsed()) return run_minimize(resolve(c_min), min_prefix, min_probes);
    if (diagnose->parsed())
      return run_diagnose(resolve(c_diag), diag_prefix, diag_out, diag_lambda);
    if (sweep->parsed()) return run_sweep(resolve(c_sweep), sweep_ns, sweep_count, sweep_out);
    return 2;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const pcf::validation_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
