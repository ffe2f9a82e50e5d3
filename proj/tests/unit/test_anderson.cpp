#include <cmath>

#include "doctest.h"
#include "pcf/anderson.hpp"
#include "pcf/errors.hpp"
#include "pcf/noise.hpp"
#include "pcf/paracalc.hpp"
#include "pcf/partition.hpp"
#include "pcf/torus.hpp"
#include "test_helpers.hpp"

using namespace pcf;
using namespace testutil;

namespace {

struct Setup {
  GridSpec g{64, 1.0};
  DyadicPartition part = make_partition(g);
  NoiseEnhancement enh = enhance(g, part, 2001, 0.0);
  GammaConfig cfg{};
  ThresholdCert cert = choose_thresholds(enh, part, cfg);
};

Setup& setup() {
  static Setup s;
  return s;
}

double scale_of(const RealField& f) { return 1.0 + lp_norm(f, 0); }

}  // namespace

TEST_CASE("threshold certificate") {
  Setup& s = setup();
  CHECK(s.cert.realized <= 0.5);
  CHECK(s.cert.realized > 0.0);
  CHECK(s.cert.probes >= 32);
  CHECK(s.cert.loc.L >= -1.0);
  CHECK(s.cert.loc.L <= s.part.j_max);
  CHECK(s.cert.loc.K >= -1.0);
  CHECK(s.cert.loc.K <= s.part.j_max);
  // deterministic
  const ThresholdCert again = choose_thresholds(s.enh, s.part, s.cfg);
  CHECK(again.loc.L == s.cert.loc.L);
  CHECK(again.loc.K == s.cert.loc.K);
  CHECK(again.realized == s.cert.realized);
}

TEST_CASE("contraction norm matches the certificate scale") {
  Setup& s = setup();
  const RealField p = dealias(sample_white_noise(s.g, 2002));
  const double np = sobolev_norm(p, s.part, s.cfg.gamma_exp);
  const RealField pn = (1.0 / np) * p;
  const double c = contraction_norm(pn, s.enh, s.part, s.cert.loc, s.cfg);
  CHECK(c > 0.0);
  CHECK(c <= 0.75);  // fresh probe; the certificate bound plus slack
}

TEST_CASE("gamma fixed point and exact triple") {
  Setup& s = setup();
  const RealField sharp = dealias(sample_white_noise(s.g, 2003));
  const GammaResult gr = gamma_map(sharp, s.enh, s.part, s.cert.loc, s.cfg);
  CHECK(gr.iterations > 1);
  CHECK(gr.residual <= s.cfg.tol);
  CHECK(gr.realized_contraction <= 0.75);

  const ParacontrolledTriple& t = gr.triple;
  const RealField resum = t.para + t.remainder + t.sharp;
  CHECK(max_abs_diff(resum, t.u) <= 1e-12 * scale_of(t.u));

  // the para part is the paraproduct of u with theta
  const RealField want_para = para_lt(t.u, s.enh.theta, s.part);
  CHECK(max_abs_diff(t.para, want_para) <= 1e-10 * scale_of(t.para));

  // the remainder is the remainder map applied to u
  const RealField want_rem = remainder_R(t.u, s.enh, s.part, s.cert.loc, s.cfg);
  CHECK(max_abs_diff(t.remainder, want_rem) <= 1e-10 * scale_of(t.remainder));

  // the fixed point reproduces the input profile as its sharp part
  CHECK(max_abs_diff(t.sharp, sharp) <= 1e-7 * scale_of(sharp));
}

TEST_CASE("gamma inverse round trip") {
  Setup& s = setup();
  const RealField sharp = dealias(sample_white_noise(s.g, 2004));
  const GammaResult gr = gamma_map(sharp, s.enh, s.part, s.cert.loc, s.cfg);
  const ParacontrolledTriple t2 =
      gamma_inverse(gr.triple.u, s.enh, s.part, s.cert.loc, s.cfg);
  CHECK(max_abs_diff(t2.para, gr.triple.para) <= 1e-11 * scale_of(gr.triple.para));
  CHECK(max_abs_diff(t2.remainder, gr.triple.remainder) <=
        1e-11 * scale_of(gr.triple.remainder));
  CHECK(max_abs_diff(t2.sharp, gr.triple.sharp) <= 1e-11 * scale_of(gr.triple.sharp));
}

TEST_CASE("remainder map is linear") {
  Setup& s = setup();
  const RealField u = dealias(sample_white_noise(s.g, 2005));
  const RealField v = dealias(sample_white_noise(s.g, 2006));
  const RealField lhs =
      remainder_R(u + 2.0 * v, s.enh, s.part, s.cert.loc, s.cfg);
  RealField rhs = remainder_R(u, s.enh, s.part, s.cert.loc, s.cfg);
  axpy(rhs, 2.0, remainder_R(v, s.enh, s.part, s.cert.loc, s.cfg));
  CHECK(max_abs_diff(lhs, rhs) <= 1e-9 * scale_of(rhs));
}

TEST_CASE("wick product telescopes to the renormalized product") {
  Setup& s = setup();
  const RealField sharp = dealias(sample_white_noise(s.g, 2007));
  const ParacontrolledTriple t =
      gamma_map(sharp, s.enh, s.part, s.cert.loc, s.cfg).triple;
  const RealField viaparts = wick_product(t, s.enh, s.part, s.cert.loc, s.cfg);
  RealField direct = prod_dealias(t.u, s.enh.xi);
  axpy(direct, -s.enh.renorm_const, dealias(t.u));
  CHECK(max_abs_diff(viaparts, direct) <= 1e-9 * scale_of(direct));
}

TEST_CASE("the two hamiltonian routes agree") {
  Setup& s = setup();
  const RealField sharp = dealias(sample_white_noise(s.g, 2008));
  const ParacontrolledTriple t =
      gamma_map(sharp, s.enh, s.part, s.cert.loc, s.cfg).triple;
  const RealField via_decomp = apply_H(t, s.enh, s.part, s.cert.loc, s.cfg);
  const RealField wick = wick_product(t, s.enh, s.part, s.cert.loc, s.cfg);
  const RealField direct = apply_L(t.u) - wick;
  CHECK(max_abs_diff(via_decomp, direct) <= 1e-9 * scale_of(direct));
}

TEST_CASE("phi psi split") {
  Setup& s = setup();
  const RealField sharp = dealias(sample_white_noise(s.g, 2009));
  const ParacontrolledTriple t =
      gamma_map(sharp, s.enh, s.part, s.cert.loc, s.cfg).triple;
  const PhiPsi pp = phi_psi(t, s.enh, s.part, s.cert.loc, s.cfg);
  const RealField wick = wick_product(t, s.enh, s.part, s.cert.loc, s.cfg);
  CHECK(max_abs_diff(pp.phi + pp.psi, wick) <= 1e-11 * scale_of(wick));

  const HamiltonianParts hp = hamiltonian_parts(t, s.enh, s.part, s.cert.loc, s.cfg);
  const RealField resum = hp.phi + hp.g_low + hp.sharp_res;
  CHECK(max_abs_diff(resum, wick) <= 1e-11 * scale_of(wick));
}

TEST_CASE("gradient pairing lowers the remainder defect") {
  Setup& s = setup();
  GammaConfig plain = s.cfg;
  plain.grad_coeff = 1.0;
  GammaConfig paired = s.cfg;
  paired.grad_coeff = 2.0;
  const ThresholdCert c1 = choose_thresholds(s.enh, s.part, plain);
  const ThresholdCert c2 = choose_thresholds(s.enh, s.part, paired);
  const RealField sharp = dealias(sample_white_noise(s.g, 2010));
  const ParacontrolledTriple t1 =
      gamma_map(sharp, s.enh, s.part, c1.loc, plain).triple;
  const ParacontrolledTriple t2 =
      gamma_map(sharp, s.enh, s.part, c2.loc, paired).triple;
  const double d1 = remainder_defect(t1, s.enh, s.part, c1.loc, plain);
  const double d2 = remainder_defect(t2, s.enh, s.part, c2.loc, paired);
  CHECK(d2 <= d1 * (1.0 + 1e-9));
  CHECK(d1 > 0.0);
}

TEST_CASE("zero noise collapses the decomposition") {
  const GridSpec g(32, 1.0);
  const DyadicPartition part = make_partition(g);
  const NoiseEnhancement z = zero_enhancement(g);
  const GammaConfig cfg{};
  const LocalizationParams loc{};  // (-1, -1)
  const RealField sharp = dealias(sample_white_noise(g, 2011));
  const GammaResult gr = gamma_map(sharp, z, part, loc, cfg);
  CHECK(max_abs_diff(gr.triple.u, sharp) <= 1e-12);
  CHECK(lp_norm(gr.triple.para, 0) <= 1e-12);
  CHECK(lp_norm(gr.triple.remainder, 0) <= 1e-12);

  // H reduces to L
  const RealField hu = apply_H(gr.triple, z, part, loc, cfg);
  CHECK(max_abs_diff(hu, apply_L(gr.triple.u)) <= 1e-9 * scale_of(hu));

  // thresholds: everything is admissible, so the scan stops at the bottom
  const ThresholdCert cert = choose_thresholds(z, part, cfg);
  CHECK(cert.loc.L == -1.0);
  CHECK(cert.loc.K == -1.0);
  CHECK(cert.realized == 0.0);
}

TEST_CASE("localization guards") {
  Setup& s = setup();
  LocalizationParams bad;
  bad.L = s.part.j_max + 2.0;
  bad.K = -1.0;
  const RealField u = dealias(sample_white_noise(s.g, 2012));
  CHECK_THROWS_AS(remainder_R(u, s.enh, s.part, bad, s.cfg), validation_error);
  GammaConfig bad_cfg = s.cfg;
  bad_cfg.tol = 0.0;
  CHECK_THROWS_AS(gamma_map(u, s.enh, s.part, s.cert.loc, bad_cfg), validation_error);
}
