// Python surface for the core operations: noise enhancement, threshold
// certification, the paracontrolled solve, the energy descent, and the PCF1
// container. Fields cross the boundary as (n, n) float64 arrays; the grid
// travels separately so shapes are always checked.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>
#include <stdexcept>

#include "pcf/anderson.hpp"
#include "pcf/errors.hpp"
#include "pcf/io.hpp"
#include "pcf/noise.hpp"
#include "pcf/paracalc.hpp"
#include "pcf/partition.hpp"
#include "pcf/regularity.hpp"
#include "pcf/torus.hpp"
#include "pcf/variational.hpp"

namespace py = pybind11;
using array = py::array_t<double, py::array::c_style | py::array::forcecast>;

namespace {

pcf::RealField to_field(const array& a, const pcf::GridSpec& g) {
  if (a.ndim() != 2 || a.shape(0) != g.n || a.shape(1) != g.n)
    throw std::invalid_argument("expected a (n, n) array matching the grid");
  pcf::RealField f(g);
  std::memcpy(f.v.data(), a.data(), sizeof(double) * f.v.size());
  return f;
}

array from_field(const pcf::RealField& f) {
  array a({f.grid.n, f.grid.n});
  std::memcpy(a.mutable_data(), f.v.data(), sizeof(double) * f.v.size());
  return a;
}

pcf::DyadicPartition part_of(const pcf::GridSpec& g) {
  return pcf::make_partition(g);
}

py::dict energy_dict(const pcf::EnergyReport& e) {
  py::dict d;
  d["total"] = e.total;
  d["quadratic"] = e.quadratic;
  d["nonlinear"] = e.nonlinear;
  d["grad_norm"] = e.grad_norm;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "pseudo-spectral paracontrolled solver on the 2-torus";

  py::class_<pcf::GridSpec>(m, "GridSpec")
      .def(py::init<int, double, double>(), py::arg("n"), py::arg("mu") = 1.0,
           py::arg("dealias_fraction") = 2.0 / 3.0)
      .def_readonly("n", &pcf::GridSpec::n)
      .def_readonly("mu", &pcf::GridSpec::mu)
      .def_readonly("dealias_fraction", &pcf::GridSpec::dealias_fraction)
      .def("__repr__", [](const pcf::GridSpec& g) {
        return "GridSpec(n=" + std::to_string(g.n) +
               ", mu=" + std::to_string(g.mu) + ")";
      });

  py::class_<pcf::LocalizationParams>(m, "Localization")
      .def(py::init<>())
      .def(py::init([](double L, double K) {
             pcf::LocalizationParams p;
             p.L = L;
             p.K = K;
             return p;
           }),
           py::arg("L"), py::arg("K"))
      .def_readwrite("L", &pcf::LocalizationParams::L)
      .def_readwrite("K", &pcf::LocalizationParams::K);

  py::class_<pcf::GammaConfig>(m, "GammaConfig")
      .def(py::init<>())
      .def_readwrite("max_iter", &pcf::GammaConfig::max_iter)
      .def_readwrite("tol", &pcf::GammaConfig::tol)
      .def_readwrite("grad_coeff", &pcf::GammaConfig::grad_coeff)
      .def_readwrite("gamma_exp", &pcf::GammaConfig::gamma_exp);

  py::class_<pcf::NoiseEnhancement>(m, "Enhancement")
      .def_readonly("grid", &pcf::NoiseEnhancement::grid)
      .def_readonly("seed", &pcf::NoiseEnhancement::seed)
      .def_readonly("eps", &pcf::NoiseEnhancement::eps)
      .def_readonly("renorm_const", &pcf::NoiseEnhancement::renorm_const)
      .def_property_readonly(
          "xi", [](const pcf::NoiseEnhancement& e) { return from_field(e.xi); })
      .def_property_readonly(
          "theta",
          [](const pcf::NoiseEnhancement& e) { return from_field(e.theta); })
      .def_property_readonly("wick_area", [](const pcf::NoiseEnhancement& e) {
        return from_field(e.wick_area);
      });

  py::class_<pcf::ThresholdCert>(m, "ThresholdCert")
      .def_readonly("loc", &pcf::ThresholdCert::loc)
      .def_readonly("realized", &pcf::ThresholdCert::realized)
      .def_readonly("probes", &pcf::ThresholdCert::probes);

  py::class_<pcf::ParacontrolledTriple>(m, "Triple")
      .def_property_readonly(
          "u", [](const pcf::ParacontrolledTriple& t) { return from_field(t.u); })
      .def_property_readonly(
          "para",
          [](const pcf::ParacontrolledTriple& t) { return from_field(t.para); })
      .def_property_readonly("remainder",
                             [](const pcf::ParacontrolledTriple& t) {
                               return from_field(t.remainder);
                             })
      .def_property_readonly("sharp", [](const pcf::ParacontrolledTriple& t) {
        return from_field(t.sharp);
      });

  py::class_<pcf::GammaResult>(m, "GammaResult")
      .def_readonly("triple", &pcf::GammaResult::triple)
      .def_readonly("iterations", &pcf::GammaResult::iterations)
      .def_readonly("residual", &pcf::GammaResult::residual)
      .def_readonly("realized_contraction",
                    &pcf::GammaResult::realized_contraction);

  py::class_<pcf::MinimizeResult>(m, "MinimizeResult")
      .def_readonly("triple", &pcf::MinimizeResult::triple)
      .def_readonly("converged", &pcf::MinimizeResult::converged)
      .def_readonly("iterations", &pcf::MinimizeResult::iterations)
      .def_readonly("residual", &pcf::MinimizeResult::residual)
      .def_property_readonly(
          "energy",
          [](const pcf::MinimizeResult& r) { return energy_dict(r.energy); })
      .def_readonly("energy_trace", &pcf::MinimizeResult::energy_trace);

  // --- noise ---------------------------------------------------------------

  m.def(
      "sample_white_noise",
      [](const pcf::GridSpec& g, std::uint64_t seed) {
        return from_field(pcf::sample_white_noise(g, seed));
      },
      py::arg("grid"), py::arg("seed"));

  m.def(
      "mollify",
      [](const array& f, const pcf::GridSpec& g, double eps) {
        return from_field(pcf::mollify(to_field(f, g), eps));
      },
      py::arg("f"), py::arg("grid"), py::arg("eps"));

  m.def(
      "renorm_constant",
      [](const pcf::GridSpec& g, double eps) {
        return pcf::renorm_constant(g, eps);
      },
      py::arg("grid"), py::arg("eps") = 0.0);

  m.def(
      "enhance",
      [](const pcf::GridSpec& g, std::uint64_t seed, double eps) {
        return pcf::enhance(g, part_of(g), seed, eps);
      },
      py::arg("grid"), py::arg("seed"), py::arg("eps") = 0.0);

  m.def(
      "zero_enhancement",
      [](const pcf::GridSpec& g) { return pcf::zero_enhancement(g); },
      py::arg("grid"));

  // --- spectral basics -------------------------------------------------------

  m.def(
      "apply_L",
      [](const array& f, const pcf::GridSpec& g) {
        return from_field(pcf::apply_L(to_field(f, g)));
      },
      py::arg("f"), py::arg("grid"));

  m.def(
      "apply_L_inverse",
      [](const array& f, const pcf::GridSpec& g) {
        return from_field(pcf::apply_L_inverse(to_field(f, g)));
      },
      py::arg("f"), py::arg("grid"));

  m.def(
      "dealias",
      [](const array& f, const pcf::GridSpec& g) {
        return from_field(pcf::dealias(to_field(f, g)));
      },
      py::arg("f"), py::arg("grid"));

  m.def(
      "sobolev_norm",
      [](const array& f, const pcf::GridSpec& g, double alpha) {
        return pcf::sobolev_norm(to_field(f, g), part_of(g), alpha);
      },
      py::arg("f"), py::arg("grid"), py::arg("alpha"));

  m.def(
      "holder_norm",
      [](const array& f, const pcf::GridSpec& g, double alpha) {
        return pcf::holder_norm(to_field(f, g), part_of(g), alpha);
      },
      py::arg("f"), py::arg("grid"), py::arg("alpha"));

  // --- paracontrolled solve --------------------------------------------------

  m.def(
      "choose_thresholds",
      [](const pcf::NoiseEnhancement& enh, const pcf::GammaConfig& cfg,
         int n_probes, std::uint64_t probe_salt) {
        return pcf::choose_thresholds(enh, part_of(enh.grid), cfg, n_probes,
                                      probe_salt);
      },
      py::arg("enh"), py::arg("cfg") = pcf::GammaConfig{},
      py::arg("n_probes") = 32, py::arg("probe_salt") = 0);

  m.def(
      "gamma_map",
      [](const array& sharp, const pcf::NoiseEnhancement& enh,
         const pcf::LocalizationParams& loc, const pcf::GammaConfig& cfg) {
        return pcf::gamma_map(to_field(sharp, enh.grid), enh,
                              part_of(enh.grid), loc, cfg);
      },
      py::arg("sharp"), py::arg("enh"), py::arg("loc"),
      py::arg("cfg") = pcf::GammaConfig{});

  m.def(
      "gamma_inverse",
      [](const array& u, const pcf::NoiseEnhancement& enh,
         const pcf::LocalizationParams& loc, const pcf::GammaConfig& cfg) {
        return pcf::gamma_inverse(to_field(u, enh.grid), enh,
                                  part_of(enh.grid), loc, cfg);
      },
      py::arg("u"), py::arg("enh"), py::arg("loc"),
      py::arg("cfg") = pcf::GammaConfig{});

  m.def(
      "wick_product",
      [](const pcf::ParacontrolledTriple& t, const pcf::NoiseEnhancement& enh,
         const pcf::LocalizationParams& loc, const pcf::GammaConfig& cfg) {
        return from_field(
            pcf::wick_product(t, enh, part_of(enh.grid), loc, cfg));
      },
      py::arg("triple"), py::arg("enh"), py::arg("loc"),
      py::arg("cfg") = pcf::GammaConfig{});

  m.def(
      "apply_H",
      [](const pcf::ParacontrolledTriple& t, const pcf::NoiseEnhancement& enh,
         const pcf::LocalizationParams& loc, const pcf::GammaConfig& cfg) {
        return from_field(pcf::apply_H(t, enh, part_of(enh.grid), loc, cfg));
      },
      py::arg("triple"), py::arg("enh"), py::arg("loc"),
      py::arg("cfg") = pcf::GammaConfig{});

  // --- energy ------------------------------------------------------------

  m.def(
      "energy",
      [](const array& u, const std::string& nl, const pcf::NoiseEnhancement& enh) {
        return energy_dict(
            pcf::energy(to_field(u, enh.grid), pcf::parse_nonlinearity(nl), enh));
      },
      py::arg("u"), py::arg("nonlinearity"), py::arg("enh"));

  m.def(
      "minimize",
      [](const std::string& nl, const pcf::NoiseEnhancement& enh,
         const pcf::LocalizationParams& loc, const pcf::GammaConfig& cfg,
         double tol, int max_iter, std::uint64_t init_salt) {
        pcf::MinimizeOptions opt;
        opt.tol = tol;
        opt.max_iter = max_iter;
        opt.init_salt = init_salt;
        return pcf::minimize(pcf::parse_nonlinearity(nl), enh,
                             part_of(enh.grid), loc, cfg, opt);
      },
      py::arg("nonlinearity"), py::arg("enh"), py::arg("loc"),
      py::arg("cfg") = pcf::GammaConfig{}, py::arg("tol") = 1e-8,
      py::arg("max_iter") = 5000, py::arg("init_salt") = 0);

  // --- container ---------------------------------------------------------

  m.def(
      "write_field",
      [](const std::string& path, const array& f, const pcf::GridSpec& g,
         int kind, std::uint64_t seed) {
        if (kind < 0 || kind > 5) throw std::invalid_argument("kind out of range");
        pcf::write_field(path, to_field(f, g),
                         static_cast<pcf::FieldKind>(kind), seed);
      },
      py::arg("path"), py::arg("f"), py::arg("grid"), py::arg("kind") = 0,
      py::arg("seed") = 0);

  m.def(
      "read_field",
      [](const std::string& path) {
        const pcf::StoredField sf = pcf::read_field(path);
        py::dict d;
        d["field"] = from_field(sf.field);
        d["n"] = sf.field.grid.n;
        d["mu"] = sf.field.grid.mu;
        d["kind"] = static_cast<int>(sf.kind);
        d["seed"] = sf.seed;
        return d;
      },
      py::arg("path"));
}
