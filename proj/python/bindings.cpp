#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "efqse/casci.hpp"
#include "efqse/chemio.hpp"
#include "efqse/errors.hpp"
#include "efqse/forging.hpp"
#include "efqse/pipeline.hpp"

namespace py = pybind11;
using namespace efqse;

namespace {

py::dict spectrum_dict(const LabeledSpectrum& s) {
  py::dict d;
  d["method"] = s.method;
  d["states"] = s.states;
  d["warnings"] = s.warnings;
  return d;
}

std::vector<std::string> irrep_names(const MolecularIntegrals& m) {
  std::vector<std::string> out;
  for (Irrep r : m.orbital_irreps) out.emplace_back(irrep_name(r));
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Python access to the efqse engine";

  auto base = py::register_exception<Error>(m, "Error");
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<NumericalError>(m, "NumericalError", base.ptr());

  m.attr("hartree_to_ev") = kHartreeToEv;

  py::class_<MolecularIntegrals>(m, "Integrals")
      .def_property_readonly("n_orbitals", &MolecularIntegrals::n_orbitals)
      .def_readonly("n_alpha", &MolecularIntegrals::n_alpha)
      .def_readonly("n_beta", &MolecularIntegrals::n_beta)
      .def_readonly("core_energy", &MolecularIntegrals::core_energy)
      .def_property_readonly("orbital_irreps", &irrep_names)
      .def_property_readonly("one_body", &MolecularIntegrals::one_body)
      .def("eri", &MolecularIntegrals::eri, py::arg("p"), py::arg("q"), py::arg("r"), py::arg("s"))
      .def("__repr__", [](const MolecularIntegrals& i) {
        return "<Integrals n_orbitals=" + std::to_string(i.n_orbitals()) + " n_alpha=" + std::to_string(i.n_alpha) +
               " n_beta=" + std::to_string(i.n_beta) + ">";
      });

  py::class_<LabeledState>(m, "State")
      .def_property_readonly("label", &LabeledState::label)
      .def_readonly("energy", &LabeledState::energy)
      .def_readonly("excitation_ev", &LabeledState::excitation_ev)
      .def_readonly("sigma_ev", &LabeledState::sigma_ev)
      .def_readonly("spin", &LabeledState::spin)
      .def_readonly("s2", &LabeledState::s2)
      .def_property_readonly("irrep", [](const LabeledState& s) { return std::string(irrep_name(s.irrep)); })
      .def_readonly("unstable", &LabeledState::unstable)
      .def("__repr__", [](const LabeledState& s) {
        return "<State " + s.label() + " E=" + std::to_string(s.energy) + ">";
      });

  m.def(
      "read_fcidump",
      [](const std::string& path, const std::string& convention) {
        FcidumpOptions o;
        o.convention = OrbsymConvention::by_name(convention);
        return read_fcidump(path, o);
      },
      py::arg("path"), py::arg("convention") = "standard");

  m.def(
      "casci",
      [](const MolecularIntegrals& ints, int n_states) {
        py::gil_scoped_release nogil;
        return casci_spectrum(ints, ints.n_alpha, ints.n_beta, n_states).states;
      },
      py::arg("integrals"), py::arg("n_states") = 0,
      "CASCI states in ascending energy; n_states caps the roots per symmetry block.");

  m.def(
      "resource_count",
      [](int n_orbitals, int n_occupied) {
        const auto r = resource_count(default_ansatz(n_orbitals, n_occupied, {}));
        py::dict d;
        d["qubits"] = r.qubits;
        d["parameters"] = r.n_parameters;
        d["single_qubit_gates"] = r.single_qubit_gates;
        d["two_qubit_gates"] = r.two_qubit_gates;
        d["depth"] = r.depth;
        return d;
      },
      py::arg("n_orbitals"), py::arg("n_occupied"));

  m.def(
      "run",
      [](const std::string& config_json, const std::string& base_dir, const std::string& output_dir) {
        RunConfig c = parse_run_config(config_json, base_dir);
        if (!output_dir.empty()) c.output_dir = output_dir;
        c.validate();
        RunArtifacts art;
        {
          py::gil_scoped_release nogil;
          art = run_pipeline(c);
        }
        py::dict out;
        out["casci"] = spectrum_dict(art.casci);
        out["forged_energy"] = art.forged.energy;
        py::dict modes;
        for (const auto& mr : art.modes) {
          py::dict d = spectrum_dict(mr.qse.spectrum);
          d["ground_energy"] = mr.ground.value;
          d["ground_sigma"] = mr.ground.sigma;
          modes[py::str(std::string(mode_name(mr.mode)))] = d;
        }
        out["modes"] = modes;
        out["labels"] = art.labels;
        return out;
      },
      py::arg("config_json"), py::arg("base_dir") = "", py::arg("output_dir") = "",
      "Runs the full pipeline from a JSON configuration document.");
}
