#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "semground/backends.hpp"
#include "semground/json_io.hpp"
#include "semground/spec_generator.hpp"
#include "semground/tabular.hpp"
#include "semground/verifier.hpp"

namespace py = pybind11;
using namespace semground;

namespace {

// Structured values cross the boundary as JSON text; the Python wrapper
// converts them to dicts.

std::string parse_rules_json(const std::string& text, const std::string& domain, const std::string& mode,
                             const std::string& lexicon_path, const std::string& schema_path) {
  const auto defaults = default_backend_settings();
  ParserConfig cfg;
  cfg.mode = parser_mode_from_string(mode);
  const Domain d = domain_from_string(domain);
  cfg.prompt_template = prompt_template_for(d);
  if (d == Domain::Tabular) {
    const auto schema = load_schema(schema_path.empty() ? defaults.schema : std::filesystem::path(schema_path));
    for (const auto& a : schema.attributes()) cfg.attributes.push_back({a.name, a.aliases});
  }
  const auto lex = Lexicon::load(lexicon_path.empty() ? defaults.lexicon : std::filesystem::path(lexicon_path));
  return parse_result_to_json(parse_rules(text, cfg, lex), cfg).dump();
}

std::string verify_json(const Network& net, const std::string& spec, std::uint64_t max_nodes) {
  VerifierConfig cfg;
  cfg.max_nodes = max_nodes;
  return json(verify(net, json::parse(spec).get<GroundedSpec>(), cfg)).dump();
}

}  // namespace

PYBIND11_MODULE(_semground, m) {
  m.doc() = "Grounded verification queries for dense ReLU networks.";

  py::register_exception<Error>(m, "SemgroundError", PyExc_RuntimeError);

  py::class_<Network>(m, "Network")
      .def_property_readonly("input_dim", &Network::input_dim)
      .def_property_readonly("output_dim", &Network::output_dim)
      .def("forward", [](const Network& n, const std::vector<double>& x) { return n.forward(x); })
      .def("to_json", &network_to_json_text);

  m.def("load_network", [](const std::string& path) { return load_network(path); });
  m.def("network_from_json", &network_from_json_text);

  m.def(
      "ibp",
      [](const Network& n, std::vector<double> lo, std::vector<double> hi) {
        const auto b = ibp_forward(n, BoundsBox{std::move(lo), std::move(hi)});
        return std::make_pair(b.lower, b.upper);
      },
      "Interval bounds on the outputs over an input box.");
  m.def("_verify", &verify_json, py::arg("net"), py::arg("spec"), py::arg("max_nodes") = VerifierConfig{}.max_nodes,
        py::call_guard<py::gil_scoped_release>());
  m.def("_emit_vnnlib", [](const std::string& spec, const Network& n) {
    return emit_vnnlib(json::parse(spec).get<GroundedSpec>(), n);
  });
  m.def("_parse_rules", &parse_rules_json, py::arg("text"), py::arg("domain"), py::arg("mode"),
        py::arg("lexicon") = "", py::arg("schema") = "");
}
