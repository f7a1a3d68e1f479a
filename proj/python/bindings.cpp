#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "algclosure/algsets.hpp"
#include "algclosure/commands.hpp"
#include "algclosure/supernormal.hpp"

namespace py = pybind11;
using namespace algclosure;

namespace {

GroupHandle named_group(const std::string& name) {
  if (name == "Z") return std::make_shared<IntegerGroup>();
  return catalog_group(name);
}

std::vector<std::uint32_t> indices_of(const FiniteGroup& g, const std::vector<std::string>& names) {
  std::vector<std::uint32_t> out;
  for (const auto& n : names) out.push_back(FiniteGroup::index_of(g.parse(n)));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<std::string> names_of(const FiniteGroup& g, const std::vector<std::uint32_t>& xs) {
  std::vector<std::string> out;
  for (auto x : xs) out.push_back(g.name(x));
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Algebraic closure toolkit: finite closures, staged construction, seminorms, supernormality";
  m.attr("__version__") = kToolVersion;

  py::register_exception<GroupError>(m, "GroupError", PyExc_ValueError);
  py::register_exception<ScenarioError>(m, "ScenarioError", PyExc_ValueError);
  py::register_exception<BudgetExceeded>(m, "BudgetExceeded", PyExc_RuntimeError);
  py::register_exception<InvariantViolation>(m, "InvariantViolation", PyExc_AssertionError);

  m.def("catalog_names", &catalog_names, "Names of the built-in finite groups.");

  m.def(
      "run_command",
      [](const std::string& command, const std::string& scenario, std::optional<std::uint32_t> stages,
         std::optional<std::uint32_t> trunc, std::optional<std::size_t> budget, bool recheck,
         std::optional<std::string> resume, std::optional<std::string> snapshot_out) {
        CommandOptions o;
        o.scenario = scenario;
        o.stages = stages;
        o.trunc = trunc;
        o.budget = budget;
        o.recheck = recheck;
        o.resume = resume;
        o.snapshot_out = snapshot_out;
        CommandResult r;
        {
          py::gil_scoped_release release;
          r = run_command(command, o);
        }
        return py::make_tuple(r.exit_code, r.report.dump());
      },
      py::arg("command"), py::arg("scenario"), py::arg("stages") = py::none(), py::arg("trunc") = py::none(),
      py::arg("budget") = py::none(), py::arg("recheck") = false, py::arg("resume") = py::none(),
      py::arg("snapshot_out") = py::none(),
      "Runs one command; returns (exit code, report JSON without timing).");

  m.def(
      "evaluate_mf",
      [](const std::string& phi, const std::string& group, const std::vector<std::string>& args) {
        auto g = named_group(group);
        std::vector<Element> xs;
        for (const auto& a : args) xs.push_back(g->parse(a));
        return g->format(evaluate_mf(parse_mf(phi, static_cast<std::uint32_t>(xs.size())), *g, xs));
      },
      py::arg("phi"), py::arg("group"), py::arg("args"),
      "Value of a multiplicative function such as '#1 #2^-1' at the given arguments.");

  m.def(
      "closure",
      [](const std::string& group, const std::vector<std::string>& elements, bool recheck) {
        auto g = catalog_group(group);
        ElementaryFamily family(g);
        auto r = algebraic_closure_finite(family, make_subset(*g, indices_of(*g, elements)));
        if (recheck && !verify_closure_result(*g, r)) throw InvariantViolation("closure certificates do not re-verify");
        return names_of(*g, subset_members(r.closure));
      },
      py::arg("group"), py::arg("elements"), py::arg("recheck") = true,
      "Algebraic closure of a subset of a catalog group, as element names.");

  m.def(
      "is_supernormal",
      [](const std::string& group, const std::vector<std::string>& subgroup) {
        auto g = catalog_group(group);
        auto sub = indices_of(*g, subgroup);
        auto r = is_supernormal_finite(*g, sub);
        return py::make_tuple(r.supernormal, supernormal_center_oracle(*g, sub));
      },
      py::arg("group"), py::arg("subgroup"), "(brute-force verdict, center-criterion verdict).");

  m.def(
      "subgroups",
      [](const std::string& group) {
        auto g = catalog_group(group);
        std::vector<std::vector<std::string>> out;
        for (const auto& s : all_subgroups(*g)) out.push_back(names_of(*g, s));
        return out;
      },
      py::arg("group"));
}
