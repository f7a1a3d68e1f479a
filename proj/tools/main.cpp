#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "algclosure/commands.hpp"

int main(int argc, char** argv) {
  using namespace algclosure;
  CLI::App app{"Algebraic closure and staged construction toolkit"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  CommandOptions opts;
  std::string out_path;
  bool no_timing = false;
  std::vector<std::uint64_t> p;
  std::vector<std::uint32_t> q;

  struct Entry {
    const char* name;
    const char* help;
  };
  const Entry entries[] = {
      {"closure", "algebraic closure of a subset of a finite group, with exclusion certificates"},
      {"construct", "run the staged construction for A in H"},
      {"refute", "construct for a finite A and report a certificate that 1 is outside its closure"},
      {"verify", "closure witness and seminorm checks on a constructed instance"},
      {"supernormal", "supernormality of subgroups, checked against the center criterion"},
  };
  for (const auto& e : entries) {
    auto* sub = app.add_subcommand(e.name, e.help);
    sub->add_option("--scenario", opts.scenario, "scenario TOML file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_path, "write the report here instead of stdout");
    sub->add_option("--budget", opts.budget, "main search cap for this command")->check(CLI::PositiveNumber);
    sub->add_option("--trunc", opts.trunc, "truncation depth T")->check(CLI::PositiveNumber);
    sub->add_option("--stages", opts.stages, "number of stages J")->check(CLI::PositiveNumber);
    sub->add_flag("--recheck", opts.recheck, "re-verify certificates with evaluation primitives");
    sub->add_flag("--no-timing", no_timing, "omit the timing member");
    if (std::string(e.name) == "construct" || std::string(e.name) == "refute" || std::string(e.name) == "verify") {
      sub->add_option("--resume", opts.resume, "start from a saved snapshot")->check(CLI::ExistingFile);
    }
    if (std::string(e.name) == "construct" || std::string(e.name) == "refute")
      sub->add_option("--snapshot-out", opts.snapshot_out, "save the final state");
    if (std::string(e.name) == "verify") {
      sub->add_option("--p", p, "p indices, comma separated")->delimiter(',');
      sub->add_option("--q", q, "q indices, comma separated")->delimiter(',');
      sub->add_option("--ceiling", opts.ceiling, "report min(N, ceiling)");
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : exit_input;
  }
  if (!p.empty()) opts.p = p;
  if (!q.empty()) opts.q = q;

  const auto* chosen = app.get_subcommands().front();
  auto result = run_command(chosen->get_name(), opts);
  const auto text = render_report(result, !no_timing);
  if (out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(out_path, std::ios::binary);
    if (!f || !(f << text)) {
      std::cerr << "cannot write " << out_path << "\n";
      return exit_input;
    }
  }
  if (result.exit_code != exit_ok && result.report.contains("error"))
    std::cerr << result.report["outcome"].get<std::string>() << ": " << result.report["error"].get<std::string>() << "\n";
  return result.exit_code;
}
