#include "commands.hpp"
#include "config.hpp"

#include "bhd/error.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>

namespace {

struct CommonOptions {
  std::string config_path;
  std::string preset;
  std::optional<std::string> out;
  std::optional<int> workers;
  std::optional<std::uint64_t> seed;
  bool quiet = false;
};

bhd::cli::RunConfig resolve(const CommonOptions& o) {
  using namespace bhd::cli;
  if (!o.config_path.empty() && !o.preset.empty()) throw bhd::InvalidArgument("--config and --preset are exclusive");
  RunConfig c;
  if (!o.preset.empty()) c = preset(o.preset);
  if (!o.config_path.empty()) c = load_config(o.config_path);
  if (o.out) c.output_dir = *o.out;
  if (o.workers) c.workers = *o.workers;
  if (o.seed) c.seed = *o.seed;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace bhd::cli;
  CLI::App app{"Driven Bose-Hubbard dimer sweeps"};
  app.set_version_flag("--version", code_version());
  app.require_subcommand(1);

  CommonOptions opts;
  std::string command;
  for (const auto& name : command_names()) {
    auto* sub = app.add_subcommand(name, "Run the " + name + " pipeline");
    sub->add_option("--config", opts.config_path, "JSON run configuration")->check(CLI::ExistingFile);
    sub->add_option("--preset", opts.preset, "Named preset: fig1, fig2, fig3");
    sub->add_option("--out", opts.out, "Output directory (overrides the config)");
    sub->add_option("--workers", opts.workers, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--seed", opts.seed, "Seed for surrogate-ensemble sampling");
    sub->add_flag("-q,--quiet", opts.quiet, "No progress lines");
    sub->callback([&command, name] { command = name; });
  }

  std::string dump_name;
  auto* dump = app.add_subcommand("preset", "Print a preset configuration as JSON");
  dump->add_option("name", dump_name, "fig1, fig2 or fig3")->required();
  dump->callback([&command] { command = "preset"; });

  CLI11_PARSE(app, argc, argv);

  try {
    if (command == "preset") {
      std::cout << to_json(preset(dump_name)).dump(2) << '\n';
      return 0;
    }
    const RunConfig cfg = resolve(opts);
    const Manifest m = run_command(command, cfg, opts.quiet ? nullptr : &std::cerr);
    if (!m.ok()) {
      for (const auto& t : m.tasks) {
        if (t.status != "ok") std::cerr << "bhd: task failed: " << t.name << ": " << t.error << '\n';
      }
      return 1;
    }
    return 0;
  } catch (const bhd::InvalidArgument& e) {
    std::cerr << "bhd: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "bhd: " << e.what() << '\n';
    return 1;
  }
}
