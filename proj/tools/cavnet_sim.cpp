// cavnet-sim: command-line front end over the cavnet C API.

#include <cavnet/cavnet.h>

#include <CLI11.hpp>

#include <cstdio>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitIo = 4;

int exit_code(cavnet_status s) {
  switch (s) {
    case CAVNET_OK: return kExitOk;
    case CAVNET_ERROR_ARGUMENT:
    case CAVNET_ERROR_CONFIG: return kExitConfig;
    case CAVNET_ERROR_NUMERICAL: return kExitNumerical;
    case CAVNET_ERROR_IO: return kExitIo;
    case CAVNET_ERROR_INTERNAL: break;
  }
  return 1;
}

int report_failure(cavnet_status s) {
  std::cerr << "cavnet-sim: error: " << cavnet_last_error() << "\n";
  return exit_code(s);
}

struct ConfigDeleter {
  void operator()(cavnet_config* c) const { cavnet_config_free(c); }
};
struct ReportDeleter {
  void operator()(cavnet_report* r) const { cavnet_report_free(r); }
};
using ConfigPtr = std::unique_ptr<cavnet_config, ConfigDeleter>;
using ReportPtr = std::unique_ptr<cavnet_report, ReportDeleter>;

struct Flags {
  std::string config;
  std::string out = ".";
  unsigned jobs = 0;
  std::string model;
  std::string truncation;
  std::optional<std::string> g;
  bool seedless = false;
};

using Command = cavnet_status (*)(const cavnet_config*, const cavnet_run_options*, cavnet_report**);

int load_config(const Flags& f, ConfigPtr& out) {
  cavnet_config* raw = nullptr;
  if (auto s = cavnet_config_load(f.config.c_str(), &raw); s != CAVNET_OK) return report_failure(s);
  out.reset(raw);
  auto set = [&](const char* key, const std::string& value) {
    return value.empty() ? CAVNET_OK : cavnet_config_set(out.get(), key, value.c_str());
  };
  for (auto s : {set("model.name", f.model), set("model.truncation", f.truncation), set("system.g", f.g.value_or(""))}) {
    if (s != CAVNET_OK) return report_failure(s);
  }
  return kExitOk;
}

template <typename Call>
int print_report(Call call, int failed_code) {
  cavnet_report* raw = nullptr;
  if (auto s = call(&raw); s != CAVNET_OK) return report_failure(s);
  ReportPtr report(raw);
  std::cout << cavnet_report_text(report.get());
  return cavnet_report_ok(report.get()) ? kExitOk : failed_code;
}

int run_validate(const Flags& f) {
  ConfigPtr config;
  if (int rc = load_config(f, config)) return rc;
  return print_report([&](cavnet_report** r) { return cavnet_validate(config.get(), r); }, kExitConfig);
}

int run_eigencheck(const std::vector<double>& gs) {
  int worst = kExitOk;
  for (double g : gs) {
    const int rc = print_report([&](cavnet_report** r) { return cavnet_eigencheck(g, r); }, kExitNumerical);
    if (rc != kExitOk && worst == kExitOk) worst = rc;
  }
  return worst;
}

int run_driver(const Flags& f, Command command) {
  ConfigPtr config;
  if (int rc = load_config(f, config)) return rc;
  // Validation is total before any simulation starts.
  if (auto s = cavnet_config_check(config.get(), nullptr, 0); s != CAVNET_OK) return report_failure(s);
  const cavnet_run_options options{f.out.c_str(), f.jobs, f.seedless ? 1 : 0};
  return print_report([&](cavnet_report** r) { return command(config.get(), &options, r); }, kExitNumerical);
}

void add_config_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "INI configuration file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--model", f.model, "override [model] name");
  cmd->add_option("--truncation", f.truncation, "override [model] truncation (sector1, fock1, fock2)");
  cmd->add_option("--g", f.g, "override the Zeno coupling scale [system] g");
}

void add_output_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--out", f.out, "output directory")->capture_default_str();
  cmd->add_option("--jobs", f.jobs, "worker threads (0: available parallelism)")->capture_default_str();
  cmd->add_flag("--seedless", f.seedless, "assert that no random number generator is used");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulation of entanglement distribution and state transfer in a coupled cavity network"};
  app.set_version_flag("--version", std::string(cavnet_version()));
  app.require_subcommand(1);

  Flags flags;
  std::vector<double> eigen_g{1.0};

  auto* validate = app.add_subcommand("validate", "check a configuration and print derived quantities");
  add_config_flags(validate, flags);

  auto* eigen = app.add_subcommand("eigencheck", "compare the closed-form H_g eigensystem with diagonalization");
  eigen->add_option("--g", eigen_g, "coupling scale(s)")->capture_default_str();

  struct Driver {
    const char* name;
    const char* help;
    Command command;
  };
  const Driver drivers[] = {
      {"run", "integrate one protocol run and write its trajectory", cavnet_run},
      {"sweep", "fidelity or photon-population sweep over one or two axes", cavnet_sweep},
      {"compare", "model hierarchy comparison over the three branch scenarios", cavnet_compare},
      {"feasibility", "fidelity traces and pulse-timing robustness", cavnet_feasibility},
  };
  std::vector<std::pair<CLI::App*, Command>> driver_cmds;
  for (const auto& d : drivers) {
    auto* cmd = app.add_subcommand(d.name, d.help);
    add_config_flags(cmd, flags);
    add_output_flags(cmd, flags);
    driver_cmds.emplace_back(cmd, d.command);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  if (*validate) return run_validate(flags);
  if (*eigen) return run_eigencheck(eigen_g);
  for (const auto& [cmd, command] : driver_cmds) {
    if (*cmd) return run_driver(flags, command);
  }
  return kExitConfig;
}
