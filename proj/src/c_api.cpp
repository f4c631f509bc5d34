#include <cavnet/cavnet.h>

#include <cstring>
#include <exception>
#include <new>
#include <string>

#include "commands.hpp"
#include "error.hpp"

struct cavnet_config {
  cavnet::Config config;
};

struct cavnet_report {
  cavnet::Report report;
};

namespace {

thread_local std::string last_error;

cavnet_status fail(cavnet_status status, const char* message) {
  last_error = message;
  return status;
}

cavnet_status status_of(const cavnet::Error& e) {
  switch (e.code()) {
    case cavnet::ErrorCode::Argument: return CAVNET_ERROR_ARGUMENT;
    case cavnet::ErrorCode::Config: return CAVNET_ERROR_CONFIG;
    case cavnet::ErrorCode::Numerical: return CAVNET_ERROR_NUMERICAL;
    case cavnet::ErrorCode::Io: return CAVNET_ERROR_IO;
  }
  return CAVNET_ERROR_INTERNAL;
}

template <typename Fn>
cavnet_status guarded(Fn&& fn) {
  try {
    last_error.clear();
    fn();
    return CAVNET_OK;
  } catch (const cavnet::Error& e) {
    return fail(status_of(e), e.what());
  } catch (const std::bad_alloc&) {
    return fail(CAVNET_ERROR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(CAVNET_ERROR_INTERNAL, e.what());
  } catch (...) {
    return fail(CAVNET_ERROR_INTERNAL, "unknown error");
  }
}

cavnet::CommandOptions to_options(const cavnet_run_options* o) {
  cavnet::CommandOptions c;
  if (o) {
    if (o->out_dir) c.out_dir = o->out_dir;
    c.jobs = o->jobs;
    c.seedless = o->seedless != 0;
  }
  return c;
}

template <typename Command>
cavnet_status run_command(const cavnet_config* config, const cavnet_run_options* options, cavnet_report** out,
                          Command command) {
  if (!config || !out) return fail(CAVNET_ERROR_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    const cavnet::RunConfig resolved = config->config.resolve();
    *out = new cavnet_report{command(resolved, to_options(options))};
  });
}

}  // namespace

extern "C" {

const char* cavnet_version(void) { return CAVNET_VERSION; }

const char* cavnet_last_error(void) { return last_error.c_str(); }

cavnet_status cavnet_config_load(const char* path, cavnet_config** out) {
  if (!path || !out) return fail(CAVNET_ERROR_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] { *out = new cavnet_config{cavnet::Config::load(path)}; });
}

cavnet_status cavnet_config_parse(const char* text, cavnet_config** out) {
  if (!text || !out) return fail(CAVNET_ERROR_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] { *out = new cavnet_config{cavnet::Config::parse(text)}; });
}

cavnet_status cavnet_config_set(cavnet_config* config, const char* key, const char* value) {
  if (!config || !key || !value) return fail(CAVNET_ERROR_ARGUMENT, "null argument");
  return guarded([&] { config->config.set(key, value); });
}

cavnet_status cavnet_config_check(const cavnet_config* config, char* hash_out, size_t hash_size) {
  if (!config) return fail(CAVNET_ERROR_ARGUMENT, "null argument");
  return guarded([&] {
    const auto resolved = config->config.resolve();
    if (hash_out && hash_size > 0) {
      const std::size_t n = std::min(hash_size - 1, resolved.hash.size());
      std::memcpy(hash_out, resolved.hash.data(), n);
      hash_out[n] = '\0';
    }
  });
}

void cavnet_config_free(cavnet_config* config) { delete config; }

cavnet_status cavnet_validate(const cavnet_config* config, cavnet_report** out) {
  return run_command(config, nullptr, out,
                     [](const cavnet::RunConfig& c, const cavnet::CommandOptions&) { return cavnet::cmd_validate(c); });
}

cavnet_status cavnet_eigencheck(double g, cavnet_report** out) {
  if (!out) return fail(CAVNET_ERROR_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] { *out = new cavnet_report{cavnet::cmd_eigencheck(g)}; });
}

cavnet_status cavnet_run(const cavnet_config* config, const cavnet_run_options* options, cavnet_report** out) {
  return run_command(config, options, out, cavnet::cmd_run);
}

cavnet_status cavnet_sweep(const cavnet_config* config, const cavnet_run_options* options, cavnet_report** out) {
  return run_command(config, options, out, cavnet::cmd_sweep);
}

cavnet_status cavnet_compare(const cavnet_config* config, const cavnet_run_options* options, cavnet_report** out) {
  return run_command(config, options, out, cavnet::cmd_compare);
}

cavnet_status cavnet_feasibility(const cavnet_config* config, const cavnet_run_options* options,
                                 cavnet_report** out) {
  return run_command(config, options, out, cavnet::cmd_feasibility);
}

int cavnet_report_ok(const cavnet_report* report) { return report && report->report.ok ? 1 : 0; }

const char* cavnet_report_text(const cavnet_report* report) { return report ? report->report.text.c_str() : ""; }

cavnet_status cavnet_report_value(const cavnet_report* report, const char* name, double* value) {
  if (!report || !name || !value) return fail(CAVNET_ERROR_ARGUMENT, "null argument");
  const auto it = report->report.values.find(name);
  if (it == report->report.values.end()) return fail(CAVNET_ERROR_ARGUMENT, "no such report value");
  *value = it->second;
  return CAVNET_OK;
}

size_t cavnet_report_file_count(const cavnet_report* report) { return report ? report->report.files.size() : 0; }

const char* cavnet_report_file(const cavnet_report* report, size_t index) {
  if (!report || index >= report->report.files.size()) return nullptr;
  return report->report.files[index].c_str();
}

void cavnet_report_free(cavnet_report* report) { delete report; }

}  // extern "C"
