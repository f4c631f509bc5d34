#ifndef CAVNET_CAVNET_H
#define CAVNET_CAVNET_H

#include <stddef.h>

#if defined(_WIN32)
#define CAVNET_API __declspec(dllexport)
#else
#define CAVNET_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cavnet_status {
  CAVNET_OK = 0,
  CAVNET_ERROR_ARGUMENT = 1,
  CAVNET_ERROR_CONFIG = 2,
  CAVNET_ERROR_NUMERICAL = 3,
  CAVNET_ERROR_IO = 4,
  CAVNET_ERROR_INTERNAL = 5
} cavnet_status;

typedef struct cavnet_config cavnet_config;
typedef struct cavnet_report cavnet_report;

typedef struct cavnet_run_options {
  const char* out_dir; /* NULL: current directory */
  unsigned jobs;       /* 0: available parallelism */
  int seedless;
} cavnet_run_options;

CAVNET_API const char* cavnet_version(void);

/* Message of the last failed call on this thread; "" if none. */
CAVNET_API const char* cavnet_last_error(void);

CAVNET_API cavnet_status cavnet_config_load(const char* path, cavnet_config** out);
CAVNET_API cavnet_status cavnet_config_parse(const char* text, cavnet_config** out);
/* Overrides "section.key" before the configuration is resolved. */
CAVNET_API cavnet_status cavnet_config_set(cavnet_config* config, const char* key, const char* value);
/* Resolves and validates; the config hash is written to hash_out (17 bytes
   including the terminator) when it is not NULL. */
CAVNET_API cavnet_status cavnet_config_check(const cavnet_config* config, char* hash_out, size_t hash_size);
CAVNET_API void cavnet_config_free(cavnet_config* config);

/* Commands. On success *out receives a report that must be released with
   cavnet_report_free. cavnet_validate and cavnet_eigencheck also succeed
   when the checks fail; inspect cavnet_report_ok. */
CAVNET_API cavnet_status cavnet_validate(const cavnet_config* config, cavnet_report** out);
CAVNET_API cavnet_status cavnet_eigencheck(double g, cavnet_report** out);
CAVNET_API cavnet_status cavnet_run(const cavnet_config* config, const cavnet_run_options* options,
                                    cavnet_report** out);
CAVNET_API cavnet_status cavnet_sweep(const cavnet_config* config, const cavnet_run_options* options,
                                      cavnet_report** out);
CAVNET_API cavnet_status cavnet_compare(const cavnet_config* config, const cavnet_run_options* options,
                                        cavnet_report** out);
CAVNET_API cavnet_status cavnet_feasibility(const cavnet_config* config, const cavnet_run_options* options,
                                            cavnet_report** out);

CAVNET_API int cavnet_report_ok(const cavnet_report* report);
CAVNET_API const char* cavnet_report_text(const cavnet_report* report);
/* Named numeric result; CAVNET_ERROR_ARGUMENT when the name is unknown. */
CAVNET_API cavnet_status cavnet_report_value(const cavnet_report* report, const char* name, double* value);
CAVNET_API size_t cavnet_report_file_count(const cavnet_report* report);
CAVNET_API const char* cavnet_report_file(const cavnet_report* report, size_t index);
CAVNET_API void cavnet_report_free(cavnet_report* report);

#ifdef __cplusplus
}
#endif

#endif
