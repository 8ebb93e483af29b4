#ifndef DFIB_H
#define DFIB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Opaque configuration handle.
 */
typedef struct DfibConfig DfibConfig;

/**
 * Create a configuration from a scenario preset name (for example
 * "quasi_static_circle"). Returns null and sets the last error on failure.
 *
 * # Safety
 * `scenario` must be a valid NUL-terminated UTF-8 string or null.
 */
struct DfibConfig *dfib_config_new(const char *scenario);

/**
 * Override one key=value pair on the configuration. Returns 0 on success.
 *
 * # Safety
 * `config` must come from `dfib_config_new` and not have been freed;
 * `key` and `value` must be valid NUL-terminated UTF-8 strings.
 */
int dfib_config_set(struct DfibConfig *config, const char *key, const char *value);

/**
 * Run the configured scenario, writing outputs to the configured
 * directory (key "output_dir"). Returns 0 on success, 2 for configuration
 * errors, 3 for numerical failures.
 *
 * # Safety
 * `config` must come from `dfib_config_new` and not have been freed.
 */
int dfib_run(const struct DfibConfig *config);

/**
 * Free a configuration handle. A null pointer is ignored.
 *
 * # Safety
 * `config` must come from `dfib_config_new` and not already be freed.
 */
void dfib_config_free(struct DfibConfig *config);

/**
 * Message describing the most recent error on this thread. The pointer is
 * valid until the next failing call on the same thread.
 */
const char *dfib_last_error_message(void);

#endif  /* DFIB_H */
