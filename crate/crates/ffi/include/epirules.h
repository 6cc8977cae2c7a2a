#ifndef EPIRULES_H
#define EPIRULES_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum EprStatus {
  EPR_STATUS_OK = 0,
  EPR_STATUS_NULL_POINTER = 1,
  EPR_STATUS_INVALID_UTF8 = 2,
  EPR_STATUS_PARSE = 3,
  EPR_STATUS_VALUE = 4,
  EPR_STATUS_IO = 5,
  EPR_STATUS_DATA = 6,
  EPR_STATUS_CONFIG = 7,
  EPR_STATUS_PANIC = 8,
} EprStatus;

typedef struct EprConfig EprConfig;

typedef struct EprDataset EprDataset;

typedef struct EprRule EprRule;

typedef struct EprRuleSet EprRuleSet;

typedef struct EprValueSet EprValueSet;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the most recent failure on this thread, or null. The pointer
// stays valid until the next failing call on the same thread.
const char *epr_last_error(void);

// # Safety
// `s` must be null or a string returned by this library.
void epr_string_free(char *s);

// Parses a JSON array of decimal strings such as `["0","0.5","1"]`.
//
// # Safety
// `json` must be a NUL-terminated string; `out` must be writable.
enum EprStatus epr_value_set_from_json(const char *json, struct EprValueSet **out);

// # Safety
// `set` must be null or a handle from [`epr_value_set_from_json`].
void epr_value_set_free(struct EprValueSet *set);

// # Safety
// `set` must be a live handle.
size_t epr_value_set_len(const struct EprValueSet *set);

// Nearest value in the set, both sides counted in hundredths.
//
// # Safety
// `set` must be a live handle; `out` must be writable.
enum EprStatus epr_nearest(const struct EprValueSet *set, uint32_t hundredths, uint32_t *out);

// # Safety
// `text_form` must be a NUL-terminated string; `out` must be writable.
enum EprStatus epr_rule_parse(const char *text_form, struct EprRule **out);

// # Safety
// `rule` must be null or a handle from [`epr_rule_parse`].
void epr_rule_free(struct EprRule *rule);

// # Safety
// `rule` must be a live handle; `out` must be writable.
enum EprStatus epr_rule_format(const struct EprRule *rule, char **out);

// # Safety
// `rule` must be a live handle; `out` must be writable.
enum EprStatus epr_rule_to_json(const struct EprRule *rule, char **out);

// Loads a CSV file. `scale_points` of 0 reads values as probabilities;
// otherwise cells are Likert ratings on that many points.
//
// # Safety
// `path` must be a NUL-terminated string; `out` must be writable.
enum EprStatus epr_dataset_load_csv(const char *path,
                                    int64_t scale_points,
                                    struct EprDataset **out);

// # Safety
// `dataset` must be null or a handle from [`epr_dataset_load_csv`].
void epr_dataset_free(struct EprDataset *dataset);

// # Safety
// `dataset` must be a live handle.
size_t epr_dataset_len(const struct EprDataset *dataset);

// # Safety
// `json` must be a NUL-terminated string; `out` must be writable.
enum EprStatus epr_config_from_json(const char *json, struct EprConfig **out);

// # Safety
// `config` must be null or a handle from [`epr_config_from_json`].
void epr_config_free(struct EprConfig *config);

// Learns rules for every configured tuple, treating the whole dataset as
// the training split.
//
// # Safety
// `config` and `dataset` must be live handles; `out` must be writable.
enum EprStatus epr_learn(const struct EprConfig *config,
                         const struct EprDataset *dataset,
                         struct EprRuleSet **out);

// # Safety
// `set` must be null or a handle from [`epr_learn`].
void epr_rule_set_free(struct EprRuleSet *set);

// # Safety
// `set` must be a live handle.
size_t epr_rule_set_len(const struct EprRuleSet *set);

// # Safety
// `set` must be a live handle; `out` must be writable.
enum EprStatus epr_rule_set_get_text(const struct EprRuleSet *set, size_t index, char **out);

// # Safety
// `set` must be a live handle; `out` must be writable.
enum EprStatus epr_rule_set_to_json(const struct EprRuleSet *set, char **out);

// Irrationality audit of a rules JSON document against the configured
// tuples; writes the report as JSON.
//
// # Safety
// `rules_json` must be a NUL-terminated string; `config` must be a live
// handle; `out` must be writable.
enum EprStatus epr_audit_json(const char *rules_json, const struct EprConfig *config, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* EPIRULES_H */
