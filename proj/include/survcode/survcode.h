/*
 * survcode C API: multi-label coding of open-ended survey answers.
 *
 * All objects are opaque handles created by *_load / *_create / *_train
 * functions and released with the matching *_free. Every function returns
 * an sc_status; on failure sc_last_error() describes the problem for the
 * calling thread. Strings returned through char** are owned by the caller
 * and released with sc_string_free.
 */
#ifndef SURVCODE_H
#define SURVCODE_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(SURVCODE_BUILDING)
#    define SC_API __declspec(dllexport)
#  else
#    define SC_API __declspec(dllimport)
#  endif
#else
#  define SC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sc_status {
  SC_OK = 0,
  SC_ERR_INVALID_ARGUMENT = 1,
  SC_ERR_IO = 2,
  SC_ERR_PARSE = 3,
  SC_ERR_DATA = 4,
  SC_ERR_INTERNAL = 5
} sc_status;

typedef struct sc_config sc_config;
typedef struct sc_dataset sc_dataset;
typedef struct sc_split sc_split;
typedef struct sc_model sc_model;
typedef struct sc_predictions sc_predictions;

SC_API const char* sc_version(void);
SC_API const char* sc_last_error(void);
SC_API const char* sc_status_name(sc_status status);
SC_API void sc_string_free(char* s);

/* Configuration. A NULL config argument anywhere means defaults. */
SC_API sc_status sc_config_default(sc_config** out);
SC_API sc_status sc_config_load(const char* path, sc_config** out);
SC_API sc_status sc_config_set_seed(sc_config* config, uint64_t seed);
SC_API sc_status sc_config_set_threads(sc_config* config, unsigned threads);
SC_API sc_status sc_config_to_json(const sc_config* config, char** out_json);
SC_API void sc_config_free(sc_config* config);

/* Datasets: UTF-8 CSV with id, text and label columns. */
SC_API sc_status sc_dataset_load(const char* path, const sc_config* config, sc_dataset** out);
SC_API size_t sc_dataset_size(const sc_dataset* dataset);
SC_API size_t sc_dataset_label_count(const sc_dataset* dataset);
SC_API sc_status sc_dataset_stats(const sc_dataset* dataset, char** out_json, char** out_text);
SC_API void sc_dataset_free(sc_dataset* dataset);

/* Train / validation / test partitions. */
SC_API sc_status sc_split_create(const sc_dataset* dataset, const sc_config* config, sc_split** out);
SC_API sc_status sc_split_load(const char* path, const sc_dataset* dataset, sc_split** out);
SC_API sc_status sc_split_save(const sc_split* split, const char* path);
SC_API sc_status sc_split_sizes(const sc_split* split, size_t* train, size_t* validation, size_t* test);
SC_API void sc_split_free(sc_split* split);

/* algorithm is one of "br", "lp", "cc", "ecc". */
SC_API sc_status sc_gridsearch(const sc_dataset* dataset, const sc_split* split, const char* algorithm,
                               const sc_config* config, char** out_json);
SC_API sc_status sc_model_train(const sc_dataset* dataset, const sc_split* split, const char* algorithm,
                                const sc_config* config, sc_model** out);
SC_API sc_status sc_model_save(const sc_model* model, const char* path);
SC_API sc_status sc_model_load(const char* path, sc_model** out);
SC_API const char* sc_model_algorithm(const sc_model* model);
SC_API void sc_model_free(sc_model* model);

/* part is "train", "validation", "test" or "all" (split may be NULL for
 * "all"). force_min_one != 0 applies the min-1-label fallback. */
SC_API sc_status sc_model_predict(const sc_model* model, const sc_dataset* dataset, const sc_split* split,
                                  const char* part, int force_min_one, const sc_config* config,
                                  sc_predictions** out);

/* Prediction interchange files (JSON lines). */
SC_API sc_status sc_predictions_import(const char* path, const sc_dataset* dataset, sc_predictions** out);
SC_API sc_status sc_predictions_write(const sc_predictions* predictions, const char* path);
SC_API size_t sc_predictions_size(const sc_predictions* predictions);
SC_API size_t sc_predictions_empty_count(const sc_predictions* predictions);
/* Label frequencies for tie-breaking come from the split's training part,
 * or from the whole dataset when split is NULL. */
SC_API sc_status sc_predictions_force_min_one(sc_predictions* predictions, const sc_dataset* dataset,
                                              const sc_split* split);
SC_API void sc_predictions_free(sc_predictions* predictions);

/* Metrics against the dataset's ground truth. */
SC_API sc_status sc_evaluate(const sc_predictions* predictions, const sc_dataset* dataset,
                             double* zero_one, double* hamming, char** out_json, char** out_table);
/* dataset may be NULL, in which case no auto-subset loss is computed. */
SC_API sc_status sc_triage(const sc_predictions* predictions, const sc_dataset* dataset,
                           double* auto_fraction, char** out_json);
SC_API sc_status sc_kappa(const sc_dataset* coder1, const sc_dataset* coder2, double* label_level,
                          double* answer_level);

#ifdef __cplusplus
}
#endif

#endif /* SURVCODE_H */
