/* C interface to the nhgcn library.
 *
 * Every function returns an nhg_status. On failure the message of the most
 * recent error on the calling thread is available from nhg_last_error().
 * Handles are opaque; free them with the matching *_free function.
 */
#ifndef NHGCN_NHGCN_H
#define NHGCN_NHGCN_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define NHG_API __declspec(dllexport)
#else
#define NHG_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum nhg_status {
  NHG_OK = 0,
  NHG_ERR_INVALID_ARGUMENT = 1,
  NHG_ERR_INPUT = 2,
  NHG_ERR_SHAPE = 3,
  NHG_ERR_CONFIG = 4,
  NHG_ERR_IO = 5,
  NHG_ERR_DATASET = 6,
  NHG_ERR_STATE = 7,
  NHG_ERR_DIVERGED = 8,
  NHG_ERR_INTERNAL = 9
} nhg_status;

typedef struct nhg_dataset nhg_dataset;
typedef struct nhg_config nhg_config;

NHG_API const char* nhg_version(void);
NHG_API const char* nhg_status_name(nhg_status s);
/* Message of the last failure on this thread ("" if none). */
NHG_API const char* nhg_last_error(void);

/* ---- datasets ---- */

NHG_API nhg_status nhg_dataset_load(const char* dir, nhg_dataset** out);
NHG_API nhg_status nhg_dataset_save(const nhg_dataset* ds, const char* dir);
NHG_API void nhg_dataset_free(nhg_dataset* ds);

typedef struct nhg_dataset_info {
  size_t num_nodes;
  size_t num_edges;
  size_t num_features;
  size_t num_classes;
  size_t dropped_self_loops;
} nhg_dataset_info;

NHG_API nhg_status nhg_dataset_describe(const nhg_dataset* ds, nhg_dataset_info* out);
/* Copies the dataset name into buf (truncated, always terminated). */
NHG_API nhg_status nhg_dataset_name(const nhg_dataset* ds, char* buf, size_t cap);

typedef enum nhg_synth_kind { NHG_SYNTH_BIPARTITE = 0, NHG_SYNTH_PLANTED_PARTITION = 1 } nhg_synth_kind;

typedef struct nhg_synth_spec {
  nhg_synth_kind kind;
  /* Side sizes (bipartite) or class block sizes (planted partition). */
  const size_t* sizes;
  size_t num_sizes;
  double p_in;
  double p_out;
  size_t hubs;
  size_t hub_degree;
  size_t num_features;
  double mean_scale;
  double sigma;
  uint64_t seed;
  const char* name;
} nhg_synth_spec;

/* Fills spec with defaults (planted partition, 8 features, unit mean and sigma). */
NHG_API void nhg_synth_spec_init(nhg_synth_spec* spec);
NHG_API nhg_status nhg_dataset_synth(const nhg_synth_spec* spec, nhg_dataset** out);

/* ---- run configuration ---- */

NHG_API nhg_status nhg_config_new(nhg_config** out);
NHG_API void nhg_config_free(nhg_config* cfg);
/* Appends the key=value lines of a file; later settings override earlier ones. */
NHG_API nhg_status nhg_config_load(nhg_config* cfg, const char* path);
/* Unknown keys and malformed values are rejected immediately. */
NHG_API nhg_status nhg_config_set(nhg_config* cfg, const char* key, const char* value);
/* Resolved value of key (after defaults). *needed receives the full length + 1. */
NHG_API nhg_status nhg_config_get(const nhg_config* cfg, const char* key, char* buf, size_t cap, size_t* needed);
/* Full resolved key=value listing. */
NHG_API nhg_status nhg_config_echo(const nhg_config* cfg, char* buf, size_t cap, size_t* needed);

/* ---- commands ---- */

typedef struct nhg_metric_row {
  size_t hop;
  double nh_raw;
  double nh_norm;
  double node_hom;
  /* (H - 1/C) / (1 - 1/C), reported alongside because published tables
   * do not say which convention they use. */
  double node_hom_minmax;
} nhg_metric_row;

/* Per-node dumps (metrics_k<hop>.csv) and summary.json for each hop. rows
 * receives one entry per hop and may be NULL. */
NHG_API nhg_status nhg_metrics(const nhg_dataset* ds, const size_t* hops, size_t num_hops, const char* out_dir,
                               nhg_metric_row* rows);

typedef struct nhg_run_summary {
  size_t best_epoch;
  size_t epochs_run;
  double best_val_acc;
  double test_acc;
  double test_acc_final_masks;
  double mean_epoch_seconds;
  double total_seconds;
} nhg_run_summary;

/* Single run with the config's seed. Writes config.txt, epochs.csv, alpha.csv,
 * summary.json and checkpoint.txt to out_dir (or the config's out key). */
NHG_API nhg_status nhg_train(const nhg_dataset* ds, const nhg_config* cfg, const char* out_dir,
                             nhg_run_summary* out);

typedef struct nhg_multiseed_summary {
  double mean;
  double stddev;
  size_t runs;
  size_t excluded;
  double mean_epoch_seconds;
  double total_seconds;
} nhg_multiseed_summary;

/* One run per configured seed, each in seed_<s>/, plus seeds.csv and summary.json. */
NHG_API nhg_status nhg_multiseed(const nhg_dataset* ds, const nhg_config* cfg, const char* out_dir,
                                 nhg_multiseed_summary* out);

/* Finite-difference gradient check of the configured model on a tiny
 * instance; returns the maximum relative error. */
NHG_API nhg_status nhg_gradcheck(const nhg_config* cfg, uint64_t seed, double* max_rel_error);

typedef enum nhg_bin_metric { NHG_BIN_NH = 0, NHG_BIN_NODE_HOMOPHILY = 1 } nhg_bin_metric;

/* Evaluates a checkpoint on the test nodes of its split, bins them by the
 * ground-truth metric and writes the per-bin accuracy CSV. accuracy (10
 * entries, may be NULL) receives NaN for empty bins. */
NHG_API nhg_status nhg_bins(const nhg_dataset* ds, const char* checkpoint, nhg_bin_metric metric,
                            const char* out_csv, double* accuracy);

#ifdef __cplusplus
}
#endif

#endif /* NHGCN_NHGCN_H */
