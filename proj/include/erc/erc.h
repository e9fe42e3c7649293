/* erc — experience-replay stabilized actor-critic engine.
 *
 * C interface to the training core: opaque handles, integer status
 * codes, no exceptions across the boundary. The CLI is built entirely
 * on this header; embedders get the same surface.
 */
#ifndef ERC_H
#define ERC_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define ERC_API __declspec(dllexport)
#else
#define ERC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes. The first two double as CLI exit codes. */
typedef enum erc_status {
  ERC_OK = 0,
  ERC_DIVERGED = 1, /* run halted on non-finite parameters */
  ERC_INVALID = 2,  /* bad input: unknown key, range error, bad file */
  ERC_IO = 3,       /* filesystem failure */
  ERC_INTERNAL = 4
} erc_status;

typedef struct erc_config erc_config;
typedef struct erc_env erc_env;

ERC_API const char* erc_version(void);

/* Message for the most recent failing call on this thread. */
ERC_API const char* erc_last_error(void);

/* Optional progress hook; output files never depend on it. */
typedef void (*erc_log_fn)(const char* line, void* user);
ERC_API void erc_set_log_fn(erc_log_fn fn, void* user);

/* --- configuration ----------------------------------------------------
 * Keys mirror the `key = value` config file format, e.g.
 * erc_config_set(c, "algo", "a2c-erc"); erc_config_set(c, "seed", "3");
 */
ERC_API erc_config* erc_config_new(void);
ERC_API void erc_config_free(erc_config* cfg);
ERC_API erc_status erc_config_load_file(erc_config* cfg, const char* path);
ERC_API erc_status erc_config_set(erc_config* cfg, const char* key,
                                  const char* value);
ERC_API erc_status erc_config_get(const erc_config* cfg, const char* key,
                                  char* buf, size_t cap);
ERC_API erc_status erc_config_save_file(const erc_config* cfg,
                                        const char* path);

/* --- training ---------------------------------------------------------
 * Writes runlog.csv and config.txt under out_dir. Deterministic in
 * (config, seed): repeated runs produce byte-identical CSVs.
 */
typedef struct erc_train_summary {
  long long env_steps;
  long episodes;
  double final_eval_mean;
  double final_eval_std;
  long long skipped_steps;
  long long all_masked_batches;
  long long env_faults;
  int diverged;
} erc_train_summary;

ERC_API erc_status erc_train(const erc_config* cfg,
                             erc_train_summary* summary /* nullable */);

/* Grid over (eta_c, eta_m, seed); writes <out_dir>/grid.csv.
 * jobs < 1 means one worker per hardware thread. */
ERC_API erc_status erc_grid_search(const erc_config* base, const double* eta_c,
                                   size_t n_eta_c, const double* eta_m,
                                   size_t n_eta_m, const uint64_t* seeds,
                                   size_t n_seeds, int jobs);

/* Four-condition trick matrix {vanilla, c, m, cm};
 * writes <out_dir>/ablation_summary.csv. */
ERC_API erc_status erc_ablation(const erc_config* base, const uint64_t* seeds,
                                size_t n_seeds, int jobs);

/* Renders a runlog column to a standalone SVG. */
ERC_API erc_status erc_plot(const char* const* csv_paths, size_t n_paths,
                            const char* column, const char* out_svg);

/* --- environments ------------------------------------------------------ */
ERC_API erc_status erc_env_names(char* buf, size_t cap); /* newline sep */
ERC_API erc_status erc_env_describe(const char* name, char* buf, size_t cap);

ERC_API erc_env* erc_env_new(const char* name);
ERC_API void erc_env_free(erc_env* env);
ERC_API erc_status erc_env_dims(const erc_env* env, int* obs_dim,
                                int* act_dim);
ERC_API erc_status erc_env_reset(erc_env* env, uint64_t seed,
                                 double* obs /* obs_dim */);
/* Returns ERC_DIVERGED if the physical state went non-finite (episode
 * aborted); obs/reward are not written in that case. */
ERC_API erc_status erc_env_step(erc_env* env, const double* action,
                                size_t act_len, double* obs, double* reward,
                                int* terminal, int* truncated);

#ifdef __cplusplus
}
#endif

#endif /* ERC_H */
