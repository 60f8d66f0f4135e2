#ifndef QUARTIC_H
#define QUARTIC_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum QuarticFamily {
  QUARTIC_FAMILY_MELONIC = 0,
  QUARTIC_FAMILY_FULL_QUARTIC = 1,
} QuarticFamily;

typedef enum QuarticScaling {
  QUARTIC_SCALING_INVARIANT = 0,
  QUARTIC_SCALING_ENHANCED = 1,
} QuarticScaling;

typedef enum QuarticStatus {
  QUARTIC_STATUS_OK = 0,
  QUARTIC_STATUS_NULL_POINTER = 1,
  QUARTIC_STATUS_INVALID_UTF8 = 2,
  QUARTIC_STATUS_INVALID_INPUT = 3,
  QUARTIC_STATUS_BUDGET_EXCEEDED = 4,
  QUARTIC_STATUS_ENGINE_ERROR = 5,
  QUARTIC_STATUS_PANIC = 6,
} QuarticStatus;

/**
 * A coloured Feynman graph.
 */
typedef struct QuarticGraph QuarticGraph;

/**
 * A ciliated multicoloured map.
 */
typedef struct QuarticMap QuarticMap;

/**
 * A model specification.
 */
typedef struct QuarticModel QuarticModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Engine version as a static string; do not free.
 */
const char *quartic_version(void);

/**
 * Message of the last failed call on this thread, or NULL. The caller frees it.
 */
char *quartic_last_error_message(void);

/**
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void quartic_string_free(char *s);

/**
 * # Safety
 * `out` must be a valid pointer.
 */
enum QuarticStatus quartic_model_new(enum QuarticFamily family,
                                     enum QuarticScaling scaling,
                                     uint32_t rank,
                                     struct QuarticModel **out);

/**
 * Rank-4 field theory with derivative necklaces and covariance exponent `eta_num/eta_den`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum QuarticStatus quartic_model_enhanced_tft(int64_t eta_num,
                                              int64_t eta_den,
                                              struct QuarticModel **out);

/**
 * # Safety
 * `m` must be NULL or a handle from this library not yet freed.
 */
void quartic_model_free(struct QuarticModel *m);

/**
 * Parse a map from its JSON form.
 *
 * # Safety
 * `json` must be a nul-terminated string and `out` a valid pointer.
 */
enum QuarticStatus quartic_map_from_json(const char *json, struct QuarticMap **out);

/**
 * # Safety
 * `map` must be a live handle and `out` a valid pointer.
 */
enum QuarticStatus quartic_map_to_json(const struct QuarticMap *map, char **out);

/**
 * # Safety
 * `m` must be NULL or a handle from this library not yet freed.
 */
void quartic_map_free(struct QuarticMap *m);

/**
 * # Safety
 * `json` must be a nul-terminated string and `out` a valid pointer.
 */
enum QuarticStatus quartic_graph_from_json(const char *json, struct QuarticGraph **out);

/**
 * # Safety
 * `graph` must be a live handle and `out` a valid pointer.
 */
enum QuarticStatus quartic_graph_to_json(const struct QuarticGraph *graph, char **out);

/**
 * # Safety
 * `g` must be NULL or a handle from this library not yet freed.
 */
void quartic_graph_free(struct QuarticGraph *g);

/**
 * # Safety
 * `graph` must be a live handle and `out` a valid pointer.
 */
enum QuarticStatus quartic_graph_to_map(const struct QuarticGraph *graph, struct QuarticMap **out);

/**
 * # Safety
 * `map` must be a live handle and `out` a valid pointer.
 */
enum QuarticStatus quartic_map_to_graph(const struct QuarticMap *map, struct QuarticGraph **out);

/**
 * Edges, cilia, internal faces and genus of a map. Any output pointer may be NULL.
 *
 * # Safety
 * `map` must be a live handle; non-NULL outputs must be valid.
 */
enum QuarticStatus quartic_map_stats(const struct QuarticMap *map,
                                     size_t *edges,
                                     size_t *cilia,
                                     size_t *internal_faces,
                                     size_t *genus);

/**
 * Exponent `Omega` of `N^(-Omega)` in the amplitude, as a fraction.
 *
 * # Safety
 * Handles must be live and outputs valid.
 */
enum QuarticStatus quartic_map_omega(const struct QuarticMap *map,
                                     const struct QuarticModel *model,
                                     int64_t *num,
                                     int64_t *den);

/**
 * Plane trees on `v` labelled vertices with `k` cilia and `q` colours, by
 * generation and by closed form, as decimal strings.
 *
 * # Safety
 * Outputs must be valid pointers.
 */
enum QuarticStatus quartic_count_trees(uint32_t v,
                                       uint32_t k,
                                       uint32_t q,
                                       char **enumerated,
                                       char **closed_form);

/**
 * Connected vacuum series through `order`, one term per line as
 * `degrees;n_exponent;num/den`.
 *
 * # Safety
 * `model` must be a live handle and `out` a valid pointer.
 */
enum QuarticStatus quartic_free_energy(const struct QuarticModel *model,
                                       uint32_t order,
                                       char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QUARTIC_H */
