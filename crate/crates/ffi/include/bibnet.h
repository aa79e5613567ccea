#ifndef BIBNET_H
#define BIBNET_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum BibnetStatus {
  BIBNET_STATUS_OK = 0,
  BIBNET_STATUS_NULL_POINTER = 1,
  BIBNET_STATUS_INVALID_ARGUMENT = 2,
  BIBNET_STATUS_PARSE = 3,
  BIBNET_STATUS_COUNTING = 4,
  BIBNET_STATUS_AGGREGATION = 5,
  BIBNET_STATUS_PROJECTION = 6,
  BIBNET_STATUS_OUT_OF_RANGE = 7,
  BIBNET_STATUS_PANIC = 99,
} BibnetStatus;

typedef enum BibnetCounting {
  BIBNET_COUNTING_FULL = 0,
  BIBNET_COUNTING_FRACTIONAL_EQUAL = 1,
  BIBNET_COUNTING_FRACTIONAL_CUSTOM = 2,
} BibnetCounting;

typedef enum BibnetLevel {
  BIBNET_LEVEL_AUTHOR = 0,
  BIBNET_LEVEL_INSTITUTE = 1,
  BIBNET_LEVEL_COUNTRY = 2,
  BIBNET_LEVEL_JOURNAL = 3,
  BIBNET_LEVEL_CUSTOM = 4,
} BibnetLevel;

typedef enum BibnetFormat {
  BIBNET_FORMAT_EDGELIST = 0,
  BIBNET_FORMAT_PAJEK = 1,
  BIBNET_FORMAT_GRAPHML = 2,
} BibnetFormat;

/**
 * An incidence matrix `A`.
 */
typedef struct BibnetIncidence BibnetIncidence;

/**
 * An aggregation map.
 */
typedef struct BibnetMap BibnetMap;

/**
 * A network matrix `B = A·Aᵀ`.
 */
typedef struct BibnetNetwork BibnetNetwork;

/**
 * Parsed paper records.
 */
typedef struct BibnetRecords BibnetRecords;

/**
 * Plain-data view of a conservation report.
 */
typedef struct BibnetAudit {
  double incidence_mass;
  double network_mass;
  double self_mass;
  double collaboration_mass;
  size_t expected;
  size_t column_violations;
  bool conserved;
} BibnetAudit;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer is
 * valid until the next failing call on the same thread.
 */
const char *bibnet_last_error(void);

void bibnet_string_free(char *s);

/**
 * Parses records from CSV bytes (`paper_id,entity_id[,weight]`).
 */
enum BibnetStatus bibnet_records_parse_csv(const uint8_t *data,
                                           size_t len,
                                           struct BibnetRecords **out);

/**
 * Parses records from JSON Lines bytes.
 */
enum BibnetStatus bibnet_records_parse_jsonl(const uint8_t *data,
                                             size_t len,
                                             struct BibnetRecords **out);

size_t bibnet_records_len(const struct BibnetRecords *records);

void bibnet_records_free(struct BibnetRecords *records);

enum BibnetStatus bibnet_incidence_build(const struct BibnetRecords *records,
                                         enum BibnetCounting counting,
                                         struct BibnetIncidence **out);

void bibnet_incidence_free(struct BibnetIncidence *a);

enum BibnetStatus bibnet_incidence_shape(const struct BibnetIncidence *a,
                                         size_t *entities,
                                         size_t *papers);

enum BibnetStatus bibnet_incidence_get(const struct BibnetIncidence *a,
                                       size_t row,
                                       size_t col,
                                       double *out);

enum BibnetStatus bibnet_incidence_mass(const struct BibnetIncidence *a, double *out);

/**
 * Identifier of row `row`, as a newly allocated string.
 */
enum BibnetStatus bibnet_incidence_row_id(const struct BibnetIncidence *a, size_t row, char **out);

/**
 * Parses an `entity_id,group_id` map.
 */
enum BibnetStatus bibnet_map_parse(const uint8_t *data,
                                   size_t len,
                                   enum BibnetLevel from,
                                   enum BibnetLevel to,
                                   struct BibnetMap **out);

void bibnet_map_free(struct BibnetMap *map);

enum BibnetStatus bibnet_incidence_aggregate(const struct BibnetIncidence *a,
                                             const struct BibnetMap *map,
                                             struct BibnetIncidence **out);

enum BibnetStatus bibnet_network_project(const struct BibnetIncidence *a,
                                         struct BibnetNetwork **out);

void bibnet_network_free(struct BibnetNetwork *b);

size_t bibnet_network_size(const struct BibnetNetwork *b);

enum BibnetStatus bibnet_network_get(const struct BibnetNetwork *b,
                                     size_t i,
                                     size_t j,
                                     double *out);

enum BibnetStatus bibnet_network_mass(const struct BibnetNetwork *b, double *out);

enum BibnetStatus bibnet_network_decompose(const struct BibnetNetwork *b,
                                           double *self_mass,
                                           double *collaboration_mass);

/**
 * Serializes `b`; the result must be freed with [`bibnet_string_free`].
 */
enum BibnetStatus bibnet_network_export(const struct BibnetNetwork *b,
                                        enum BibnetFormat format,
                                        bool include_self_loops,
                                        char **out);

enum BibnetStatus bibnet_audit(const struct BibnetIncidence *a,
                               double tolerance,
                               struct BibnetAudit *out);

/**
 * The `key=value` report block as a newly allocated string.
 */
enum BibnetStatus bibnet_audit_render(const struct BibnetIncidence *a,
                                      double tolerance,
                                      char **out);

/**
 * Static description of a status code.
 */
const char *bibnet_status_str(enum BibnetStatus status);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BIBNET_H */
