/* Public C API of the fqs shared library: a pseudospectral solver and
 * analysis toolkit for the 3D fractional quadratic Schrodinger equation
 * (d_t + i D^alpha) u = lambda u conj(u) on a periodic box.
 *
 * All functions return a status code (FQS_OK on success); the thread-local
 * message of the last failure is available via fqs_last_error().  Handles are
 * opaque and must be released with the matching destroy function.
 */
#ifndef FQS_H
#define FQS_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fqs_status {
  FQS_OK = 0,
  FQS_ERR_VALIDATION = 2,
  FQS_ERR_NUMERICAL = 3,
  FQS_ERR_IO = 4
} fqs_status;

typedef struct fqs_grid fqs_grid;
typedef struct fqs_field fqs_field;

const char* fqs_version(void);
/* Message of the most recent failure in this thread ("" if none). */
const char* fqs_last_error(void);

/* Periodic grid on [-L, L)^dim; dim in {1,3}, n a power of two >= 8. */
fqs_status fqs_grid_create(int dim, int n, double half_width, fqs_grid** out);
void fqs_grid_destroy(fqs_grid* g);

/* Zero field on a grid. */
fqs_status fqs_field_create(const fqs_grid* g, fqs_field** out);
void fqs_field_destroy(fqs_field* f);

/* Coefficients as interleaved (re, im) doubles in row-major ascending
 * wavenumber order; count must equal 2 * n^dim. */
fqs_status fqs_field_set_coeffs(fqs_field* f, const double* interleaved, size_t count);
fqs_status fqs_field_get_coeffs(const fqs_field* f, double* interleaved, size_t count);

/* Binary snapshot I/O (documented layout: magic, dim, n, L, alpha header then
 * coefficient pairs, little-endian). */
fqs_status fqs_field_save(const fqs_field* f, const char* path, double alpha);
fqs_status fqs_field_load(const char* path, fqs_field** out, double* alpha_out);

/* In-place free flow: multiply coefficients by e^{-it|xi|^alpha}. */
fqs_status fqs_field_propagate(fqs_field* f, double alpha, double t);

/* Norms: kind is one of "l2", "sup", "h10", "w", "u" ("w"/"u" are the
 * weighted resolution norms and use alpha, lambda). */
fqs_status fqs_field_norm(const fqs_field* f, const char* kind, double alpha, double lambda,
                          double* out);

/* Runs one experiment described by a JSON document (see the CLI docs for the
 * schema) and writes its artifacts under out_dir.  On success *summary_json
 * receives a malloc'd JSON string (free with fqs_string_free). */
fqs_status fqs_run_experiment(const char* config_json, const char* out_dir, uint64_t seed,
                              int workers, int snapshot_stride, char** summary_json);

void fqs_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* FQS_H */
