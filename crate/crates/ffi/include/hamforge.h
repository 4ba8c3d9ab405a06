/* C interface for the hamforge library.
 *
 * Handles are opaque; every function returning an int uses the error codes
 * below and records a message retrievable with hf_last_error(). Strings
 * passed in must be NUL-terminated UTF-8; strings returned must be released
 * with hf_string_free().
 *
 * Regenerate with `cbindgen --crate hamforge-ffi` if the surface changes;
 * this checked-in copy is kept in sync by the crate's tests.
 */

#ifndef HAMFORGE_H
#define HAMFORGE_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#define HF_OK 0
#define HF_ERR_ASSERTION 1
#define HF_ERR_PARSE 2
#define HF_ERR_CAP 3
#define HF_ERR_ARGUMENT 4

typedef struct HfInstance HfInstance;
typedef struct HfHamiltonian HfHamiltonian;

typedef struct HfSolveResult {
  double lambda;
  double residual;
  double ground_obs;
  double low_min_obs;
  double low_max_obs;
  /* 1 = YES, 0 = NO, -1 = INVALID */
  int verdict;
} HfSolveResult;

/* Last error message for this thread; valid until the next failing call. */
const char *hf_last_error(void);

/* Parse an instance file (Hamiltonian + OBS + THRESH) into a handle. */
int hf_instance_parse(const char *text, HfInstance **out);

/* Serialize an instance handle back to its text format (bit-exact floats). */
char *hf_instance_write(const HfInstance *inst);

/* Ground energy, ground-state observable expectation and the scan verdict. */
int hf_instance_solve(const HfInstance *inst, double tol, HfSolveResult *out);

void hf_instance_free(HfInstance *inst);

/* Parse a plain Hamiltonian text file into a handle. */
int hf_hamiltonian_parse(const char *text, HfHamiltonian **out);

/* Total Hilbert-space dimension (0 for a null handle). */
uint64_t hf_hamiltonian_dim(const HfHamiltonian *h);

/* Minimum eigenvalue with a certified residual. */
int hf_hamiltonian_min_eigenvalue(const HfHamiltonian *h, double tol,
                                  double *lambda, double *residual);

/* Triangle-inequality operator-norm bound. */
int hf_hamiltonian_norm_bound(const HfHamiltonian *h, double *bound);

void hf_hamiltonian_free(HfHamiltonian *h);

void hf_string_free(char *s);

#ifdef __cplusplus
}
#endif

#endif /* HAMFORGE_H */
