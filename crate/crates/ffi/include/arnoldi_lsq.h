#ifndef ARNOLDI_LSQ_H
#define ARNOLDI_LSQ_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum ArnoldiStatus {
  ArnoldiStatus_Ok = 0,
  ArnoldiStatus_NullPointer = 1,
  ArnoldiStatus_InvalidInput = 2,
  ArnoldiStatus_Breakdown = 3,
  ArnoldiStatus_PoleEqualsNode = 4,
  ArnoldiStatus_EvaluationAtPole = 5,
  ArnoldiStatus_NonFinite = 6,
  ArnoldiStatus_Panic = 7,
} ArnoldiStatus;

typedef enum ArnoldiKind {
  ArnoldiKind_Poly = 0,
  ArnoldiKind_SobolevPoly = 1,
  ArnoldiKind_Rational = 2,
  ArnoldiKind_SobolevRational = 3,
} ArnoldiKind;

/**
 * Opaque fitted model.
 */
typedef struct ArnoldiModel ArnoldiModel;

typedef struct ArnoldiComplex {
  double re;
  double im;
} ArnoldiComplex;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Fits a model of `kind` and stores a new handle in `*out_model`.
 *
 * `nodes` and `weights` hold `m` entries. `orders` holds `m` derivative
 * orders or is null for plain data. `f` holds one entry per data row, per
 * node the highest derivative first. `poles` holds `n` entries for the
 * rational kinds and is ignored otherwise.
 *
 * # Safety
 * Every non-null pointer must reference the stated number of readable
 * items, and `out_model` must be writable.
 */
enum ArnoldiStatus arnoldi_fit(enum ArnoldiKind kind,
                               const struct ArnoldiComplex *nodes,
                               const struct ArnoldiComplex *weights,
                               const size_t *orders,
                               size_t m,
                               const struct ArnoldiComplex *f,
                               size_t f_len,
                               size_t n,
                               const struct ArnoldiComplex *poles,
                               size_t reorth_passes,
                               struct ArnoldiModel **out_model);

/**
 * Evaluates the model and derivatives up to `order` at `count` points.
 * `out` receives `count * (order + 1)` values, per point the highest
 * derivative first.
 *
 * # Safety
 * `model` must come from [`arnoldi_fit`] and not be freed; `points` must
 * hold `count` items and `out` must have room for `count * (order + 1)`.
 */
enum ArnoldiStatus arnoldi_eval(const struct ArnoldiModel *model,
                                const struct ArnoldiComplex *points,
                                size_t count,
                                size_t order,
                                struct ArnoldiComplex *out);

/**
 * Degree of the model, or 0 for a null handle.
 *
 * # Safety
 * `model` must be null or a live handle.
 */
size_t arnoldi_model_degree(const struct ArnoldiModel *model);

/**
 * Releases a model; null is ignored.
 *
 * # Safety
 * `model` must be null or a handle not yet freed.
 */
void arnoldi_model_free(struct ArnoldiModel *model);

/**
 * Message of the last failed call on this thread, or null. The pointer
 * stays valid until the next call into the library on this thread.
 */
const char *arnoldi_last_error(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ARNOLDI_LSQ_H */
