#ifndef DGPL_H
#define DGPL_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stddef.h>
#include <stdint.h>

typedef enum DgplStatus {
  DGPL_STATUS_OK = 0,
  DGPL_STATUS_NULL_POINTER = 1,
  DGPL_STATUS_INVALID_ARGUMENT = 2,
  DGPL_STATUS_INVALID_MESH = 3,
  DGPL_STATUS_SOLVER_FAILURE = 4,
  DGPL_STATUS_NOT_CONVERGED = 5,
  DGPL_STATUS_BUFFER_TOO_SMALL = 6,
  DGPL_STATUS_PANIC = 7,
} DgplStatus;

typedef enum DgplCellKind {
  DGPL_CELL_KIND_TRIANGLE = 0,
  DGPL_CELL_KIND_QUADRILATERAL = 1,
} DgplCellKind;

typedef enum DgplMethod {
  /*
   stabilized DG, pressure degree k - 1
   */
  DGPL_METHOD_DG = 0,
  /*
   normal-continuous H(div)-DG; triangles, `gamma` ignored
   */
  DGPL_METHOD_HDIV = 1,
  /*
   Crouzeix-Raviart/P0; triangles, k = 1
   */
  DGPL_METHOD_CROUZEIX_RAVIART = 2,
  /*
   stabilized DG with Picard iteration for the convective term
   */
  DGPL_METHOD_DG_PICARD = 3,
} DgplMethod;

/*
 Opaque mesh handle.
 */
typedef struct DgplMesh DgplMesh;

/*
 Opaque solution handle; keeps the discretization and data it was
 computed with.
 */
typedef struct DgplSolution DgplSolution;

/*
 Solver parameters. `sigma <= 0` selects the default penalty
 `max(4 k^2, 1)`.
 */
typedef struct DgplParams {
  uintptr_t k;
  double nu;
  double sigma;
  double gamma;
  double gamma_gd;
  double picard_tol;
  uintptr_t picard_max_iters;
} DgplParams;

typedef struct DgplSolveInfo {
  uintptr_t velocity_dofs;
  uintptr_t pressure_dofs;
  double linear_residual;
  uintptr_t picard_iters;
  /*
   1 when the Picard iteration met its tolerance; always 1 for linear solves
   */
  int32_t converged;
} DgplSolveInfo;

typedef struct DgplErrorReport {
  double l2_u;
  double h1_broken_u;
  double l2_p;
  double div_broken;
  double nj;
  double energy;
  double e_sharp;
} DgplErrorReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message of the last failed call on this thread; empty after a success.
 The pointer stays valid until the next call into the library on this
 thread.
 */
const char *dgpl_last_error_message(void);

/*
 Library version as a static NUL-terminated string.
 */
const char *dgpl_version(void);

/*
 Parameters with the library defaults for degree `k` and viscosity `nu`.
 */
struct DgplParams dgpl_params_default(uintptr_t k, double nu);

/*
 Structured `n x n` mesh of the box `[xmin, xmax] x [ymin, ymax]`;
 triangles split each square along its lower-right to upper-left diagonal.
 */
enum DgplStatus dgpl_mesh_structured(enum DgplCellKind kind,
                                     uintptr_t n,
                                     double xmin,
                                     double ymin,
                                     double xmax,
                                     double ymax,
                                     struct DgplMesh **out);

/*
 Mesh from the plain-text vertex/cell format.
 */
enum DgplStatus dgpl_mesh_from_text(const char *text, struct DgplMesh **out);

/*
 Number of cells, or 0 for a null handle.
 */
uintptr_t dgpl_mesh_num_cells(const struct DgplMesh *mesh);

/*
 Number of vertices, or 0 for a null handle.
 */
uintptr_t dgpl_mesh_num_vertices(const struct DgplMesh *mesh);

void dgpl_mesh_free(struct DgplMesh *mesh);

/*
 Solves one of the built-in cases (`noflow`, `vortex`, `potential`) on
 `mesh`. Picard nonconvergence is reported through
 [`dgpl_solution_info`], not as an error.
 */
enum DgplStatus dgpl_solve(const struct DgplMesh *mesh,
                           const char *case_name,
                           enum DgplMethod method,
                           const struct DgplParams *params,
                           struct DgplSolution **out);

enum DgplStatus dgpl_solution_info(const struct DgplSolution *sol, struct DgplSolveInfo *out);

/*
 Error norms against the exact solution of the case the solution was
 computed for.
 */
enum DgplStatus dgpl_solution_errors(const struct DgplSolution *sol, struct DgplErrorReport *out);

/*
 Copies the velocity coefficients (component-major per cell) into `buf`.
 `needed` receives the count; pass `buf = NULL, len = 0` to query it.
 */
enum DgplStatus dgpl_solution_velocity(const struct DgplSolution *sol,
                                       double *buf,
                                       uintptr_t len,
                                       uintptr_t *needed);

/*
 As [`dgpl_solution_velocity`], for the pressure coefficients.
 */
enum DgplStatus dgpl_solution_pressure(const struct DgplSolution *sol,
                                       double *buf,
                                       uintptr_t len,
                                       uintptr_t *needed);

void dgpl_solution_free(struct DgplSolution *sol);

/*
 Runs the fast invariant suite; `passed` receives 1 when every check
 passes.
 */
enum DgplStatus dgpl_selfcheck(int32_t *passed);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DGPL_H */
