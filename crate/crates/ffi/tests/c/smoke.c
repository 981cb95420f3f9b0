#include <stdio.h>
#include <string.h>

#include "dgpl.h"

int main(void) {
    DgplMesh *mesh = NULL;
    if (dgpl_mesh_structured(DGPL_CELL_KIND_TRIANGLE, 2, 0.0, 0.0, 1.0, 1.0, &mesh) != DGPL_STATUS_OK) {
        fprintf(stderr, "mesh: %s\n", dgpl_last_error_message());
        return 1;
    }
    DgplParams params = dgpl_params_default(2, 1.0);
    params.gamma = 10.0;
    DgplSolution *sol = NULL;
    if (dgpl_solve(mesh, "vortex", DGPL_METHOD_DG, &params, &sol) != DGPL_STATUS_OK) {
        fprintf(stderr, "solve: %s\n", dgpl_last_error_message());
        return 1;
    }
    DgplErrorReport err;
    DgplSolveInfo info;
    size_t needed = 0;
    if (dgpl_solution_errors(sol, &err) != DGPL_STATUS_OK || dgpl_solution_info(sol, &info) != DGPL_STATUS_OK
        || dgpl_solution_pressure(sol, NULL, 0, &needed) != DGPL_STATUS_OK) {
        return 1;
    }
    if (dgpl_solve(mesh, "nope", DGPL_METHOD_DG, &params, &sol) != DGPL_STATUS_INVALID_ARGUMENT
        || strlen(dgpl_last_error_message()) == 0) {
        return 1;
    }
    printf("cells %zu l2_u %.3e pressure_dofs %zu needed %zu\n", dgpl_mesh_num_cells(mesh), err.l2_u,
           info.pressure_dofs, needed);
    dgpl_solution_free(sol);
    dgpl_mesh_free(mesh);
    return 0;
}
