/* Assembles the classical operator, solves it, and checks the lowest eigenvalue. */
#include <math.h>
#include <stdio.h>

#include "dfsl.h"

static int fail(DfslStatus s) {
    fprintf(stderr, "status %d: %s\n", (int)s, dfsl_last_error());
    return 1;
}

int main(void) {
    enum { N = 5 };
    double p[N] = {1, 1, 1, 1, 1}, q[N] = {0}, r[N] = {1, 1, 1, 1, 1};
    DfslGrid grid = {0, N + 1, 1, 1};
    DfslOperator *op = NULL;
    DfslEigenSystem *sys = NULL;
    double values[N];

    DfslStatus s = dfsl_assemble(DFSL_VARIANT_GL, 1, 1, grid, p, q, N, &op);
    if (s != DFSL_STATUS_OK) return fail(s);
    s = dfsl_eigensolve(op, r, N, 0.0, &sys);
    if (s != DFSL_STATUS_OK) return fail(s);
    s = dfsl_eigen_values(sys, values, N);
    if (s != DFSL_STATUS_OK) return fail(s);

    double expected = 2.0 - 2.0 * cos(M_PI / (2 * N + 1));
    printf("dfsl %s: lowest eigenvalue %.15f\n", dfsl_version(), values[0]);
    dfsl_eigen_free(sys);
    dfsl_operator_free(op);
    op = NULL;

    s = dfsl_assemble(DFSL_VARIANT_GL, 3, 2, grid, p, q, N, &op);
    if (s != DFSL_STATUS_INVALID_ORDER || op != NULL) return 1;
    return fabs(values[0] - expected) < 1e-12 ? 0 : 1;
}
