#include <math.h>
#include <stdio.h>
#include <stdlib.h>

#include "unibasis.h"

#define CHECK(call)                                                        \
    do {                                                                   \
        UbStatus st_ = (call);                                             \
        if (st_ != UB_STATUS_OK) {                                         \
            char msg_[256];                                                \
            ub_last_error_message(msg_, sizeof msg_);                      \
            fprintf(stderr, "%s failed (%d): %s\n", #call, (int)st_, msg_); \
            return 1;                                                      \
        }                                                                  \
    } while (0)

int main(void) {
    UbBasis *basis = NULL;
    UbScheme *scheme = NULL;
    double gram, depol, tele, dense;
    uint64_t count;

    CHECK(ub_count_normalized_latin(5, &count));
    CHECK(ub_basis_weyl(3, &basis));
    CHECK(ub_basis_verify_orthonormal(basis, &gram));
    CHECK(ub_basis_verify_depolarizer(basis, &depol));
    CHECK(ub_scheme_build(basis, UB_MODE_TELEPORTATION, &scheme));
    CHECK(ub_scheme_verify_teleportation(scheme, &tele));
    CHECK(ub_scheme_verify_dense_coding(scheme, &dense, NULL, 0));

    if (ub_count_normalized_latin(9, &count) != UB_STATUS_DIMENSION_TOO_LARGE) {
        fprintf(stderr, "expected DIMENSION_TOO_LARGE\n");
        return 1;
    }
    char msg[128];
    size_t n = ub_last_error_message(msg, sizeof msg);

    printf("count=%llu dim=%zu len=%zu gram=%.3e depol=%.3e tele=%.3e dense=%.3e err_len=%zu\n",
           (unsigned long long)count, ub_basis_dim(basis), ub_basis_len(basis), gram, depol, tele, dense, n);

    ub_scheme_free(scheme);
    ub_basis_free(basis);
    return (count == 56 && gram < 1e-10 && depol < 1e-10 && tele < 1e-10 && dense < 1e-10 && n > 0) ? 0 : 1;
}
