#include <stdio.h>
#include "femtonet.h"

int main(void) {
    FemtonetParams *p = femtonet_params_new();
    double prob = 0.0, beta = 0.0;
    if (femtonet_params_set_femtocells_per_cell(p, 0.0) != FEMTONET_STATUS_OK) return 1;
    if (femtonet_success_probability(p, 3.0, &prob) != FEMTONET_STATUS_OK || prob != 1.0) return 2;
    if (femtonet_beta_star(p, 3.0, 0, &beta) != FEMTONET_STATUS_OK || !(beta > 0.0 && beta <= 1.0)) return 3;
    if (femtonet_success_probability(p, -1.0, &prob) != FEMTONET_STATUS_DOMAIN) return 4;
    femtonet_params_free(p);
    printf("ok %s\n", femtonet_version());
    return 0;
}
