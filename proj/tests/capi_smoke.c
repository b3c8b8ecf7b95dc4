/* Compiled as C: the public header must stay valid C. */
#include <math.h>
#include <stdio.h>

#include "npbayes/npbayes.h"

int main(void) {
  npb_rng* rng = NULL;
  npb_base* base = NULL;
  npb_dp* dp = NULL;
  npb_measure* m = NULL;
  double mass = 0.0;
  int bad = 0;

  if (npb_rng_create(3, &rng) != NPB_OK) return 1;
  if (npb_base_normal(0.0, 1.0, &base) != NPB_OK) return 1;
  if (npb_dp_create(1.0, base, &dp) != NPB_OK) return 1;
  if (npb_dp_stick_sample(dp, 1e-9, rng, &m) != NPB_OK) return 1;
  if (npb_measure_mass_below(m, 1e300, &mass) != NPB_OK) return 1;
  bad |= fabs(mass - 1.0) > 1e-8;
  bad |= npb_dp_create(-1.0, base, &dp) != NPB_ERR_DOMAIN;
  bad |= npb_measure_size(NULL, NULL) != NPB_ERR_NULL_POINTER;
  if (bad) fprintf(stderr, "capi_smoke: %s\n", npb_last_error_message());

  npb_measure_destroy(m);
  npb_dp_destroy(dp);
  npb_base_destroy(base);
  npb_rng_destroy(rng);
  return bad;
}
