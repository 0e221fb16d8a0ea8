/*
 * Copyright 2026 The wearnav Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* Plain C consumer of the public header: must compile as C and link against the shared library. */
#include "wearnav/wearnav.h"

#include <math.h>
#include <stdio.h>

static int failures = 0;

#define CHECK(cond) \
  do { \
    if (!(cond)) { \
      fprintf(stderr, "%s:%d: check failed: %s\n", __FILE__, __LINE__, #cond); \
      ++failures; \
    } \
  } while (0)

int main(void)
{
  wn_fix fix = {0.0, 48.1, 11.6, 520.0};
  double ecef[3];
  wn_fix back;
  CHECK(wn_wgs84_to_ecef(&fix, ecef) == WN_OK);
  CHECK(wn_ecef_to_wgs84(ecef, &back) == WN_OK);
  CHECK(fabs(back.lat - fix.lat) < 1e-9);

  double ms = 0.0;
  CHECK(wn_latency_ms(640, 480, &ms) == WN_OK);
  CHECK(fabs(ms - 604.0) < 1e-9);

  wn_sonar_config cfg;
  wn_sonar_filter * f = NULL;
  double fused = 0.0;
  int has = 0;
  wn_sonar_config_default(&cfg);
  CHECK(wn_sonar_filter_create(&cfg, &f) == WN_OK);
  CHECK(wn_sonar_filter_step(f, 1.0, 1, 1.2, 1, &fused, &has) == WN_OK);
  CHECK(has == 1 && fabs(fused - 1.1) < 1e-12);
  wn_sonar_filter_destroy(f);

  CHECK(wn_status_exit_code(WN_PARSE) == 2);
  printf("%s: %d failures\n", wn_version(), failures);
  return failures == 0 ? 0 : 1;
}
