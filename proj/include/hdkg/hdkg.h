// Copyright 2026 The hdkg Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/* C interface to the hdkg library. All functions return an hdkg_status; on
 * failure hdkg_last_error() describes the problem (per thread). */
#ifndef HDKG_H
#define HDKG_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(HDKG_BUILDING)
#    define HDKG_API __declspec(dllexport)
#  else
#    define HDKG_API __declspec(dllimport)
#  endif
#else
#  define HDKG_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum hdkg_status {
  HDKG_OK = 0,
  HDKG_ERR_INTERNAL = 1,
  HDKG_ERR_CONFIG = 2,
  HDKG_ERR_DATA = 3,
  HDKG_ERR_NUMERIC = 4
} hdkg_status;

typedef struct hdkg_config hdkg_config;
typedef struct hdkg_graph hdkg_graph;

HDKG_API const char* hdkg_version(void);
HDKG_API const char* hdkg_last_error(void);

/* Run configuration. Keys and values are the ones accepted in config files. */
HDKG_API hdkg_status hdkg_config_new(hdkg_config** out);
HDKG_API void hdkg_config_free(hdkg_config* cfg);
HDKG_API hdkg_status hdkg_config_load(hdkg_config* cfg, const char* path);
HDKG_API hdkg_status hdkg_config_set(hdkg_config* cfg, const char* key, const char* value);
/* "key=value" form, as used by --set. */
HDKG_API hdkg_status hdkg_config_set_pair(hdkg_config* cfg, const char* assignment);
HDKG_API hdkg_status hdkg_config_validate(const hdkg_config* cfg);
HDKG_API hdkg_status hdkg_config_hash(const hdkg_config* cfg, uint64_t* out);
/* Canonical text of the hashed fields. Writes at most len bytes including the
 * terminator; *needed receives the full size. */
HDKG_API hdkg_status hdkg_config_canonical(const hdkg_config* cfg, char* buf, size_t len,
                                           size_t* needed);

/* Runs a command: ingest, train, eval, reconstruct, simulate, quantize-eval,
 * drop-dims-eval. Artifacts go to the configured output directory. */
HDKG_API hdkg_status hdkg_run(const hdkg_config* cfg, const char* command);

/* Dataset directory or .hdkg cache; reciprocal != 0 adds inverse edges. */
HDKG_API hdkg_status hdkg_graph_load(const char* path, int reciprocal, hdkg_graph** out);
HDKG_API void hdkg_graph_free(hdkg_graph* g);
HDKG_API hdkg_status hdkg_graph_counts(const hdkg_graph* g, size_t* entities, size_t* relations,
                                       size_t* train_edges);
HDKG_API hdkg_status hdkg_graph_degree(const hdkg_graph* g, int32_t vertex, size_t* out);

#ifdef __cplusplus
}
#endif

#endif
