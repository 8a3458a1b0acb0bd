/**
 * Copyright 2026 The amcs Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
/* C interface to the amcs toolkit. All functions are thread safe unless a
 * handle is shared between threads. Strings returned through char** must be
 * released with amcs_string_free. */
#ifndef AMCS_AMCS_H_
#define AMCS_AMCS_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(AMCS_BUILDING_LIBRARY)
#define AMCS_API __declspec(dllexport)
#else
#define AMCS_API __declspec(dllimport)
#endif
#else
#define AMCS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum amcs_status {
  AMCS_OK = 0,
  AMCS_ERR_NOT_FOUND = 1,
  AMCS_ERR_CORRUPT_FRAME = 2,
  AMCS_ERR_IO = 3,
  AMCS_ERR_INVALID_SPLIT = 4,
  AMCS_ERR_INVALID_INPUT = 5,
  AMCS_ERR_MANIFEST_MISMATCH = 6,
  AMCS_ERR_INVALID_GROUP = 7,
  AMCS_ERR_INVALID_SCHEME = 8,
  AMCS_ERR_EVAL = 9,
  AMCS_ERR_PARTIAL_FAILURE = 10,
  AMCS_ERR_INTERNAL = 99
} amcs_status;

AMCS_API const char* amcs_version(void);
AMCS_API const char* amcs_status_name(amcs_status status);

/* Message of the last failing call on this thread; "" if none. For partial
 * failures it lists one "<frame>\t<message>" line per failed frame. */
AMCS_API const char* amcs_last_error(void);
AMCS_API void amcs_string_free(char* s);

AMCS_API uint64_t amcs_derive_frame_seed(uint64_t master_seed, const char* frame_id);

/* ---- grouping schemes and the groupwise codec ---- */

typedef struct amcs_scheme amcs_scheme;

/* groups = 3 or 4. */
AMCS_API amcs_status amcs_scheme_preset(int groups, amcs_scheme** out);
AMCS_API amcs_status amcs_scheme_load(const char* path, amcs_scheme** out);
AMCS_API amcs_status amcs_scheme_from_json(const char* json, amcs_scheme** out);
AMCS_API void amcs_scheme_free(amcs_scheme* scheme);
AMCS_API int amcs_scheme_group_count(const amcs_scheme* scheme);
AMCS_API int amcs_scheme_vector_length(const amcs_scheme* scheme);
AMCS_API amcs_status amcs_scheme_to_json(const amcs_scheme* scheme, char** out);

/* Encodes n pixels into out (n * vector_length floats, pixel major).
 * invalid / dropped may be NULL. */
AMCS_API amcs_status amcs_encode(const amcs_scheme* scheme, const uint8_t* visible,
                                 const uint8_t* occluded, size_t n, float* out,
                                 int64_t* invalid, int64_t* dropped);

/* Decodes n pixel vectors into visible / occluded trainIds. */
AMCS_API amcs_status amcs_decode(const amcs_scheme* scheme, const float* y, size_t n,
                                 uint8_t* visible, uint8_t* occluded, int64_t* fallbacks);

/* Per-group decode; 255 where the absence slot wins. */
AMCS_API amcs_status amcs_decode_group(const amcs_scheme* scheme, const float* y, size_t n,
                                       int group, uint8_t* out);

/* ---- metrics ---- */

typedef struct amcs_accumulator amcs_accumulator;

enum { AMCS_MIOU_VISIBLE = 0, AMCS_MIOU_INVISIBLE = 1, AMCS_MIOU_TOTAL = 2 };

AMCS_API amcs_status amcs_accumulator_create(amcs_accumulator** out);
AMCS_API void amcs_accumulator_free(amcs_accumulator* acc);

/* Row-major height x width label planes. region marks pasted pixels
 * (nonzero); NULL means the whole frame. */
AMCS_API amcs_status amcs_accumulator_add(amcs_accumulator* acc, int height, int width,
                                          const uint8_t* gt_visible, const uint8_t* gt_occluded,
                                          const uint8_t* pred_visible,
                                          const uint8_t* pred_occluded, const uint8_t* region);
AMCS_API amcs_status amcs_accumulator_merge(amcs_accumulator* dst, const amcs_accumulator* src);

/* tp/fp/fn for one variant and class. */
AMCS_API amcs_status amcs_accumulator_counts(const amcs_accumulator* acc, int variant,
                                             int class_id, int64_t* tp, int64_t* fp,
                                             int64_t* fn);

/* miou[v] is valid only where defined[v] != 0. json may be NULL. */
AMCS_API amcs_status amcs_accumulator_report(const amcs_accumulator* acc, int strict_mean,
                                             double miou[3], int defined[3], char** json);

/* ---- pipeline runs (one per CLI subcommand) ---- */

typedef struct amcs_extract_options {
  const char* root;
  const char* split_list;
  const char* bank_dir;
  int min_width;  /* 0 = default (10) */
  int min_height; /* 0 = default (20) */
  int workers;    /* 0 = hardware concurrency */
} amcs_extract_options;

typedef struct amcs_extract_summary {
  size_t frames;
  int64_t instances_seen;
  int64_t filtered_out;
  size_t available;
  size_t failed_frames;
} amcs_extract_summary;

AMCS_API amcs_status amcs_run_extract(const amcs_extract_options* opts,
                                      amcs_extract_summary* summary);

typedef struct amcs_generate_options {
  const char* root;
  const char* bank_dir;
  const char* split_list;
  const char* out;
  const char* split_name;     /* NULL = split list stem */
  double max_occlusion_ratio; /* negative = default (0.1) */
  int blend_kernel;           /* 0 = default (5) */
  double blend_sigma;         /* 0 = default (1.0) */
  int has_seed;
  uint64_t seed;
  int workers;
} amcs_generate_options;

typedef struct amcs_generate_summary {
  size_t frames;
  size_t pastes;
  size_t warnings;
  double mean_achieved_ratio;
  uint64_t master_seed;
  size_t failed_frames;
} amcs_generate_summary;

AMCS_API amcs_status amcs_run_generate(const amcs_generate_options* opts,
                                       amcs_generate_summary* summary);

enum { AMCS_FORMAT_PNG = 0, AMCS_FORMAT_TENSOR = 1 };

typedef struct amcs_evaluate_options {
  const char* ground_truth;
  const char* predictions;
  const char* split_list;
  const char* out;
  const char* bank_dir; /* NULL = whole frame counts as pasted region */
  const char* scheme;   /* tensor format only; NULL = K=4 preset */
  int format;
  int strict_mean;
  int workers;
} amcs_evaluate_options;

typedef struct amcs_evaluate_summary {
  size_t frames;
  double miou[3];
  int defined[3];
  size_t missing;
  size_t failed_frames;
  char* text; /* report table; free with amcs_string_free */
} amcs_evaluate_summary;

/* Missing predictions and failed frames give AMCS_ERR_PARTIAL_FAILURE after
 * the report has been written. */
AMCS_API amcs_status amcs_run_evaluate(const amcs_evaluate_options* opts,
                                       amcs_evaluate_summary* summary);

typedef struct amcs_stats_options {
  const char* generated;
  const char* split_list;
  const char* out;
  const char* original_root; /* NULL = skip comparison */
  const char* bank_dir;      /* NULL = skip census */
  int prior_class;           /* negative = person */
  int downsample;            /* 0 = default (8) */
  int svg;
  int workers;
} amcs_stats_options;

typedef struct amcs_stats_summary {
  size_t frames;
  int has_similarity;
  double spearman_visible;
  int has_prior_intersection;
  double prior_intersection;
  size_t failed_frames;
} amcs_stats_summary;

AMCS_API amcs_status amcs_run_stats(const amcs_stats_options* opts, amcs_stats_summary* summary);

typedef struct amcs_codec_options {
  const char* input;  /* masks for encode, tensor directory for decode */
  const char* split_list;
  const char* out;
  const char* scheme; /* NULL = preset */
  int preset_groups;  /* 0 = 4 */
  int workers;
} amcs_codec_options;

typedef struct amcs_codec_summary {
  size_t frames;
  int vector_length;
  int64_t invalid_pixels;
  int64_t same_group_dropped;
  int64_t visible_fallbacks;
  size_t failed_frames;
} amcs_codec_summary;

AMCS_API amcs_status amcs_run_encode(const amcs_codec_options* opts, amcs_codec_summary* summary);
AMCS_API amcs_status amcs_run_decode(const amcs_codec_options* opts, amcs_codec_summary* summary);

#ifdef __cplusplus
}
#endif

#endif /* AMCS_AMCS_H_ */
