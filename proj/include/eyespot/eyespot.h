#ifndef EYESPOT_H
#define EYESPOT_H

/* Eye-detection toolkit: skin-color face segmentation, morphological
 * candidate extraction, Gabor preprocessing, and a bootstrapped two-layer
 * log-sigmoid classifier.
 *
 * Every fallible call returns an eyespot_status; on failure,
 * eyespot_last_error() carries a message until the next failing call on the
 * same thread. Strings returned through char** out-parameters are owned by
 * the caller and released with eyespot_string_free().
 */

#ifdef __cplusplus
extern "C" {
#endif

typedef enum eyespot_status {
    EYESPOT_OK = 0,
    EYESPOT_ERR_IO = 1,
    EYESPOT_ERR_FORMAT = 2,
    EYESPOT_ERR_TRUNCATED = 3,
    EYESPOT_ERR_DIMENSION = 4,
    EYESPOT_ERR_INVALID_ARGUMENT = 5,
    EYESPOT_ERR_RUNTIME = 6
} eyespot_status;

const char* eyespot_version(void);

/* Message from the most recent failing call on this thread; never NULL. */
const char* eyespot_last_error(void);

void eyespot_string_free(char* s);

/* ---- configuration ---- */

typedef struct eyespot_config eyespot_config;

/* Built-in defaults. Returns NULL only on allocation failure. */
eyespot_config* eyespot_config_create(void);

/* Parses a [section] key = value file. */
eyespot_status eyespot_config_load(const char* path, eyespot_config** out);

/* Applies one "section.key=value" assignment. */
eyespot_status eyespot_config_set(eyespot_config* cfg, const char* assignment);

/* Re-checks every invariant (set() does not validate on its own). */
eyespot_status eyespot_config_validate(const eyespot_config* cfg);

void eyespot_config_destroy(eyespot_config* cfg);

/* ---- model ---- */

typedef struct eyespot_model eyespot_model;

eyespot_status eyespot_model_load(const char* path, eyespot_model** out);
void eyespot_model_destroy(eyespot_model* model);

/* ---- pipeline operations ---- */

typedef void (*eyespot_log_fn)(const char* line, void* user);

/* Writes a synthetic corpus (face + scenery PNGs and a truth manifest) into
 * out_dir. When manifest_path_out is non-NULL it receives the manifest
 * location. */
eyespot_status eyespot_synth(const eyespot_config* cfg, const char* out_dir,
                             char** manifest_path_out);

/* Manifest -> positive-sample cache file. */
eyespot_status eyespot_make_dataset(const eyespot_config* cfg, const char* manifest_path,
                                    const char* out_path, int* positives_out, int* total_out);

/* Cache + scenery manifest -> trained model file. log may be NULL. */
eyespot_status eyespot_train(const eyespot_config* cfg, const char* dataset_path,
                             const char* manifest_path, const char* model_out,
                             eyespot_log_fn log, void* user);

/* ---- detection results ---- */

typedef struct eyespot_detections eyespot_detections;

eyespot_status eyespot_detect_file(const eyespot_config* cfg, const eyespot_model* model,
                                   const char* image_path, eyespot_detections** out);

int eyespot_detections_count(const eyespot_detections* d);
int eyespot_detections_has_face(const eyespot_detections* d);
void eyespot_detections_face(const eyespot_detections* d, int* x, int* y, int* w, int* h);
void eyespot_detections_box(const eyespot_detections* d, int index, int* x, int* y, int* w,
                            int* h);
double eyespot_detections_score(const eyespot_detections* d, int index);

/* One JSON-lines record with the given path label. */
eyespot_status eyespot_detections_json(const eyespot_detections* d, const char* path_label,
                                       char** json_out);

/* Re-reads the image and writes a PNG with face and eye rectangles drawn. */
eyespot_status eyespot_annotate(const eyespot_detections* d, const char* image_path,
                                const char* out_png);

void eyespot_detections_destroy(eyespot_detections* d);

/* ---- evaluation and previews ---- */

/* Evaluates against the manifest's truth boxes; json_out and table_out are
 * each optional. */
eyespot_status eyespot_eval(const eyespot_config* cfg, const eyespot_model* model,
                            const char* manifest_path, char** json_out, char** table_out);

/* One PNG per configured bank kernel; count_out may be NULL. */
eyespot_status eyespot_gabor_preview(const eyespot_config* cfg, const char* out_dir,
                                     int* count_out);

#ifdef __cplusplus
}
#endif

#endif /* EYESPOT_H */
