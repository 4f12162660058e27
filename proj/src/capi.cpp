#include "eyespot/eyespot.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "config.hpp"
#include "detector.hpp"
#include "error.hpp"
#include "image_io.hpp"
#include "mlp.hpp"
#include "synth.hpp"
#include "toolkit.hpp"

struct eyespot_config {
    eyespot::Config cfg;
};

struct eyespot_model {
    eyespot::MlpParams params;
};

struct eyespot_detections {
    eyespot::DetectResult result;
};

namespace {

thread_local std::string g_last_error;

eyespot_status status_from(eyespot::ErrorCode code) {
    switch (code) {
        case eyespot::ErrorCode::io: return EYESPOT_ERR_IO;
        case eyespot::ErrorCode::format: return EYESPOT_ERR_FORMAT;
        case eyespot::ErrorCode::truncated: return EYESPOT_ERR_TRUNCATED;
        case eyespot::ErrorCode::dimension: return EYESPOT_ERR_DIMENSION;
        case eyespot::ErrorCode::invalid_argument: return EYESPOT_ERR_INVALID_ARGUMENT;
        case eyespot::ErrorCode::runtime: break;
    }
    return EYESPOT_ERR_RUNTIME;
}

template <typename Fn>
eyespot_status guarded(Fn&& fn) {
    try {
        fn();
        return EYESPOT_OK;
    } catch (const eyespot::Error& e) {
        g_last_error = e.what();
        return status_from(e.code());
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return EYESPOT_ERR_RUNTIME;
    } catch (...) {
        g_last_error = "unknown error";
        return EYESPOT_ERR_RUNTIME;
    }
}

eyespot_status invalid_call(const char* message) {
    g_last_error = message;
    return EYESPOT_ERR_INVALID_ARGUMENT;
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out) {
        std::memcpy(out, s.c_str(), s.size() + 1);
    }
    return out;
}

} // namespace

extern "C" {

const char* eyespot_version(void) {
    return "0.1.0";
}

const char* eyespot_last_error(void) {
    return g_last_error.c_str();
}

void eyespot_string_free(char* s) {
    std::free(s);
}

eyespot_config* eyespot_config_create(void) {
    return new (std::nothrow) eyespot_config{};
}

eyespot_status eyespot_config_load(const char* path, eyespot_config** out) {
    if (!path || !out) return invalid_call("eyespot_config_load: NULL argument");
    *out = nullptr;
    return guarded([&] { *out = new eyespot_config{eyespot::load_config(path)}; });
}

eyespot_status eyespot_config_set(eyespot_config* cfg, const char* assignment) {
    if (!cfg || !assignment) return invalid_call("eyespot_config_set: NULL argument");
    return guarded([&] { eyespot::apply_override(cfg->cfg, assignment); });
}

eyespot_status eyespot_config_validate(const eyespot_config* cfg) {
    if (!cfg) return invalid_call("eyespot_config_validate: NULL argument");
    return guarded([&] { eyespot::validate(cfg->cfg); });
}

void eyespot_config_destroy(eyespot_config* cfg) {
    delete cfg;
}

eyespot_status eyespot_model_load(const char* path, eyespot_model** out) {
    if (!path || !out) return invalid_call("eyespot_model_load: NULL argument");
    *out = nullptr;
    return guarded([&] { *out = new eyespot_model{eyespot::load_model(path)}; });
}

void eyespot_model_destroy(eyespot_model* model) {
    delete model;
}

eyespot_status eyespot_synth(const eyespot_config* cfg, const char* out_dir,
                             char** manifest_path_out) {
    if (!cfg || !out_dir) return invalid_call("eyespot_synth: NULL argument");
    return guarded([&] {
        const eyespot::SynthCorpus corpus = eyespot::synth_corpus(cfg->cfg, out_dir);
        if (manifest_path_out) {
            *manifest_path_out = dup_string(corpus.manifest_path);
        }
    });
}

eyespot_status eyespot_make_dataset(const eyespot_config* cfg, const char* manifest_path,
                                    const char* out_path, int* positives_out, int* total_out) {
    if (!cfg || !manifest_path || !out_path) {
        return invalid_call("eyespot_make_dataset: NULL argument");
    }
    return guarded([&] {
        const eyespot::DatasetSummary summary =
            eyespot::make_dataset_file(manifest_path, cfg->cfg, out_path);
        if (positives_out) *positives_out = summary.positives;
        if (total_out) *total_out = summary.total;
    });
}

eyespot_status eyespot_train(const eyespot_config* cfg, const char* dataset_path,
                             const char* manifest_path, const char* model_out,
                             eyespot_log_fn log, void* user) {
    if (!cfg || !dataset_path || !manifest_path || !model_out) {
        return invalid_call("eyespot_train: NULL argument");
    }
    return guarded([&] {
        eyespot::LogFn fn;
        if (log) {
            fn = [log, user](const std::string& line) { log(line.c_str(), user); };
        }
        eyespot::train_file(dataset_path, manifest_path, cfg->cfg, model_out, fn);
    });
}

eyespot_status eyespot_detect_file(const eyespot_config* cfg, const eyespot_model* model,
                                   const char* image_path, eyespot_detections** out) {
    if (!cfg || !model || !image_path || !out) {
        return invalid_call("eyespot_detect_file: NULL argument");
    }
    *out = nullptr;
    return guarded([&] {
        *out = new eyespot_detections{
            eyespot::detect_file(image_path, model->params, cfg->cfg)};
    });
}

int eyespot_detections_count(const eyespot_detections* d) {
    return d ? static_cast<int>(d->result.detections.size()) : 0;
}

int eyespot_detections_has_face(const eyespot_detections* d) {
    return d && d->result.face ? 1 : 0;
}

void eyespot_detections_face(const eyespot_detections* d, int* x, int* y, int* w, int* h) {
    if (!d || !d->result.face) return;
    if (x) *x = d->result.face->x;
    if (y) *y = d->result.face->y;
    if (w) *w = d->result.face->w;
    if (h) *h = d->result.face->h;
}

void eyespot_detections_box(const eyespot_detections* d, int index, int* x, int* y, int* w,
                            int* h) {
    if (!d || index < 0 || index >= static_cast<int>(d->result.detections.size())) return;
    const eyespot::Rect& r = d->result.detections[static_cast<std::size_t>(index)].box;
    if (x) *x = r.x;
    if (y) *y = r.y;
    if (w) *w = r.w;
    if (h) *h = r.h;
}

double eyespot_detections_score(const eyespot_detections* d, int index) {
    if (!d || index < 0 || index >= static_cast<int>(d->result.detections.size())) return 0.0;
    return d->result.detections[static_cast<std::size_t>(index)].score;
}

eyespot_status eyespot_detections_json(const eyespot_detections* d, const char* path_label,
                                       char** json_out) {
    if (!d || !path_label || !json_out) {
        return invalid_call("eyespot_detections_json: NULL argument");
    }
    return guarded([&] {
        *json_out = dup_string(eyespot::detection_json_line(path_label, d->result));
    });
}

eyespot_status eyespot_annotate(const eyespot_detections* d, const char* image_path,
                                const char* out_png) {
    if (!d || !image_path || !out_png) return invalid_call("eyespot_annotate: NULL argument");
    return guarded([&] {
        const eyespot::ImageRgb img = eyespot::load_image(image_path);
        eyespot::annotate_png(img, d->result, out_png);
    });
}

void eyespot_detections_destroy(eyespot_detections* d) {
    delete d;
}

eyespot_status eyespot_eval(const eyespot_config* cfg, const eyespot_model* model,
                            const char* manifest_path, char** json_out, char** table_out) {
    if (!cfg || !model || !manifest_path) return invalid_call("eyespot_eval: NULL argument");
    return guarded([&] {
        const eyespot::EvalOutcome outcome =
            eyespot::eval_manifest(manifest_path, model->params, cfg->cfg);
        if (json_out) *json_out = dup_string(eyespot::report_json(outcome.report));
        if (table_out) *table_out = dup_string(eyespot::report_table(outcome.report));
    });
}

eyespot_status eyespot_gabor_preview(const eyespot_config* cfg, const char* out_dir,
                                     int* count_out) {
    if (!cfg || !out_dir) return invalid_call("eyespot_gabor_preview: NULL argument");
    return guarded([&] {
        const std::vector<std::string> paths = eyespot::gabor_preview(cfg->cfg, out_dir);
        if (count_out) *count_out = static_cast<int>(paths.size());
    });
}

} // extern "C"
