#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "eyespot/eyespot.h"

namespace {

struct ConfigDeleter {
    void operator()(eyespot_config* c) const { eyespot_config_destroy(c); }
};
struct ModelDeleter {
    void operator()(eyespot_model* m) const { eyespot_model_destroy(m); }
};
struct DetectionsDeleter {
    void operator()(eyespot_detections* d) const { eyespot_detections_destroy(d); }
};

using ConfigPtr = std::unique_ptr<eyespot_config, ConfigDeleter>;
using ModelPtr = std::unique_ptr<eyespot_model, ModelDeleter>;
using DetectionsPtr = std::unique_ptr<eyespot_detections, DetectionsDeleter>;

[[noreturn]] void die(const char* context) {
    std::fprintf(stderr, "eyespot: %s: %s\n", context, eyespot_last_error());
    std::exit(1);
}

ConfigPtr make_config(const std::string& config_path, const std::vector<std::string>& sets) {
    ConfigPtr cfg;
    std::string path = config_path;
    if (path.empty()) {
        if (const char* env = std::getenv("EYESPOT_CONFIG"); env && *env) {
            path = env;
        }
    }
    if (!path.empty()) {
        eyespot_config* raw = nullptr;
        if (eyespot_config_load(path.c_str(), &raw) != EYESPOT_OK) {
            die("loading config");
        }
        cfg.reset(raw);
    } else {
        cfg.reset(eyespot_config_create());
        if (!cfg) {
            std::fprintf(stderr, "eyespot: out of memory\n");
            std::exit(1);
        }
    }
    for (const std::string& s : sets) {
        if (eyespot_config_set(cfg.get(), s.c_str()) != EYESPOT_OK) {
            die("applying --set");
        }
    }
    if (eyespot_config_validate(cfg.get()) != EYESPOT_OK) {
        die("validating config");
    }
    return cfg;
}

ModelPtr load_model_or_die(const std::string& path) {
    eyespot_model* raw = nullptr;
    if (eyespot_model_load(path.c_str(), &raw) != EYESPOT_OK) {
        die("loading model");
    }
    return ModelPtr(raw);
}

void log_line(const char* line, void*) {
    std::printf("%s\n", line);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"eye detection toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> sets;
    app.add_option("--config", config_path,
                   "config file (falls back to $EYESPOT_CONFIG, then defaults)");
    app.add_option("--set", sets, "override one key, e.g. --set train.epochs=50")
        ->take_all();

    auto* synth = app.add_subcommand("synth", "generate a synthetic face/scenery corpus");
    std::string synth_out;
    synth->add_option("--out", synth_out, "output directory")->required();

    auto* makeds = app.add_subcommand("make-dataset", "build the positive sample cache");
    std::string md_manifest, md_out;
    makeds->add_option("--manifest", md_manifest, "training manifest (JSON lines)")->required();
    makeds->add_option("--out", md_out, "cache file to write")->required();

    auto* train = app.add_subcommand("train", "bootstrap-train a model");
    std::string tr_dataset, tr_manifest, tr_out;
    bool tr_quiet = false;
    train->add_option("--dataset", tr_dataset, "sample cache from make-dataset")->required();
    train->add_option("--manifest", tr_manifest, "manifest providing scenery images")->required();
    train->add_option("--out", tr_out, "model file to write")->required();
    train->add_flag("--quiet", tr_quiet, "suppress the per-epoch loss log");

    auto* detect = app.add_subcommand("detect", "detect eyes in images");
    std::vector<std::string> det_images;
    std::string det_model, det_annotate;
    detect->add_option("images", det_images, "input images")->required()->expected(-1);
    detect->add_option("--model", det_model, "trained model file")->required();
    detect->add_option("--annotate", det_annotate, "directory for annotated PNG copies");

    auto* evalc = app.add_subcommand("eval", "score a model against truth boxes");
    std::string ev_manifest, ev_model;
    evalc->add_option("--manifest", ev_manifest, "manifest with truth boxes")->required();
    evalc->add_option("--model", ev_model, "trained model file")->required();

    auto* preview = app.add_subcommand("gabor-preview", "render the kernel bank as PNGs");
    std::string pv_out;
    preview->add_option("--out", pv_out, "output directory")->required();

    CLI11_PARSE(app, argc, argv);

    const ConfigPtr cfg = make_config(config_path, sets);

    if (synth->parsed()) {
        char* manifest = nullptr;
        if (eyespot_synth(cfg.get(), synth_out.c_str(), &manifest) != EYESPOT_OK) {
            die("synth");
        }
        std::printf("%s\n", manifest);
        eyespot_string_free(manifest);
        return 0;
    }

    if (makeds->parsed()) {
        int positives = 0;
        int total = 0;
        if (eyespot_make_dataset(cfg.get(), md_manifest.c_str(), md_out.c_str(), &positives,
                                 &total) != EYESPOT_OK) {
            die("make-dataset");
        }
        std::printf("positives %d\nnon-eye %d\ntotal %d\n", positives, total - positives, total);
        return 0;
    }

    if (train->parsed()) {
        if (eyespot_train(cfg.get(), tr_dataset.c_str(), tr_manifest.c_str(), tr_out.c_str(),
                          tr_quiet ? nullptr : log_line, nullptr) != EYESPOT_OK) {
            die("train");
        }
        std::printf("model written to %s\n", tr_out.c_str());
        return 0;
    }

    if (detect->parsed()) {
        const ModelPtr model = load_model_or_die(det_model);
        if (!det_annotate.empty()) {
            std::error_code ec;
            std::filesystem::create_directories(det_annotate, ec);
            if (ec) {
                std::fprintf(stderr, "eyespot: cannot create %s: %s\n", det_annotate.c_str(),
                             ec.message().c_str());
                return 1;
            }
        }
        int total_detections = 0;
        for (const std::string& image : det_images) {
            eyespot_detections* raw = nullptr;
            if (eyespot_detect_file(cfg.get(), model.get(), image.c_str(), &raw) != EYESPOT_OK) {
                die("detect");
            }
            const DetectionsPtr det(raw);
            total_detections += eyespot_detections_count(det.get());
            char* json = nullptr;
            if (eyespot_detections_json(det.get(), image.c_str(), &json) != EYESPOT_OK) {
                die("serializing detections");
            }
            std::printf("%s\n", json);
            eyespot_string_free(json);
            if (!det_annotate.empty()) {
                const std::string out =
                    (std::filesystem::path(det_annotate) /
                     (std::filesystem::path(image).stem().string() + ".annotated.png"))
                        .string();
                if (eyespot_annotate(det.get(), image.c_str(), out.c_str()) != EYESPOT_OK) {
                    die("annotate");
                }
            }
        }
        return total_detections > 0 ? 0 : 2;
    }

    if (evalc->parsed()) {
        const ModelPtr model = load_model_or_die(ev_model);
        char* json = nullptr;
        char* table = nullptr;
        if (eyespot_eval(cfg.get(), model.get(), ev_manifest.c_str(), &json, &table) !=
            EYESPOT_OK) {
            die("eval");
        }
        std::printf("%s%s\n", table, json);
        eyespot_string_free(json);
        eyespot_string_free(table);
        return 0;
    }

    if (preview->parsed()) {
        int count = 0;
        if (eyespot_gabor_preview(cfg.get(), pv_out.c_str(), &count) != EYESPOT_OK) {
            die("gabor-preview");
        }
        std::printf("%d kernels written to %s\n", count, pv_out.c_str());
        return 0;
    }

    return 1;
}
