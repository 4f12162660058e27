#include "config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "error.hpp"

namespace eyespot {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return {};
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        fail(ErrorCode::format, "bad numeric value for " + key + ": '" + value + "'");
    }
}

int parse_int(const std::string& key, const std::string& value) {
    int v = 0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc{} || ptr != value.data() + value.size()) {
        fail(ErrorCode::format, "bad integer value for " + key + ": '" + value + "'");
    }
    return v;
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc{} || ptr != value.data() + value.size()) {
        fail(ErrorCode::format, "bad unsigned value for " + key + ": '" + value + "'");
    }
    return v;
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "on") return true;
    if (value == "false" || value == "0" || value == "off") return false;
    fail(ErrorCode::format, "bad boolean value for " + key + ": '" + value + "'");
}

std::vector<double> parse_list(const std::string& key, const std::string& value) {
    std::vector<double> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) {
            fail(ErrorCode::format, "empty list element in " + key);
        }
        out.push_back(parse_double(key, item));
    }
    if (out.empty()) {
        fail(ErrorCode::format, "empty list for " + key);
    }
    return out;
}

using Setter = std::function<void(Config&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = [] {
        std::map<std::string, Setter> t;
        auto d = [&](const std::string& name, double Config::* field) {
            t[name] = [field](Config& c, const std::string& k, const std::string& v) {
                c.*field = parse_double(k, v);
            };
        };
        auto i = [&](const std::string& name, int Config::* field) {
            t[name] = [field](Config& c, const std::string& k, const std::string& v) {
                c.*field = parse_int(k, v);
            };
        };
        auto b = [&](const std::string& name, bool Config::* field) {
            t[name] = [field](Config& c, const std::string& k, const std::string& v) {
                c.*field = parse_bool(k, v);
            };
        };
        auto s = [&](const std::string& name, std::string Config::* field) {
            t[name] = [field](Config& c, const std::string&, const std::string& v) {
                c.*field = v;
            };
        };
        auto l = [&](const std::string& name, std::vector<double> Config::* field) {
            t[name] = [field](Config& c, const std::string& k, const std::string& v) {
                c.*field = parse_list(k, v);
            };
        };
        i("window.width", &Config::window_w);
        i("window.height", &Config::window_h);
        d("window.margin", &Config::layout_margin);
        i("augment.count", &Config::augment_count);
        d("augment.max_rotation_deg", &Config::augment_max_rotation_deg);
        d("augment.scale_min", &Config::augment_scale_min);
        d("augment.scale_max", &Config::augment_scale_max);
        d("augment.max_translation", &Config::augment_max_translation);
        b("augment.mirror", &Config::augment_mirror);
        s("preprocess.mode", &Config::preprocess_mode);
        d("preprocess.wavelength", &Config::preprocess_wavelength);
        d("preprocess.orientation_deg", &Config::preprocess_orientation_deg);
        d("preprocess.phase_deg", &Config::preprocess_phase_deg);
        d("preprocess.aspect", &Config::preprocess_aspect);
        d("preprocess.bandwidth", &Config::preprocess_bandwidth);
        l("bank.wavelengths", &Config::bank_wavelengths);
        l("bank.orientations_deg", &Config::bank_orientations_deg);
        l("bank.phases_deg", &Config::bank_phases_deg);
        d("bank.aspect", &Config::bank_aspect);
        d("bank.bandwidth", &Config::bank_bandwidth);
        i("train.hidden", &Config::n_hidden);
        d("train.learning_rate", &Config::learning_rate);
        i("train.epochs", &Config::epochs);
        s("train.loss", &Config::loss);
        b("train.shuffle", &Config::shuffle);
        i("mining.rounds", &Config::mining_rounds);
        d("mining.threshold", &Config::mining_threshold);
        i("mining.stride", &Config::mining_stride);
        i("mining.max_new", &Config::mining_max_new);
        i("mining.initial_negatives", &Config::initial_negatives);
        d("pipeline.hue_lo", &Config::hue_lo);
        d("pipeline.hue_hi", &Config::hue_hi);
        i("pipeline.se_size", &Config::se_size);
        d("pipeline.face_min_area_frac", &Config::face_min_area_frac);
        d("pipeline.cand_min_area_frac", &Config::cand_min_area_frac);
        d("pipeline.cand_max_area_frac", &Config::cand_max_area_frac);
        d("pipeline.cand_aspect_min", &Config::cand_aspect_min);
        d("pipeline.cand_aspect_max", &Config::cand_aspect_max);
        d("pipeline.upper_fraction", &Config::upper_fraction);
        d("pipeline.threshold", &Config::threshold);
        i("pipeline.winners", &Config::winners);
        d("pipeline.min_separation", &Config::min_separation);
        d("eval.iou", &Config::iou_tau);
        s("eval.criterion", &Config::match_criterion);
        i("synth.faces", &Config::synth_faces);
        i("synth.scenery", &Config::synth_scenery);
        i("synth.width", &Config::synth_width);
        i("synth.height", &Config::synth_height);
        t["run.seed"] = [](Config& c, const std::string& k, const std::string& v) {
            c.seed = parse_u64(k, v);
        };
        return t;
    }();
    return table;
}

void assign(Config& cfg, const std::string& key, const std::string& value,
            const std::string& origin) {
    const auto it = setters().find(key);
    if (it == setters().end()) {
        fail(ErrorCode::format, origin + ": unknown config key '" + key + "'");
    }
    it->second(cfg, key, value);
}

} // namespace

Config parse_config(const std::string& text, const std::string& origin) {
    Config cfg;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty() || line[0] == '#' || line[0] == ';') continue;
        const std::string where = origin + ":" + std::to_string(lineno);
        if (line.front() == '[') {
            if (line.back() != ']' || line.size() < 3) {
                fail(ErrorCode::format, where + ": malformed section header");
            }
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            fail(ErrorCode::format, where + ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || section.empty()) {
            fail(ErrorCode::format, where + ": key outside a [section]");
        }
        assign(cfg, section + "." + key, value, where);
    }
    validate(cfg);
    return cfg;
}

Config load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        fail(ErrorCode::io, "cannot open config " + path);
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path);
}

void apply_override(Config& cfg, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) {
        fail(ErrorCode::format, "override must look like section.key=value: '" + assignment + "'");
    }
    const std::string key = trim(assignment.substr(0, eq));
    const std::string value = trim(assignment.substr(eq + 1));
    assign(cfg, key, value, "override");
}

void validate(const Config& cfg) {
    auto require = [](bool ok, const std::string& what) {
        if (!ok) fail(ErrorCode::invalid_argument, "config: " + what);
    };
    require(cfg.window_w >= 2 && cfg.window_h >= 2, "window sides must be at least 2");
    require(cfg.layout_margin > 0.0 && cfg.layout_margin < 0.5,
            "window.margin must be in (0, 0.5)");
    require(cfg.augment_count >= 1, "augment.count must be at least 1");
    require(cfg.augment_max_rotation_deg >= 0.0, "augment.max_rotation_deg must be >= 0");
    require(cfg.augment_scale_min > 0.0 && cfg.augment_scale_min <= cfg.augment_scale_max,
            "augment scale range must be positive and ordered");
    require(cfg.augment_max_translation >= 0.0, "augment.max_translation must be >= 0");
    require(cfg.preprocess_mode == "raw" || cfg.preprocess_mode == "gabor",
            "preprocess.mode must be raw or gabor");
    require(cfg.preprocess_wavelength > 0.0, "preprocess.wavelength must be positive");
    require(cfg.preprocess_aspect > 0.0, "preprocess.aspect must be positive");
    require(cfg.preprocess_bandwidth > 0.0, "preprocess.bandwidth must be positive");
    require(!cfg.bank_wavelengths.empty() && !cfg.bank_orientations_deg.empty() &&
                !cfg.bank_phases_deg.empty(),
            "bank lists must be non-empty");
    for (double wl : cfg.bank_wavelengths) {
        require(wl > 0.0, "bank.wavelengths must be positive");
    }
    require(cfg.bank_aspect > 0.0 && cfg.bank_bandwidth > 0.0,
            "bank aspect and bandwidth must be positive");
    require(cfg.n_hidden >= 1, "train.hidden must be at least 1");
    require(cfg.learning_rate > 0.0, "train.learning_rate must be positive");
    require(cfg.epochs >= 1, "train.epochs must be at least 1");
    require(cfg.loss == "mse" || cfg.loss == "cross_entropy",
            "train.loss must be mse or cross_entropy");
    require(cfg.mining_rounds >= 0, "mining.rounds must be >= 0");
    require(cfg.mining_threshold > 0.0 && cfg.mining_threshold < 1.0,
            "mining.threshold must be in (0,1)");
    require(cfg.mining_stride >= 1, "mining.stride must be at least 1");
    require(cfg.mining_max_new >= 1, "mining.max_new must be at least 1");
    require(cfg.initial_negatives >= 1, "mining.initial_negatives must be at least 1");
    require(cfg.hue_lo >= 0.0 && cfg.hue_lo < cfg.hue_hi && cfg.hue_hi < 1.0,
            "skin hue band must satisfy 0 <= lo < hi < 1");
    require(cfg.se_size >= 1 && cfg.se_size % 2 == 1, "pipeline.se_size must be odd");
    require(cfg.face_min_area_frac > 0.0 && cfg.face_min_area_frac < 1.0,
            "pipeline.face_min_area_frac must be in (0,1)");
    require(cfg.cand_min_area_frac > 0.0 && cfg.cand_min_area_frac <= cfg.cand_max_area_frac &&
                cfg.cand_max_area_frac < 1.0,
            "candidate area fractions must be positive, ordered, below 1");
    require(cfg.cand_aspect_min > 0.0 && cfg.cand_aspect_min <= cfg.cand_aspect_max,
            "candidate aspect bounds must be positive and ordered");
    require(cfg.upper_fraction > 0.0 && cfg.upper_fraction <= 1.0,
            "pipeline.upper_fraction must be in (0,1]");
    require(cfg.threshold > 0.0 && cfg.threshold < 1.0, "pipeline.threshold must be in (0,1)");
    require(cfg.winners >= 1, "pipeline.winners must be at least 1");
    require(cfg.min_separation >= 0.0 && cfg.min_separation < 1.0,
            "pipeline.min_separation must be in [0,1)");
    require(cfg.iou_tau > 0.0 && cfg.iou_tau <= 1.0, "eval.iou must be in (0,1]");
    require(cfg.match_criterion == "iou" || cfg.match_criterion == "center",
            "eval.criterion must be iou or center");
    require(cfg.synth_faces >= 0 && cfg.synth_scenery >= 0, "synth counts must be >= 0");
    require(cfg.synth_width >= 2 * cfg.window_w && cfg.synth_height >= 2 * cfg.window_h,
            "synth canvas must be at least twice the window size");
}

} // namespace eyespot
