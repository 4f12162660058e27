#include "mlp.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "binio.hpp"
#include "error.hpp"
#include "rng.hpp"

namespace eyespot {

void MlpParams::validate() const {
    if (n_in < 1 || n_hidden < 1) {
        fail(ErrorCode::dimension, "network dimensions must be at least 1");
    }
    if (w1.size() != static_cast<std::size_t>(n_hidden) * n_in ||
        b1.size() != static_cast<std::size_t>(n_hidden) ||
        w2.size() != static_cast<std::size_t>(n_hidden)) {
        fail(ErrorCode::dimension, "weight shapes inconsistent with network dimensions");
    }
    auto finite = [](double v) { return std::isfinite(v); };
    if (!std::all_of(w1.begin(), w1.end(), finite) || !std::all_of(b1.begin(), b1.end(), finite) ||
        !std::all_of(w2.begin(), w2.end(), finite) || !std::isfinite(b2)) {
        fail(ErrorCode::invalid_argument, "non-finite weight");
    }
}

double logsig(double z) {
    // Split branches keep the result strictly inside (0,1) for any finite z.
    if (z >= 0.0) {
        const double e = std::exp(-std::min(z, 36.0));
        return 1.0 / (1.0 + e);
    }
    const double e = std::exp(std::max(z, -709.0));
    return e / (1.0 + e);
}

MlpParams init_mlp(int n_in, int n_hidden, std::uint64_t seed) {
    if (n_in < 1 || n_hidden < 1) {
        fail(ErrorCode::dimension, "network dimensions must be at least 1");
    }
    MlpParams m;
    m.n_in = n_in;
    m.n_hidden = n_hidden;
    m.w1.resize(static_cast<std::size_t>(n_hidden) * n_in);
    m.b1.assign(static_cast<std::size_t>(n_hidden), 0.0);
    m.w2.resize(static_cast<std::size_t>(n_hidden));
    Rng rng(seed);
    const double bound1 = 1.0 / std::sqrt(static_cast<double>(n_in));
    for (double& w : m.w1) w = rng.uniform(-bound1, bound1);
    const double bound2 = 1.0 / std::sqrt(static_cast<double>(n_hidden));
    for (double& w : m.w2) w = rng.uniform(-bound2, bound2);
    return m;
}

namespace {

struct ForwardCache {
    std::vector<double> hidden;
    double out = 0.0;
};

void check_input(const MlpParams& m, std::span<const double> x) {
    if (x.size() != static_cast<std::size_t>(m.n_in)) {
        fail(ErrorCode::dimension, "input length does not match the network");
    }
}

void run_forward(const MlpParams& m, std::span<const double> x, ForwardCache& cache) {
    cache.hidden.resize(static_cast<std::size_t>(m.n_hidden));
    for (int j = 0; j < m.n_hidden; ++j) {
        const double* row = m.w1.data() + static_cast<std::size_t>(j) * m.n_in;
        double z = m.b1[static_cast<std::size_t>(j)];
        for (int i = 0; i < m.n_in; ++i) {
            z += row[i] * x[static_cast<std::size_t>(i)];
        }
        cache.hidden[static_cast<std::size_t>(j)] = logsig(z);
    }
    double z = m.b2;
    for (int j = 0; j < m.n_hidden; ++j) {
        z += m.w2[static_cast<std::size_t>(j)] * cache.hidden[static_cast<std::size_t>(j)];
    }
    cache.out = logsig(z);
}

double loss_from_output(double y, double t, Loss loss) {
    if (loss == Loss::mse) {
        const double d = y - t;
        return 0.5 * d * d;
    }
    return -(t * std::log(y) + (1.0 - t) * std::log(1.0 - y));
}

// delta2 = dLoss/dz2; delta1[j] = dLoss/dz1[j].
void run_deltas(const MlpParams& m, const ForwardCache& cache, double t, Loss loss,
                double& delta2, std::vector<double>& delta1) {
    const double y = cache.out;
    delta2 = loss == Loss::mse ? (y - t) * y * (1.0 - y) : y - t;
    delta1.resize(static_cast<std::size_t>(m.n_hidden));
    for (int j = 0; j < m.n_hidden; ++j) {
        const double h = cache.hidden[static_cast<std::size_t>(j)];
        delta1[static_cast<std::size_t>(j)] =
            delta2 * m.w2[static_cast<std::size_t>(j)] * h * (1.0 - h);
    }
}

void check_target(double t) {
    if (t != 0.0 && t != 1.0) {
        fail(ErrorCode::invalid_argument, "target must be 0 or 1");
    }
}

} // namespace

double forward(const MlpParams& m, std::span<const double> x) {
    m.validate();
    check_input(m, x);
    ForwardCache cache;
    run_forward(m, x, cache);
    return cache.out;
}

double sample_loss(const MlpParams& m, std::span<const double> x, double target, Loss loss) {
    check_target(target);
    return loss_from_output(forward(m, x), target, loss);
}

Gradients backprop_gradient(const MlpParams& m, std::span<const double> x, double target,
                            Loss loss) {
    m.validate();
    check_input(m, x);
    check_target(target);
    ForwardCache cache;
    run_forward(m, x, cache);
    double delta2 = 0.0;
    std::vector<double> delta1;
    run_deltas(m, cache, target, loss, delta2, delta1);
    Gradients g;
    g.w1.resize(m.w1.size());
    g.b1.resize(m.b1.size());
    g.w2.resize(m.w2.size());
    for (int j = 0; j < m.n_hidden; ++j) {
        const double d1 = delta1[static_cast<std::size_t>(j)];
        double* row = g.w1.data() + static_cast<std::size_t>(j) * m.n_in;
        for (int i = 0; i < m.n_in; ++i) {
            row[i] = d1 * x[static_cast<std::size_t>(i)];
        }
        g.b1[static_cast<std::size_t>(j)] = d1;
        g.w2[static_cast<std::size_t>(j)] = delta2 * cache.hidden[static_cast<std::size_t>(j)];
    }
    g.b2 = delta2;
    return g;
}

TrainResult train(const MlpParams& m, const std::vector<TrainSample>& samples,
                  const TrainConfig& cfg) {
    m.validate();
    if (samples.empty()) {
        fail(ErrorCode::invalid_argument, "training set is empty");
    }
    if (!(cfg.learning_rate > 0.0) || cfg.epochs < 1) {
        fail(ErrorCode::invalid_argument, "learning rate must be positive and epochs at least 1");
    }
    for (const TrainSample& s : samples) {
        if (s.x.size() != static_cast<std::size_t>(m.n_in)) {
            fail(ErrorCode::dimension, "sample length does not match the network");
        }
        check_target(s.target);
    }

    TrainResult result;
    result.model = m;
    MlpParams& net = result.model;
    const double lr = cfg.learning_rate;
    std::vector<std::size_t> order(samples.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(cfg.seed);
    ForwardCache cache;
    std::vector<double> delta1;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        if (cfg.shuffle) {
            rng.shuffle(order);
        }
        double loss_sum = 0.0;
        for (std::size_t idx : order) {
            const TrainSample& s = samples[idx];
            run_forward(net, s.x, cache);
            loss_sum += loss_from_output(cache.out, s.target, cfg.loss);
            double delta2 = 0.0;
            run_deltas(net, cache, s.target, cfg.loss, delta2, delta1);
            // Fused SGD step; each entry subtracts lr times the exact
            // backprop_gradient value.
            for (int j = 0; j < net.n_hidden; ++j) {
                const double d1 = delta1[static_cast<std::size_t>(j)];
                double* row = net.w1.data() + static_cast<std::size_t>(j) * net.n_in;
                for (int i = 0; i < net.n_in; ++i) {
                    row[i] -= lr * (d1 * s.x[static_cast<std::size_t>(i)]);
                }
                net.b1[static_cast<std::size_t>(j)] -= lr * d1;
                net.w2[static_cast<std::size_t>(j)] -=
                    lr * (delta2 * cache.hidden[static_cast<std::size_t>(j)]);
            }
            net.b2 -= lr * delta2;
        }
        result.loss_history.push_back(loss_sum / static_cast<double>(samples.size()));
    }
    return result;
}

std::vector<int> competitive_select(std::span<const double> scores, int k) {
    if (scores.empty()) {
        fail(ErrorCode::invalid_argument, "competitive selection needs at least one score");
    }
    if (k < 1) {
        fail(ErrorCode::invalid_argument, "winner count must be at least 1");
    }
    std::vector<int> idx(scores.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
        return scores[static_cast<std::size_t>(a)] > scores[static_cast<std::size_t>(b)];
    });
    idx.resize(std::min<std::size_t>(idx.size(), static_cast<std::size_t>(k)));
    return idx;
}

namespace {

constexpr char kMagic[8] = {'E', 'Y', 'E', 'M', 'L', 'P', '1', '\n'};
constexpr std::uint64_t kMaxDoubles = 1ull << 27;

} // namespace

void save_model(const MlpParams& m, const std::string& path) {
    m.validate();
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        fail(ErrorCode::io, "cannot open " + path);
    }
    out.write(kMagic, sizeof(kMagic));
    put_u32(out, static_cast<std::uint32_t>(m.n_in));
    put_u32(out, static_cast<std::uint32_t>(m.n_hidden));
    for (double v : m.w1) put_f64(out, v);
    for (double v : m.b1) put_f64(out, v);
    for (double v : m.w2) put_f64(out, v);
    put_f64(out, m.b2);
    if (!out) {
        fail(ErrorCode::io, "write failed for " + path);
    }
}

MlpParams load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        fail(ErrorCode::io, "cannot open " + path);
    }
    char magic[8];
    if (!in.read(magic, sizeof(magic))) {
        fail(ErrorCode::truncated, "truncated model file " + path);
    }
    if (!std::equal(std::begin(magic), std::end(magic), std::begin(kMagic))) {
        fail(ErrorCode::format, "bad model magic in " + path);
    }
    const std::uint32_t n_in = get_u32(in, path);
    const std::uint32_t n_hidden = get_u32(in, path);
    if (n_in < 1 || n_hidden < 1) {
        fail(ErrorCode::dimension, "model dimensions must be at least 1 in " + path);
    }
    const std::uint64_t total =
        static_cast<std::uint64_t>(n_hidden) * (static_cast<std::uint64_t>(n_in) + 2) + 1;
    if (total > kMaxDoubles) {
        fail(ErrorCode::dimension, "model dimensions overflow in " + path);
    }
    MlpParams m;
    m.n_in = static_cast<int>(n_in);
    m.n_hidden = static_cast<int>(n_hidden);
    m.w1.resize(static_cast<std::size_t>(n_hidden) * n_in);
    m.b1.resize(n_hidden);
    m.w2.resize(n_hidden);
    for (double& v : m.w1) v = get_f64(in, path);
    for (double& v : m.b1) v = get_f64(in, path);
    for (double& v : m.w2) v = get_f64(in, path);
    m.b2 = get_f64(in, path);
    return m;
}

} // namespace eyespot
