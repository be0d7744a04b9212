#ifndef IDENTMINER_NAME_CNN_HPP
#define IDENTMINER_NAME_CNN_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "core.hpp"
#include "ingest.hpp"
#include "metrics.hpp"
#include "model.hpp"
#include "textprep.hpp"

/**
 * @file name_cnn.hpp
 * @brief Character CNN over display names with profile metadata features.
 *
 * Architecture: characters → embeddings → one bank of width-`width` convolutions → max-pool over positions →
 * concatenation with the metadata vector → fully connected layer with ReLU → fully connected layer to 4 logits → softmax.
 */

namespace identminer {

inline constexpr std::size_t name_metadata_dim = 5;

/** log1p(followers), log1p(statuses), has_profile_url, has_custom_image, geo_enabled. */
inline std::vector<double> name_metadata(const ProfileMeta& p) {
    return {
        std::log1p(static_cast<double>(p.followers_count)),
        std::log1p(static_cast<double>(p.statuses_count)),
        p.has_profile_url ? 1.0 : 0.0,
        p.has_custom_image ? 1.0 : 0.0,
        p.geo_enabled ? 1.0 : 0.0
    };
}

/** Index 0 pads, index 1 holds out-of-vocabulary characters, known characters follow from 2. */
class CharVocab {
public:
    static constexpr std::size_t pad = 0;
    static constexpr std::size_t oov = 1;

    CharVocab() = default;

    explicit CharVocab(std::vector<char32_t> chars) : my_chars(std::move(chars)) {
        for (std::size_t i = 0; i < my_chars.size(); ++i) {
            if (!my_index.emplace(my_chars[i], i + 2).second) {
                throw std::invalid_argument("duplicate character in vocabulary");
            }
        }
    }

    /** Characters (lowercased) seen at least `min_count` times over the first `max_len` characters of each name. */
    static CharVocab build(const std::vector<std::string>& names, std::size_t min_count, std::size_t max_len) {
        std::map<char32_t, std::size_t> counts;
        for (const auto& n : names) {
            auto cps = prepare(n, max_len);
            for (auto cp : cps) {
                ++counts[cp];
            }
        }
        std::vector<char32_t> chars;
        for (auto& [cp, c] : counts) {
            if (c >= min_count) {
                chars.push_back(cp);
            }
        }
        return CharVocab(std::move(chars));
    }

    std::size_t size() const {
        return my_chars.size() + 2;
    }

    const std::vector<char32_t>& chars() const {
        return my_chars;
    }

    /** Truncate to `max_len` characters, map to indices and pad on the right up to `min_len`. */
    std::vector<std::size_t> encode(std::string_view name, std::size_t max_len, std::size_t min_len) const {
        std::vector<std::size_t> out;
        for (auto cp : prepare(name, max_len)) {
            auto it = my_index.find(cp);
            out.push_back(it == my_index.end() ? oov : it->second);
        }
        while (out.size() < min_len) {
            out.push_back(pad);
        }
        return out;
    }

    static std::vector<char32_t> prepare(std::string_view name, std::size_t max_len) {
        auto cps = utf8::code_points(name);
        if (cps.size() > max_len) {
            cps.resize(max_len);
        }
        for (auto& cp : cps) {
            cp = utf8::to_lower(cp);
        }
        return cps;
    }

private:
    std::vector<char32_t> my_chars;
    std::map<char32_t, std::size_t> my_index;
};

struct NameCnnShape {
    std::size_t embed_dim = 256;
    std::size_t filters = 256;
    std::size_t width = 3;
    std::size_t hidden = 256;
    std::size_t max_len = 50;
    std::size_t metadata_dim = name_metadata_dim;

    void validate() const {
        if (embed_dim == 0 || filters == 0 || width == 0 || hidden == 0 || max_len < width) {
            throw std::invalid_argument("invalid name model shape");
        }
    }

    bool operator==(const NameCnnShape&) const = default;
};

inline void to_json(nlohmann::json& j, const NameCnnShape& s) {
    j = nlohmann::json{{"embed_dim", s.embed_dim}, {"filters", s.filters}, {"width", s.width}, {"hidden", s.hidden}, {"max_len", s.max_len}, {"metadata_dim", s.metadata_dim}};
}

inline void from_json(const nlohmann::json& j, NameCnnShape& s) {
    s = NameCnnShape{};
    s.embed_dim = j.value("embed_dim", s.embed_dim);
    s.filters = j.value("filters", s.filters);
    s.width = j.value("width", s.width);
    s.hidden = j.value("hidden", s.hidden);
    s.max_len = j.value("max_len", s.max_len);
    s.metadata_dim = j.value("metadata_dim", s.metadata_dim);
    s.validate();
}

/** All trainable tensors, flat and row-major. */
struct NameCnnParams {
    std::vector<double> embedding; // vocab x embed_dim
    std::vector<double> conv_w;    // filters x (width * embed_dim)
    std::vector<double> conv_b;    // filters
    std::vector<double> fc1_w;     // hidden x (filters + metadata_dim)
    std::vector<double> fc1_b;     // hidden
    std::vector<double> fc2_w;     // 4 x hidden
    std::vector<double> fc2_b;     // 4

    static constexpr std::size_t count = 7;

    static constexpr std::array<const char*, count> names{"embedding", "conv_w", "conv_b", "fc1_w", "fc1_b", "fc2_w", "fc2_b"};

    /** Whether tensor `i` is a weight matrix subject to L2 (biases are not). */
    static constexpr std::array<bool, count> regularized{true, true, false, true, false, true, false};

    std::array<std::vector<double>*, count> tensors() {
        return {&embedding, &conv_w, &conv_b, &fc1_w, &fc1_b, &fc2_w, &fc2_b};
    }

    std::array<const std::vector<double>*, count> tensors() const {
        return {&embedding, &conv_w, &conv_b, &fc1_w, &fc1_b, &fc2_w, &fc2_b};
    }

    /** Same shapes, all zero. */
    NameCnnParams zeros_like() const {
        NameCnnParams out;
        auto dst = out.tensors();
        auto src = tensors();
        for (std::size_t i = 0; i < count; ++i) {
            dst[i]->assign(src[i]->size(), 0.0);
        }
        return out;
    }
};

struct NameExample {
    std::string name;
    std::vector<double> metadata;
    ClassLabel label = ClassLabel::White;
    Source source = Source::crowd;
};

class NameModel {
public:
    NameModel() = default;

    /** Seeded initialization: embeddings N(0, 0.1), conv N(0, 1/fan_in), FC1 He-scaled, FC2 N(0, 1/hidden), zero biases. */
    NameModel(CharVocab vocab, NameCnnShape shape, std::uint64_t seed) : my_vocab(std::move(vocab)), my_shape(shape) {
        my_shape.validate();
        const auto V = my_vocab.size(), D = my_shape.embed_dim, F = my_shape.filters, K = my_shape.width, H = my_shape.hidden;
        const auto in1 = F + my_shape.metadata_dim;
        Rng rng(derive_seed(seed, "name_cnn_init"));
        auto fill = [&](std::vector<double>& t, std::size_t n, double sd) {
            t.resize(n);
            for (auto& v : t) {
                v = sd * rng.normal();
            }
        };
        fill(my_params.embedding, V * D, 0.1);
        fill(my_params.conv_w, F * K * D, 1.0 / std::sqrt(static_cast<double>(K * D)));
        my_params.conv_b.assign(F, 0.0);
        fill(my_params.fc1_w, H * in1, std::sqrt(2.0 / static_cast<double>(in1)));
        my_params.fc1_b.assign(H, 0.0);
        fill(my_params.fc2_w, num_classes * H, 1.0 / std::sqrt(static_cast<double>(H)));
        my_params.fc2_b.assign(num_classes, 0.0);
    }

    NameModel(CharVocab vocab, NameCnnShape shape, NameCnnParams params) : my_vocab(std::move(vocab)), my_shape(shape), my_params(std::move(params)) {
        my_shape.validate();
        auto expected = NameModel(my_vocab, my_shape, std::uint64_t(0)).my_params;
        auto a = my_params.tensors();
        auto b = expected.tensors();
        for (std::size_t i = 0; i < NameCnnParams::count; ++i) {
            if (a[i]->size() != b[i]->size()) {
                throw std::invalid_argument(std::string("tensor ") + NameCnnParams::names[i] + " has the wrong size");
            }
        }
    }

    const CharVocab& vocab() const {
        return my_vocab;
    }

    const NameCnnShape& shape() const {
        return my_shape;
    }

    NameCnnParams& params() {
        return my_params;
    }

    const NameCnnParams& params() const {
        return my_params;
    }

    std::vector<std::size_t> encode(std::string_view name) const {
        return my_vocab.encode(name, my_shape.max_len, my_shape.width);
    }

    std::array<double, num_classes> logits(std::string_view name, const std::vector<double>& metadata) const {
        Workspace ws;
        forward(encode(name), metadata, ws);
        return ws.logits;
    }

    Prediction predict(std::string_view name, const std::vector<double>& metadata) const {
        return predict_from_logits(logits(name, metadata));
    }

    /**
     * Mean weighted cross-entropy over `batch` plus `(l2/2) * ||weights||^2`. When `grad` is given, the gradient of that
     * objective is added into it.
     */
    double loss(const std::vector<NameExample>& batch, const std::vector<double>& weights, double l2, NameCnnParams* grad = nullptr) const {
        if (batch.size() != weights.size()) {
            throw std::invalid_argument("batch and weights differ in length");
        }
        double total = 0;
        const double scale = batch.empty() ? 0.0 : 1.0 / static_cast<double>(batch.size());
        Workspace ws;
        for (std::size_t i = 0; i < batch.size(); ++i) {
            auto ids = encode(batch[i].name);
            forward(ids, batch[i].metadata, ws);
            auto p = softmax(ws.logits);
            auto y = class_index(batch[i].label);
            total += weights[i] * scale * -std::log(std::max(p[y], 1e-300));
            if (grad) {
                std::array<double, num_classes> dz2;
                for (std::size_t c = 0; c < num_classes; ++c) {
                    dz2[c] = weights[i] * scale * (p[c] - (c == y ? 1.0 : 0.0));
                }
                backward(ids, ws, dz2, *grad);
            }
        }

        auto tensors = my_params.tensors();
        auto gtensors = grad ? grad->tensors() : std::array<std::vector<double>*, NameCnnParams::count>{};
        for (std::size_t t = 0; t < NameCnnParams::count; ++t) {
            if (!NameCnnParams::regularized[t] || l2 == 0) {
                continue;
            }
            const auto& w = *tensors[t];
            double norm = 0;
            for (std::size_t k = 0; k < w.size(); ++k) {
                norm += w[k] * w[k];
                if (grad) {
                    (*gtensors[t])[k] += l2 * w[k];
                }
            }
            total += 0.5 * l2 * norm;
        }
        return total;
    }

private:
    struct Workspace {
        std::vector<double> window;
        std::vector<double> pooled;
        std::vector<std::size_t> argpos;
        std::vector<double> h0;
        std::vector<double> z1;
        std::vector<double> a1;
        std::array<double, num_classes> logits{};
    };

    void forward(const std::vector<std::size_t>& ids, const std::vector<double>& metadata, Workspace& ws) const {
        const auto D = my_shape.embed_dim, F = my_shape.filters, K = my_shape.width, H = my_shape.hidden, M = my_shape.metadata_dim;
        if (metadata.size() != M) {
            throw std::invalid_argument("metadata has " + std::to_string(metadata.size()) + " features, expected " + std::to_string(M));
        }
        const std::size_t positions = ids.size() - K + 1;
        const auto& E = my_params.embedding;
        const auto& W = my_params.conv_w;

        ws.pooled.assign(F, 0.0);
        ws.argpos.assign(F, 0);
        ws.window.resize(K * D);
        for (std::size_t t = 0; t < positions; ++t) {
            for (std::size_t k = 0; k < K; ++k) {
                std::copy_n(E.begin() + static_cast<std::ptrdiff_t>(ids[t + k] * D), D, ws.window.begin() + static_cast<std::ptrdiff_t>(k * D));
            }
            for (std::size_t f = 0; f < F; ++f) {
                const double* w = W.data() + f * K * D;
                double v = my_params.conv_b[f];
                for (std::size_t q = 0; q < K * D; ++q) {
                    v += w[q] * ws.window[q];
                }
                // Strict comparison keeps the first maximal position.
                if (t == 0 || v > ws.pooled[f]) {
                    ws.pooled[f] = v;
                    ws.argpos[f] = t;
                }
            }
        }

        ws.h0.resize(F + M);
        std::copy(ws.pooled.begin(), ws.pooled.end(), ws.h0.begin());
        std::copy(metadata.begin(), metadata.end(), ws.h0.begin() + static_cast<std::ptrdiff_t>(F));

        ws.z1.resize(H);
        ws.a1.resize(H);
        for (std::size_t h = 0; h < H; ++h) {
            const double* w = my_params.fc1_w.data() + h * (F + M);
            double v = my_params.fc1_b[h];
            for (std::size_t q = 0; q < F + M; ++q) {
                v += w[q] * ws.h0[q];
            }
            ws.z1[h] = v;
            ws.a1[h] = v > 0 ? v : 0.0;
        }

        for (std::size_t c = 0; c < num_classes; ++c) {
            const double* w = my_params.fc2_w.data() + c * H;
            double v = my_params.fc2_b[c];
            for (std::size_t h = 0; h < H; ++h) {
                v += w[h] * ws.a1[h];
            }
            ws.logits[c] = v;
        }
    }

    void backward(const std::vector<std::size_t>& ids, const Workspace& ws, const std::array<double, num_classes>& dz2, NameCnnParams& g) const {
        const auto D = my_shape.embed_dim, F = my_shape.filters, K = my_shape.width, H = my_shape.hidden, M = my_shape.metadata_dim;

        std::vector<double> da1(H, 0.0);
        for (std::size_t c = 0; c < num_classes; ++c) {
            g.fc2_b[c] += dz2[c];
            const double* w = my_params.fc2_w.data() + c * H;
            double* gw = g.fc2_w.data() + c * H;
            for (std::size_t h = 0; h < H; ++h) {
                gw[h] += dz2[c] * ws.a1[h];
                da1[h] += dz2[c] * w[h];
            }
        }

        std::vector<double> dh0(F + M, 0.0);
        for (std::size_t h = 0; h < H; ++h) {
            if (ws.z1[h] <= 0) {
                continue;
            }
            double dz1 = da1[h];
            g.fc1_b[h] += dz1;
            const double* w = my_params.fc1_w.data() + h * (F + M);
            double* gw = g.fc1_w.data() + h * (F + M);
            for (std::size_t q = 0; q < F + M; ++q) {
                gw[q] += dz1 * ws.h0[q];
                dh0[q] += dz1 * w[q];
            }
        }

        // Max-pool routes each filter's gradient to its argmax position only.
        const auto& E = my_params.embedding;
        for (std::size_t f = 0; f < F; ++f) {
            double d = dh0[f];
            if (d == 0) {
                continue;
            }
            g.conv_b[f] += d;
            const std::size_t t = ws.argpos[f];
            const double* w = my_params.conv_w.data() + f * K * D;
            double* gw = g.conv_w.data() + f * K * D;
            for (std::size_t k = 0; k < K; ++k) {
                const std::size_t row = ids[t + k] * D;
                for (std::size_t e = 0; e < D; ++e) {
                    gw[k * D + e] += d * E[row + e];
                    g.embedding[row + e] += d * w[k * D + e];
                }
            }
        }
    }

    CharVocab my_vocab;
    NameCnnShape my_shape;
    NameCnnParams my_params;
};

/**
 * Compare the analytic gradient of `model.loss` against central differences with step `step`.
 * Checks every parameter when `per_tensor` is 0, otherwise that many seeded random entries per tensor.
 * The relative error of a pair is `|a - n| / max(|a|, |n|, floor)`; the largest one is returned.
 */
inline double name_cnn_gradient_check(
    NameModel model,
    const std::vector<NameExample>& batch,
    const std::vector<double>& weights,
    double l2,
    double step = 1e-5,
    std::size_t per_tensor = 0,
    std::uint64_t seed = 0,
    double floor = 1e-6)
{
    auto grad = model.params().zeros_like();
    model.loss(batch, weights, l2, &grad);
    auto tensors = model.params().tensors();
    auto gtensors = grad.tensors();
    Rng rng(derive_seed(seed, "gradient_check"));

    double worst = 0;
    for (std::size_t t = 0; t < NameCnnParams::count; ++t) {
        auto& w = *tensors[t];
        std::vector<std::size_t> which;
        if (per_tensor == 0 || per_tensor >= w.size()) {
            which.resize(w.size());
            std::iota(which.begin(), which.end(), 0);
        } else {
            for (std::size_t k = 0; k < per_tensor; ++k) {
                which.push_back(rng.uniform_index(w.size()));
            }
        }
        for (auto k : which) {
            double orig = w[k];
            w[k] = orig + step;
            double up = model.loss(batch, weights, l2);
            w[k] = orig - step;
            double down = model.loss(batch, weights, l2);
            w[k] = orig;
            double numeric = (up - down) / (2 * step);
            double analytic = (*gtensors[t])[k];
            double rel = std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), floor});
            worst = std::max(worst, rel);
        }
    }
    return worst;
}

struct NameCnnConfig {
    NameCnnShape shape;
    TrainConfig train{0.05, 250, 0.0, std::nullopt, 1.0, 0, 64};
    std::size_t min_char_count = 5;
    /** Stop after this many epochs without a dev macro-F1 improvement; 0 trains for all epochs. */
    std::size_t patience = 0;
};

inline void to_json(nlohmann::json& j, const NameCnnConfig& c) {
    j = nlohmann::json{{"shape", c.shape}, {"train", c.train}, {"min_char_count", c.min_char_count}, {"patience", c.patience}};
}

inline void from_json(const nlohmann::json& j, NameCnnConfig& c) {
    c = NameCnnConfig{};
    if (j.contains("shape")) {
        c.shape = j.at("shape").get<NameCnnShape>();
    }
    if (j.contains("train")) {
        auto t = nlohmann::json(c.train);
        t.update(j.at("train"));
        c.train = t.get<TrainConfig>();
    }
    c.min_char_count = j.value("min_char_count", c.min_char_count);
    c.patience = j.value("patience", c.patience);
}

struct NameEpoch {
    std::size_t epoch = 0;
    double train_loss = 0;
    std::optional<double> dev_macro_f1;
    std::optional<double> dev_accuracy;
};

struct NameTrainingLog {
    std::vector<NameEpoch> epochs;
    /** 1-based epoch of the returned checkpoint; 0 when no dev set was given and the final parameters are kept. */
    std::size_t best_epoch = 0;
    std::optional<double> best_dev_macro_f1;
};

inline std::vector<ClassLabel> predict_names(const NameModel& model, const std::vector<NameExample>& items) {
    std::vector<ClassLabel> out;
    out.reserve(items.size());
    for (const auto& it : items) {
        out.push_back(model.predict(it.name, it.metadata).label);
    }
    return out;
}

/**
 * Mini-batch gradient descent over seeded per-epoch shuffles; after every epoch the dev set is scored and the
 * checkpoint with the best dev macro-F1 (earliest on ties) is returned. Without a dev set the final parameters are returned.
 */
inline NameModel train_name_cnn(const std::vector<NameExample>& train, const std::vector<NameExample>& dev, const NameCnnConfig& config, NameTrainingLog* log = nullptr) {
    config.train.validate();
    config.shape.validate();
    std::vector<ClassLabel> labels;
    std::vector<std::string> names;
    for (const auto& e : train) {
        labels.push_back(e.label);
        names.push_back(e.name);
    }
    check_training_labels(labels);

    auto cw = resolve_class_weights(labels, config.train);
    std::vector<double> weights;
    for (const auto& e : train) {
        weights.push_back(example_weight(e.label, e.source, cw, config.train.instance_downweight));
    }

    NameModel model(CharVocab::build(names, config.min_char_count, config.shape.max_len), config.shape, config.train.seed);
    std::vector<ClassLabel> dev_labels;
    for (const auto& e : dev) {
        dev_labels.push_back(e.label);
    }

    Rng rng(derive_seed(config.train.seed, "name_cnn_order"));
    std::vector<std::size_t> order(train.size());
    std::iota(order.begin(), order.end(), 0);
    const std::size_t batch = config.train.batch_size == 0 ? train.size() : config.train.batch_size;

    std::optional<NameCnnParams> best;
    std::optional<double> best_f1;
    std::size_t best_epoch = 0, since_best = 0;
    NameTrainingLog local;
    std::vector<NameExample> chunk;
    std::vector<double> chunk_w;

    for (std::size_t epoch = 1; epoch <= config.train.epochs; ++epoch) {
        shuffle(order, rng);
        double epoch_loss = 0;
        for (std::size_t start = 0; start < order.size(); start += batch) {
            std::size_t end = std::min(order.size(), start + batch);
            chunk.clear();
            chunk_w.clear();
            for (std::size_t k = start; k < end; ++k) {
                chunk.push_back(train[order[k]]);
                chunk_w.push_back(weights[order[k]]);
            }
            auto grad = model.params().zeros_like();
            epoch_loss += model.loss(chunk, chunk_w, config.train.l2_strength, &grad) * static_cast<double>(end - start);
            auto p = model.params().tensors();
            auto g = grad.tensors();
            for (std::size_t t = 0; t < NameCnnParams::count; ++t) {
                for (std::size_t k = 0; k < p[t]->size(); ++k) {
                    (*p[t])[k] -= config.train.learning_rate * (*g[t])[k];
                }
            }
        }

        NameEpoch rec;
        rec.epoch = epoch;
        rec.train_loss = epoch_loss / static_cast<double>(train.size());
        if (!dev.empty()) {
            auto pred = predict_names(model, dev);
            rec.dev_macro_f1 = macro_f1(dev_labels, pred);
            rec.dev_accuracy = accuracy(dev_labels, pred);
            if (!best_f1 || *rec.dev_macro_f1 > *best_f1) {
                best_f1 = rec.dev_macro_f1;
                best = model.params();
                best_epoch = epoch;
                since_best = 0;
            } else {
                ++since_best;
            }
        }
        local.epochs.push_back(rec);
        if (config.patience && since_best >= config.patience) {
            break;
        }
    }

    if (best) {
        model.params() = std::move(*best);
    }
    local.best_epoch = best_epoch;
    local.best_dev_macro_f1 = best_f1;
    if (log) {
        *log = std::move(local);
    }
    return model;
}

inline nlohmann::json save_name_cnn(const NameModel& m) {
    auto j = internal::model_header("name_cnn");
    j["shape"] = m.shape();
    std::vector<std::uint32_t> chars(m.vocab().chars().begin(), m.vocab().chars().end());
    j["chars"] = chars;
    auto t = m.params().tensors();
    nlohmann::json tensors = nlohmann::json::object();
    for (std::size_t i = 0; i < NameCnnParams::count; ++i) {
        tensors[NameCnnParams::names[i]] = *t[i];
    }
    j["tensors"] = tensors;
    return j;
}

inline NameModel load_name_cnn(const nlohmann::json& j) {
    internal::check_model_header(j, "name_cnn");
    try {
        auto shape = j.at("shape").get<NameCnnShape>();
        auto raw = j.at("chars").get<std::vector<std::uint32_t> >();
        CharVocab vocab(std::vector<char32_t>(raw.begin(), raw.end()));
        NameCnnParams params;
        auto t = params.tensors();
        for (std::size_t i = 0; i < NameCnnParams::count; ++i) {
            *t[i] = j.at("tensors").at(NameCnnParams::names[i]).get<std::vector<double> >();
        }
        return NameModel(std::move(vocab), shape, std::move(params));
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed name model: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw DataError(std::string("malformed name model: ") + e.what());
    }
}

}

#endif
