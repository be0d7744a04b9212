#ifndef IDENTMINER_MODEL_HPP
#define IDENTMINER_MODEL_HPP

#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "json.hpp"

#include "core.hpp"
#include "datasets.hpp"

/**
 * @file model.hpp
 * @brief Shared pieces of the classifiers: predictions, training configuration, example weighting and the model file container.
 */

namespace identminer {

using Probabilities = std::array<double, num_classes>;

struct Prediction {
    ClassLabel label = ClassLabel::White;
    Probabilities probabilities{};
};

/** Index of the largest entry; the first one wins on ties, which follows the fixed class order. */
inline std::size_t argmax(const std::array<double, num_classes>& values) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < num_classes; ++c) {
        if (values[c] > values[best]) {
            best = c;
        }
    }
    return best;
}

inline Probabilities softmax(const std::array<double, num_classes>& logits) {
    double top = logits[0];
    for (auto v : logits) {
        top = std::max(top, v);
    }
    Probabilities out;
    double sum = 0;
    for (std::size_t c = 0; c < num_classes; ++c) {
        out[c] = std::exp(logits[c] - top);
        sum += out[c];
    }
    for (auto& v : out) {
        v /= sum;
    }
    return out;
}

inline Prediction predict_from_logits(const std::array<double, num_classes>& logits) {
    Prediction p;
    p.probabilities = softmax(logits);
    p.label = class_from_index(argmax(logits));
    return p;
}

struct TrainConfig {
    double learning_rate = 0.5;
    std::size_t epochs = 200;
    double l2_strength = 1e-4;
    /** Defaults to inverse class frequency in the training data, normalized to mean 1. */
    std::optional<std::array<double, num_classes> > class_weights;
    /** Multiplier for examples whose source is QB, HF or CB. */
    double instance_downweight = 1.0;
    std::uint64_t seed = 0;
    /** 0 means full batch. */
    std::size_t batch_size = 0;

    void validate() const {
        if (!(learning_rate > 0) || !std::isfinite(learning_rate)) {
            throw std::invalid_argument("learning rate must be positive");
        }
        if (epochs == 0) {
            throw std::invalid_argument("epochs must be positive");
        }
        if (!(l2_strength >= 0) || !std::isfinite(l2_strength)) {
            throw std::invalid_argument("l2 strength must be non-negative");
        }
        if (!(instance_downweight > 0 && instance_downweight <= 1)) {
            throw std::invalid_argument("instance downweight must lie in (0, 1]");
        }
        if (class_weights) {
            for (auto w : *class_weights) {
                if (!(w > 0) || !std::isfinite(w)) {
                    throw std::invalid_argument("class weights must be positive");
                }
            }
        }
    }
};

inline void to_json(nlohmann::json& j, const TrainConfig& c) {
    j = nlohmann::json{
        {"learning_rate", c.learning_rate},
        {"epochs", c.epochs},
        {"l2_strength", c.l2_strength},
        {"instance_downweight", c.instance_downweight},
        {"seed", c.seed},
        {"batch_size", c.batch_size},
        {"class_weights", c.class_weights ? nlohmann::json(*c.class_weights) : nlohmann::json(nullptr)}
    };
}

inline void from_json(const nlohmann::json& j, TrainConfig& c) {
    c = TrainConfig{};
    c.learning_rate = j.value("learning_rate", c.learning_rate);
    c.epochs = j.value("epochs", c.epochs);
    c.l2_strength = j.value("l2_strength", c.l2_strength);
    c.instance_downweight = j.value("instance_downweight", c.instance_downweight);
    c.seed = j.value("seed", c.seed);
    c.batch_size = j.value("batch_size", c.batch_size);
    if (j.contains("class_weights") && !j.at("class_weights").is_null()) {
        c.class_weights = j.at("class_weights").get<std::array<double, num_classes> >();
    }
    c.validate();
}

/**
 * Inverse empirical class frequency, normalized so the weights of the classes present average to 1.
 * Absent classes get weight 0.
 */
inline std::array<double, num_classes> inverse_frequency_weights(const std::vector<ClassLabel>& labels) {
    std::array<double, num_classes> counts{};
    for (auto l : labels) {
        counts[class_index(l)] += 1;
    }
    std::array<double, num_classes> out{};
    double sum = 0;
    std::size_t present = 0;
    for (std::size_t c = 0; c < num_classes; ++c) {
        if (counts[c] > 0) {
            out[c] = static_cast<double>(labels.size()) / counts[c];
            sum += out[c];
            ++present;
        }
    }
    for (auto& w : out) {
        w *= static_cast<double>(present) / sum;
    }
    return out;
}

/** Throws `std::invalid_argument` for empty or single-class training data. */
inline void check_training_labels(const std::vector<ClassLabel>& labels) {
    if (labels.empty()) {
        throw std::invalid_argument("training set is empty");
    }
    for (auto l : labels) {
        if (l != labels.front()) {
            return;
        }
    }
    throw std::invalid_argument("training set contains a single class");
}

/** Class weights in effect for a training run. */
inline std::array<double, num_classes> resolve_class_weights(const std::vector<ClassLabel>& labels, const TrainConfig& config) {
    return config.class_weights ? *config.class_weights : inverse_frequency_weights(labels);
}

inline double example_weight(ClassLabel label, Source source, const std::array<double, num_classes>& class_weights, double downweight) {
    double w = class_weights[class_index(label)];
    if (is_self_report_source(source)) {
        w *= downweight;
    }
    return w;
}

struct WeightBin {
    Source source = Source::crowd;
    ClassLabel label = ClassLabel::White;
    double weight = 0;
    std::size_t count = 0;
};

/** Count of training examples per (source, label) together with their effective weight. */
inline std::vector<WeightBin> effective_weight_histogram(const std::vector<ClassLabel>& labels, const std::vector<Source>& sources, const TrainConfig& config) {
    if (labels.size() != sources.size()) {
        throw std::invalid_argument("labels and sources differ in length");
    }
    auto cw = resolve_class_weights(labels, config);
    std::map<std::pair<int, int>, WeightBin> bins;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        auto& bin = bins[{static_cast<int>(sources[i]), static_cast<int>(labels[i])}];
        bin.source = sources[i];
        bin.label = labels[i];
        bin.weight = example_weight(labels[i], sources[i], cw, config.instance_downweight);
        ++bin.count;
    }
    std::vector<WeightBin> out;
    for (auto& e : bins) {
        out.push_back(e.second);
    }
    return out;
}

inline void to_json(nlohmann::json& j, const WeightBin& b) {
    j = nlohmann::json{{"source", to_string(b.source)}, {"label", to_string(b.label)}, {"weight", b.weight}, {"count", b.count}};
}

namespace internal {

inline constexpr int model_format_version = 1;

inline nlohmann::json model_header(std::string_view kind) {
    return nlohmann::json{{"format", "identminer-model"}, {"version", model_format_version}, {"kind", kind}};
}

/** Throws `DataError` unless `j` is a model container of the given kind. */
inline void check_model_header(const nlohmann::json& j, std::string_view kind) {
    if (!j.is_object() || j.value("format", "") != "identminer-model") {
        throw DataError("not an identminer model file");
    }
    if (j.value("version", 0) != model_format_version) {
        throw DataError("unsupported model file version");
    }
    if (j.value("kind", "") != kind) {
        throw DataError("model file holds a '" + j.value("kind", std::string()) + "' model, expected '" + std::string(kind) + "'");
    }
}

}

/** Read the `kind` field of a model container. */
inline std::string model_kind(const nlohmann::json& j) {
    if (!j.is_object() || j.value("format", "") != "identminer-model") {
        throw DataError("not an identminer model file");
    }
    return j.value("kind", std::string());
}

}

#endif
