#ifndef IDENTMINER_EVAL_HPP
#define IDENTMINER_EVAL_HPP

#include <cstdio>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "core.hpp"
#include "datasets.hpp"
#include "metrics.hpp"

/**
 * @file eval.hpp
 * @brief Evaluation reports under the imbalanced and balanced settings.
 */

namespace identminer {

enum class EvalSetting : std::uint8_t {
    imbalanced,
    balanced
};

inline std::string_view to_string(EvalSetting s) {
    return s == EvalSetting::balanced ? "balanced" : "imbalanced";
}

inline EvalSetting parse_eval_setting(std::string_view s) {
    if (s == "balanced") {
        return EvalSetting::balanced;
    }
    if (s == "imbalanced") {
        return EvalSetting::imbalanced;
    }
    throw std::invalid_argument("unknown evaluation setting '" + std::string(s) + "'");
}

struct EvalReport {
    double accuracy = 0;
    double macro_f1 = 0;
    ClassVector per_class_accuracy{};
    ClassVector per_class_f1{};
    /** Percent of the evaluated set, rows are true labels. */
    ClassMatrix confusion{};
    std::size_t n = 0;
    EvalSetting setting = EvalSetting::imbalanced;
};

inline EvalReport make_report(const std::vector<ClassLabel>& labels, const std::vector<ClassLabel>& predictions, EvalSetting setting = EvalSetting::imbalanced) {
    EvalReport r;
    r.accuracy = accuracy(labels, predictions);
    r.macro_f1 = macro_f1(labels, predictions);
    r.per_class_accuracy = per_class_accuracy(labels, predictions);
    r.per_class_f1 = per_class_f1(labels, predictions);
    r.confusion = confusion_matrix(labels, predictions);
    r.n = labels.size();
    r.setting = setting;
    return r;
}

/**
 * Score `predictor(item) -> ClassLabel` on `items` (anything with a `label` member). The balanced setting first
 * draws a seeded class-balanced subsample. Items are predicted in order.
 */
template<typename Item_, typename Predictor_>
EvalReport evaluate(Predictor_&& predictor, const std::vector<Item_>& items, EvalSetting setting, std::uint64_t seed = 0) {
    const std::vector<Item_>* use = &items;
    std::vector<Item_> sub;
    if (setting == EvalSetting::balanced) {
        sub = balance_subsample(items, seed);
        use = &sub;
    }
    std::vector<ClassLabel> labels, preds;
    labels.reserve(use->size());
    preds.reserve(use->size());
    for (const auto& it : *use) {
        labels.push_back(it.label);
        preds.push_back(predictor(it));
    }
    return make_report(labels, preds, setting);
}

inline void to_json(nlohmann::json& j, const EvalReport& r) {
    nlohmann::json per_acc = nlohmann::json::object(), per_f1 = nlohmann::json::object(), conf = nlohmann::json::object();
    for (std::size_t c = 0; c < num_classes; ++c) {
        auto name = std::string(to_string(class_from_index(c)));
        per_acc[name] = r.per_class_accuracy[c];
        per_f1[name] = r.per_class_f1[c];
        nlohmann::json row = nlohmann::json::object();
        for (std::size_t k = 0; k < num_classes; ++k) {
            row[std::string(to_string(class_from_index(k)))] = r.confusion[c][k];
        }
        conf[name] = row;
    }
    j = nlohmann::json{
        {"setting", to_string(r.setting)},
        {"n", r.n},
        {"accuracy", r.accuracy},
        {"macro_f1", r.macro_f1},
        {"per_class_accuracy", per_acc},
        {"per_class_f1", per_f1},
        {"confusion", conf}
    };
}

/** Aligned table with one row per named report: F1 to 3 decimals, accuracy and per-class accuracy in percent to 1 decimal. */
inline std::string format_report_table(const std::vector<std::pair<std::string, EvalReport> >& rows) {
    std::size_t width = 5;
    for (const auto& r : rows) {
        width = std::max(width, r.first.size());
    }
    auto pad = [&](std::string s) {
        s.resize(width, ' ');
        return s;
    };
    char buf[160];
    std::string out = pad("model");
    std::snprintf(buf, sizeof(buf), "  %-10s %6s %6s %6s %6s %6s %6s %7s\n", "setting", "F1", "Acc%", "W", "B", "H/L", "A", "n");
    out += buf;
    for (const auto& [name, r] : rows) {
        out += pad(name);
        std::snprintf(buf, sizeof(buf), "  %-10s %6.3f %6.1f %6.1f %6.1f %6.1f %6.1f %7zu\n",
            std::string(to_string(r.setting)).c_str(), r.macro_f1, 100.0 * r.accuracy,
            r.per_class_accuracy[0], r.per_class_accuracy[1], r.per_class_accuracy[2], r.per_class_accuracy[3], r.n);
        out += buf;
    }
    return out;
}

/** Confusion matrix as an aligned table of percentages. */
inline std::string format_confusion(const EvalReport& r) {
    char buf[128];
    std::string out;
    std::snprintf(buf, sizeof(buf), "%-6s %7s %7s %7s %7s\n", "true", "W", "B", "H/L", "A");
    out += buf;
    for (std::size_t c = 0; c < num_classes; ++c) {
        std::snprintf(buf, sizeof(buf), "%-6s %7.1f %7.1f %7.1f %7.1f\n", std::string(short_name(class_from_index(c))).c_str(),
            r.confusion[c][0], r.confusion[c][1], r.confusion[c][2], r.confusion[c][3]);
        out += buf;
    }
    return out;
}

}

#endif
