#ifndef IDENTMINER_METRICS_HPP
#define IDENTMINER_METRICS_HPP

#include <array>
#include <stdexcept>
#include <vector>

#include "core.hpp"

/**
 * @file metrics.hpp
 * @brief Classification metrics over the four classes.
 */

namespace identminer {

using ClassMatrix = std::array<std::array<double, num_classes>, num_classes>;
using ClassVector = std::array<double, num_classes>;

namespace internal {

inline void check_lengths(const std::vector<ClassLabel>& labels, const std::vector<ClassLabel>& predictions) {
    if (labels.size() != predictions.size()) {
        throw std::invalid_argument("labels and predictions differ in length");
    }
}

}

/** Raw counts, rows are true labels and columns predictions. */
inline std::array<std::array<std::size_t, num_classes>, num_classes> confusion_counts(const std::vector<ClassLabel>& labels, const std::vector<ClassLabel>& predictions) {
    internal::check_lengths(labels, predictions);
    std::array<std::array<std::size_t, num_classes>, num_classes> out{};
    for (std::size_t i = 0; i < labels.size(); ++i) {
        ++out[class_index(labels[i])][class_index(predictions[i])];
    }
    return out;
}

/** Fraction correct; 0 for empty input. */
inline double accuracy(const std::vector<ClassLabel>& labels, const std::vector<ClassLabel>& predictions) {
    internal::check_lengths(labels, predictions);
    if (labels.empty()) {
        return 0;
    }
    std::size_t correct = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        correct += labels[i] == predictions[i];
    }
    return static_cast<double>(correct) / static_cast<double>(labels.size());
}

/** Per-class F1; 0 whenever precision + recall is 0, including classes absent from both sides. */
inline ClassVector per_class_f1(const std::vector<ClassLabel>& labels, const std::vector<ClassLabel>& predictions) {
    auto counts = confusion_counts(labels, predictions);
    ClassVector out{};
    for (std::size_t c = 0; c < num_classes; ++c) {
        std::size_t tp = counts[c][c], row = 0, col = 0;
        for (std::size_t k = 0; k < num_classes; ++k) {
            row += counts[c][k];
            col += counts[k][c];
        }
        // F1 = 2tp / (|true c| + |predicted c|), which is 0 exactly when tp is 0.
        out[c] = tp == 0 ? 0.0 : 2.0 * static_cast<double>(tp) / static_cast<double>(row + col);
    }
    return out;
}

inline double macro_f1(const std::vector<ClassLabel>& labels, const std::vector<ClassLabel>& predictions) {
    auto f1 = per_class_f1(labels, predictions);
    double sum = 0;
    for (auto v : f1) {
        sum += v;
    }
    return sum / static_cast<double>(num_classes);
}

/** Percentages of the whole set (entries sum to 100); rows are true labels. All zero for empty input. */
inline ClassMatrix confusion_matrix(const std::vector<ClassLabel>& labels, const std::vector<ClassLabel>& predictions) {
    auto counts = confusion_counts(labels, predictions);
    ClassMatrix out{};
    if (labels.empty()) {
        return out;
    }
    for (std::size_t r = 0; r < num_classes; ++r) {
        for (std::size_t c = 0; c < num_classes; ++c) {
            out[r][c] = 100.0 * static_cast<double>(counts[r][c]) / static_cast<double>(labels.size());
        }
    }
    return out;
}

/** Percentage of each true class predicted correctly; 0 for classes absent from `labels`. */
inline ClassVector per_class_accuracy(const std::vector<ClassLabel>& labels, const std::vector<ClassLabel>& predictions) {
    auto counts = confusion_counts(labels, predictions);
    ClassVector out{};
    for (std::size_t c = 0; c < num_classes; ++c) {
        std::size_t row = 0;
        for (auto v : counts[c]) {
            row += v;
        }
        out[c] = row ? 100.0 * static_cast<double>(counts[c][c]) / static_cast<double>(row) : 0.0;
    }
    return out;
}

}

#endif
