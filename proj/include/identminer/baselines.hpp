#ifndef IDENTMINER_BASELINES_HPP
#define IDENTMINER_BASELINES_HPP

#include <array>
#include <vector>

#include "json.hpp"

#include "core.hpp"
#include "model.hpp"

/**
 * @file baselines.hpp
 * @brief Random and majority-class baseline predictors.
 */

namespace identminer {

/** Always predicts the most frequent training label, ties resolved by class order. */
class MajorityBaseline {
public:
    explicit MajorityBaseline(ClassLabel label = ClassLabel::White) : my_label(label) {}

    static MajorityBaseline fit(const std::vector<ClassLabel>& train) {
        if (train.empty()) {
            throw std::invalid_argument("training set is empty");
        }
        std::array<double, num_classes> counts{};
        for (auto l : train) {
            counts[class_index(l)] += 1;
        }
        return MajorityBaseline(class_from_index(argmax(counts)));
    }

    ClassLabel label() const {
        return my_label;
    }

    template<typename Item_>
    ClassLabel operator()(const Item_&) const {
        return my_label;
    }

private:
    ClassLabel my_label;
};

/** Uniform random guesses from a seeded stream; each call consumes one draw. */
class RandomBaseline {
public:
    explicit RandomBaseline(std::uint64_t seed) : my_seed(seed), my_rng(derive_seed(seed, "random_baseline")) {}

    std::uint64_t seed() const {
        return my_seed;
    }

    template<typename Item_>
    ClassLabel operator()(const Item_&) {
        return class_from_index(my_rng.uniform_index(num_classes));
    }

private:
    std::uint64_t my_seed;
    Rng my_rng;
};

inline nlohmann::json save_majority(const MajorityBaseline& m) {
    auto j = internal::model_header("majority");
    j["label"] = to_string(m.label());
    return j;
}

inline MajorityBaseline load_majority(const nlohmann::json& j) {
    internal::check_model_header(j, "majority");
    auto label = parse_class_label(j.value("label", std::string()));
    if (!label) {
        throw DataError("majority model has an unknown label");
    }
    return MajorityBaseline(*label);
}

inline nlohmann::json save_random(const RandomBaseline& m) {
    auto j = internal::model_header("random");
    j["seed"] = m.seed();
    return j;
}

inline RandomBaseline load_random(const nlohmann::json& j) {
    internal::check_model_header(j, "random");
    return RandomBaseline(j.value("seed", std::uint64_t(0)));
}

}

#endif
