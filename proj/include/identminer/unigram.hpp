#ifndef IDENTMINER_UNIGRAM_HPP
#define IDENTMINER_UNIGRAM_HPP

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "json.hpp"

#include "core.hpp"
#include "ingest.hpp"
#include "model.hpp"
#include "resources.hpp"
#include "textprep.hpp"

/**
 * @file unigram.hpp
 * @brief Bag-of-words multinomial logistic regression over users' recent tweets.
 */

namespace identminer {

/** Sorted `(column, value)` pairs. */
using SparseVector = std::vector<std::pair<std::size_t, double> >;

/** Token kinds that count as unigrams; URLs, mentions and punctuation are left out. */
inline bool is_unigram_kind(TokenKind kind) {
    return kind == TokenKind::word || kind == TokenKind::contraction || kind == TokenKind::hashtag || kind == TokenKind::emoji;
}

/** Words mapped to columns in lexicographic order. */
class Vocabulary {
public:
    Vocabulary() = default;

    explicit Vocabulary(std::vector<std::string> words) : my_words(std::move(words)) {
        std::sort(my_words.begin(), my_words.end());
        my_words.erase(std::unique(my_words.begin(), my_words.end()), my_words.end());
        for (std::size_t i = 0; i < my_words.size(); ++i) {
            my_index.emplace(my_words[i], i);
        }
    }

    std::size_t size() const {
        return my_words.size();
    }

    std::optional<std::size_t> find(const std::string& word) const {
        auto it = my_index.find(word);
        if (it == my_index.end()) {
            return std::nullopt;
        }
        return it->second;
    }

    const std::vector<std::string>& words() const {
        return my_words;
    }

private:
    std::vector<std::string> my_words;
    std::unordered_map<std::string, std::size_t> my_index;
};

namespace internal {

/** Indices of the newest `max_tweets` tweets. */
inline std::vector<std::size_t> newest_tweets(const UserRecord& user, std::size_t max_tweets) {
    std::vector<std::size_t> order(user.tweets.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return user.tweets[a].created_at > user.tweets[b].created_at;
    });
    if (order.size() > max_tweets) {
        order.resize(max_tweets);
    }
    return order;
}

}

/**
 * Unigrams occurring at least `min_count` times in total over the newest `max_tweets` tweets of the given users,
 * excluding stopwords.
 */
inline Vocabulary build_vocab(const std::vector<UserRecord>& users, std::size_t min_count, const WordSet& stopwords, const Tokenizer& tokenizer = Tokenizer(), std::size_t max_tweets = 200) {
    std::unordered_map<std::string, std::size_t> counts;
    for (const auto& u : users) {
        for (auto t : internal::newest_tweets(u, max_tweets)) {
            for (auto& tok : tokenizer(u.tweets[t].text)) {
                if (is_unigram_kind(tok.kind) && !stopwords.count(tok.text)) {
                    ++counts[tok.text];
                }
            }
        }
    }
    std::vector<std::string> words;
    for (auto& [w, c] : counts) {
        if (c >= min_count) {
            words.push_back(w);
        }
    }
    return Vocabulary(std::move(words));
}

/** Unigram counts over the newest `max_tweets` tweets, restricted to `vocab` and sorted by column. */
inline SparseVector featurize_user(const UserRecord& user, const Vocabulary& vocab, const Tokenizer& tokenizer = Tokenizer(), std::size_t max_tweets = 200) {
    std::map<std::size_t, double> counts;
    for (auto t : internal::newest_tweets(user, max_tweets)) {
        for (auto& tok : tokenizer(user.tweets[t].text)) {
            if (!is_unigram_kind(tok.kind)) {
                continue;
            }
            if (auto col = vocab.find(tok.text)) {
                counts[*col] += 1;
            }
        }
    }
    return SparseVector(counts.begin(), counts.end());
}

/** Treat a dense vector (such as an external embedding) as sparse features over every column. */
inline SparseVector dense_as_sparse(const std::vector<double>& dense) {
    SparseVector out;
    out.reserve(dense.size());
    for (std::size_t i = 0; i < dense.size(); ++i) {
        out.emplace_back(i, dense[i]);
    }
    return out;
}

struct SparseExample {
    SparseVector features;
    ClassLabel label = ClassLabel::White;
    Source source = Source::crowd;
};

/** Multinomial logistic regression over `dim` features, weights stored class-major. */
class LinearModel {
public:
    LinearModel() = default;

    explicit LinearModel(std::size_t dim) : my_dim(dim), my_weights(num_classes * dim, 0.0), my_bias{} {}

    std::size_t dim() const {
        return my_dim;
    }

    std::array<double, num_classes> logits(const SparseVector& x) const {
        std::array<double, num_classes> out = my_bias;
        for (const auto& [j, v] : x) {
            if (j >= my_dim) {
                throw std::invalid_argument("feature index out of range");
            }
            for (std::size_t c = 0; c < num_classes; ++c) {
                out[c] += my_weights[c * my_dim + j] * v;
            }
        }
        return out;
    }

    Prediction predict(const SparseVector& x) const {
        return predict_from_logits(logits(x));
    }

    std::vector<double>& weights() {
        return my_weights;
    }

    const std::vector<double>& weights() const {
        return my_weights;
    }

    std::array<double, num_classes>& bias() {
        return my_bias;
    }

    const std::array<double, num_classes>& bias() const {
        return my_bias;
    }

private:
    std::size_t my_dim = 0;
    std::vector<double> my_weights;
    std::array<double, num_classes> my_bias{};
};

/** `sum_i w_i * CE_i / N + (l2 / 2) * ||W||^2`; the bias is not regularized. */
inline double weighted_loss(const LinearModel& model, const std::vector<SparseExample>& examples, const std::vector<double>& weights, double l2) {
    double loss = 0;
    for (std::size_t i = 0; i < examples.size(); ++i) {
        auto p = model.predict(examples[i].features).probabilities;
        loss += weights[i] * -std::log(std::max(p[class_index(examples[i].label)], 1e-300));
    }
    if (!examples.empty()) {
        loss /= static_cast<double>(examples.size());
    }
    double norm = 0;
    for (auto w : model.weights()) {
        norm += w * w;
    }
    return loss + 0.5 * l2 * norm;
}

inline std::vector<double> example_weights(const std::vector<SparseExample>& examples, const TrainConfig& config) {
    std::vector<ClassLabel> labels;
    for (const auto& e : examples) {
        labels.push_back(e.label);
    }
    auto cw = resolve_class_weights(labels, config);
    std::vector<double> out;
    for (const auto& e : examples) {
        out.push_back(example_weight(e.label, e.source, cw, config.instance_downweight));
    }
    return out;
}

struct TrainingLog {
    /** Objective on the full training set after each epoch. */
    std::vector<double> loss;
};

/**
 * Mini-batch gradient descent with a fixed learning rate on the weighted, L2-regularized cross-entropy.
 * Batches are drawn from a seeded shuffle per epoch; with `batch_size` 0 every step uses the full set in input order.
 * Throws `std::invalid_argument` on empty or single-class data, or feature indices outside `dim`.
 */
inline LinearModel train_linear(const std::vector<SparseExample>& examples, std::size_t dim, const TrainConfig& config, TrainingLog* log = nullptr) {
    config.validate();
    std::vector<ClassLabel> labels;
    for (const auto& e : examples) {
        labels.push_back(e.label);
        for (const auto& f : e.features) {
            if (f.first >= dim) {
                throw std::invalid_argument("feature index out of range");
            }
        }
    }
    check_training_labels(labels);
    auto weights = example_weights(examples, config);

    LinearModel model(dim);
    auto& W = model.weights();
    auto& b = model.bias();
    std::vector<double> grad(W.size());
    std::vector<std::size_t> order(examples.size());
    std::iota(order.begin(), order.end(), 0);
    Rng rng(derive_seed(config.seed, "unigram"));
    const std::size_t batch = (config.batch_size == 0 || config.batch_size > examples.size()) ? examples.size() : config.batch_size;

    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        if (batch < examples.size()) {
            shuffle(order, rng);
        }
        for (std::size_t start = 0; start < order.size(); start += batch) {
            std::size_t end = std::min(order.size(), start + batch);
            std::fill(grad.begin(), grad.end(), 0.0);
            std::array<double, num_classes> gb{};
            const double scale = 1.0 / static_cast<double>(end - start);
            for (std::size_t k = start; k < end; ++k) {
                const auto& ex = examples[order[k]];
                auto p = model.predict(ex.features).probabilities;
                for (std::size_t c = 0; c < num_classes; ++c) {
                    double delta = weights[order[k]] * scale * (p[c] - (class_index(ex.label) == c ? 1.0 : 0.0));
                    gb[c] += delta;
                    for (const auto& [j, v] : ex.features) {
                        grad[c * dim + j] += delta * v;
                    }
                }
            }
            for (std::size_t i = 0; i < W.size(); ++i) {
                W[i] -= config.learning_rate * (grad[i] + config.l2_strength * W[i]);
            }
            for (std::size_t c = 0; c < num_classes; ++c) {
                b[c] -= config.learning_rate * gb[c];
            }
        }
        if (log) {
            log->loss.push_back(weighted_loss(model, examples, weights, config.l2_strength));
        }
    }
    return model;
}

/** Vocabulary, stopwords and a linear model over unigram counts. */
class UnigramModel {
public:
    UnigramModel() = default;

    UnigramModel(Vocabulary vocab, WordSet stopwords, LinearModel linear, std::size_t max_tweets = 200) :
        my_vocab(std::move(vocab)), my_stopwords(std::move(stopwords)), my_linear(std::move(linear)), my_max_tweets(max_tweets)
    {
        if (my_linear.dim() != my_vocab.size()) {
            throw std::invalid_argument("linear model width does not match the vocabulary");
        }
    }

    SparseVector featurize(const UserRecord& user, const Tokenizer& tokenizer = Tokenizer()) const {
        return featurize_user(user, my_vocab, tokenizer, my_max_tweets);
    }

    Prediction predict(const SparseVector& features) const {
        return my_linear.predict(features);
    }

    Prediction predict(const UserRecord& user, const Tokenizer& tokenizer = Tokenizer()) const {
        return predict(featurize(user, tokenizer));
    }

    const Vocabulary& vocab() const {
        return my_vocab;
    }

    const WordSet& stopwords() const {
        return my_stopwords;
    }

    const LinearModel& linear() const {
        return my_linear;
    }

    std::size_t max_tweets() const {
        return my_max_tweets;
    }

private:
    Vocabulary my_vocab;
    WordSet my_stopwords;
    LinearModel my_linear;
    std::size_t my_max_tweets = 200;
};

/** Build the vocabulary on `dev_users`, featurize the training users and fit the linear model. */
inline UnigramModel train_unigram(
    const std::vector<UserRecord>& train_users,
    const std::vector<ClassLabel>& labels,
    const std::vector<Source>& sources,
    const std::vector<UserRecord>& dev_users,
    const WordSet& stopwords,
    const TrainConfig& config,
    std::size_t min_count = 2,
    const Tokenizer& tokenizer = Tokenizer(),
    TrainingLog* log = nullptr)
{
    if (train_users.size() != labels.size() || labels.size() != sources.size()) {
        throw std::invalid_argument("training users, labels and sources differ in length");
    }
    auto vocab = build_vocab(dev_users, min_count, stopwords, tokenizer);
    std::vector<SparseExample> examples;
    for (std::size_t i = 0; i < train_users.size(); ++i) {
        examples.push_back(SparseExample{featurize_user(train_users[i], vocab, tokenizer), labels[i], sources[i]});
    }
    auto linear = train_linear(examples, vocab.size(), config, log);
    return UnigramModel(std::move(vocab), stopwords, std::move(linear));
}

inline nlohmann::json linear_to_json(const LinearModel& m) {
    return nlohmann::json{{"dim", m.dim()}, {"weights", m.weights()}, {"bias", m.bias()}};
}

inline LinearModel linear_from_json(const nlohmann::json& j) {
    LinearModel m(j.at("dim").get<std::size_t>());
    auto w = j.at("weights").get<std::vector<double> >();
    if (w.size() != m.weights().size()) {
        throw DataError("linear model weights have the wrong size");
    }
    m.weights() = std::move(w);
    m.bias() = j.at("bias").get<std::array<double, num_classes> >();
    return m;
}

inline nlohmann::json save_unigram(const UnigramModel& m) {
    auto j = internal::model_header("unigram");
    j["vocab"] = m.vocab().words();
    j["stopwords"] = std::vector<std::string>(m.stopwords().begin(), m.stopwords().end());
    j["max_tweets"] = m.max_tweets();
    j["linear"] = linear_to_json(m.linear());
    return j;
}

inline UnigramModel load_unigram(const nlohmann::json& j) {
    internal::check_model_header(j, "unigram");
    try {
        auto words = j.at("vocab").get<std::vector<std::string> >();
        auto stop = j.at("stopwords").get<std::vector<std::string> >();
        return UnigramModel(Vocabulary(std::move(words)), WordSet(stop.begin(), stop.end()), linear_from_json(j.at("linear")), j.at("max_tweets").get<std::size_t>());
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed unigram model: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw DataError(std::string("malformed unigram model: ") + e.what());
    }
}

/** TSV `user_id<TAB>v_1<TAB>...<TAB>v_dim` of externally computed user embeddings. */
inline std::map<std::string, std::vector<double> > read_embeddings(std::istream& in, std::size_t dim = 768) {
    std::map<std::string, std::vector<double> > out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (internal::trim(line).empty()) {
            continue;
        }
        auto fields = internal::split(line, '\t');
        auto where = "embedding line " + std::to_string(line_no);
        if (fields.size() != dim + 1) {
            throw DataError(where + " has " + std::to_string(fields.size() - 1) + " values, expected " + std::to_string(dim));
        }
        std::vector<double> values;
        values.reserve(dim);
        for (std::size_t i = 1; i < fields.size(); ++i) {
            auto v = parse_double(internal::trim(fields[i]));
            if (!v || !std::isfinite(*v)) {
                throw DataError(where + " has a non-numeric value");
            }
            values.push_back(*v);
        }
        if (!out.emplace(std::string(fields[0]), std::move(values)).second) {
            throw DataError(where + " repeats user '" + std::string(fields[0]) + "'");
        }
    }
    return out;
}

inline std::map<std::string, std::vector<double> > load_embeddings(const std::string& path, std::size_t dim = 768) {
    auto in = internal::open_input(path);
    return read_embeddings(in, dim);
}

/** Linear model over external embeddings, stored as kind "embedding". */
inline nlohmann::json save_embedding_model(const LinearModel& m) {
    auto j = internal::model_header("embedding");
    j["linear"] = linear_to_json(m);
    return j;
}

inline LinearModel load_embedding_model(const nlohmann::json& j) {
    internal::check_model_header(j, "embedding");
    try {
        return linear_from_json(j.at("linear"));
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed embedding model: ") + e.what());
    }
}

}

#endif
