#ifndef IDENTMINER_SCORER_HPP
#define IDENTMINER_SCORER_HPP

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "json.hpp"

#include "filters.hpp"
#include "textprep.hpp"

/**
 * @file scorer.hpp
 * @brief Distance-weighted co-occurrence score for self-reports, and grid tuning of its parameters.
 */

namespace identminer {

enum class Weighting : std::uint8_t {
    simple,
    tfidf
};

inline std::string_view to_string(Weighting w) {
    return w == Weighting::simple ? "simple" : "tfidf";
}

inline Weighting parse_weighting(std::string_view s) {
    if (s == "simple") {
        return Weighting::simple;
    }
    if (s == "tfidf") {
        return Weighting::tfidf;
    }
    throw std::invalid_argument("unknown weighting '" + std::string(s) + "'");
}

struct ScoreParams {
    /** Radius in words on each side of the query. */
    std::size_t window = 5;
    double threshold = 0.35;
    Weighting weighting = Weighting::simple;

    void validate() const {
        if (window < 1) {
            throw std::invalid_argument("score window must be at least 1");
        }
        if (!(threshold >= 0.0 && threshold <= 1.0)) {
            throw std::invalid_argument("score threshold must lie in [0, 1]");
        }
    }

    bool operator==(const ScoreParams&) const = default;
};

inline void to_json(nlohmann::json& j, const ScoreParams& p) {
    j = nlohmann::json{{"window", p.window}, {"threshold", p.threshold}, {"weighting", to_string(p.weighting)}};
}

inline void from_json(const nlohmann::json& j, ScoreParams& p) {
    p = ScoreParams{};
    if (j.contains("window")) {
        p.window = j.at("window").get<std::size_t>();
    }
    if (j.contains("threshold")) {
        p.threshold = j.at("threshold").get<double>();
    }
    if (j.contains("weighting")) {
        p.weighting = parse_weighting(j.at("weighting").get<std::string>());
    }
    p.validate();
}

struct ScoreTerm {
    std::string word;
    std::size_t token_index = 0;
    std::size_t distance = 0;
    double value = 0;
};

struct SelfReportScore {
    double value = 0;
    QueryMatch query;
    std::vector<ScoreTerm> contributing;
};

/**
 * Score one query occurrence.
 *
 * Every word token within `params.window` words of the query (either side, query tokens excluded) that is in the
 * self-report set contributes `(1/D) * O_s(w)/O(w)`, times `log(sum_S O_s / O_s(w))` under tf-idf weighting. D counts
 * word tokens only, so the adjacent word has D = 1 and punctuation, mentions and emoji are skipped. Terms are summed
 * in token order.
 */
inline SelfReportScore score_description(const std::vector<TaggedToken>& tagged, const QueryMatch& match, const SelfReportLexicon& lexicon, const ScoreParams& params) {
    if (lexicon.empty()) {
        throw std::invalid_argument("self-report lexicon is empty");
    }
    params.validate();

    // Word ordinal of every token; non-word tokens inherit nothing and are skipped.
    std::vector<std::ptrdiff_t> ordinal(tagged.size(), -1);
    std::ptrdiff_t count = 0;
    for (std::size_t i = 0; i < tagged.size(); ++i) {
        if (tagged[i].kind() == TokenKind::word) {
            ordinal[i] = count++;
        }
    }
    const auto q_first = ordinal.at(match.token_index);
    const auto q_last = ordinal.at(match.last_index());
    if (q_first < 0 || q_last < 0) {
        throw std::invalid_argument("query match does not point at word tokens");
    }

    const double total = static_cast<double>(lexicon.total_self_reports());
    SelfReportScore out;
    out.query = match;
    for (std::size_t i = 0; i < tagged.size(); ++i) {
        if (ordinal[i] < 0 || (i >= match.token_index && i <= match.last_index())) {
            continue;
        }
        std::ptrdiff_t d = (ordinal[i] < q_first) ? q_first - ordinal[i] : ordinal[i] - q_last;
        if (d < 1 || static_cast<std::size_t>(d) > params.window) {
            continue;
        }
        auto entry = lexicon.find(tagged[i].text());
        if (!entry) {
            continue;
        }
        double term = (1.0 / static_cast<double>(d)) * (static_cast<double>(entry->self_reports) / static_cast<double>(entry->occurrences));
        if (params.weighting == Weighting::tfidf) {
            term *= std::log(total / static_cast<double>(entry->self_reports));
        }
        out.value += term;
        out.contributing.push_back(ScoreTerm{tagged[i].text(), i, static_cast<std::size_t>(d), term});
    }
    return out;
}

/** Maximum score over several matches in one description; `std::nullopt` without matches. */
inline std::optional<double> max_score(const std::vector<TaggedToken>& tagged, const std::vector<QueryMatch>& matches, const SelfReportLexicon& lexicon, const ScoreParams& params) {
    std::optional<double> best;
    for (const auto& m : matches) {
        double v = score_description(tagged, m, lexicon, params).value;
        if (!best || v > *best) {
            best = v;
        }
    }
    return best;
}

struct ScoredUser {
    std::string user_id;
    double score = 0;
};

/** Keep users whose (maximum) score reaches the threshold; the comparison is inclusive. */
inline std::vector<ScoredUser> threshold_users(const std::vector<ScoredUser>& users, const ScoreParams& params) {
    std::vector<ScoredUser> out;
    for (const auto& u : users) {
        if (u.score >= params.threshold) {
            out.push_back(u);
        }
    }
    return out;
}

struct TuningItem {
    std::string user_id;
    std::vector<TaggedToken> tagged;
    std::vector<QueryMatch> matches;
    bool self_report = false;
};

struct TuningResult {
    ScoreParams params;
    std::size_t true_positives = 0;
    std::size_t false_positives = 0;
    std::size_t false_negatives = 0;

    double precision() const {
        return static_cast<double>(true_positives) / static_cast<double>(true_positives + false_positives);
    }

    double recall() const {
        auto pos = true_positives + false_negatives;
        return pos ? static_cast<double>(true_positives) / static_cast<double>(pos) : 0.0;
    }
};

/** Window 1..10, threshold 0.05..0.95 in steps of 0.05, both weightings. */
inline std::vector<ScoreParams> default_grid() {
    std::vector<ScoreParams> grid;
    for (auto weighting : {Weighting::simple, Weighting::tfidf}) {
        for (std::size_t window = 1; window <= 10; ++window) {
            for (int step = 1; step <= 19; ++step) {
                grid.push_back(ScoreParams{window, step / 20.0, weighting});
            }
        }
    }
    return grid;
}

namespace internal {

// Strict "a is better than b": precision, then recall, then smaller window, lower threshold, simple weighting.
inline bool better_tuning(const TuningResult& a, const TuningResult& b) {
    // Exact rational comparison of tp / (tp + fp).
    auto lhs = static_cast<unsigned long long>(a.true_positives) * (b.true_positives + b.false_positives);
    auto rhs = static_cast<unsigned long long>(b.true_positives) * (a.true_positives + a.false_positives);
    if (lhs != rhs) {
        return lhs > rhs;
    }
    if (a.true_positives != b.true_positives) {
        return a.true_positives > b.true_positives;
    }
    return std::make_tuple(a.params.window, a.params.threshold, static_cast<int>(a.params.weighting)) <
        std::make_tuple(b.params.window, b.params.threshold, static_cast<int>(b.params.weighting));
}

}

/**
 * Pick the grid point whose predictions `score >= threshold` have the highest precision on the tuning set.
 * An item's score is its maximum over its matches, or 0 without matches.
 * Throws `std::invalid_argument` unless the set holds both labels, and when no grid point predicts any positive.
 */
inline TuningResult tune_params(const std::vector<TuningItem>& items, const SelfReportLexicon& lexicon, const std::vector<ScoreParams>& grid) {
    std::size_t positives = 0;
    for (const auto& it : items) {
        positives += it.self_report;
    }
    if (positives == 0 || positives == items.size()) {
        throw std::invalid_argument("tuning set needs at least one positive and one negative item");
    }

    std::optional<TuningResult> best;
    std::vector<double> scores(items.size());
    std::optional<std::pair<std::size_t, Weighting> > cached;
    for (const auto& point : grid) {
        point.validate();
        if (!cached || cached->first != point.window || cached->second != point.weighting) {
            for (std::size_t i = 0; i < items.size(); ++i) {
                scores[i] = max_score(items[i].tagged, items[i].matches, lexicon, point).value_or(0.0);
            }
            cached = std::make_pair(point.window, point.weighting);
        }

        TuningResult res;
        res.params = point;
        for (std::size_t i = 0; i < items.size(); ++i) {
            bool predicted = scores[i] >= point.threshold;
            if (predicted && items[i].self_report) {
                ++res.true_positives;
            } else if (predicted) {
                ++res.false_positives;
            } else if (items[i].self_report) {
                ++res.false_negatives;
            }
        }
        if (res.true_positives + res.false_positives == 0) {
            continue;
        }
        if (!best || internal::better_tuning(res, *best)) {
            best = res;
        }
    }
    if (!best) {
        throw std::invalid_argument("no grid point yields a positive prediction");
    }
    return *best;
}

}

#endif
