#ifndef IDENTMINER_DATASETS_HPP
#define IDENTMINER_DATASETS_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"

#include "core.hpp"
#include "filters.hpp"
#include "ingest.hpp"
#include "parallel.hpp"
#include "resources.hpp"
#include "scorer.hpp"
#include "textprep.hpp"

/**
 * @file datasets.hpp
 * @brief Building the QB, HF and CB datasets, merging with labeled sets, and train/dev splits.
 */

namespace identminer {

enum class Source : std::uint8_t {
    QB,
    HF,
    CB,
    crowd,
    survey
};

inline std::string_view to_string(Source s) {
    switch (s) {
        case Source::QB: return "QB";
        case Source::HF: return "HF";
        case Source::CB: return "CB";
        case Source::crowd: return "crowd";
        case Source::survey: return "survey";
    }
    return "?";
}

inline std::optional<Source> parse_source(std::string_view s) {
    for (auto src : {Source::QB, Source::HF, Source::CB, Source::crowd, Source::survey}) {
        if (internal::ascii_lower(s) == internal::ascii_lower(to_string(src))) {
            return src;
        }
    }
    return std::nullopt;
}

/** Sources produced by the self-report pipeline rather than by annotators. */
inline bool is_self_report_source(Source s) {
    return s == Source::QB || s == Source::HF || s == Source::CB;
}

struct LabeledUser {
    std::string user_id;
    ClassLabel label = ClassLabel::White;
    std::optional<double> score;
    Source source = Source::HF;

    bool operator==(const LabeledUser&) const = default;
};

/** Everything the description pipeline needs. */
struct TextResources {
    Tokenizer tokenizer;
    TagLexicon tags;
    QueryMap queries = default_query_map();
    QueryOptions query_options;
    FilterResources filters;
    WordSet person_keywords = default_person_keywords();
    CandidateOptions candidate_options;

    /**
     * Load the shipped lists from `dir`: `tag_lexicon.tsv`, `contractions.txt`, `query_keywords.tsv`,
     * `colors.txt`, `blocklist.txt` and `person_keywords.txt`.
     */
    static TextResources load(const std::string& dir) {
        TextResources res;
        res.tokenizer = Tokenizer(load_word_set(dir + "/contractions.txt"));
        res.tags = TagLexicon::load(dir + "/tag_lexicon.tsv");
        res.queries = load_query_map(dir + "/query_keywords.tsv");
        res.filters.colors = load_word_set(dir + "/colors.txt");
        res.filters.blocklist = load_bigram_set(dir + "/blocklist.txt");
        res.person_keywords = load_word_set(dir + "/person_keywords.txt");
        return res;
    }
};

/** A tagged description with its query matches and class assignment. */
struct ProfileAnalysis {
    std::string user_id;
    std::string description;
    std::vector<TaggedToken> tagged;
    std::vector<QueryMatch> matches;
    ClassAssignment assignment;
};

inline ProfileAnalysis analyze_profile(std::string user_id, std::string description, const TextResources& res) {
    ProfileAnalysis out;
    out.user_id = std::move(user_id);
    out.description = std::move(description);
    out.tagged = pos_tag(res.tokenizer(out.description), res.tags);
    out.matches = find_query_matches(out.tagged, res.queries, res.query_options);
    out.assignment = assign_class(out.matches);
    return out;
}

/** Analyze every user in input order. */
inline std::vector<ProfileAnalysis> analyze_profiles(const std::vector<UserRecord>& users, const TextResources& res, std::size_t workers = 1) {
    return parallel_map(users, workers, [&](const UserRecord& u) {
        return analyze_profile(u.user_id, u.description, res);
    });
}

/**
 * Users with an unambiguous class and at least one query keyword followed by a person keyword.
 * Scores are recorded for later CB ranking: the maximum over all matches, or 0 with an empty lexicon.
 */
inline std::vector<LabeledUser> build_qb(const std::vector<ProfileAnalysis>& profiles, const TextResources& res, const SelfReportLexicon& lexicon, const ScoreParams& params) {
    std::vector<LabeledUser> out;
    for (const auto& p : profiles) {
        if (!p.assignment.unique()) {
            continue;
        }
        bool hit = std::any_of(p.matches.begin(), p.matches.end(), [&](const QueryMatch& m) {
            return person_bigram_match(p.tagged, m, res.person_keywords);
        });
        if (!hit) {
            continue;
        }
        double score = lexicon.empty() ? 0.0 : max_score(p.tagged, p.matches, lexicon, params).value_or(0.0);
        out.push_back(LabeledUser{p.user_id, *p.assignment.label, score, Source::QB});
    }
    return out;
}

/** Per-user outcome of the filter stage. */
struct FilterDecision {
    bool eligible = false;
    std::vector<FilterOutcome> outcomes;

    bool passed() const {
        return eligible && std::any_of(outcomes.begin(), outcomes.end(), [](const FilterOutcome& o) { return o.passed; });
    }
};

inline FilterDecision decide_filters(const ProfileAnalysis& p, const FilterConfig& config, const FilterResources& res) {
    FilterDecision out;
    out.eligible = p.assignment.unique();
    if (!out.eligible) {
        return out;
    }
    for (const auto& m : p.matches) {
        out.outcomes.push_back(apply_filter_chain(p.tagged, p.description, m, config, res));
    }
    return out;
}

namespace internal {

inline std::optional<double> passing_score(const ProfileAnalysis& p, const FilterDecision& d, const SelfReportLexicon& lexicon, const ScoreParams& params) {
    std::optional<double> best;
    for (std::size_t i = 0; i < p.matches.size(); ++i) {
        if (d.outcomes[i].passed) {
            double v = score_description(p.tagged, p.matches[i], lexicon, params).value;
            if (!best || v > *best) {
                best = v;
            }
        }
    }
    return best;
}

}

/**
 * Users with an unambiguous class, at least one match passing every enabled filter,
 * and a maximum score over passing matches at or above the threshold.
 */
inline std::vector<LabeledUser> build_hf(const std::vector<ProfileAnalysis>& profiles, const TextResources& res, const SelfReportLexicon& lexicon, const ScoreParams& params, const FilterConfig& config) {
    std::vector<LabeledUser> out;
    for (const auto& p : profiles) {
        auto d = decide_filters(p, config, res.filters);
        if (!d.passed()) {
            continue;
        }
        auto score = internal::passing_score(p, d, lexicon, params);
        if (score && *score >= params.threshold) {
            out.push_back(LabeledUser{p.user_id, *p.assignment.label, *score, Source::HF});
        }
    }
    return out;
}

/**
 * Filter removal accounting over users with an unambiguous class.
 * `removed_individually[f]` counts users all of whose matches filter f alone rejects (0 for disabled filters);
 * `removed_combined` uses all enabled filters together, and `attributed` splits it by the filter that rejected
 * each removed user's first match.
 */
struct FilterAccounting {
    FilterConfig config;
    std::size_t candidates = 0;
    std::array<std::size_t, 4> removed_individually{};
    std::size_t removed_combined = 0;
    std::array<std::size_t, 4> attributed{};
    std::size_t passed = 0;

    /** Precision of the pass sets over the labeled users among the candidates, when labels are given. */
    std::size_t labeled = 0;
    std::optional<double> precision_raw;
    std::array<std::optional<double>, 4> precision_individual;
    std::optional<double> precision_combined;
};

inline FilterAccounting account_filters(
    const std::vector<ProfileAnalysis>& profiles,
    const TextResources& res,
    const FilterConfig& config,
    const std::map<std::string, bool>* labels = nullptr)
{
    FilterAccounting out;
    out.config = config;
    struct Tally {
        std::size_t tp = 0, n = 0;
        void add(bool yes) {
            ++n;
            tp += yes;
        }
        std::optional<double> value() const {
            return n ? std::optional<double>(static_cast<double>(tp) / static_cast<double>(n)) : std::nullopt;
        }
    };
    Tally raw, combined;
    std::array<Tally, 4> individual;

    for (const auto& p : profiles) {
        if (!p.assignment.unique()) {
            continue;
        }
        ++out.candidates;
        std::optional<bool> label;
        if (labels) {
            auto it = labels->find(p.user_id);
            if (it != labels->end()) {
                label = it->second;
                ++out.labeled;
                raw.add(*label);
            }
        }

        for (std::size_t f = 0; f < filter_order.size(); ++f) {
            if (!config.enabled(filter_order[f])) {
                continue;
            }
            auto d = decide_filters(p, FilterConfig::only(filter_order[f]), res.filters);
            if (!d.passed()) {
                ++out.removed_individually[f];
            } else if (label) {
                individual[f].add(*label);
            }
        }

        auto d = decide_filters(p, config, res.filters);
        if (d.passed()) {
            ++out.passed;
            if (label) {
                combined.add(*label);
            }
        } else {
            ++out.removed_combined;
            ++out.attributed[static_cast<std::size_t>(*d.outcomes.front().rejecting_filter)];
        }
    }

    if (labels) {
        out.precision_raw = raw.value();
        for (std::size_t f = 0; f < 4; ++f) {
            if (config.enabled(filter_order[f])) {
                out.precision_individual[f] = individual[f].value();
            }
        }
        out.precision_combined = combined.value();
    }
    return out;
}

inline void to_json(nlohmann::json& j, const FilterAccounting& a) {
    auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
    nlohmann::json filters = nlohmann::json::object();
    for (std::size_t f = 0; f < 4; ++f) {
        auto kind = filter_order[f];
        filters[std::string(to_string(kind))] = {
            {"enabled", a.config.enabled(kind)},
            {"removed", a.removed_individually[f]},
            {"attributed", a.attributed[f]},
            {"precision", opt(a.precision_individual[f])}
        };
    }
    j = nlohmann::json{
        {"candidates", a.candidates},
        {"filters", filters},
        {"removed_combined", a.removed_combined},
        {"passed", a.passed},
        {"labeled", a.labeled},
        {"precision_raw", opt(a.precision_raw)},
        {"precision_combined", opt(a.precision_combined)}
    };
}

/** Aligned text table with one column per filter plus the combined column. */
inline std::string format_accounting_table(const FilterAccounting& a) {
    auto cell = [](const std::string& s) {
        std::string out(std::max<std::size_t>(10, s.size() + 2) - s.size(), ' ');
        return out + s;
    };
    auto pct = [](const std::optional<double>& v) {
        if (!v) {
            return std::string("-");
        }
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.3f", *v);
        return std::string(buf);
    };
    std::string out = "                 ";
    out += cell("raw");
    for (auto kind : filter_order) {
        out += cell(std::string(to_string(kind)));
    }
    out += cell("all") + "\n";

    out += "removed          " + cell("0");
    for (std::size_t f = 0; f < 4; ++f) {
        out += cell(a.config.enabled(filter_order[f]) ? std::to_string(a.removed_individually[f]) : "-");
    }
    out += cell(std::to_string(a.removed_combined)) + "\n";

    out += "remaining        " + cell(std::to_string(a.candidates));
    for (std::size_t f = 0; f < 4; ++f) {
        out += cell(a.config.enabled(filter_order[f]) ? std::to_string(a.candidates - a.removed_individually[f]) : "-");
    }
    out += cell(std::to_string(a.passed)) + "\n";

    out += "precision        " + cell(pct(a.precision_raw));
    for (std::size_t f = 0; f < 4; ++f) {
        out += cell(pct(a.precision_individual[f]));
    }
    out += cell(pct(a.precision_combined)) + "\n";
    return out;
}

namespace internal {

inline bool ranks_before(const LabeledUser& a, const LabeledUser& b) {
    if (*a.score != *b.score) {
        return *a.score > *b.score;
    }
    return a.user_id < b.user_id;
}

}

/**
 * Keeps the best `k` users seen so far under (score descending, user_id ascending).
 * Partial heaps from separate workers merge into the same result as a single pass.
 */
class TopK {
public:
    explicit TopK(std::size_t k) : my_k(k) {}

    void push(LabeledUser user) {
        if (my_k == 0) {
            return;
        }
        if (my_heap.size() < my_k) {
            my_heap.push_back(std::move(user));
            std::push_heap(my_heap.begin(), my_heap.end(), internal::ranks_before);
        } else if (internal::ranks_before(user, my_heap.front())) {
            std::pop_heap(my_heap.begin(), my_heap.end(), internal::ranks_before);
            my_heap.back() = std::move(user);
            std::push_heap(my_heap.begin(), my_heap.end(), internal::ranks_before);
        }
    }

    void merge(const TopK& other) {
        for (const auto& u : other.my_heap) {
            push(u);
        }
    }

    /** Members in rank order. */
    std::vector<LabeledUser> sorted() const {
        auto out = my_heap;
        std::sort(out.begin(), out.end(), internal::ranks_before);
        return out;
    }

private:
    std::size_t my_k;
    std::vector<LabeledUser> my_heap;
};

/**
 * Deduplicate by user_id, keeping the higher score; on equal scores the earlier entry stays.
 * Throws `std::invalid_argument` for unscored users.
 */
inline std::vector<LabeledUser> pool_candidates(const std::vector<LabeledUser>& first, const std::vector<LabeledUser>& second = {}) {
    std::vector<LabeledUser> out;
    std::unordered_map<std::string, std::size_t> where;
    for (const auto* list : {&first, &second}) {
        for (const auto& u : *list) {
            if (!u.score) {
                throw std::invalid_argument("candidate '" + u.user_id + "' has no score");
            }
            auto it = where.find(u.user_id);
            if (it == where.end()) {
                where.emplace(u.user_id, out.size());
                out.push_back(u);
            } else if (*u.score > *out[it->second].score) {
                out[it->second] = u;
            }
        }
    }
    return out;
}

/**
 * The top `k` users of each class by score (ties by user_id); `k` defaults to the smallest class count and
 * may not exceed it. Candidates are deduplicated first. Output is grouped by class in fixed class order,
 * each group in rank order, with source CB.
 */
inline std::vector<LabeledUser> build_cb(const std::vector<LabeledUser>& candidates, std::optional<std::size_t> k = std::nullopt) {
    auto pool = pool_candidates(candidates);
    std::array<std::size_t, num_classes> counts{};
    for (const auto& u : pool) {
        ++counts[class_index(u.label)];
    }
    std::size_t min_count = *std::min_element(counts.begin(), counts.end());
    std::size_t take = k.value_or(min_count);
    if (take > min_count) {
        throw std::invalid_argument("k = " + std::to_string(take) + " exceeds the smallest class count " + std::to_string(min_count));
    }

    std::vector<TopK> heaps(num_classes, TopK(take));
    for (const auto& u : pool) {
        heaps[class_index(u.label)].push(u);
    }
    std::vector<LabeledUser> out;
    out.reserve(take * num_classes);
    for (auto& h : heaps) {
        for (auto& u : h.sorted()) {
            u.source = Source::CB;
            out.push_back(std::move(u));
        }
    }
    return out;
}

inline std::array<std::size_t, num_classes> class_counts(const std::vector<LabeledUser>& users) {
    std::array<std::size_t, num_classes> out{};
    for (const auto& u : users) {
        ++out[class_index(u.label)];
    }
    return out;
}

struct DatasetSplit {
    std::vector<LabeledUser> train;
    std::vector<LabeledUser> dev;
    std::vector<LabeledUser> test;
    std::uint64_t seed = 0;
    double train_fraction = 0.6;
    bool stratified = false;
};

namespace internal {

inline std::size_t train_size(std::size_t n, double fraction) {
    // Guard against 0.6 * n landing a hair above an integer.
    return std::min(n, static_cast<std::size_t>(std::ceil(static_cast<double>(n) * fraction - 1e-9)));
}

}

/**
 * Seeded shuffle, then the first `ceil(train_fraction * n)` users go to train and the rest to dev.
 * With `stratified`, the rule is applied within each class and the parts are concatenated in class order.
 * Throws `std::invalid_argument` on duplicate user ids or a fraction outside [0, 1].
 */
inline DatasetSplit split_train_dev(const std::vector<LabeledUser>& users, double train_fraction, std::uint64_t seed, bool stratified = false) {
    if (!(train_fraction >= 0.0 && train_fraction <= 1.0)) {
        throw std::invalid_argument("train fraction must lie in [0, 1]");
    }
    std::set<std::string> ids;
    for (const auto& u : users) {
        if (!ids.insert(u.user_id).second) {
            throw std::invalid_argument("duplicate user id '" + u.user_id + "' in split input");
        }
    }

    DatasetSplit out;
    out.seed = seed;
    out.train_fraction = train_fraction;
    out.stratified = stratified;
    Rng rng(derive_seed(seed, "split"));

    auto place = [&](std::vector<LabeledUser> group) {
        shuffle(group, rng);
        std::size_t cut = internal::train_size(group.size(), train_fraction);
        out.train.insert(out.train.end(), group.begin(), group.begin() + static_cast<std::ptrdiff_t>(cut));
        out.dev.insert(out.dev.end(), group.begin() + static_cast<std::ptrdiff_t>(cut), group.end());
    };

    if (stratified) {
        std::array<std::vector<LabeledUser>, num_classes> by_class;
        for (const auto& u : users) {
            by_class[class_index(u.label)].push_back(u);
        }
        for (auto& g : by_class) {
            place(std::move(g));
        }
    } else {
        place(users);
    }
    return out;
}

/**
 * Seeded subsample with `m` users per class, `m` the smallest class count. Works for any element type with a
 * `label` member. Output is grouped by class in fixed class order.
 */
template<typename Item_>
std::vector<Item_> balance_subsample(const std::vector<Item_>& items, std::uint64_t seed) {
    std::array<std::vector<std::size_t>, num_classes> by_class;
    for (std::size_t i = 0; i < items.size(); ++i) {
        by_class[class_index(items[i].label)].push_back(i);
    }
    std::size_t m = items.size();
    for (const auto& g : by_class) {
        m = std::min(m, g.size());
    }

    Rng rng(derive_seed(seed, "balance"));
    std::vector<Item_> out;
    out.reserve(m * num_classes);
    for (auto& g : by_class) {
        shuffle(g, rng);
        for (std::size_t i = 0; i < m; ++i) {
            out.push_back(items[g[i]]);
        }
    }
    return out;
}

/**
 * Concatenate `a` then `b`. On a user_id collision one entry remains at its first position: an annotated
 * (crowd or survey) entry wins over a self-report one, otherwise the earlier entry is kept.
 */
inline std::vector<LabeledUser> merge(const std::vector<LabeledUser>& a, const std::vector<LabeledUser>& b) {
    std::vector<LabeledUser> out;
    std::unordered_map<std::string, std::size_t> where;
    for (const auto* list : {&a, &b}) {
        for (const auto& u : *list) {
            auto it = where.find(u.user_id);
            if (it == where.end()) {
                where.emplace(u.user_id, out.size());
                out.push_back(u);
            } else if (is_self_report_source(out[it->second].source) && !is_self_report_source(u.source)) {
                out[it->second] = u;
            }
        }
    }
    return out;
}

/** TSV `user_id<TAB>label<TAB>score<TAB>source`; an empty score field means no score. */
inline void write_labeled_users(std::ostream& out, const std::vector<LabeledUser>& users) {
    for (const auto& u : users) {
        out << u.user_id << '\t' << to_string(u.label) << '\t' << (u.score ? format_double(*u.score) : "") << '\t' << to_string(u.source) << '\n';
    }
}

inline std::vector<LabeledUser> read_labeled_users(std::istream& in) {
    std::vector<LabeledUser> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (internal::trim(line).empty() || line.front() == '#') {
            continue;
        }
        auto fields = internal::split(line, '\t');
        auto where = "dataset line " + std::to_string(line_no);
        if (fields.size() != 4) {
            throw DataError(where + " does not have 4 fields");
        }
        LabeledUser u;
        u.user_id = std::string(fields[0]);
        if (u.user_id.empty()) {
            throw DataError(where + " has an empty user id");
        }
        auto label = parse_class_label(fields[1]);
        if (!label) {
            throw DataError(where + " has unknown label '" + std::string(fields[1]) + "'");
        }
        u.label = *label;
        if (!fields[2].empty()) {
            u.score = parse_double(fields[2]);
            if (!u.score) {
                throw DataError(where + " has a non-numeric score");
            }
        }
        auto src = parse_source(fields[3]);
        if (!src) {
            throw DataError(where + " has unknown source '" + std::string(fields[3]) + "'");
        }
        u.source = *src;
        out.push_back(std::move(u));
    }
    return out;
}

inline std::vector<LabeledUser> load_labeled_users(const std::string& path) {
    auto in = internal::open_input(path);
    return read_labeled_users(in);
}

inline nlohmann::json split_manifest(const DatasetSplit& split) {
    auto ids = [](const std::vector<LabeledUser>& users) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& u : users) {
            arr.push_back(u.user_id);
        }
        return arr;
    };
    return nlohmann::json{
        {"seed", split.seed},
        {"train_fraction", split.train_fraction},
        {"stratified", split.stratified},
        {"train", ids(split.train)},
        {"dev", ids(split.dev)},
        {"test", ids(split.test)}
    };
}

}

#endif
