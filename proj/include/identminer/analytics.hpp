#ifndef IDENTMINER_ANALYTICS_HPP
#define IDENTMINER_ANALYTICS_HPP

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <regex>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

#include "core.hpp"
#include "ingest.hpp"
#include "parallel.hpp"
#include "resources.hpp"
#include "stats.hpp"
#include "textprep.hpp"

/**
 * @file analytics.hpp
 * @brief Group-level lexical and behavioral statistics, ranked item lists and distinctive keywords.
 *
 * Groups are keyed by class label. Macro-averaged quantities average per-user values; micro-averaged ones pool
 * every tweet of the group.
 */

namespace identminer {

using GroupedUsers = std::map<ClassLabel, std::vector<UserRecord> >;

namespace internal {

inline std::vector<Token> lexical_tokens(const std::vector<Token>& tokens) {
    std::vector<Token> out;
    for (const auto& t : tokens) {
        if (t.kind != TokenKind::punct) {
            out.push_back(t);
        }
    }
    return out;
}

}

/** Distinct tokens over tokens; 0 for an empty tweet. Tokens compare by their lowercased text. */
inline double type_token_ratio(const std::vector<Token>& tokens) {
    if (tokens.empty()) {
        return 0;
    }
    std::set<std::string_view> distinct;
    for (const auto& t : tokens) {
        distinct.insert(t.text);
    }
    return static_cast<double>(distinct.size()) / static_cast<double>(tokens.size());
}

/** Tokens other than URLs, mentions and stopwords, over all tokens; 0 for an empty tweet. */
inline double lexical_diversity(const std::vector<Token>& tokens, const WordSet& stopwords) {
    if (tokens.empty()) {
        return 0;
    }
    std::size_t kept = 0;
    for (const auto& t : tokens) {
        if (t.kind != TokenKind::url && t.kind != TokenKind::mention && !stopwords.count(t.text)) {
            ++kept;
        }
    }
    return static_cast<double>(kept) / static_cast<double>(tokens.size());
}

struct LexicalStats {
    double lexical_diversity = 0;
    double contractions_per_tweet = 0;
    double type_token_ratio = 0;
    double hashtags_per_tweet = 0;
};

inline constexpr std::array<std::string_view, 4> lexical_feature_names{"lexical_diversity", "contractions_per_tweet", "type_token_ratio", "hashtags_per_tweet"};

inline std::array<double, 4> as_array(const LexicalStats& s) {
    return {s.lexical_diversity, s.contractions_per_tweet, s.type_token_ratio, s.hashtags_per_tweet};
}

/** Means over the user's tweets, punctuation excluded; nullopt for a user without tweets. */
inline std::optional<LexicalStats> user_lexical_stats(const UserRecord& user, const Tokenizer& tokenizer, const WordSet& stopwords) {
    if (user.tweets.empty()) {
        return std::nullopt;
    }
    LexicalStats s;
    for (const auto& tw : user.tweets) {
        auto tokens = internal::lexical_tokens(tokenizer(tw.text));
        s.type_token_ratio += type_token_ratio(tokens);
        s.lexical_diversity += lexical_diversity(tokens, stopwords);
        for (const auto& t : tokens) {
            s.contractions_per_tweet += t.kind == TokenKind::contraction;
            s.hashtags_per_tweet += t.kind == TokenKind::hashtag;
        }
    }
    const double n = static_cast<double>(user.tweets.size());
    s.type_token_ratio /= n;
    s.lexical_diversity /= n;
    s.contractions_per_tweet /= n;
    s.hashtags_per_tweet /= n;
    return s;
}

struct GroupLexicalStats {
    ClassLabel group = ClassLabel::White;
    /** Users with at least one tweet; the others do not enter the averages. */
    std::size_t users = 0;
    LexicalStats mean;
    /** Per-user values in input order, kept for significance tests. */
    std::vector<LexicalStats> per_user;
};

inline std::vector<GroupLexicalStats> group_lexical_stats(const GroupedUsers& groups, const Tokenizer& tokenizer, const WordSet& stopwords, std::size_t workers = 1) {
    std::vector<GroupLexicalStats> out;
    for (const auto& [label, users] : groups) {
        GroupLexicalStats g;
        g.group = label;
        auto stats = parallel_map(users, workers, [&](const UserRecord& u) { return user_lexical_stats(u, tokenizer, stopwords); });
        for (auto& s : stats) {
            if (s) {
                g.per_user.push_back(*s);
            }
        }
        g.users = g.per_user.size();
        if (g.users) {
            for (const auto& s : g.per_user) {
                g.mean.lexical_diversity += s.lexical_diversity;
                g.mean.contractions_per_tweet += s.contractions_per_tweet;
                g.mean.type_token_ratio += s.type_token_ratio;
                g.mean.hashtags_per_tweet += s.hashtags_per_tweet;
            }
            const double n = static_cast<double>(g.users);
            g.mean.lexical_diversity /= n;
            g.mean.contractions_per_tweet /= n;
            g.mean.type_token_ratio /= n;
            g.mean.hashtags_per_tweet /= n;
        }
        out.push_back(std::move(g));
    }
    return out;
}

struct PairwiseTest {
    std::string feature;
    ClassLabel a = ClassLabel::White;
    ClassLabel b = ClassLabel::White;
    /** nullopt when the test is undefined (an empty group or zero variance). */
    std::optional<MannWhitneyResult> result;
};

/** Mann-Whitney U on every feature for every pair of groups, in class order. */
inline std::vector<PairwiseTest> pairwise_lexical_tests(const std::vector<GroupLexicalStats>& groups) {
    std::vector<PairwiseTest> out;
    for (std::size_t f = 0; f < lexical_feature_names.size(); ++f) {
        for (std::size_t i = 0; i < groups.size(); ++i) {
            for (std::size_t j = i + 1; j < groups.size(); ++j) {
                PairwiseTest t;
                t.feature = std::string(lexical_feature_names[f]);
                t.a = groups[i].group;
                t.b = groups[j].group;
                std::vector<double> x, y;
                for (const auto& s : groups[i].per_user) {
                    x.push_back(as_array(s)[f]);
                }
                for (const auto& s : groups[j].per_user) {
                    y.push_back(as_array(s)[f]);
                }
                try {
                    t.result = mann_whitney_u(x, y);
                } catch (const std::invalid_argument&) {
                    t.result = std::nullopt;
                }
                out.push_back(std::move(t));
            }
        }
    }
    return out;
}

enum class Device : std::uint8_t { android, iphone, desktop, other };

/** Case-insensitive substring rules on the client string: android, then iphone/ios, then web/desktop/tweetdeck. */
inline Device classify_device(std::string_view source_app) {
    auto s = internal::ascii_lower(source_app);
    if (s.find("android") != std::string::npos) {
        return Device::android;
    }
    if (s.find("iphone") != std::string::npos || s.find("ios") != std::string::npos) {
        return Device::iphone;
    }
    if (s.find("web") != std::string::npos || s.find("desktop") != std::string::npos || s.find("tweetdeck") != std::string::npos) {
        return Device::desktop;
    }
    return Device::other;
}

inline constexpr double seconds_per_month = 30.436875 * 86400.0;

/** Statuses per month of account age at snapshot time; the age is at least one month. */
inline double tweets_per_month(const UserRecord& user) {
    double age = static_cast<double>((user.snapshot_time - user.profile.account_created_at).count());
    double months = std::max(1.0, age / seconds_per_month);
    return static_cast<double>(user.profile.statuses_count) / months;
}

struct BehavioralProfile {
    ClassLabel group = ClassLabel::White;
    std::size_t users = 0;
    std::size_t tweets = 0;
    double android_pct = 0;
    double iphone_pct = 0;
    double desktop_pct = 0;
    double profile_url_pct = 0;
    double custom_image_pct = 0;
    double geo_enabled_pct = 0;
    double geotagged_pct = 0;
    double avg_statuses = 0;
    double avg_tweets_per_month = 0;
    double mention_pct = 0;
    double image_pct = 0;
    double url_pct = 0;
};

inline BehavioralProfile behavioral_profile(ClassLabel label, const std::vector<UserRecord>& users) {
    BehavioralProfile p;
    p.group = label;
    p.users = users.size();
    double mention = 0, image = 0, url = 0;
    for (const auto& u : users) {
        bool android = false, iphone = false, desktop = false, geotagged = false;
        for (const auto& t : u.tweets) {
            switch (classify_device(t.source_app)) {
                case Device::android: android = true; break;
                case Device::iphone: iphone = true; break;
                case Device::desktop: desktop = true; break;
                case Device::other: break;
            }
            geotagged = geotagged || t.geotagged;
            mention += t.mentions_user;
            image += t.has_image;
            url += t.has_url;
        }
        p.tweets += u.tweets.size();
        p.android_pct += android;
        p.iphone_pct += iphone;
        p.desktop_pct += desktop;
        p.geotagged_pct += geotagged;
        p.profile_url_pct += u.profile.has_profile_url;
        p.custom_image_pct += u.profile.has_custom_image;
        p.geo_enabled_pct += u.profile.geo_enabled;
        p.avg_statuses += static_cast<double>(u.profile.statuses_count);
        p.avg_tweets_per_month += tweets_per_month(u);
    }
    if (p.users) {
        const double n = static_cast<double>(p.users);
        for (double* v : {&p.android_pct, &p.iphone_pct, &p.desktop_pct, &p.geotagged_pct, &p.profile_url_pct, &p.custom_image_pct, &p.geo_enabled_pct}) {
            *v = 100.0 * *v / n;
        }
        p.avg_statuses /= n;
        p.avg_tweets_per_month /= n;
    }
    if (p.tweets) {
        const double n = static_cast<double>(p.tweets);
        p.mention_pct = 100.0 * mention / n;
        p.image_pct = 100.0 * image / n;
        p.url_pct = 100.0 * url / n;
    }
    return p;
}

inline std::vector<BehavioralProfile> behavioral_profiles(const GroupedUsers& groups) {
    std::vector<BehavioralProfile> out;
    for (const auto& [label, users] : groups) {
        out.push_back(behavioral_profile(label, users));
    }
    return out;
}

/** Whole-chunk matcher for ASCII emoticons; each whitespace-separated chunk is tested against every pattern. */
class EmoticonMatcher {
public:
    EmoticonMatcher() : EmoticonMatcher(default_patterns()) {}

    explicit EmoticonMatcher(const std::vector<std::string>& patterns) {
        for (const auto& p : patterns) {
            try {
                my_patterns.emplace_back(p, std::regex::ECMAScript | std::regex::optimize);
            } catch (const std::regex_error& e) {
                throw DataError("invalid emoticon pattern '" + p + "': " + e.what());
            }
        }
    }

    /** One ECMAScript pattern per line; blank lines and lines starting with '#' are skipped. Case is preserved. */
    static EmoticonMatcher read(std::istream& in) {
        std::vector<std::string> patterns;
        std::string line;
        while (std::getline(in, line)) {
            auto t = internal::trim(line);
            if (!t.empty() && t.front() != '#') {
                patterns.emplace_back(t);
            }
        }
        return EmoticonMatcher(patterns);
    }

    static EmoticonMatcher load(const std::string& path) {
        auto in = internal::open_input(path);
        return read(in);
    }

    static std::vector<std::string> default_patterns() {
        return {
            R"([:=;8][-o^']?[)\]dDpP/\\|(\[*@oO3])",
            R"([)\](\[dDpP/\\|][-o^']?[:=;8])",
            "<3", "</3", R"(\^_*\^)", "-_+-", "[oO]_[oO]", "[xX][dD]", "[tT]_[tT]"
        };
    }

    std::vector<std::string> find(std::string_view text) const {
        std::vector<std::string> out;
        std::size_t pos = 0;
        while (pos < text.size()) {
            while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) {
                ++pos;
            }
            std::size_t end = pos;
            while (end < text.size() && !std::isspace(static_cast<unsigned char>(text[end]))) {
                ++end;
            }
            if (end > pos) {
                std::string chunk(text.substr(pos, end - pos));
                for (const auto& re : my_patterns) {
                    if (std::regex_match(chunk, re)) {
                        out.push_back(std::move(chunk));
                        break;
                    }
                }
            }
            pos = end;
        }
        return out;
    }

private:
    std::vector<std::regex> my_patterns;
};

enum class ItemCategory : std::uint8_t { emoji, emoticon, hashtag, pos };

inline constexpr std::array<ItemCategory, 4> all_item_categories{ItemCategory::emoji, ItemCategory::emoticon, ItemCategory::hashtag, ItemCategory::pos};

inline std::string_view to_string(ItemCategory c) {
    switch (c) {
        case ItemCategory::emoji: return "emoji";
        case ItemCategory::emoticon: return "emoticon";
        case ItemCategory::hashtag: return "hashtag";
        case ItemCategory::pos: return "pos";
    }
    return "?";
}

using ItemCounts = std::map<std::string, std::size_t, std::less<> >;

/** Items of one category over every tweet of every user. POS tags are counted for words and contractions only. */
inline ItemCounts count_items(const std::vector<UserRecord>& users, ItemCategory category, const Tokenizer& tokenizer, const TagLexicon& tags, const EmoticonMatcher& emoticons) {
    ItemCounts out;
    for (const auto& u : users) {
        for (const auto& t : u.tweets) {
            if (category == ItemCategory::emoticon) {
                for (auto& e : emoticons.find(t.text)) {
                    ++out[e];
                }
                continue;
            }
            auto tokens = tokenizer(t.text);
            if (category == ItemCategory::pos) {
                for (const auto& tt : pos_tag(std::move(tokens), tags)) {
                    if (tt.kind() == TokenKind::word || tt.kind() == TokenKind::contraction) {
                        ++out[tt.pos];
                    }
                }
                continue;
            }
            const auto want = category == ItemCategory::emoji ? TokenKind::emoji : TokenKind::hashtag;
            for (const auto& tok : tokens) {
                if (tok.kind == want) {
                    ++out[tok.text];
                }
            }
        }
    }
    return out;
}

/** Items by descending count, then ascending text. */
inline std::vector<std::string> ranked_items(const ItemCounts& counts) {
    std::vector<std::pair<std::string, std::size_t> > v(counts.begin(), counts.end());
    std::stable_sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    std::vector<std::string> out;
    for (auto& e : v) {
        out.push_back(std::move(e.first));
    }
    return out;
}

struct RankCorrelation {
    ItemCategory category = ItemCategory::emoji;
    std::size_t k = 0;
    ClassLabel a = ClassLabel::White;
    ClassLabel b = ClassLabel::White;
    double tau = 0;
};

/** Pairwise top-k Kendall tau of per-group ranked lists, for every category and k. */
inline std::vector<RankCorrelation> rank_correlations(
    const GroupedUsers& groups,
    const Tokenizer& tokenizer,
    const TagLexicon& tags,
    const EmoticonMatcher& emoticons,
    const std::vector<std::size_t>& ks = {20, 50})
{
    std::vector<RankCorrelation> out;
    for (auto cat : all_item_categories) {
        std::vector<std::pair<ClassLabel, std::vector<std::string> > > lists;
        for (const auto& [label, users] : groups) {
            lists.emplace_back(label, ranked_items(count_items(users, cat, tokenizer, tags, emoticons)));
        }
        for (auto k : ks) {
            for (std::size_t i = 0; i < lists.size(); ++i) {
                for (std::size_t j = i + 1; j < lists.size(); ++j) {
                    out.push_back(RankCorrelation{cat, k, lists[i].first, lists[j].first, kendall_tau_top_k(lists[i].second, lists[j].second, k)});
                }
            }
        }
    }
    return out;
}

using WordCounts = std::map<std::string, double, std::less<> >;

/** Counts of words, contractions and hashtags over all tweets, stopwords excluded. */
inline WordCounts count_words(const std::vector<UserRecord>& users, const Tokenizer& tokenizer, const WordSet& stopwords) {
    WordCounts out;
    for (const auto& u : users) {
        for (const auto& t : u.tweets) {
            for (auto& tok : tokenizer(t.text)) {
                bool kind = tok.kind == TokenKind::word || tok.kind == TokenKind::contraction || tok.kind == TokenKind::hashtag;
                if (kind && !stopwords.count(tok.text)) {
                    out[tok.text] += 1;
                }
            }
        }
    }
    return out;
}

struct SageOptions {
    /** L1 penalty in count units; 0 gives the closed-form log-odds deviation. */
    double lambda = 1.0;
    double pseudo_count = 0.01;
    std::size_t max_iterations = 20000;
    double tolerance = 1e-10;
};

/**
 * Additive log-frequency deviations of a group from the background over the background vocabulary.
 * Both distributions are smoothed with the pseudo-count. With a positive penalty, the L1-regularized multinomial
 * likelihood is maximized by accelerated proximal gradient. Throws `std::invalid_argument` if a group word has no
 * positive background count.
 */
inline WordCounts sage_deviations(const WordCounts& group, const WordCounts& background, const SageOptions& opts = {}) {
    if (!(opts.lambda >= 0) || !(opts.pseudo_count > 0)) {
        throw std::invalid_argument("SAGE needs lambda >= 0 and a positive pseudo-count");
    }
    for (const auto& [w, c] : group) {
        auto it = background.find(w);
        if (c > 0 && (it == background.end() || !(it->second > 0))) {
            throw std::invalid_argument("background count is zero for '" + w + "'");
        }
    }
    const std::size_t V = background.size();
    std::vector<std::string> words;
    std::vector<double> m(V), c(V);
    double btotal = 0, ctotal = 0;
    std::size_t i = 0;
    for (const auto& [w, b] : background) {
        words.push_back(w);
        m[i] = b + opts.pseudo_count;
        btotal += m[i];
        auto it = group.find(w);
        c[i] = (it == group.end() ? 0.0 : it->second) + opts.pseudo_count;
        ctotal += c[i];
        ++i;
    }
    for (auto& v : m) {
        v = std::log(v / btotal);
    }

    std::vector<double> eta(V, 0.0);
    if (opts.lambda == 0) {
        for (std::size_t k = 0; k < V; ++k) {
            eta[k] = std::log(c[k] / ctotal) - m[k];
        }
    } else {
        // Minimize -sum c(m + eta) + C log sum exp(m + eta) + lambda |eta|_1; the gradient is C-Lipschitz.
        const double step = 1.0 / ctotal;
        const double shrink = opts.lambda * step;
        std::vector<double> y(eta), prev(eta), q(V);
        double t = 1.0;
        for (std::size_t iter = 0; iter < opts.max_iterations; ++iter) {
            double top = -std::numeric_limits<double>::infinity();
            for (std::size_t k = 0; k < V; ++k) {
                top = std::max(top, m[k] + y[k]);
            }
            double z = 0;
            for (std::size_t k = 0; k < V; ++k) {
                q[k] = std::exp(m[k] + y[k] - top);
                z += q[k];
            }
            double change = 0;
            for (std::size_t k = 0; k < V; ++k) {
                double g = y[k] + step * c[k] - q[k] / z;
                double next = g > shrink ? g - shrink : (g < -shrink ? g + shrink : 0.0);
                change = std::max(change, std::abs(next - eta[k]));
                prev[k] = eta[k];
                eta[k] = next;
            }
            double t_next = (1.0 + std::sqrt(1.0 + 4.0 * t * t)) / 2.0;
            for (std::size_t k = 0; k < V; ++k) {
                y[k] = eta[k] + (t - 1.0) / t_next * (eta[k] - prev[k]);
            }
            t = t_next;
            if (change < opts.tolerance) {
                break;
            }
        }
    }
    WordCounts out;
    for (std::size_t k = 0; k < V; ++k) {
        out[words[k]] = eta[k];
    }
    return out;
}

struct Keyword {
    std::string word;
    double eta = 0;
};

/** The `top_n` words with positive deviation, by descending deviation and then word. */
inline std::vector<Keyword> distinctive_keywords(const WordCounts& group, const WordCounts& background, std::size_t top_n, const SageOptions& opts = {}) {
    std::vector<Keyword> out;
    for (const auto& [w, eta] : sage_deviations(group, background, opts)) {
        if (eta > 0) {
            out.push_back(Keyword{w, eta});
        }
    }
    std::stable_sort(out.begin(), out.end(), [](const Keyword& a, const Keyword& b) { return a.eta > b.eta; });
    if (out.size() > top_n) {
        out.resize(top_n);
    }
    return out;
}

struct AnalyticsOptions {
    SageOptions sage;
    std::size_t keywords = 20;
    std::vector<std::size_t> ks{20, 50};
    std::size_t workers = 1;
};

struct AnalyticsResources {
    Tokenizer tokenizer;
    TagLexicon tags{"NN"};
    WordSet stopwords;
    EmoticonMatcher emoticons;
};

struct AnalyticsReport {
    std::vector<GroupLexicalStats> lexical;
    std::vector<PairwiseTest> lexical_tests;
    std::vector<BehavioralProfile> behavior;
    std::vector<RankCorrelation> rank_correlations;
    std::map<ClassLabel, std::vector<Keyword> > keywords;
};

inline AnalyticsReport analyze_groups(const GroupedUsers& groups, const AnalyticsResources& res, const AnalyticsOptions& opts = {}) {
    AnalyticsReport r;
    r.lexical = group_lexical_stats(groups, res.tokenizer, res.stopwords, opts.workers);
    r.lexical_tests = pairwise_lexical_tests(r.lexical);
    r.behavior = behavioral_profiles(groups);
    r.rank_correlations = rank_correlations(groups, res.tokenizer, res.tags, res.emoticons, opts.ks);

    std::map<ClassLabel, WordCounts> counts;
    WordCounts background;
    for (const auto& [label, users] : groups) {
        counts[label] = count_words(users, res.tokenizer, res.stopwords);
        for (const auto& [w, c] : counts[label]) {
            background[w] += c;
        }
    }
    for (const auto& [label, wc] : counts) {
        r.keywords[label] = distinctive_keywords(wc, background, opts.keywords, opts.sage);
    }
    return r;
}

inline void to_json(nlohmann::json& j, const LexicalStats& s) {
    j = nlohmann::json{
        {"lexical_diversity", s.lexical_diversity},
        {"contractions_per_tweet", s.contractions_per_tweet},
        {"type_token_ratio", s.type_token_ratio},
        {"hashtags_per_tweet", s.hashtags_per_tweet}
    };
}

inline void to_json(nlohmann::json& j, const BehavioralProfile& p) {
    j = nlohmann::json{
        {"group", to_string(p.group)},
        {"users", p.users},
        {"tweets", p.tweets},
        {"android_pct", p.android_pct},
        {"iphone_pct", p.iphone_pct},
        {"desktop_pct", p.desktop_pct},
        {"profile_url_pct", p.profile_url_pct},
        {"custom_image_pct", p.custom_image_pct},
        {"geo_enabled_pct", p.geo_enabled_pct},
        {"geotagged_pct", p.geotagged_pct},
        {"avg_statuses", p.avg_statuses},
        {"avg_tweets_per_month", p.avg_tweets_per_month},
        {"mention_pct_micro", p.mention_pct},
        {"image_pct_micro", p.image_pct},
        {"url_pct_micro", p.url_pct}
    };
}

inline std::string pair_key(ClassLabel a, ClassLabel b) {
    return std::string(short_name(a)) + "-" + std::string(short_name(b));
}

inline void to_json(nlohmann::json& j, const AnalyticsReport& r) {
    nlohmann::json lexical = nlohmann::json::object();
    for (const auto& g : r.lexical) {
        lexical[std::string(to_string(g.group))] = nlohmann::json{{"users", g.users}, {"mean", g.mean}};
    }
    nlohmann::json tests = nlohmann::json::object();
    for (const auto& t : r.lexical_tests) {
        auto& slot = tests[t.feature][pair_key(t.a, t.b)];
        if (t.result) {
            slot = nlohmann::json{{"u", t.result->u}, {"z", t.result->z}, {"p", t.result->p}};
        } else {
            slot = nullptr;
        }
    }
    nlohmann::json kendall = nlohmann::json::object();
    for (const auto& c : r.rank_correlations) {
        kendall[std::string(to_string(c.category))]["k" + std::to_string(c.k)][pair_key(c.a, c.b)] = c.tau;
    }
    nlohmann::json keywords = nlohmann::json::object();
    for (const auto& [label, list] : r.keywords) {
        auto& arr = keywords[std::string(to_string(label))] = nlohmann::json::array();
        for (const auto& k : list) {
            arr.push_back(nlohmann::json{{"word", k.word}, {"eta", k.eta}});
        }
    }
    j = nlohmann::json{
        {"lexical", lexical},
        {"lexical_tests", tests},
        {"behavior", r.behavior},
        {"kendall", kendall},
        {"keywords", keywords}
    };
}

}

#endif
