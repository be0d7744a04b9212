#ifndef IDENTMINER_TESTS_ORACLES_HPP
#define IDENTMINER_TESTS_ORACLES_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "identminer/name_cnn.hpp"
#include "identminer/scorer.hpp"
#include "identminer/unigram.hpp"

/** Reference implementations and fixtures shared by the unit suites and the acceptance binary. */
namespace oracles {

namespace im = identminer;

/** Self-report score by an explicit loop over all tokens, no early exits. */
inline double brute_force_score(const std::vector<im::TaggedToken>& tagged, const im::QueryMatch& match, const im::SelfReportLexicon& lexicon, const im::ScoreParams& params) {
    double total = 0;
    double sum_os = 0;
    for (const auto& e : lexicon.entries()) {
        sum_os += static_cast<double>(e.second.self_reports);
    }
    for (std::size_t j = 0; j < tagged.size(); ++j) {
        bool in_query = j >= match.token_index && j <= match.last_index();
        bool is_word = tagged[j].kind() == im::TokenKind::word;
        std::size_t lo = std::min(j, match.token_index), hi = std::max(j, match.last_index());
        std::size_t words_between = 0;
        for (std::size_t k = lo + 1; k < hi; ++k) {
            if (tagged[k].kind() == im::TokenKind::word && !(k >= match.token_index && k <= match.last_index())) {
                ++words_between;
            }
        }
        std::size_t d = words_between + 1;
        auto it = lexicon.entries().find(tagged[j].text());
        bool counted = !in_query && is_word && d <= params.window && it != lexicon.entries().end();
        if (counted) {
            double term = (1.0 / static_cast<double>(d)) * (static_cast<double>(it->second.self_reports) / static_cast<double>(it->second.occurrences));
            if (params.weighting == im::Weighting::tfidf) {
                term *= std::log(sum_os / static_cast<double>(it->second.self_reports));
            }
            total += term;
        }
    }
    return total;
}

/** U of `a` from midranks: rank = 1 + #smaller + (#equal - 1) / 2 over the pooled sample. */
inline double enumerated_u(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> pooled(a);
    pooled.insert(pooled.end(), b.begin(), b.end());
    double sum = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double smaller = 0, equal = 0;
        for (auto v : pooled) {
            smaller += v < a[i];
            equal += v == a[i];
        }
        sum += 1 + smaller + (equal - 1) / 2;
    }
    return sum - static_cast<double>(a.size() * (a.size() + 1)) / 2;
}

inline double pair_count_u(const std::vector<double>& a, const std::vector<double>& b) {
    double u = 0;
    for (auto x : a) {
        for (auto y : b) {
            u += x > y ? 1.0 : (x == y ? 0.5 : 0.0);
        }
    }
    return u;
}

/** Tau-b by counting every pair. */
inline double brute_tau_b(const std::vector<double>& x, const std::vector<double>& y) {
    double c = 0, d = 0, tx = 0, ty = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        for (std::size_t j = i + 1; j < x.size(); ++j) {
            double dx = x[i] - x[j], dy = y[i] - y[j];
            if (dx == 0 && dy == 0) {
                continue;
            }
            if (dx == 0) {
                tx += 1;
            } else if (dy == 0) {
                ty += 1;
            } else if ((dx > 0) == (dy > 0)) {
                c += 1;
            } else {
                d += 1;
            }
        }
    }
    return (c - d) / std::sqrt((c + d + tx) * (c + d + ty));
}

/** Rank of each item within the first `k` entries of `list`; k + 1 when absent. */
inline std::vector<double> top_k_ranks(const std::vector<std::string>& list, const std::vector<std::string>& items, std::size_t k) {
    std::vector<double> out;
    for (const auto& it : items) {
        double r = static_cast<double>(k + 1);
        for (std::size_t i = 0; i < std::min(k, list.size()); ++i) {
            if (list[i] == it) {
                r = static_cast<double>(i + 1);
            }
        }
        out.push_back(r);
    }
    return out;
}

/** 10 points per class, each class owning one column with values 1..3 plus shared noise columns. */
inline std::vector<im::SparseExample> separable_fixture() {
    std::vector<im::SparseExample> out;
    std::mt19937_64 rng(41);
    for (std::size_t c = 0; c < 4; ++c) {
        for (std::size_t i = 0; i < 10; ++i) {
            im::SparseVector x{{c, 1.0 + static_cast<double>(i % 3)}};
            x.emplace_back(4 + rng() % 3, 0.5);
            out.push_back(im::SparseExample{x, im::class_from_index(c), im::Source::crowd});
        }
    }
    return out;
}

inline double train_accuracy(const im::LinearModel& m, const std::vector<im::SparseExample>& ex) {
    std::size_t ok = 0;
    for (const auto& e : ex) {
        ok += m.predict(e.features).label == e.label;
    }
    return static_cast<double>(ok) / static_cast<double>(ex.size());
}

inline im::NameCnnShape small_shape() {
    im::NameCnnShape s;
    s.embed_dim = 4;
    s.filters = 5;
    s.width = 3;
    s.hidden = 6;
    s.max_len = 12;
    return s;
}

inline std::vector<double> meta(double a) {
    return {a, 1 - a, 0.5, a * a, 0.0};
}

/** Names drawn from one disjoint six-letter alphabet per class. */
inline std::vector<im::NameExample> toy_names(std::size_t per_class, std::uint64_t seed) {
    const std::array<std::string, 4> alphabets{"abcdef", "ghijkl", "mnopqr", "stuvwx"};
    std::mt19937_64 rng(seed);
    std::vector<im::NameExample> out;
    for (std::size_t c = 0; c < 4; ++c) {
        for (std::size_t i = 0; i < per_class; ++i) {
            std::string name;
            std::size_t len = 4 + rng() % 7;
            for (std::size_t k = 0; k < len; ++k) {
                name += alphabets[c][rng() % alphabets[c].size()];
            }
            out.push_back(im::NameExample{name, std::vector<double>(im::name_metadata_dim, 0.0), im::class_from_index(c), im::Source::crowd});
        }
    }
    return out;
}

}

#endif
