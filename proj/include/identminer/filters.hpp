#ifndef IDENTMINER_FILTERS_HPP
#define IDENTMINER_FILTERS_HPP

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

#include "core.hpp"
#include "resources.hpp"
#include "textprep.hpp"

/**
 * @file filters.hpp
 * @brief Query keyword matching, class assignment and the false-positive filters.
 */

namespace identminer {

/**
 * One occurrence of a query keyword. `token_count` is 2 only for the optional two-token "african american" form.
 */
struct QueryMatch {
    std::string keyword;
    ClassLabel label = ClassLabel::White;
    std::size_t token_index = 0;
    std::size_t token_count = 1;

    std::size_t last_index() const {
        return token_index + token_count - 1;
    }

    bool operator==(const QueryMatch&) const = default;
};

struct QueryOptions {
    /** Also match "african american" written as two tokens. */
    bool two_token_african_american = false;
};

/** Whole-token matches over word tokens, one per occurrence, in token order. */
inline std::vector<QueryMatch> find_query_matches(const std::vector<TaggedToken>& tagged, const QueryMap& queries, const QueryOptions& options = {}) {
    std::vector<QueryMatch> out;
    for (std::size_t i = 0; i < tagged.size(); ++i) {
        if (tagged[i].kind() != TokenKind::word) {
            continue;
        }
        const auto& text = tagged[i].text();
        if (options.two_token_african_american && text == "african" && i + 1 < tagged.size() &&
            tagged[i + 1].kind() == TokenKind::word && tagged[i + 1].text() == "american") {
            auto it = queries.find(std::string_view("african-american"));
            if (it != queries.end()) {
                out.push_back(QueryMatch{it->first, it->second, i, 2});
                ++i;
                continue;
            }
        }
        auto it = queries.find(text);
        if (it != queries.end()) {
            out.push_back(QueryMatch{it->first, it->second, i, 1});
        }
    }
    return out;
}

enum class AssignmentStatus : std::uint8_t {
    NoMatch,
    Unique,
    Ambiguous
};

struct ClassAssignment {
    AssignmentStatus status = AssignmentStatus::NoMatch;
    std::optional<ClassLabel> label;

    bool unique() const {
        return status == AssignmentStatus::Unique;
    }

    bool operator==(const ClassAssignment&) const = default;
};

inline ClassAssignment assign_class(const std::vector<QueryMatch>& matches) {
    if (matches.empty()) {
        return {};
    }
    ClassLabel first = matches.front().label;
    for (const auto& m : matches) {
        if (m.label != first) {
            return ClassAssignment{AssignmentStatus::Ambiguous, std::nullopt};
        }
    }
    return ClassAssignment{AssignmentStatus::Unique, first};
}

enum class FilterKind : std::uint8_t {
    color = 0,
    plural = 1,
    bigram_blocklist = 2,
    quote = 3
};

inline constexpr std::array<FilterKind, 4> filter_order{
    FilterKind::color, FilterKind::plural, FilterKind::bigram_blocklist, FilterKind::quote
};

inline std::string_view to_string(FilterKind kind) {
    switch (kind) {
        case FilterKind::color: return "color";
        case FilterKind::plural: return "plural";
        case FilterKind::bigram_blocklist: return "bigram";
        case FilterKind::quote: return "quote";
    }
    return "?";
}

struct FilterOutcome {
    bool passed = true;
    std::optional<FilterKind> rejecting_filter;

    static FilterOutcome pass() {
        return {};
    }

    static FilterOutcome reject(FilterKind kind) {
        return FilterOutcome{false, kind};
    }

    bool operator==(const FilterOutcome&) const = default;
};

/**
 * Rejects when some other color term appears among the description's words.
 * Repeats of the query keyword itself do not count.
 */
inline FilterOutcome color_filter(const std::vector<TaggedToken>& tagged, const QueryMatch& match, const WordSet& colors) {
    for (std::size_t i = 0; i < tagged.size(); ++i) {
        if (i >= match.token_index && i <= match.last_index()) {
            continue;
        }
        const auto& tok = tagged[i];
        if (tok.kind() == TokenKind::word && tok.text() != match.keyword && colors.count(tok.text())) {
            return FilterOutcome::reject(FilterKind::color);
        }
    }
    return FilterOutcome::pass();
}

/** Rejects when the token right after the query is tagged as a plural noun. */
inline FilterOutcome plural_filter(const std::vector<TaggedToken>& tagged, const QueryMatch& match) {
    std::size_t next = match.last_index() + 1;
    if (next < tagged.size() && is_plural_tag(tagged[next].pos)) {
        return FilterOutcome::reject(FilterKind::plural);
    }
    return FilterOutcome::pass();
}

/** Rejects when (query, next) or (previous, query) is blocklisted. */
inline FilterOutcome blocklist_bigram_filter(const std::vector<TaggedToken>& tagged, const QueryMatch& match, const BigramSet& blocklist) {
    if (blocklist.empty()) {
        return FilterOutcome::pass();
    }
    const auto& first = tagged[match.token_index].text();
    const auto& last = tagged[match.last_index()].text();
    std::size_t next = match.last_index() + 1;
    if (next < tagged.size() && blocklist.count(Bigram{last, tagged[next].text()})) {
        return FilterOutcome::reject(FilterKind::bigram_blocklist);
    }
    if (match.token_index > 0 && blocklist.count(Bigram{tagged[match.token_index - 1].text(), first})) {
        return FilterOutcome::reject(FilterKind::bigram_blocklist);
    }
    return FilterOutcome::pass();
}

/**
 * Byte ranges `[open, close]` of balanced quotations. Straight quotes pair up left to right;
 * each curly opening quote pairs with the next closing one. Unpaired quotes produce nothing.
 */
inline std::vector<std::pair<std::size_t, std::size_t> > quoted_spans(std::string_view text) {
    std::vector<std::pair<std::size_t, std::size_t> > out;

    std::optional<std::size_t> open;
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] == '"') {
            if (open) {
                out.emplace_back(*open, i);
                open.reset();
            } else {
                open = i;
            }
        }
    }

    static constexpr std::string_view curly_open = "\xE2\x80\x9C";
    static constexpr std::string_view curly_close = "\xE2\x80\x9D";
    std::size_t pos = 0;
    while (true) {
        auto o = text.find(curly_open, pos);
        if (o == std::string_view::npos) {
            break;
        }
        auto c = text.find(curly_close, o + curly_open.size());
        if (c == std::string_view::npos) {
            break;
        }
        out.emplace_back(o, c);
        pos = c + curly_close.size();
    }
    return out;
}

/** Rejects when the query occurrence lies strictly inside a balanced quotation of `raw_text`. */
inline FilterOutcome quote_filter(std::string_view raw_text, const std::vector<TaggedToken>& tagged, const QueryMatch& match) {
    std::size_t start = tagged[match.token_index].token.start;
    std::size_t end = tagged[match.last_index()].token.end;
    for (const auto& [open, close] : quoted_spans(raw_text)) {
        if (open < start && end <= close) {
            return FilterOutcome::reject(FilterKind::quote);
        }
    }
    return FilterOutcome::pass();
}

/** True when the token right after the query is a person keyword, as in "asian guy". */
inline bool person_bigram_match(const std::vector<TaggedToken>& tagged, const QueryMatch& match, const WordSet& person_keywords) {
    std::size_t next = match.last_index() + 1;
    return next < tagged.size() && tagged[next].kind() == TokenKind::word && person_keywords.count(tagged[next].text()) > 0;
}

struct FilterConfig {
    bool color = true;
    bool plural = true;
    bool bigram = true;
    bool quote = true;

    static FilterConfig none() {
        return FilterConfig{false, false, false, false};
    }

    static FilterConfig only(FilterKind kind) {
        auto cfg = none();
        cfg.set(kind, true);
        return cfg;
    }

    bool enabled(FilterKind kind) const {
        switch (kind) {
            case FilterKind::color: return color;
            case FilterKind::plural: return plural;
            case FilterKind::bigram_blocklist: return bigram;
            case FilterKind::quote: return quote;
        }
        return false;
    }

    void set(FilterKind kind, bool on) {
        switch (kind) {
            case FilterKind::color: color = on; break;
            case FilterKind::plural: plural = on; break;
            case FilterKind::bigram_blocklist: bigram = on; break;
            case FilterKind::quote: quote = on; break;
        }
    }

    bool operator==(const FilterConfig&) const = default;
};

inline void to_json(nlohmann::json& j, const FilterConfig& cfg) {
    j = nlohmann::json{{"color", cfg.color}, {"plural", cfg.plural}, {"bigram", cfg.bigram}, {"quote", cfg.quote}};
}

inline void from_json(const nlohmann::json& j, FilterConfig& cfg) {
    cfg = FilterConfig::none();
    for (auto kind : filter_order) {
        auto key = std::string(to_string(kind));
        if (j.contains(key)) {
            cfg.set(kind, j.at(key).get<bool>());
        }
    }
}

/** Parse a comma list such as `color,plural`; an empty string disables everything. */
inline FilterConfig parse_filter_list(std::string_view list) {
    auto cfg = FilterConfig::none();
    if (internal::trim(list).empty() || list == "none") {
        return cfg;
    }
    for (auto part : internal::split(list, ',')) {
        part = internal::trim(part);
        bool found = false;
        for (auto kind : filter_order) {
            if (part == to_string(kind)) {
                cfg.set(kind, true);
                found = true;
            }
        }
        if (!found) {
            throw std::invalid_argument("unknown filter '" + std::string(part) + "'");
        }
    }
    return cfg;
}

/** Lists consulted by the filters. */
struct FilterResources {
    WordSet colors = default_color_list();
    BigramSet blocklist = default_blocklist();
};

/** Evaluate the enabled filters in the fixed order color, plural, bigram, quote; the first rejection wins. */
inline FilterOutcome apply_filter_chain(
    const std::vector<TaggedToken>& tagged,
    std::string_view raw_text,
    const QueryMatch& match,
    const FilterConfig& config,
    const FilterResources& resources)
{
    if (config.color) {
        auto out = color_filter(tagged, match, resources.colors);
        if (!out.passed) {
            return out;
        }
    }
    if (config.plural) {
        auto out = plural_filter(tagged, match);
        if (!out.passed) {
            return out;
        }
    }
    if (config.bigram) {
        auto out = blocklist_bigram_filter(tagged, match, resources.blocklist);
        if (!out.passed) {
            return out;
        }
    }
    if (config.quote) {
        auto out = quote_filter(raw_text, tagged, match);
        if (!out.passed) {
            return out;
        }
    }
    return FilterOutcome::pass();
}

}

#endif
