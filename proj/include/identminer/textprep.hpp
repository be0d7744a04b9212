#ifndef IDENTMINER_TEXTPREP_HPP
#define IDENTMINER_TEXTPREP_HPP

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "core.hpp"
#include "ingest.hpp"
#include "resources.hpp"

/**
 * @file textprep.hpp
 * @brief Tweet-style tokenization, lexicon PoS tagging and self-report word induction.
 */

namespace identminer {

enum class TokenKind : std::uint8_t {
    word,
    hashtag,
    mention,
    url,
    emoji,
    punct,
    contraction
};

inline std::string_view to_string(TokenKind kind) {
    switch (kind) {
        case TokenKind::word: return "word";
        case TokenKind::hashtag: return "hashtag";
        case TokenKind::mention: return "mention";
        case TokenKind::url: return "url";
        case TokenKind::emoji: return "emoji";
        case TokenKind::punct: return "punct";
        case TokenKind::contraction: return "contraction";
    }
    return "?";
}

/**
 * A token with its byte span `[start, end)` in the source text.
 * `text` is lowercased for every kind except `url`, which is kept verbatim.
 */
struct Token {
    std::string text;
    TokenKind kind = TokenKind::word;
    std::size_t start = 0;
    std::size_t end = 0;
};

namespace utf8 {

struct Decoded {
    char32_t cp;
    std::size_t length;
};

/** Decode one code point; invalid bytes decode as U+FFFD with length 1. */
inline Decoded decode(std::string_view s, std::size_t pos) {
    auto byte = [&](std::size_t i) { return static_cast<unsigned char>(s[i]); };
    unsigned char b0 = byte(pos);
    if (b0 < 0x80) {
        return {b0, 1};
    }
    std::size_t len = 0;
    char32_t cp = 0;
    if ((b0 & 0xE0) == 0xC0) {
        len = 2;
        cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
        len = 3;
        cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
        len = 4;
        cp = b0 & 0x07;
    } else {
        return {0xFFFD, 1};
    }
    if (pos + len > s.size()) {
        return {0xFFFD, 1};
    }
    for (std::size_t i = 1; i < len; ++i) {
        unsigned char b = byte(pos + i);
        if ((b & 0xC0) != 0x80) {
            return {0xFFFD, 1};
        }
        cp = (cp << 6) | (b & 0x3F);
    }
    return {cp, len};
}

inline void append(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

/** Code points of a string; used by the character model. */
inline std::vector<char32_t> code_points(std::string_view s) {
    std::vector<char32_t> out;
    std::size_t pos = 0;
    while (pos < s.size()) {
        auto d = decode(s, pos);
        out.push_back(d.cp);
        pos += d.length;
    }
    return out;
}

inline bool is_whitespace(char32_t cp) {
    return cp == ' ' || cp == '\t' || cp == '\n' || cp == '\r' || cp == '\f' || cp == '\v' ||
        cp == 0x85 || cp == 0xA0 || cp == 0x1680 || (cp >= 0x2000 && cp <= 0x200A) ||
        cp == 0x2028 || cp == 0x2029 || cp == 0x202F || cp == 0x205F || cp == 0x3000;
}

inline bool is_regional_indicator(char32_t cp) {
    return cp >= 0x1F1E6 && cp <= 0x1F1FF;
}

/** Base pictographs: Misc Symbols & Pictographs, Emoticons, Transport, Supplemental Symbols, plus the BMP dingbat blocks. */
inline bool is_emoji_base(char32_t cp) {
    return (cp >= 0x1F300 && cp <= 0x1F5FF) ||
        (cp >= 0x1F600 && cp <= 0x1F64F) ||
        (cp >= 0x1F680 && cp <= 0x1F6FF) ||
        (cp >= 0x1F900 && cp <= 0x1F9FF) ||
        (cp >= 0x1FA70 && cp <= 0x1FAFF) ||
        (cp >= 0x2600 && cp <= 0x27BF) ||
        (cp >= 0x1F004 && cp <= 0x1F0CF) ||
        (cp >= 0x1F170 && cp <= 0x1F251) ||
        cp == 0x2B50 || cp == 0x2B55 || cp == 0x2B06 || cp == 0x2B07 || cp == 0x2B05 ||
        cp == 0x2934 || cp == 0x2935 || cp == 0x3030 || cp == 0x303D || cp == 0x3297 || cp == 0x3299 ||
        is_regional_indicator(cp);
}

/** Variation selectors, skin tone modifiers, keycap and tag characters that extend the preceding emoji. */
inline bool is_emoji_modifier(char32_t cp) {
    return cp == 0xFE0F || cp == 0xFE0E || (cp >= 0x1F3FB && cp <= 0x1F3FF) || cp == 0x20E3 ||
        (cp >= 0xE0020 && cp <= 0xE007F);
}

inline constexpr char32_t zwj = 0x200D;

inline bool is_punctuation(char32_t cp) {
    if (cp < 0x80) {
        return (cp >= 0x21 && cp <= 0x2F) || (cp >= 0x3A && cp <= 0x40) || (cp >= 0x5B && cp <= 0x60 && cp != '_') || (cp >= 0x7B && cp <= 0x7E);
    }
    return (cp >= 0xA1 && cp <= 0xBF) || cp == 0xD7 || cp == 0xF7 ||
        (cp >= 0x2010 && cp <= 0x206F) || (cp >= 0x3000 && cp <= 0x303F) ||
        (cp >= 0x2190 && cp <= 0x23FF) || (cp >= 0x2500 && cp <= 0x25FF) ||
        cp == zwj || cp == 0xFE0F || cp == 0xFE0E || cp == 0xFFFD;
}

inline bool is_word_char(char32_t cp) {
    if (cp < 0x80) {
        return (cp >= '0' && cp <= '9') || (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z') || cp == '_';
    }
    return !is_whitespace(cp) && !is_emoji_base(cp) && !is_emoji_modifier(cp) && !is_punctuation(cp);
}

inline bool is_digit(char32_t cp) {
    return cp >= '0' && cp <= '9';
}

/** Lowercases ASCII and the Latin-1 supplement; other scripts pass through. */
inline char32_t to_lower(char32_t cp) {
    if (cp >= 'A' && cp <= 'Z') {
        return cp + 32;
    }
    if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) {
        return cp + 32;
    }
    return cp;
}

inline std::string lower(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    std::size_t pos = 0;
    while (pos < s.size()) {
        auto d = decode(s, pos);
        if (d.cp == 0xFFFD && d.length == 1) {
            out.push_back(s[pos]);
        } else {
            append(out, to_lower(d.cp));
        }
        pos += d.length;
    }
    return out;
}

}

namespace internal {

inline bool starts_with_ci(std::string_view s, std::size_t pos, std::string_view prefix) {
    if (pos + prefix.size() > s.size()) {
        return false;
    }
    for (std::size_t i = 0; i < prefix.size(); ++i) {
        char c = s[pos + i];
        if (c >= 'A' && c <= 'Z') {
            c = static_cast<char>(c - 'A' + 'a');
        }
        if (c != prefix[i]) {
            return false;
        }
    }
    return true;
}

inline bool is_apostrophe(char32_t cp) {
    return cp == '\'' || cp == 0x2019;
}

/** Replace typographic apostrophes with the ASCII one. */
inline std::string normalize_apostrophes(std::string_view s) {
    std::string out;
    std::size_t pos = 0;
    while (pos < s.size()) {
        auto d = utf8::decode(s, pos);
        if (d.cp == 0x2019) {
            out.push_back('\'');
        } else {
            out.append(s.substr(pos, d.length));
        }
        pos += d.length;
    }
    return out;
}

}

/**
 * Tokenizer for tweets and profile descriptions.
 *
 * URLs (`http://`, `https://`, `www.`), `@mentions`, `#hashtags`, emoji sequences (with modifiers, ZWJ
 * joins and flag pairs) and contractions from the configured list are single tokens. Other word runs may contain
 * internal apostrophes, hyphens and digit-internal periods. Each remaining punctuation character becomes its own
 * token, except that runs of the same character (`...`, `!!!`) are kept together. Whitespace separates tokens and
 * is never part of one, so the token spans plus the whitespace between them reconstruct the input.
 */
class Tokenizer {
public:
    Tokenizer() : my_contractions(default_contractions()) {}

    explicit Tokenizer(WordSet contractions) : my_contractions(std::move(contractions)) {}

    std::vector<Token> operator()(std::string_view text) const {
        std::vector<Token> out;
        std::size_t pos = 0;
        const std::size_t n = text.size();

        auto peek = [&](std::size_t p) -> utf8::Decoded {
            if (p >= n) {
                return {0, 0};
            }
            return utf8::decode(text, p);
        };

        while (pos < n) {
            auto cur = peek(pos);
            if (utf8::is_whitespace(cur.cp)) {
                pos += cur.length;
                continue;
            }

            if (internal::starts_with_ci(text, pos, "http://") || internal::starts_with_ci(text, pos, "https://") ||
                internal::starts_with_ci(text, pos, "www.")) {
                std::size_t end = pos;
                while (end < n) {
                    auto d = peek(end);
                    if (utf8::is_whitespace(d.cp)) {
                        break;
                    }
                    end += d.length;
                }
                end = trim_url_end(text, pos, end);
                out.push_back(Token{std::string(text.substr(pos, end - pos)), TokenKind::url, pos, end});
                pos = end;
                continue;
            }

            if (cur.cp == '@' || cur.cp == '#') {
                auto nxt = peek(pos + 1);
                if (nxt.length && utf8::is_word_char(nxt.cp)) {
                    std::size_t end = pos + 1;
                    while (end < n) {
                        auto d = peek(end);
                        if (!utf8::is_word_char(d.cp)) {
                            break;
                        }
                        end += d.length;
                    }
                    auto kind = (cur.cp == '@') ? TokenKind::mention : TokenKind::hashtag;
                    out.push_back(Token{utf8::lower(text.substr(pos, end - pos)), kind, pos, end});
                    pos = end;
                    continue;
                }
            }

            if (utf8::is_emoji_base(cur.cp)) {
                std::size_t end = scan_emoji(text, pos);
                out.push_back(Token{std::string(text.substr(pos, end - pos)), TokenKind::emoji, pos, end});
                pos = end;
                continue;
            }

            if (utf8::is_word_char(cur.cp)) {
                std::size_t end = pos;
                bool has_apostrophe = false;
                while (end < n) {
                    auto d = peek(end);
                    if (utf8::is_word_char(d.cp)) {
                        end += d.length;
                        continue;
                    }
                    // Joiners stay inside the word only when a word character follows.
                    bool joiner = internal::is_apostrophe(d.cp) || d.cp == '-' ||
                        (d.cp == '.' && end > pos && utf8::is_digit(static_cast<unsigned char>(text[end - 1])));
                    if (joiner) {
                        auto after = peek(end + d.length);
                        bool ok = after.length && utf8::is_word_char(after.cp);
                        if (d.cp == '.') {
                            ok = after.length && utf8::is_digit(after.cp);
                        }
                        if (ok) {
                            has_apostrophe = has_apostrophe || internal::is_apostrophe(d.cp);
                            end += d.length;
                            continue;
                        }
                    }
                    break;
                }
                auto slice = text.substr(pos, end - pos);
                auto lowered = utf8::lower(slice);
                if (has_apostrophe) {
                    auto normalized = internal::normalize_apostrophes(lowered);
                    if (my_contractions.count(normalized)) {
                        out.push_back(Token{std::move(normalized), TokenKind::contraction, pos, end});
                        pos = end;
                        continue;
                    }
                }
                out.push_back(Token{std::move(lowered), TokenKind::word, pos, end});
                pos = end;
                continue;
            }

            // Punctuation and anything unclassified: one token per run of the same code point.
            std::size_t end = pos + cur.length;
            if (!utf8::is_emoji_modifier(cur.cp)) {
                while (end < n) {
                    auto d = peek(end);
                    if (d.cp != cur.cp) {
                        break;
                    }
                    end += d.length;
                }
            }
            out.push_back(Token{utf8::lower(text.substr(pos, end - pos)), TokenKind::punct, pos, end});
            pos = end;
        }
        return out;
    }

    const WordSet& contractions() const {
        return my_contractions;
    }

private:
    WordSet my_contractions;

    static std::size_t trim_url_end(std::string_view text, std::size_t start, std::size_t end) {
        // Trailing sentence punctuation is not part of the URL.
        static constexpr std::string_view trailing = ".,;:!?)]}\"'";
        while (end > start + 1) {
            char c = text[end - 1];
            if (trailing.find(c) != std::string_view::npos) {
                --end;
                continue;
            }
            // Closing curly quotes, U+201D and U+2019.
            if (end - start >= 4 && static_cast<unsigned char>(text[end - 3]) == 0xE2 && static_cast<unsigned char>(text[end - 2]) == 0x80 &&
                (static_cast<unsigned char>(text[end - 1]) == 0x9D || static_cast<unsigned char>(text[end - 1]) == 0x99)) {
                end -= 3;
                continue;
            }
            break;
        }
        return end;
    }

    static std::size_t scan_emoji(std::string_view text, std::size_t pos) {
        const std::size_t n = text.size();
        auto first = utf8::decode(text, pos);
        std::size_t end = pos + first.length;
        if (utf8::is_regional_indicator(first.cp)) {
            if (end < n) {
                auto second = utf8::decode(text, end);
                if (utf8::is_regional_indicator(second.cp)) {
                    end += second.length;
                }
            }
            return end;
        }
        while (end < n) {
            auto d = utf8::decode(text, end);
            if (utf8::is_emoji_modifier(d.cp)) {
                end += d.length;
                continue;
            }
            if (d.cp == utf8::zwj && end + d.length < n) {
                auto joined = utf8::decode(text, end + d.length);
                if (utf8::is_emoji_base(joined.cp)) {
                    end += d.length + joined.length;
                    continue;
                }
            }
            break;
        }
        return end;
    }
};

/** Tokenize with the built-in contraction list. */
inline std::vector<Token> tokenize(std::string_view text) {
    static const Tokenizer tokenizer;
    return tokenizer(text);
}

/**
 * Penn Treebank word-level tags. Non-word tokens carry the sentinels HT, USR, URL, EMJ and PCT instead.
 */
inline bool is_penn_tag(std::string_view tag) {
    static const std::set<std::string, std::less<> > tags{
        "CC", "CD", "DT", "EX", "FW", "IN", "JJ", "JJR", "JJS", "LS", "MD", "NN", "NNS", "NNP", "NNPS",
        "PDT", "POS", "PRP", "PRP$", "RB", "RBR", "RBS", "RP", "SYM", "TO", "UH", "VB", "VBD", "VBG", "VBN",
        "VBP", "VBZ", "WDT", "WP", "WP$", "WRB"
    };
    return tags.count(tag) > 0;
}

inline bool is_noun_tag(std::string_view tag) {
    return tag == "NN" || tag == "NNS" || tag == "NNP" || tag == "NNPS";
}

inline bool is_plural_tag(std::string_view tag) {
    return tag == "NNS" || tag == "NNPS";
}

/**
 * Context-free tagger: each word maps to its majority tag, unknown words get `default_tag`.
 * File format is TSV `word<TAB>tag`.
 */
class TagLexicon {
public:
    TagLexicon() = default;

    explicit TagLexicon(std::string default_tag) : my_default(std::move(default_tag)) {
        if (!is_penn_tag(my_default)) {
            throw std::invalid_argument("default tag '" + my_default + "' is not a Penn Treebank tag");
        }
    }

    TagLexicon(std::initializer_list<std::pair<const char*, const char*> > entries) {
        for (const auto& [word, tag] : entries) {
            add(word, tag);
        }
    }

    void add(std::string_view word, std::string_view tag) {
        if (!is_penn_tag(tag)) {
            throw std::invalid_argument("'" + std::string(tag) + "' is not a Penn Treebank tag");
        }
        my_tags[utf8::lower(word)] = std::string(tag);
    }

    /** Majority tag if known. */
    const std::string* find(const std::string& word) const {
        auto it = my_tags.find(word);
        return it == my_tags.end() ? nullptr : &(it->second);
    }

    const std::string& tag(const std::string& word) const {
        auto ptr = find(word);
        return ptr ? *ptr : my_default;
    }

    const std::string& default_tag() const {
        return my_default;
    }

    std::size_t size() const {
        return my_tags.size();
    }

    static TagLexicon read(std::istream& in, std::string default_tag = "NN") {
        TagLexicon lex(std::move(default_tag));
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            auto t = internal::trim(line);
            if (t.empty() || t.front() == '#') {
                continue;
            }
            auto tab = t.find('\t');
            if (tab == std::string_view::npos) {
                throw DataError("tag lexicon line " + std::to_string(line_no) + " is not 'word<TAB>tag'");
            }
            auto tag = internal::trim(t.substr(tab + 1));
            if (!is_penn_tag(tag)) {
                throw DataError("tag lexicon line " + std::to_string(line_no) + " has invalid tag '" + std::string(tag) + "'");
            }
            lex.my_tags[utf8::lower(t.substr(0, tab))] = std::string(tag);
        }
        return lex;
    }

    static TagLexicon load(const std::string& path, std::string default_tag = "NN") {
        auto in = internal::open_input(path);
        return read(in, std::move(default_tag));
    }

private:
    std::unordered_map<std::string, std::string> my_tags;
    std::string my_default = "NN";
};

struct TaggedToken {
    Token token;
    std::string pos;

    const std::string& text() const {
        return token.text;
    }

    TokenKind kind() const {
        return token.kind;
    }
};

inline std::string_view sentinel_tag(TokenKind kind) {
    switch (kind) {
        case TokenKind::hashtag: return "HT";
        case TokenKind::mention: return "USR";
        case TokenKind::url: return "URL";
        case TokenKind::emoji: return "EMJ";
        case TokenKind::punct: return "PCT";
        default: return "";
    }
}

/** Words and contractions are looked up in the lexicon; all other kinds receive their sentinel tag. */
inline std::vector<TaggedToken> pos_tag(std::vector<Token> tokens, const TagLexicon& lexicon) {
    std::vector<TaggedToken> out;
    out.reserve(tokens.size());
    for (auto& tok : tokens) {
        std::string tag;
        if (tok.kind == TokenKind::word || tok.kind == TokenKind::contraction) {
            tag = lexicon.tag(tok.text);
        } else {
            tag = std::string(sentinel_tag(tok.kind));
        }
        out.push_back(TaggedToken{std::move(tok), std::move(tag)});
    }
    return out;
}

struct SelfReportCandidate {
    std::string word;
    std::string pos;
    std::size_t token_index = 0;

    bool operator==(const SelfReportCandidate&) const = default;
};

struct CandidateOptions {
    /** Also accept the tweet spelling "im" as a trigger. */
    bool allow_im = false;
};

/**
 * Match the first-person pattern `(i'm | i am) RB? DT? JJ* HEAD` where HEAD is a noun (NN, NNS, NNP, NNPS),
 * or, when no noun follows, the last adjective of a non-empty JJ run. Every adjective in the run and the noun
 * head are emitted. Only word tokens take part in the pattern.
 */
inline std::vector<SelfReportCandidate> extract_selfreport_candidates(const std::vector<TaggedToken>& tagged, const CandidateOptions& options = {}) {
    std::vector<SelfReportCandidate> out;
    const std::size_t n = tagged.size();
    auto is_word = [&](std::size_t j) { return j < n && tagged[j].kind() == TokenKind::word; };

    for (std::size_t i = 0; i < n; ++i) {
        const auto& text = tagged[i].text();
        std::size_t next;
        if (text == "i'm" && (tagged[i].kind() == TokenKind::contraction || tagged[i].kind() == TokenKind::word)) {
            next = i + 1;
        } else if (text == "i" && tagged[i].kind() == TokenKind::word && is_word(i + 1) && tagged[i + 1].text() == "am") {
            next = i + 2;
        } else if (options.allow_im && text == "im" && tagged[i].kind() == TokenKind::word) {
            next = i + 1;
        } else {
            continue;
        }

        std::size_t j = next;
        if (is_word(j) && tagged[j].pos == "RB") {
            ++j;
        }
        if (is_word(j) && tagged[j].pos == "DT") {
            ++j;
        }
        std::size_t adj_start = j;
        while (is_word(j) && tagged[j].pos == "JJ") {
            ++j;
        }
        bool noun_head = is_word(j) && is_noun_tag(tagged[j].pos);
        if (!noun_head && j == adj_start) {
            continue;
        }
        for (std::size_t k = adj_start; k < j; ++k) {
            out.push_back(SelfReportCandidate{tagged[k].text(), tagged[k].pos, k});
        }
        if (noun_head) {
            out.push_back(SelfReportCandidate{tagged[j].text(), tagged[j].pos, j});
        }
    }
    return out;
}

struct SelfReportCount {
    std::uint64_t self_reports = 0;
    std::uint64_t occurrences = 0;

    bool operator==(const SelfReportCount&) const = default;
};

/**
 * The induced self-report word set with its co-occurrence counts:
 * `self_reports` is the number of descriptions in which the word was a pattern candidate,
 * `occurrences` the number of descriptions containing it as any token.
 */
class SelfReportLexicon {
public:
    SelfReportLexicon() = default;

    /** Throws `std::invalid_argument` unless `0 < self_reports <= occurrences` for every entry. */
    explicit SelfReportLexicon(std::map<std::string, SelfReportCount, std::less<> > entries) : my_entries(std::move(entries)) {
        for (const auto& [word, count] : my_entries) {
            if (count.self_reports == 0 || count.self_reports > count.occurrences) {
                throw std::invalid_argument("invalid self-report counts for '" + word + "'");
            }
            my_total += count.self_reports;
        }
    }

    bool empty() const {
        return my_entries.empty();
    }

    std::size_t size() const {
        return my_entries.size();
    }

    const SelfReportCount* find(std::string_view word) const {
        auto it = my_entries.find(word);
        return it == my_entries.end() ? nullptr : &(it->second);
    }

    bool contains(std::string_view word) const {
        return find(word) != nullptr;
    }

    /** Sum of `self_reports` over all words. */
    std::uint64_t total_self_reports() const {
        return my_total;
    }

    std::uint64_t total_occurrences() const {
        std::uint64_t total = 0;
        for (const auto& e : my_entries) {
            total += e.second.occurrences;
        }
        return total;
    }

    const std::map<std::string, SelfReportCount, std::less<> >& entries() const {
        return my_entries;
    }

    /** TSV `word<TAB>self_reports<TAB>occurrences`, sorted by word. */
    void write(std::ostream& out) const {
        for (const auto& [word, count] : my_entries) {
            out << word << '\t' << count.self_reports << '\t' << count.occurrences << '\n';
        }
    }

    static SelfReportLexicon read(std::istream& in) {
        std::map<std::string, SelfReportCount, std::less<> > entries;
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            auto t = internal::trim(line);
            if (t.empty() || t.front() == '#') {
                continue;
            }
            auto fields = internal::split(t, '\t');
            if (fields.size() != 3) {
                throw DataError("self-report lexicon line " + std::to_string(line_no) + " does not have 3 fields");
            }
            SelfReportCount c;
            try {
                c.self_reports = std::stoull(std::string(fields[1]));
                c.occurrences = std::stoull(std::string(fields[2]));
            } catch (const std::exception&) {
                throw DataError("self-report lexicon line " + std::to_string(line_no) + " has non-integer counts");
            }
            if (c.self_reports == 0 || c.self_reports > c.occurrences) {
                throw DataError("self-report lexicon line " + std::to_string(line_no) + " violates 0 < O_s <= O");
            }
            entries[std::string(fields[0])] = c;
        }
        return SelfReportLexicon(std::move(entries));
    }

    static SelfReportLexicon load(const std::string& path) {
        auto in = internal::open_input(path);
        return read(in);
    }

private:
    std::map<std::string, SelfReportCount, std::less<> > my_entries;
    std::uint64_t my_total = 0;
};

/**
 * Partial per-description counts. Partials from different workers merge by addition.
 */
class SelfReportCounter {
public:
    SelfReportCounter(const TagLexicon& tags, const Tokenizer& tokenizer, CandidateOptions options = {}) :
        my_tags(&tags), my_tokenizer(&tokenizer), my_options(options) {}

    void add_description(std::string_view description) {
        auto tagged = pos_tag((*my_tokenizer)(description), *my_tags);

        std::set<std::string> seen;
        for (const auto& tok : tagged) {
            seen.insert(tok.text());
        }
        for (const auto& word : seen) {
            ++my_occurrences[word];
        }

        std::set<std::string> reported;
        for (auto& cand : extract_selfreport_candidates(tagged, my_options)) {
            if (is_plural_tag(cand.pos)) {
                continue;
            }
            // Out-of-vocabulary words have no majority tag to disagree with and are kept.
            auto majority = my_tags->find(cand.word);
            if (majority && *majority != cand.pos) {
                continue;
            }
            reported.insert(std::move(cand.word));
        }
        for (const auto& word : reported) {
            ++my_self_reports[word];
        }
    }

    void merge(const SelfReportCounter& other) {
        for (const auto& [w, c] : other.my_occurrences) {
            my_occurrences[w] += c;
        }
        for (const auto& [w, c] : other.my_self_reports) {
            my_self_reports[w] += c;
        }
    }

    SelfReportLexicon finish() const {
        std::map<std::string, SelfReportCount, std::less<> > entries;
        for (const auto& [w, c] : my_self_reports) {
            entries[w] = SelfReportCount{c, my_occurrences.at(w)};
        }
        return SelfReportLexicon(std::move(entries));
    }

private:
    const TagLexicon* my_tags;
    const Tokenizer* my_tokenizer;
    CandidateOptions my_options;
    std::unordered_map<std::string, std::uint64_t> my_occurrences;
    std::unordered_map<std::string, std::uint64_t> my_self_reports;
};

namespace internal {

inline std::string_view description_of(const UserRecord& rec) {
    return rec.description;
}

inline std::string_view description_of(std::string_view text) {
    return text;
}

inline std::string_view description_of(const std::string& text) {
    return text;
}

template<typename Key_>
std::string_view description_of(const std::pair<const Key_, UserRecord>& entry) {
    return entry.second.description;
}

}

/** Build the self-report lexicon over every description in `corpus` (records, map entries or plain strings). */
template<typename Range_>
SelfReportLexicon build_selfreport_lexicon(const Range_& corpus, const TagLexicon& tags, const Tokenizer& tokenizer = Tokenizer(), CandidateOptions options = {}) {
    SelfReportCounter counter(tags, tokenizer, options);
    for (const auto& item : corpus) {
        counter.add_description(internal::description_of(item));
    }
    return counter.finish();
}

}

#endif
