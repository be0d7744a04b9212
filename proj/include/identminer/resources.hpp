#ifndef IDENTMINER_RESOURCES_HPP
#define IDENTMINER_RESOURCES_HPP

#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "core.hpp"

/**
 * @file resources.hpp
 * @brief Word lists shipped as data files, plus built-in copies of the small ones.
 *
 * File format for every list: UTF-8, one lowercase entry per line. Blank lines and lines
 * starting with `#` are skipped. Bigram lists hold two space-separated words per line.
 */

namespace identminer {

using WordSet = std::set<std::string, std::less<> >;

namespace internal {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r' || s.front() == '\n')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' || s.back() == '\n')) {
        s.remove_suffix(1);
    }
    return s;
}

inline std::string ascii_lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) {
        if (c >= 'A' && c <= 'Z') {
            c = static_cast<char>(c - 'A' + 'a');
        }
    }
    return out;
}

inline std::vector<std::string_view> split(std::string_view s, char delim) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        auto pos = s.find(delim, start);
        if (pos == std::string_view::npos) {
            out.push_back(s.substr(start));
            break;
        }
        out.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

inline std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open '" + path + "'");
    }
    return in;
}

}

inline std::vector<std::string> read_word_list(std::istream& in) {
    std::vector<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        auto t = internal::trim(line);
        if (t.empty() || t.front() == '#') {
            continue;
        }
        out.push_back(internal::ascii_lower(t));
    }
    return out;
}

inline WordSet read_word_set(std::istream& in) {
    auto list = read_word_list(in);
    return WordSet(list.begin(), list.end());
}

inline WordSet load_word_set(const std::string& path) {
    auto in = internal::open_input(path);
    return read_word_set(in);
}

using Bigram = std::pair<std::string, std::string>;
using BigramSet = std::set<Bigram>;

inline BigramSet read_bigram_set(std::istream& in) {
    BigramSet out;
    std::size_t line_no = 0;
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        auto t = internal::trim(line);
        if (t.empty() || t.front() == '#') {
            continue;
        }
        auto space = t.find(' ');
        if (space == std::string_view::npos) {
            throw DataError("bigram list line " + std::to_string(line_no) + " does not hold two words");
        }
        auto first = internal::trim(t.substr(0, space));
        auto second = internal::trim(t.substr(space + 1));
        if (first.empty() || second.empty() || second.find(' ') != std::string_view::npos) {
            throw DataError("bigram list line " + std::to_string(line_no) + " does not hold two words");
        }
        out.emplace(internal::ascii_lower(first), internal::ascii_lower(second));
    }
    return out;
}

inline BigramSet load_bigram_set(const std::string& path) {
    auto in = internal::open_input(path);
    return read_bigram_set(in);
}

using QueryMap = std::map<std::string, ClassLabel, std::less<> >;

/** TSV `keyword<TAB>ClassLabel`. */
inline QueryMap read_query_map(std::istream& in) {
    QueryMap out;
    std::size_t line_no = 0;
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        auto t = internal::trim(line);
        if (t.empty() || t.front() == '#') {
            continue;
        }
        auto fields = internal::split(t, '\t');
        std::optional<ClassLabel> label;
        if (fields.size() == 2) {
            label = parse_class_label(internal::trim(fields[1]));
        }
        if (!label) {
            throw DataError("query map line " + std::to_string(line_no) + " is not 'keyword<TAB>label'");
        }
        out[internal::ascii_lower(internal::trim(fields[0]))] = *label;
    }
    return out;
}

inline QueryMap load_query_map(const std::string& path) {
    auto in = internal::open_input(path);
    return read_query_map(in);
}

inline QueryMap default_query_map() {
    return QueryMap{
        {"black", ClassLabel::Black},
        {"african-american", ClassLabel::Black},
        {"white", ClassLabel::White},
        {"caucasian", ClassLabel::White},
        {"asian", ClassLabel::Asian},
        {"hispanic", ClassLabel::HispanicLatinx},
        {"latin", ClassLabel::HispanicLatinx},
        {"latina", ClassLabel::HispanicLatinx},
        {"latino", ClassLabel::HispanicLatinx},
        {"latinx", ClassLabel::HispanicLatinx}
    };
}

/** Berlin-Kay basic color terms, with both spellings of grey. */
inline WordSet default_color_list() {
    return WordSet{"black", "white", "red", "green", "yellow", "blue", "brown", "purple", "pink", "orange", "grey", "gray"};
}

inline WordSet default_person_keywords() {
    return WordSet{"man", "woman", "person", "individual", "guy", "gal", "boy", "girl"};
}

inline WordSet default_contractions() {
    return WordSet{
        "ain't", "aren't", "can't", "could've", "couldn't", "didn't", "doesn't", "don't", "hadn't", "hasn't",
        "haven't", "he'd", "he'll", "he's", "how'd", "how's", "i'd", "i'll", "i'm", "i've", "isn't", "it'd",
        "it'll", "it's", "let's", "ma'am", "might've", "mightn't", "must've", "mustn't", "needn't", "o'clock",
        "shan't", "she'd", "she'll", "she's", "should've", "shouldn't", "that'd", "that's", "there'd", "there's",
        "they'd", "they'll", "they're", "they've", "wasn't", "we'd", "we'll", "we're", "we've", "weren't",
        "what'll", "what're", "what's", "what've", "when's", "where'd", "where's", "who'd", "who'll", "who's",
        "who've", "why's", "won't", "would've", "wouldn't", "y'all", "you'd", "you'll", "you're", "you've"
    };
}

/** A small starter blocklist; the full shipped list lives in `data/blocklist.txt`. */
inline BigramSet default_blocklist() {
    return BigramSet{
        {"black", "sheep"}, {"black", "friday"}, {"black", "hole"}, {"black", "magic"}, {"black", "market"},
        {"black", "belt"}, {"black", "coffee"}, {"black", "cat"}, {"black", "widow"}, {"black", "box"},
        {"black", "tie"}, {"black", "ops"}, {"black", "metal"}, {"black", "panther"}, {"black", "lives"},
        {"jet", "black"}, {"pitch", "black"},
        {"white", "house"}, {"white", "wine"}, {"white", "noise"}, {"white", "chocolate"}, {"white", "collar"},
        {"white", "sox"}, {"white", "rabbit"}, {"white", "walker"}, {"white", "walkers"}, {"white", "lies"},
        {"snow", "white"},
        {"asian", "food"}, {"asian", "cuisine"}, {"asian", "drama"},
        {"latin", "music"}, {"latin", "america"}, {"latin", "dance"}, {"latin", "jazz"},
        {"hispanic", "heritage"}
    };
}

}

#endif
