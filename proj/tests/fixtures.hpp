#ifndef IDENTMINER_TESTS_FIXTURES_HPP
#define IDENTMINER_TESTS_FIXTURES_HPP

#include <cstdio>
#include <string>
#include <vector>

#include "json.hpp"

#include "identminer/core.hpp"
#include "identminer/ingest.hpp"
#include "identminer/textprep.hpp"

namespace fixtures {

inline identminer::Timestamp ts(const char* text) {
    return *identminer::parse_rfc3339(text);
}

inline nlohmann::json tweet_json(const std::string& text, const std::string& created_at, const std::string& source = "Twitter for Android") {
    return nlohmann::json{
        {"text", text},
        {"source_app", source},
        {"created_at", created_at},
        {"has_image", false},
        {"has_url", false},
        {"mentions_user", false},
        {"geotagged", false}
    };
}

inline nlohmann::json user_json(const std::string& id, const std::string& description, const std::string& snapshot = "2019-07-01T00:00:00Z") {
    return nlohmann::json{
        {"user_id", id},
        {"name", "User " + id},
        {"description", description},
        {"snapshot_time", snapshot},
        {"profile", {
            {"has_profile_url", false},
            {"has_custom_image", true},
            {"geo_enabled", false},
            {"statuses_count", 100},
            {"account_created_at", "2015-01-01T00:00:00Z"}
        }},
        {"tweets", nlohmann::json::array()}
    };
}

inline std::string jsonl(const std::vector<nlohmann::json>& records) {
    std::string out;
    for (const auto& r : records) {
        out += r.dump();
        out += '\n';
    }
    return out;
}

inline identminer::UserRecord user(const std::string& id, const std::string& description, const char* snapshot = "2019-07-01T00:00:00Z") {
    identminer::UserRecord rec;
    rec.user_id = id;
    rec.name = "User " + id;
    rec.description = description;
    rec.snapshot_time = ts(snapshot);
    rec.profile.account_created_at = ts("2015-01-01T00:00:00Z");
    return rec;
}

/** The small hand-built lexicon the textprep and filter examples are worked against. */
inline identminer::TagLexicon small_lexicon() {
    return identminer::TagLexicon{
        {"a", "DT"}, {"an", "DT"}, {"the", "DT"},
        {"really", "RB"}, {"very", "RB"}, {"so", "RB"},
        {"proud", "JJ"}, {"black", "JJ"}, {"white", "JJ"}, {"asian", "JJ"}, {"hispanic", "JJ"},
        {"latina", "JJ"}, {"latino", "JJ"}, {"tired", "JJ"}, {"happy", "JJ"}, {"red", "JJ"}, {"christmas", "NN"},
        {"farmer", "NN"}, {"woman", "NN"}, {"man", "NN"}, {"guy", "NN"}, {"girl", "NN"}, {"nurse", "NN"},
        {"mom", "NN"}, {"dad", "NN"}, {"teacher", "NN"}, {"sheep", "NN"}, {"family", "NN"}, {"beans", "NNS"},
        {"people", "NNS"}, {"teachers", "NNS"}, {"women", "NNS"}, {"lives", "NNS"},
        {"she", "PRP"}, {"i", "PRP"}, {"is", "VBZ"}, {"am", "VBP"}, {"i'm", "VBP"},
        {"and", "CC"}, {"of", "IN"}, {"in", "IN"}, {"love", "VBP"}, {"music", "NN"}, {"movie", "NN"},
        {"fan", "NN"}, {"wardrobe", "NN"}, {"lover", "NN"}, {"watcher", "NN"}
    };
}

struct PlantedProfile {
    identminer::UserRecord record;
    /** "true" for genuine self-reports, otherwise the filter the profile is planted against. */
    std::string category;
};

/**
 * 100 genuine self-reports plus 25 planted false positives for each of the color, plural, bigram and quote filters.
 * Every planted profile trips exactly one filter under the shipped lists.
 */
inline std::vector<PlantedProfile> planted_profiles() {
    std::vector<PlantedProfile> out;
    auto add = [&](const std::string& prefix, std::size_t i, const std::string& text, const std::string& category) {
        char id[16];
        std::snprintf(id, sizeof(id), "%s%03zu", prefix.c_str(), i);
        out.push_back(PlantedProfile{user(id, text), category});
    };

    const std::vector<std::string> queries{"black", "white", "asian", "latina", "hispanic"};
    const std::vector<std::string> openers{"proud", "i'm a", "just a", "happy", "a"};
    const std::vector<std::string> nouns{"farmer", "nurse", "mom", "teacher"};
    std::size_t i = 0;
    for (const auto& o : openers) {
        for (const auto& q : queries) {
            for (const auto& n : nouns) {
                add("t", i++, o + " " + q + " " + n + " from ohio", "true");
            }
        }
    }

    const std::vector<std::string> colors{"red", "green", "yellow", "blue", "pink"};
    i = 0;
    for (const auto& q : queries) {
        for (const auto& c : colors) {
            add("c", i++, q + " and " + c + " wardrobe", "color");
        }
    }

    const std::vector<std::string> plurals{"people", "women", "men", "girls", "folks"};
    i = 0;
    for (const auto& q : queries) {
        for (const auto& pl : plurals) {
            add("p", i++, q + " " + pl + " watcher", "plural");
        }
    }

    const std::vector<std::string> bigrams{
        "black sheep", "black friday", "black hole", "black magic", "black market", "black belt", "black coffee",
        "black cat", "black widow", "black box", "black tie", "black metal", "black panther", "black mirror",
        "black swan", "white house", "white wine", "white noise", "white chocolate", "white collar", "white rabbit",
        "white rice", "white tiger", "asian cuisine", "latin music"
    };
    i = 0;
    for (const auto& b : bigrams) {
        add("b", i++, b + " enthusiast", "bigram");
    }

    const std::vector<std::string> lines{"once you go", "the", "my", "young", "just"};
    i = 0;
    for (const auto& q : queries) {
        for (const auto& l : lines) {
            add("q", i++, "\"" + l + " " + q + "\" fan", "quote");
        }
    }
    return out;
}

}

#endif
