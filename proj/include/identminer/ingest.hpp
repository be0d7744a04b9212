#ifndef IDENTMINER_INGEST_HPP
#define IDENTMINER_INGEST_HPP

#include <algorithm>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <variant>
#include <vector>

#include "json.hpp"

#include "core.hpp"

/**
 * @file ingest.hpp
 * @brief Streaming reader for archived JSON-lines user exports.
 */

namespace identminer {

struct Tweet {
    std::string text;
    std::string source_app;
    Timestamp created_at{};
    bool has_image = false;
    bool has_url = false;
    bool mentions_user = false;
    bool geotagged = false;
};

struct ProfileMeta {
    bool has_profile_url = false;
    bool has_custom_image = false;
    bool geo_enabled = false;
    bool verified = false;
    std::uint64_t statuses_count = 0;
    std::uint64_t followers_count = 0;
    Timestamp account_created_at{};
};

/**
 * One user's archived export. Tweets are ordered newest first.
 */
struct UserRecord {
    std::string user_id;
    std::string name;
    std::string description;
    std::vector<Tweet> tweets;
    ProfileMeta profile;
    Timestamp snapshot_time{};

    /** 1-based line of the record in its source stream; orders records with equal snapshot times. */
    std::size_t sequence = 0;
};

struct ParseFailure {
    std::size_t line = 0;
    std::string message;
};

using LoadResult = std::variant<UserRecord, ParseFailure>;

/** Thrown when the underlying stream fails, as distinct from a malformed record. */
class StreamError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/**
 * Per-field counts of optional fields that were absent (or null) and fell back to their defaults.
 */
struct MissingnessReport {
    std::size_t records = 0;
    std::map<std::string, std::size_t> missing;

    void merge(const MissingnessReport& other) {
        records += other.records;
        for (const auto& [field, count] : other.missing) {
            missing[field] += count;
        }
    }
};

namespace internal {

template<typename T>
bool read_optional(const nlohmann::json& obj, const char* key, const std::string& path, T& out, MissingnessReport* report, std::string& error) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) {
        if (report) {
            ++report->missing[path];
        }
        return true;
    }
    if constexpr (std::is_same_v<T, bool>) {
        if (!it->is_boolean()) {
            error = "field '" + path + "' must be a boolean";
            return false;
        }
        out = it->template get<bool>();
    } else if constexpr (std::is_same_v<T, std::uint64_t>) {
        if (!it->is_number_integer() || (!it->is_number_unsigned() && it->template get<std::int64_t>() < 0)) {
            error = "field '" + path + "' must be a non-negative integer";
            return false;
        }
        out = it->template get<std::uint64_t>();
    } else if constexpr (std::is_same_v<T, std::string>) {
        if (!it->is_string()) {
            error = "field '" + path + "' must be a string";
            return false;
        }
        out = it->template get<std::string>();
    }
    return true;
}

inline bool read_required_string(const nlohmann::json& obj, const char* key, const std::string& path, std::string& out, std::string& error) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) {
        error = "missing required field '" + path + "'";
        return false;
    }
    if (!it->is_string()) {
        error = "field '" + path + "' must be a string";
        return false;
    }
    out = it->get<std::string>();
    return true;
}

inline bool read_required_time(const nlohmann::json& obj, const char* key, const std::string& path, Timestamp& out, std::string& error) {
    std::string raw;
    if (!read_required_string(obj, key, path, raw, error)) {
        return false;
    }
    auto parsed = parse_rfc3339(raw);
    if (!parsed) {
        error = "field '" + path + "' is not an RFC-3339 timestamp: " + raw;
        return false;
    }
    out = *parsed;
    return true;
}

}

/**
 * Parse a single JSON-lines record. Never throws on malformed content.
 *
 * Required: `user_id` (non-empty), `description`, `snapshot_time`, and for each tweet `text` and `created_at`.
 * Everything else is optional and defaults to false/0/empty; absences are tallied into `report` when provided.
 * A missing `profile.account_created_at` defaults to the snapshot time.
 */
inline LoadResult parse_user_line(std::string_view line, std::size_t line_number, MissingnessReport* report = nullptr) {
    auto fail = [&](std::string message) -> LoadResult {
        return ParseFailure{line_number, std::move(message)};
    };

    auto doc = nlohmann::json::parse(line.begin(), line.end(), nullptr, false);
    if (doc.is_discarded()) {
        return fail("malformed JSON");
    }
    if (!doc.is_object()) {
        return fail("record is not a JSON object");
    }

    // Counted into a local report first so that failed records do not pollute the tallies.
    MissingnessReport local;
    MissingnessReport* rep = report ? &local : nullptr;
    std::string error;

    UserRecord rec;
    rec.sequence = line_number;
    if (!internal::read_required_string(doc, "user_id", "user_id", rec.user_id, error)) {
        return fail(error);
    }
    if (rec.user_id.empty()) {
        return fail("field 'user_id' is empty");
    }
    if (!internal::read_required_string(doc, "description", "description", rec.description, error) ||
        !internal::read_required_time(doc, "snapshot_time", "snapshot_time", rec.snapshot_time, error) ||
        !internal::read_optional(doc, "name", "name", rec.name, rep, error)) {
        return fail(error);
    }

    rec.profile.account_created_at = rec.snapshot_time;
    auto pit = doc.find("profile");
    if (pit == doc.end() || pit->is_null()) {
        if (rep) {
            ++rep->missing["profile"];
        }
    } else if (!pit->is_object()) {
        return fail("field 'profile' must be an object");
    } else {
        const auto& p = *pit;
        auto& meta = rec.profile;
        if (!internal::read_optional(p, "has_profile_url", "profile.has_profile_url", meta.has_profile_url, rep, error) ||
            !internal::read_optional(p, "has_custom_image", "profile.has_custom_image", meta.has_custom_image, rep, error) ||
            !internal::read_optional(p, "geo_enabled", "profile.geo_enabled", meta.geo_enabled, rep, error) ||
            !internal::read_optional(p, "verified", "profile.verified", meta.verified, rep, error) ||
            !internal::read_optional(p, "statuses_count", "profile.statuses_count", meta.statuses_count, rep, error) ||
            !internal::read_optional(p, "followers_count", "profile.followers_count", meta.followers_count, rep, error)) {
            return fail(error);
        }
        std::string created;
        bool had_created = p.contains("account_created_at") && !p["account_created_at"].is_null();
        if (!internal::read_optional(p, "account_created_at", "profile.account_created_at", created, rep, error)) {
            return fail(error);
        }
        if (had_created) {
            auto parsed = parse_rfc3339(created);
            if (!parsed) {
                return fail("field 'profile.account_created_at' is not an RFC-3339 timestamp: " + created);
            }
            if (*parsed > rec.snapshot_time) {
                return fail("account_created_at is later than snapshot_time");
            }
            meta.account_created_at = *parsed;
        }
    }

    auto tit = doc.find("tweets");
    if (tit == doc.end() || tit->is_null()) {
        if (rep) {
            ++rep->missing["tweets"];
        }
    } else if (!tit->is_array()) {
        return fail("field 'tweets' must be an array");
    } else {
        rec.tweets.reserve(tit->size());
        for (std::size_t i = 0; i < tit->size(); ++i) {
            const auto& t = (*tit)[i];
            if (!t.is_object()) {
                return fail("tweet " + std::to_string(i) + " is not an object");
            }
            Tweet tw;
            if (!internal::read_required_string(t, "text", "tweets.text", tw.text, error) ||
                !internal::read_required_time(t, "created_at", "tweets.created_at", tw.created_at, error) ||
                !internal::read_optional(t, "source_app", "tweets.source_app", tw.source_app, rep, error) ||
                !internal::read_optional(t, "has_image", "tweets.has_image", tw.has_image, rep, error) ||
                !internal::read_optional(t, "has_url", "tweets.has_url", tw.has_url, rep, error) ||
                !internal::read_optional(t, "mentions_user", "tweets.mentions_user", tw.mentions_user, rep, error) ||
                !internal::read_optional(t, "geotagged", "tweets.geotagged", tw.geotagged, rep, error)) {
                return fail("tweet " + std::to_string(i) + ": " + error);
            }
            rec.tweets.push_back(std::move(tw));
        }
        std::stable_sort(rec.tweets.begin(), rec.tweets.end(), [](const Tweet& a, const Tweet& b) {
            return a.created_at > b.created_at;
        });
    }

    if (report) {
        local.records = 1;
        report->merge(local);
    }
    return rec;
}

/**
 * Pull-style reader over a newline-delimited stream. Each call to `next()` consumes one line.
 *
 * Malformed lines produce a `ParseFailure` carrying the 1-based line number; the stream is never aborted for content errors.
 * A failing stream (`badbit`) raises `StreamError`.
 */
class UserReader {
public:
    explicit UserReader(std::istream& input) : my_input(input) {}

    std::optional<LoadResult> next() {
        std::string line;
        if (!std::getline(my_input, line)) {
            if (my_input.bad()) {
                throw StreamError("I/O error after line " + std::to_string(my_line));
            }
            return std::nullopt;
        }
        ++my_line;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            return LoadResult{ParseFailure{my_line, "empty line"}};
        }
        return parse_user_line(line, my_line, &my_missing);
    }

    std::size_t lines_read() const {
        return my_line;
    }

    const MissingnessReport& missingness() const {
        return my_missing;
    }

private:
    std::istream& my_input;
    std::size_t my_line = 0;
    MissingnessReport my_missing;
};

/** Drain a stream into a vector of records and failures, in input order. */
inline std::vector<LoadResult> load_users(std::istream& input, MissingnessReport* report = nullptr) {
    UserReader reader(input);
    std::vector<LoadResult> out;
    while (auto res = reader.next()) {
        out.push_back(std::move(*res));
    }
    if (report) {
        report->merge(reader.missingness());
    }
    return out;
}

/**
 * Merge one record into a latest-snapshot map.
 * A record replaces the stored one when its `(snapshot_time, sequence)` is not smaller, so later
 * stream positions win ties and merging partial maps is order-independent when sequences are distinct.
 */
inline void merge_latest(std::map<std::string, UserRecord>& latest, UserRecord record) {
    auto it = latest.find(record.user_id);
    if (it == latest.end()) {
        auto key = record.user_id;
        latest.emplace(std::move(key), std::move(record));
        return;
    }
    const auto& cur = it->second;
    if (std::tie(record.snapshot_time, record.sequence) >= std::tie(cur.snapshot_time, cur.sequence)) {
        it->second = std::move(record);
    }
}

inline void merge_latest(std::map<std::string, UserRecord>& into, std::map<std::string, UserRecord> from) {
    for (auto& entry : from) {
        merge_latest(into, std::move(entry.second));
    }
}

/**
 * Keep one record per user, the one with the latest snapshot. An empty latest description is kept verbatim.
 */
template<typename Range>
std::map<std::string, UserRecord> dedupe_latest(Range&& records) {
    std::map<std::string, UserRecord> latest;
    for (auto&& rec : records) {
        merge_latest(latest, rec);
    }
    return latest;
}

/** Split load results into records and failures. */
inline std::pair<std::vector<UserRecord>, std::vector<ParseFailure> > partition_results(std::vector<LoadResult> results) {
    std::pair<std::vector<UserRecord>, std::vector<ParseFailure> > out;
    for (auto& res : results) {
        if (auto* rec = std::get_if<UserRecord>(&res)) {
            out.first.push_back(std::move(*rec));
        } else {
            out.second.push_back(std::get<ParseFailure>(std::move(res)));
        }
    }
    return out;
}

}

#endif
