#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "identminer/identminer.hpp"

namespace im = identminer;
namespace fs = std::filesystem;
using nlohmann::json;

#ifndef IDENTMINER_DATA_DIR
#define IDENTMINER_DATA_DIR "data"
#endif

namespace {

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class LogLevel { error = 0, info = 1, debug = 2 };

LogLevel log_level = LogLevel::info;

void log(LogLevel level, const std::string& msg) {
    if (static_cast<int>(level) <= static_cast<int>(log_level)) {
        static const char* names[] = {"error", "info", "debug"};
        std::cerr << "[" << names[static_cast<int>(level)] << "] " << msg << "\n";
    }
}

void init_logging() {
    const char* env = std::getenv("IDENTMINER_LOG");
    if (!env || !*env) {
        return;
    }
    std::string v = env;
    if (v == "error") {
        log_level = LogLevel::error;
    } else if (v == "info") {
        log_level = LogLevel::info;
    } else if (v == "debug") {
        log_level = LogLevel::debug;
    } else {
        throw UsageError("IDENTMINER_LOG must be one of error, info, debug");
    }
}

/** Flag values as given on the command line; unset flags fall back to the config file. */
struct Flags {
    std::string config, corpus, out, resources, lexicon, annotations, labels, train, dev, test, model, model_kind, kind, setting, filters, embeddings;
    std::uint64_t seed = 0;
    std::size_t workers = 1, k = 0;
    double split = 0.6;
    std::map<std::string, const CLI::Option*> given;

    bool has(const std::string& name) const {
        auto it = given.find(name);
        return it != given.end() && it->second->count() > 0;
    }
};

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw im::DataError("cannot open config '" + path + "'");
    }
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw im::DataError("config '" + path + "' is not valid JSON: " + e.what());
    }
}

/** Config file merged with flags; flags win. */
class RunConfig {
public:
    RunConfig(const Flags& flags, std::string command) : my_flags(flags) {
        if (flags.has("--config")) {
            my_file = read_json_file(flags.config);
            if (!my_file.is_object()) {
                throw im::DataError("config must be a JSON object");
            }
        } else {
            my_file = json::object();
        }
        my_resolved["command"] = std::move(command);
    }

    /** String setting from flag or config; empty when neither is set. Recorded in the resolved config. */
    std::string string(const std::string& key, const std::string& flag, const std::string& flag_value, const std::string& fallback = "") {
        std::string v = fallback;
        if (my_flags.has(flag)) {
            v = flag_value;
        } else if (my_file.contains(key) && !my_file.at(key).is_null()) {
            v = my_file.at(key).get<std::string>();
        }
        if (!v.empty()) {
            my_resolved[key] = v;
        }
        return v;
    }

    std::string required(const std::string& key, const std::string& flag, const std::string& flag_value) {
        auto v = string(key, flag, flag_value);
        if (v.empty()) {
            throw UsageError("missing required setting '" + key + "' (flag " + flag + " or config key)");
        }
        return v;
    }

    template<typename T>
    T number(const std::string& key, const std::string& flag, T flag_value, T fallback) {
        T v = fallback;
        if (my_flags.has(flag)) {
            v = flag_value;
        } else if (my_file.contains(key)) {
            v = my_file.at(key).get<T>();
        }
        my_resolved[key] = v;
        return v;
    }

    /** Nested object from the config, converted through its JSON mapping and recorded in resolved form. */
    template<typename T>
    T object(const std::string& key, T fallback) {
        T v = fallback;
        if (my_file.contains(key)) {
            v = my_file.at(key).get<T>();
        }
        my_resolved[key] = v;
        return v;
    }

    json raw(const std::string& key) const {
        return my_file.contains(key) ? my_file.at(key) : json();
    }

    void record(const std::string& key, json value) {
        my_resolved[key] = std::move(value);
    }

    /** Path of a shipped resource list, overridable per file through the "paths" object. */
    std::string resource(const std::string& name, const std::string& file) {
        std::string dir = string("resources", "--resources", my_flags.resources, IDENTMINER_DATA_DIR);
        std::string path = dir + "/" + file;
        if (my_file.contains("paths") && my_file.at("paths").contains(name)) {
            path = my_file.at("paths").at(name).get<std::string>();
        }
        my_resolved["paths"][name] = path;
        my_inputs.push_back(path);
        return path;
    }

    void forget(const std::string& key) {
        my_resolved.erase(key);
    }

    void input(const std::string& path) {
        my_inputs.push_back(path);
    }

    /** Every referenced input must exist before any work starts. */
    void check_inputs() const {
        for (const auto& p : my_inputs) {
            if (!fs::is_regular_file(p)) {
                throw im::DataError("input file '" + p + "' does not exist");
            }
        }
    }

    const json& resolved() const {
        return my_resolved;
    }

    /** Hash of the resolved settings; output location and worker count are excluded because they do not affect results. */
    std::string hash() const {
        return im::hex64(im::fnv1a(my_resolved.dump()));
    }

private:
    const Flags& my_flags;
    json my_file;
    json my_resolved = json::object();
    std::vector<std::string> my_inputs;
};

/** Files are only written once a command has fully succeeded. */
class Outputs {
public:
    void add(const std::string& name, std::string content) {
        my_files.emplace_back(name, std::move(content));
    }

    void add_json(const std::string& name, const json& j) {
        add(name, j.dump(2) + "\n");
    }

    void commit(const std::string& dir) const {
        std::error_code ec;
        fs::create_directories(dir, ec);
        if (ec) {
            throw im::StreamError("cannot create output directory '" + dir + "': " + ec.message());
        }
        std::vector<std::pair<fs::path, fs::path> > staged;
        for (const auto& [name, content] : my_files) {
            fs::path final_path = fs::path(dir) / name;
            fs::path tmp = final_path;
            tmp += ".partial";
            std::ofstream out(tmp, std::ios::binary);
            out << content;
            out.close();
            if (!out) {
                for (auto& s : staged) {
                    fs::remove(s.first, ec);
                }
                fs::remove(tmp, ec);
                throw im::StreamError("cannot write '" + final_path.string() + "'");
            }
            staged.emplace_back(tmp, final_path);
        }
        for (const auto& [tmp, final_path] : staged) {
            fs::rename(tmp, final_path);
            log(LogLevel::info, "wrote " + final_path.string());
        }
    }

private:
    std::vector<std::pair<std::string, std::string> > my_files;
};

struct Corpus {
    std::vector<im::UserRecord> users;
    std::size_t records = 0;
    std::size_t failures = 0;

    std::map<std::string, const im::UserRecord*> index() const {
        std::map<std::string, const im::UserRecord*> out;
        for (const auto& u : users) {
            out[u.user_id] = &u;
        }
        return out;
    }
};

Corpus load_corpus(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw im::DataError("cannot open corpus '" + path + "'");
    }
    auto [records, failures] = im::partition_results(im::load_users(in));
    if (in.bad()) {
        throw im::StreamError("error while reading corpus '" + path + "'");
    }
    for (const auto& f : failures) {
        log(LogLevel::debug, "corpus line " + std::to_string(f.line) + ": " + f.message);
    }
    Corpus c;
    c.records = records.size();
    c.failures = failures.size();
    for (auto& [id, rec] : im::dedupe_latest(records)) {
        c.users.push_back(std::move(rec));
    }
    log(LogLevel::info, "loaded " + std::to_string(c.users.size()) + " users from " + std::to_string(c.records) + " records (" + std::to_string(c.failures) + " malformed lines skipped)");
    return c;
}

json corpus_summary(const Corpus& c) {
    return json{{"users", c.users.size()}, {"records", c.records}, {"malformed_lines", c.failures}};
}

json header(const RunConfig& cfg, std::uint64_t seed) {
    return json{{"command", cfg.resolved().at("command")}, {"config_hash", cfg.hash()}, {"seed", seed}, {"config", cfg.resolved()}};
}

struct ResourcePaths {
    std::string tags, contractions, queries, colors, blocklist, person;
};

ResourcePaths text_resource_paths(RunConfig& cfg) {
    ResourcePaths p;
    p.tags = cfg.resource("tag_lexicon", "tag_lexicon.tsv");
    p.contractions = cfg.resource("contractions", "contractions.txt");
    p.queries = cfg.resource("query_keywords", "query_keywords.tsv");
    p.colors = cfg.resource("colors", "colors.txt");
    p.blocklist = cfg.resource("blocklist", "blocklist.txt");
    p.person = cfg.resource("person_keywords", "person_keywords.txt");
    if (cfg.raw("two_token_african_american").is_boolean()) {
        cfg.record("two_token_african_american", cfg.raw("two_token_african_american"));
    }
    return p;
}

im::TextResources load_text_resources(const ResourcePaths& p, const RunConfig& cfg) {
    im::TextResources res;
    res.tokenizer = im::Tokenizer(im::load_word_set(p.contractions));
    res.tags = im::TagLexicon::load(p.tags);
    res.queries = im::load_query_map(p.queries);
    res.filters.colors = im::load_word_set(p.colors);
    res.filters.blocklist = im::load_bigram_set(p.blocklist);
    res.person_keywords = im::load_word_set(p.person);
    if (cfg.resolved().contains("two_token_african_american")) {
        res.query_options.two_token_african_american = cfg.resolved().at("two_token_african_american").get<bool>();
    }
    return res;
}

im::SelfReportLexicon load_lexicon(const std::string& path) {
    return path.empty() ? im::SelfReportLexicon() : im::SelfReportLexicon::load(path);
}

std::string labeled_tsv(const std::vector<im::LabeledUser>& users) {
    std::ostringstream out;
    im::write_labeled_users(out, users);
    return out.str();
}

json class_count_json(const std::vector<im::LabeledUser>& users) {
    auto counts = im::class_counts(users);
    json j = json::object();
    for (auto c : im::all_classes) {
        j[std::string(im::to_string(c))] = counts[im::class_index(c)];
    }
    return j;
}

std::map<std::string, bool> load_majority_labels(const std::string& path, json* summary) {
    auto set = im::load_annotations(path);
    auto labels = im::majority_labels(set);
    if (summary) {
        (*summary)["items"] = set.items().size();
        (*summary)["annotators"] = set.annotators().size();
        (*summary)["labeled"] = labels.size();
        (*summary)["discarded"] = set.items().size() - labels.size();
        (*summary)["krippendorff_alpha"] = im::krippendorff_alpha_nominal(set);
    }
    return labels;
}

/** Labeled users joined against the corpus; entries without a corpus record are skipped and counted. */
struct Joined {
    std::vector<im::UserRecord> users;
    std::vector<im::ClassLabel> labels;
    std::vector<im::Source> sources;
    std::size_t missing = 0;
};

Joined join_labels(const std::vector<im::LabeledUser>& labeled, const std::map<std::string, const im::UserRecord*>& index) {
    Joined j;
    for (const auto& l : labeled) {
        auto it = index.find(l.user_id);
        if (it == index.end()) {
            ++j.missing;
            continue;
        }
        j.users.push_back(*it->second);
        j.labels.push_back(l.label);
        j.sources.push_back(l.source);
    }
    if (j.missing) {
        log(LogLevel::info, std::to_string(j.missing) + " labeled users have no corpus record and are skipped");
    }
    return j;
}

int run_lexicon_build(const Flags& flags) {
    RunConfig cfg(flags, "lexicon-build");
    auto corpus_path = cfg.required("corpus", "--corpus", flags.corpus);
    auto out = cfg.required("out", "--out", flags.out);
    cfg.forget("out");
    auto tags_path = cfg.resource("tag_lexicon", "tag_lexicon.tsv");
    auto contractions = cfg.resource("contractions", "contractions.txt");
    cfg.input(corpus_path);
    cfg.check_inputs();

    auto corpus = load_corpus(corpus_path);
    auto tags = im::TagLexicon::load(tags_path);
    im::Tokenizer tokenizer(im::load_word_set(contractions));
    auto lexicon = im::build_selfreport_lexicon(corpus.users, tags, tokenizer);

    std::ostringstream tsv;
    lexicon.write(tsv);
    auto summary = header(cfg, 0);
    summary["corpus"] = corpus_summary(corpus);
    summary["entries"] = lexicon.size();
    summary["total_self_reports"] = lexicon.total_self_reports();
    summary["total_occurrences"] = lexicon.total_occurrences();

    Outputs o;
    o.add("lexicon.tsv", tsv.str());
    o.add_json("lexicon.json", summary);
    o.commit(out);
    return 0;
}

int run_dataset_build(const Flags& flags) {
    RunConfig cfg(flags, "dataset-build");
    auto kind = cfg.required("kind", "--kind", flags.kind);
    if (kind != "qb" && kind != "hf" && kind != "cb") {
        throw UsageError("--kind must be qb, hf or cb");
    }
    auto corpus_path = cfg.required("corpus", "--corpus", flags.corpus);
    auto out = cfg.required("out", "--out", flags.out);
    cfg.forget("out");
    auto workers = flags.has("--workers") ? flags.workers : cfg.raw("workers").is_null() ? std::size_t(1) : cfg.raw("workers").get<std::size_t>();
    auto lexicon_path = kind == "qb" ? cfg.string("lexicon", "--lexicon", flags.lexicon) : cfg.required("lexicon", "--lexicon", flags.lexicon);
    auto params = cfg.object("score", im::ScoreParams{});
    params.validate();
    im::FilterConfig filters;
    if (flags.has("--filters")) {
        filters = im::parse_filter_list(flags.filters);
    } else if (cfg.raw("filters").is_string()) {
        filters = im::parse_filter_list(cfg.raw("filters").get<std::string>());
    } else if (cfg.raw("filters").is_object()) {
        filters = cfg.raw("filters").get<im::FilterConfig>();
    }
    cfg.record("filters", filters);
    auto annotations = cfg.string("annotations", "--annotations", flags.annotations);
    std::optional<std::size_t> k;
    if (flags.has("--k")) {
        k = flags.k;
    } else if (cfg.raw("k").is_number_unsigned()) {
        k = cfg.raw("k").get<std::size_t>();
    }
    cfg.record("k", k ? json(*k) : json(nullptr));
    std::optional<double> split;
    if (flags.has("--split")) {
        split = flags.split;
    } else if (cfg.raw("split").is_number()) {
        split = cfg.raw("split").get<double>();
    }
    std::uint64_t seed = 0;
    bool stratified = false;
    if (split) {
        cfg.record("split", *split);
        seed = cfg.number<std::uint64_t>("seed", "--seed", flags.seed, 0);
        stratified = cfg.raw("stratified").is_boolean() && cfg.raw("stratified").get<bool>();
        cfg.record("stratified", stratified);
    }
    auto paths = text_resource_paths(cfg);
    cfg.input(corpus_path);
    if (!lexicon_path.empty()) {
        cfg.input(lexicon_path);
    }
    if (!annotations.empty()) {
        cfg.input(annotations);
    }
    cfg.check_inputs();

    auto res = load_text_resources(paths, cfg);
    auto lexicon = load_lexicon(lexicon_path);
    auto corpus = load_corpus(corpus_path);
    auto profiles = im::analyze_profiles(corpus.users, res, workers);

    auto stats = header(cfg, seed);
    stats["corpus"] = corpus_summary(corpus);
    Outputs o;
    std::vector<im::LabeledUser> dataset;
    if (kind == "qb") {
        dataset = im::build_qb(profiles, res, lexicon, params);
    } else if (kind == "hf") {
        dataset = im::build_hf(profiles, res, lexicon, params, filters);
        std::map<std::string, bool> labels;
        json ann;
        if (!annotations.empty()) {
            labels = load_majority_labels(annotations, &ann);
            stats["annotations"] = ann;
        }
        auto acc = im::account_filters(profiles, res, filters, annotations.empty() ? nullptr : &labels);
        stats["filters"] = acc;
        o.add("hf_filters.txt", im::format_accounting_table(acc));
    } else {
        auto qb = im::build_qb(profiles, res, lexicon, params);
        auto hf = im::build_hf(profiles, res, lexicon, params, filters);
        auto pool = im::pool_candidates(qb, hf);
        stats["candidates"] = json{{"qb", qb.size()}, {"hf", hf.size()}, {"pooled", pool.size()}, {"class_counts", class_count_json(pool)}};
        dataset = im::build_cb(pool, k);
    }
    stats["n"] = dataset.size();
    stats["class_counts"] = class_count_json(dataset);
    o.add(kind + ".tsv", labeled_tsv(dataset));
    if (split) {
        auto parts = im::split_train_dev(dataset, *split, seed, stratified);
        stats["split"] = json{{"train", class_count_json(parts.train)}, {"dev", class_count_json(parts.dev)}};
        o.add(kind + "_train.tsv", labeled_tsv(parts.train));
        o.add(kind + "_dev.tsv", labeled_tsv(parts.dev));
        o.add_json(kind + "_split.json", im::split_manifest(parts));
    }
    o.add_json(kind + ".json", stats);
    o.commit(out);
    return 0;
}

int run_tune(const Flags& flags) {
    RunConfig cfg(flags, "tune");
    auto corpus_path = cfg.required("corpus", "--corpus", flags.corpus);
    auto out = cfg.required("out", "--out", flags.out);
    cfg.forget("out");
    auto lexicon_path = cfg.required("lexicon", "--lexicon", flags.lexicon);
    auto annotations = cfg.required("annotations", "--annotations", flags.annotations);
    auto workers = flags.has("--workers") ? flags.workers : cfg.raw("workers").is_null() ? std::size_t(1) : cfg.raw("workers").get<std::size_t>();
    std::vector<im::ScoreParams> grid = im::default_grid();
    if (cfg.raw("grid").is_array()) {
        grid = cfg.raw("grid").get<std::vector<im::ScoreParams> >();
        for (const auto& g : grid) {
            g.validate();
        }
        cfg.record("grid", grid);
    } else {
        cfg.record("grid", "default");
    }
    auto paths = text_resource_paths(cfg);
    cfg.input(corpus_path);
    cfg.input(lexicon_path);
    cfg.input(annotations);
    cfg.check_inputs();

    auto res = load_text_resources(paths, cfg);
    auto lexicon = load_lexicon(lexicon_path);
    json ann;
    auto labels = load_majority_labels(annotations, &ann);
    auto corpus = load_corpus(corpus_path);

    std::vector<im::UserRecord> annotated;
    for (const auto& u : corpus.users) {
        if (labels.count(u.user_id)) {
            annotated.push_back(u);
        }
    }
    ann["missing_from_corpus"] = labels.size() - annotated.size();
    auto profiles = im::analyze_profiles(annotated, res, workers);
    std::vector<im::TuningItem> items;
    for (auto& p : profiles) {
        items.push_back(im::TuningItem{p.user_id, p.tagged, p.matches, labels.at(p.user_id)});
    }
    auto best = im::tune_params(items, lexicon, grid);

    std::ostringstream scores;
    for (const auto& it : items) {
        auto s = im::max_score(it.tagged, it.matches, lexicon, best.params);
        scores << it.user_id << '\t' << (it.self_report ? "yes" : "no") << '\t' << im::format_double(s.value_or(0.0)) << '\n';
    }
    auto result = header(cfg, 0);
    result["corpus"] = corpus_summary(corpus);
    result["annotations"] = ann;
    result["tuning_items"] = items.size();
    result["grid_points"] = grid.size();
    result["best"] = json{
        {"params", best.params},
        {"tp", best.true_positives},
        {"fp", best.false_positives},
        {"fn", best.false_negatives},
        {"precision", best.true_positives + best.false_positives ? json(best.precision()) : json(nullptr)},
        {"recall", best.recall()}
    };
    Outputs o;
    o.add_json("tune.json", result);
    o.add("tune_scores.tsv", scores.str());
    o.commit(out);
    return 0;
}

im::TrainConfig train_config(RunConfig& cfg, std::uint64_t seed) {
    auto tc = cfg.raw("train").is_object() ? cfg.raw("train").get<im::TrainConfig>() : im::TrainConfig{};
    tc.seed = seed;
    tc.validate();
    cfg.record("train", tc);
    return tc;
}

json histogram_json(const std::vector<im::WeightBin>& bins) {
    json j = json::array();
    for (const auto& b : bins) {
        j.push_back(b);
    }
    return j;
}

std::vector<im::NameExample> name_examples(const Joined& j) {
    std::vector<im::NameExample> out;
    for (std::size_t i = 0; i < j.users.size(); ++i) {
        out.push_back(im::NameExample{j.users[i].name, im::name_metadata(j.users[i].profile), j.labels[i], j.sources[i]});
    }
    return out;
}

std::vector<im::SparseExample> embedding_examples(const Joined& j, const std::map<std::string, std::vector<double> >& emb, std::size_t* missing) {
    std::vector<im::SparseExample> out;
    for (std::size_t i = 0; i < j.users.size(); ++i) {
        auto it = emb.find(j.users[i].user_id);
        if (it == emb.end()) {
            ++*missing;
            continue;
        }
        out.push_back(im::SparseExample{im::dense_as_sparse(it->second), j.labels[i], j.sources[i]});
    }
    return out;
}

int run_train(const Flags& flags) {
    RunConfig cfg(flags, "train");
    auto kind = cfg.required("model_kind", "--model-kind", flags.model_kind);
    if (kind != "unigram" && kind != "name_cnn" && kind != "embedding" && kind != "majority" && kind != "random") {
        throw UsageError("--model-kind must be unigram, name_cnn, embedding, majority or random");
    }
    auto corpus_path = cfg.required("corpus", "--corpus", flags.corpus);
    auto out = cfg.required("out", "--out", flags.out);
    cfg.forget("out");
    auto train_path = cfg.required("train_set", "--train", flags.train);
    auto dev_path = cfg.string("dev_set", "--dev", flags.dev);
    auto seed = cfg.number<std::uint64_t>("seed", "--seed", flags.seed, 0);
    std::string embeddings, stopwords_path, contractions;
    if (kind == "embedding") {
        embeddings = cfg.required("embeddings", "--embeddings", flags.embeddings);
        cfg.input(embeddings);
    }
    if (kind == "unigram") {
        stopwords_path = cfg.resource("stopwords", "stopwords.txt");
        contractions = cfg.resource("contractions", "contractions.txt");
    }
    im::TrainConfig tc;
    im::NameCnnConfig nc;
    std::size_t min_count = 2;
    if (kind == "unigram" || kind == "embedding") {
        tc = train_config(cfg, seed);
        if (kind == "unigram") {
            min_count = cfg.number<std::size_t>("min_count", "", 0, 2);
        }
    } else if (kind == "name_cnn") {
        nc = cfg.raw("name_cnn").is_object() ? cfg.raw("name_cnn").get<im::NameCnnConfig>() : im::NameCnnConfig{};
        nc.train.seed = seed;
        nc.train.validate();
        nc.shape.validate();
        cfg.record("name_cnn", nc);
    }
    cfg.input(corpus_path);
    cfg.input(train_path);
    if (!dev_path.empty()) {
        cfg.input(dev_path);
    }
    cfg.check_inputs();

    auto corpus = load_corpus(corpus_path);
    auto index = corpus.index();
    auto train = join_labels(im::load_labeled_users(train_path), index);
    Joined dev;
    if (!dev_path.empty()) {
        dev = join_labels(im::load_labeled_users(dev_path), index);
    }

    auto summary = header(cfg, seed);
    summary["corpus"] = corpus_summary(corpus);
    summary["model_kind"] = kind;
    summary["train"] = json{{"n", train.users.size()}, {"missing_from_corpus", train.missing}};
    if (!dev_path.empty()) {
        summary["dev"] = json{{"n", dev.users.size()}, {"missing_from_corpus", dev.missing}};
    }
    json model;
    std::function<im::ClassLabel(std::size_t)> dev_predict;

    if (kind == "majority") {
        auto m = im::MajorityBaseline::fit(train.labels);
        model = im::save_majority(m);
        dev_predict = [m](std::size_t) { return m.label(); };
    } else if (kind == "random") {
        im::check_training_labels(train.labels);
        model = im::save_random(im::RandomBaseline(seed));
        auto r = std::make_shared<im::RandomBaseline>(seed);
        dev_predict = [r](std::size_t i) { return (*r)(i); };
    } else if (kind == "unigram") {
        auto stop = im::load_word_set(stopwords_path);
        im::Tokenizer tokenizer(im::load_word_set(contractions));
        im::TrainingLog tlog;
        const auto& vocab_users = dev_path.empty() ? train.users : dev.users;
        auto m = std::make_shared<im::UnigramModel>(im::train_unigram(train.users, train.labels, train.sources, vocab_users, stop, tc, min_count, tokenizer, &tlog));
        summary["effective_weights"] = histogram_json(im::effective_weight_histogram(train.labels, train.sources, tc));
        summary["vocab_size"] = m->vocab().size();
        summary["vocab_source"] = dev_path.empty() ? "train" : "dev";
        summary["final_loss"] = tlog.loss.empty() ? json(nullptr) : json(tlog.loss.back());
        model = im::save_unigram(*m);
        auto tok = std::make_shared<im::Tokenizer>(tokenizer);
        dev_predict = [m, tok, &dev](std::size_t i) { return m->predict(dev.users[i], *tok).label; };
    } else if (kind == "embedding") {
        auto emb = im::load_embeddings(embeddings);
        std::size_t missing = 0;
        auto examples = embedding_examples(train, emb, &missing);
        im::TrainingLog tlog;
        std::vector<im::ClassLabel> used_labels;
        std::vector<im::Source> used_sources;
        for (const auto& e : examples) {
            used_labels.push_back(e.label);
            used_sources.push_back(e.source);
        }
        auto m = std::make_shared<im::LinearModel>(im::train_linear(examples, 768, tc, &tlog));
        summary["train"]["missing_embeddings"] = missing;
        summary["effective_weights"] = histogram_json(im::effective_weight_histogram(used_labels, used_sources, tc));
        summary["final_loss"] = tlog.loss.empty() ? json(nullptr) : json(tlog.loss.back());
        model = im::save_embedding_model(*m);
        auto table = std::make_shared<std::map<std::string, std::vector<double> > >(std::move(emb));
        dev_predict = [m, table, &dev](std::size_t i) {
            auto it = table->find(dev.users[i].user_id);
            return it == table->end() ? m->predict({}).label : m->predict(im::dense_as_sparse(it->second)).label;
        };
    } else {
        auto train_ex = name_examples(train);
        auto dev_ex = name_examples(dev);
        im::NameTrainingLog nlog;
        auto m = std::make_shared<im::NameModel>(im::train_name_cnn(train_ex, dev_ex, nc, &nlog));
        summary["effective_weights"] = histogram_json(im::effective_weight_histogram(train.labels, train.sources, nc.train));
        json epochs = json::array();
        for (const auto& e : nlog.epochs) {
            epochs.push_back(json{{"epoch", e.epoch}, {"train_loss", e.train_loss}, {"dev_macro_f1", e.dev_macro_f1 ? json(*e.dev_macro_f1) : json(nullptr)}});
        }
        summary["epochs"] = epochs;
        summary["best_epoch"] = nlog.best_epoch;
        summary["char_vocab_size"] = m->vocab().size();
        model = im::save_name_cnn(*m);
        auto ex = std::make_shared<std::vector<im::NameExample> >(dev_ex);
        dev_predict = [m, ex](std::size_t i) { return m->predict((*ex)[i].name, (*ex)[i].metadata).label; };
    }

    if (!dev.users.empty()) {
        std::vector<im::ClassLabel> preds;
        for (std::size_t i = 0; i < dev.users.size(); ++i) {
            preds.push_back(dev_predict(i));
        }
        summary["dev_report"] = im::make_report(dev.labels, preds);
    }

    Outputs o;
    o.add_json("model.json", model);
    o.add_json("train.json", summary);
    o.commit(out);
    return 0;
}

struct EvalItem {
    std::size_t index = 0;
    im::ClassLabel label = im::ClassLabel::White;
};

int run_evaluate(const Flags& flags) {
    RunConfig cfg(flags, "evaluate");
    auto model_path = cfg.required("model", "--model", flags.model);
    auto corpus_path = cfg.required("corpus", "--corpus", flags.corpus);
    auto test_path = cfg.required("test_set", "--test", flags.test);
    auto out = cfg.required("out", "--out", flags.out);
    cfg.forget("out");
    auto setting = im::parse_eval_setting(cfg.string("setting", "--setting", flags.setting, "imbalanced"));
    auto seed = cfg.number<std::uint64_t>("seed", "--seed", flags.seed, 0);
    auto embeddings = cfg.string("embeddings", "--embeddings", flags.embeddings);
    std::string contractions = cfg.resource("contractions", "contractions.txt");
    cfg.input(model_path);
    cfg.input(corpus_path);
    cfg.input(test_path);
    if (!embeddings.empty()) {
        cfg.input(embeddings);
    }
    cfg.check_inputs();

    auto model = read_json_file(model_path);
    auto kind = im::model_kind(model);
    auto corpus = load_corpus(corpus_path);
    auto test = join_labels(im::load_labeled_users(test_path), corpus.index());
    std::vector<EvalItem> items;
    for (std::size_t i = 0; i < test.users.size(); ++i) {
        items.push_back(EvalItem{i, test.labels[i]});
    }

    std::function<im::ClassLabel(const EvalItem&)> predictor;
    im::Tokenizer tokenizer(im::load_word_set(contractions));
    std::optional<im::UnigramModel> unigram;
    std::optional<im::NameModel> cnn;
    std::optional<im::LinearModel> linear;
    std::optional<im::RandomBaseline> random;
    std::map<std::string, std::vector<double> > emb;
    if (kind == "majority") {
        auto m = im::load_majority(model);
        predictor = [m](const EvalItem&) { return m.label(); };
    } else if (kind == "random") {
        random = im::load_random(model);
        predictor = [&](const EvalItem& it) { return (*random)(it.index); };
    } else if (kind == "unigram") {
        unigram = im::load_unigram(model);
        predictor = [&](const EvalItem& it) { return unigram->predict(test.users[it.index], tokenizer).label; };
    } else if (kind == "name_cnn") {
        cnn = im::load_name_cnn(model);
        predictor = [&](const EvalItem& it) {
            const auto& u = test.users[it.index];
            return cnn->predict(u.name, im::name_metadata(u.profile)).label;
        };
    } else if (kind == "embedding") {
        if (embeddings.empty()) {
            throw UsageError("an embedding model needs --embeddings");
        }
        linear = im::load_embedding_model(model);
        emb = im::load_embeddings(embeddings);
        predictor = [&](const EvalItem& it) {
            auto e = emb.find(test.users[it.index].user_id);
            if (e == emb.end()) {
                throw im::DataError("no embedding for test user '" + test.users[it.index].user_id + "'");
            }
            return linear->predict(im::dense_as_sparse(e->second)).label;
        };
    } else {
        throw im::DataError("unknown model kind '" + kind + "'");
    }

    auto report = im::evaluate(predictor, items, setting, seed);
    auto result = header(cfg, seed);
    result["corpus"] = corpus_summary(corpus);
    result["model_kind"] = kind;
    result["test"] = json{{"n", test.users.size()}, {"missing_from_corpus", test.missing}};
    result["report"] = report;

    Outputs o;
    o.add_json("eval.json", result);
    o.add("eval.txt", im::format_report_table({{kind, report}}) + "\n" + im::format_confusion(report));
    o.commit(out);
    return 0;
}

int run_analyze(const Flags& flags) {
    RunConfig cfg(flags, "analyze");
    auto corpus_path = cfg.required("corpus", "--corpus", flags.corpus);
    auto labels_path = cfg.required("labels", "--labels", flags.labels);
    auto out = cfg.required("out", "--out", flags.out);
    cfg.forget("out");
    auto workers = flags.has("--workers") ? flags.workers : cfg.raw("workers").is_null() ? std::size_t(1) : cfg.raw("workers").get<std::size_t>();
    im::AnalyticsOptions opts;
    opts.sage.lambda = cfg.number<double>("sage_lambda", "", 0, 1.0);
    opts.keywords = cfg.number<std::size_t>("keywords", "", 0, 20);
    opts.ks = cfg.object<std::vector<std::size_t> >("kendall_k", {20, 50});
    opts.workers = workers;
    auto stop = cfg.resource("stopwords", "stopwords.txt");
    auto emoticons = cfg.resource("emoticons", "emoticons.txt");
    auto tags = cfg.resource("tag_lexicon", "tag_lexicon.tsv");
    auto contractions = cfg.resource("contractions", "contractions.txt");
    cfg.input(corpus_path);
    cfg.input(labels_path);
    cfg.check_inputs();

    im::AnalyticsResources res;
    res.tokenizer = im::Tokenizer(im::load_word_set(contractions));
    res.tags = im::TagLexicon::load(tags);
    res.stopwords = im::load_word_set(stop);
    res.emoticons = im::EmoticonMatcher::load(emoticons);

    auto corpus = load_corpus(corpus_path);
    auto joined = join_labels(im::load_labeled_users(labels_path), corpus.index());
    im::GroupedUsers groups;
    for (std::size_t i = 0; i < joined.users.size(); ++i) {
        groups[joined.labels[i]].push_back(joined.users[i]);
    }
    auto report = im::analyze_groups(groups, res, opts);

    auto result = header(cfg, 0);
    result["corpus"] = corpus_summary(corpus);
    result["labeled"] = json{{"n", joined.users.size()}, {"missing_from_corpus", joined.missing}};
    result["analytics"] = report;
    Outputs o;
    o.add_json("analytics.json", result);
    o.commit(out);
    return 0;
}

}

int main(int argc, char** argv) {
    CLI::App app{"Self-report demographic dataset construction and evaluation"};
    app.require_subcommand(1);
    Flags flags;

    auto common = [&](CLI::App* sub) {
        flags.given["--config"] = sub->add_option("--config", flags.config, "JSON run configuration");
        flags.given["--corpus"] = sub->add_option("--corpus", flags.corpus, "JSON-lines user corpus");
        flags.given["--out"] = sub->add_option("--out", flags.out, "Output directory");
        flags.given["--resources"] = sub->add_option("--resources", flags.resources, "Directory holding the shipped resource lists");
        flags.given["--workers"] = sub->add_option("--workers", flags.workers, "Worker threads")->check(CLI::PositiveNumber);
    };

    auto* lex = app.add_subcommand("lexicon-build", "Build the self-report lexicon from profile descriptions");
    common(lex);

    auto* ds = app.add_subcommand("dataset-build", "Build a QB, HF or CB dataset");
    common(ds);
    flags.given["--kind"] = ds->add_option("--kind", flags.kind, "qb, hf or cb")->check(CLI::IsMember({"qb", "hf", "cb"}));
    flags.given["--lexicon"] = ds->add_option("--lexicon", flags.lexicon, "Self-report lexicon TSV");
    flags.given["--filters"] = ds->add_option("--filters", flags.filters, "Comma-separated filters: color,plural,bigram,quote (or none)");
    flags.given["--annotations"] = ds->add_option("--annotations", flags.annotations, "Annotation TSV for pass precision");
    flags.given["--k"] = ds->add_option("--k", flags.k, "Users per class for cb")->check(CLI::PositiveNumber);
    flags.given["--split"] = ds->add_option("--split", flags.split, "Also write a seeded train/dev split with this train fraction")->check(CLI::Range(0.0, 1.0));
    ds->add_option("--seed", flags.seed, "Seed for the split");

    auto* tune = app.add_subcommand("tune", "Grid-search the self-report score parameters");
    common(tune);
    tune->add_option("--lexicon", flags.lexicon, "Self-report lexicon TSV");
    tune->add_option("--annotations", flags.annotations, "Annotation TSV: user_id, yes|no|unsure, annotator");

    auto* train = app.add_subcommand("train", "Train a classifier or baseline");
    common(train);
    flags.given["--model-kind"] = train->add_option("--model-kind", flags.model_kind, "unigram, name_cnn, embedding, majority or random");
    flags.given["--train"] = train->add_option("--train", flags.train, "Training dataset TSV");
    flags.given["--dev"] = train->add_option("--dev", flags.dev, "Dev dataset TSV");
    flags.given["--seed"] = train->add_option("--seed", flags.seed, "Root seed");
    flags.given["--embeddings"] = train->add_option("--embeddings", flags.embeddings, "User embedding TSV");

    auto* ev = app.add_subcommand("evaluate", "Evaluate a trained model on a test set");
    common(ev);
    flags.given["--model"] = ev->add_option("--model", flags.model, "Model JSON");
    flags.given["--test"] = ev->add_option("--test", flags.test, "Test dataset TSV");
    flags.given["--setting"] = ev->add_option("--setting", flags.setting, "balanced or imbalanced")->check(CLI::IsMember({"balanced", "imbalanced"}));
    ev->add_option("--seed", flags.seed, "Seed for balanced subsampling");
    ev->add_option("--embeddings", flags.embeddings, "User embedding TSV");

    auto* an = app.add_subcommand("analyze", "Group-level lexical and behavioral statistics");
    common(an);
    flags.given["--labels"] = an->add_option("--labels", flags.labels, "Labeled users TSV defining the groups");

    // Options registered on several subcommands share a flag slot; look them up on the chosen one.
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    CLI::App* chosen = app.get_subcommands().front();
    for (auto& [name, opt] : flags.given) {
        try {
            opt = chosen->get_option(name);
        } catch (const CLI::OptionNotFound&) {
            opt = nullptr;
        }
    }
    for (auto it = flags.given.begin(); it != flags.given.end();) {
        it = it->second ? std::next(it) : flags.given.erase(it);
    }

    try {
        init_logging();
        const std::string name = chosen->get_name();
        if (name == "lexicon-build") {
            return run_lexicon_build(flags);
        }
        if (name == "dataset-build") {
            return run_dataset_build(flags);
        }
        if (name == "tune") {
            return run_tune(flags);
        }
        if (name == "train") {
            return run_train(flags);
        }
        if (name == "evaluate") {
            return run_evaluate(flags);
        }
        return run_analyze(flags);
    } catch (const UsageError& e) {
        log(LogLevel::error, e.what());
        return 1;
    } catch (const std::exception& e) {
        log(LogLevel::error, e.what());
        return 2;
    }
}
