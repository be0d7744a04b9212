#include <gtest/gtest.h>

#include <random>

#include "identminer/analytics.hpp"

#include "fixtures.hpp"

namespace im = identminer;

namespace {

im::Tweet tweet(const std::string& text, const std::string& app = "", bool mention = false, bool image = false, bool url = false, bool geo = false) {
    im::Tweet t;
    t.text = text;
    t.source_app = app;
    t.mentions_user = mention;
    t.has_image = image;
    t.has_url = url;
    t.geotagged = geo;
    return t;
}

im::UserRecord with_tweets(const std::string& id, std::vector<im::Tweet> tweets) {
    auto u = fixtures::user(id, "");
    u.tweets = std::move(tweets);
    return u;
}

std::vector<im::Token> toks(std::string_view s) {
    return im::internal::lexical_tokens(im::tokenize(s));
}

}

TEST(Lexical, TypeTokenRatio) {
    EXPECT_DOUBLE_EQ(im::type_token_ratio(toks("a a b")), 2.0 / 3.0);
    EXPECT_EQ(im::type_token_ratio(toks("one two three")), 1.0);
    EXPECT_EQ(im::type_token_ratio(toks("")), 0.0);
    // Tokens: so, so, #happy, don't, stop, so -> 4 distinct of 6; punctuation ignored.
    EXPECT_DOUBLE_EQ(im::type_token_ratio(toks("So so #happy!! don't stop, SO")), 4.0 / 6.0);
}

TEST(Lexical, LexicalDiversity) {
    im::WordSet stop{"the", "a", "is"};
    EXPECT_EQ(im::lexical_diversity(toks("the a is the"), stop), 0.0);
    EXPECT_EQ(im::lexical_diversity(toks("great game tonight"), stop), 1.0);
    EXPECT_DOUBLE_EQ(im::lexical_diversity(toks("great game @bob http://x"), {}), 0.5);
    EXPECT_EQ(im::lexical_diversity({}, stop), 0.0);
}

TEST(Lexical, MacroAveragedOverUsers) {
    // TTR 2/5 for one user (one tweet) and 4/5 for another (three tweets).
    im::GroupedUsers groups;
    groups[im::ClassLabel::Black] = {
        with_tweets("u1", {tweet("a a a b b")}),
        with_tweets("u2", {tweet("a b c d d"), tweet("e f g h h"), tweet("w x y z z")}),
        with_tweets("u3", {})
    };
    auto stats = im::group_lexical_stats(groups, im::Tokenizer(), {});
    ASSERT_EQ(stats.size(), 1u);
    EXPECT_EQ(stats[0].users, 2u);
    EXPECT_NEAR(stats[0].mean.type_token_ratio, 0.6, 1e-12);

    groups[im::ClassLabel::Black] = {with_tweets("solo", {tweet("don't cry don't #sad")})};
    auto one = im::group_lexical_stats(groups, im::Tokenizer(), {});
    EXPECT_DOUBLE_EQ(one[0].mean.type_token_ratio, 0.75);
    EXPECT_DOUBLE_EQ(one[0].mean.contractions_per_tweet, 2.0);
    EXPECT_DOUBLE_EQ(one[0].mean.hashtags_per_tweet, 1.0);
    EXPECT_DOUBLE_EQ(one[0].mean.lexical_diversity, 1.0);
}

TEST(Lexical, BruteForceRecount) {
    std::mt19937_64 rng(71);
    const std::vector<std::string> vocab{"the", "game", "won't", "#tbt", "@ann", "http://t.co/x", "fun", "is", "i'm", "#win"};
    im::WordSet stop{"the", "is"};
    std::vector<im::UserRecord> users;
    for (int i = 0; i < 30; ++i) {
        std::vector<im::Tweet> tw;
        std::size_t nt = 1 + rng() % 5;
        for (std::size_t t = 0; t < nt; ++t) {
            std::string text;
            std::size_t len = 1 + rng() % 8;
            for (std::size_t w = 0; w < len; ++w) {
                text += (w ? " " : "") + vocab[rng() % vocab.size()];
            }
            tw.push_back(tweet(text));
        }
        users.push_back(with_tweets("u" + std::to_string(i), tw));
    }

    // Whitespace-separated words are exactly the tokens of this vocabulary.
    double ttr = 0, ld = 0, cpt = 0, hpt = 0;
    for (const auto& u : users) {
        double ut = 0, ul = 0, uc = 0, uh = 0;
        for (const auto& t : u.tweets) {
            std::vector<std::string> words;
            std::istringstream in(t.text);
            for (std::string w; in >> w;) {
                words.push_back(w);
            }
            std::set<std::string> distinct(words.begin(), words.end());
            double kept = 0;
            for (const auto& w : words) {
                kept += w[0] != '@' && w.rfind("http", 0) != 0 && !stop.count(w);
                uc += w.find('\'') != std::string::npos;
                uh += w[0] == '#';
            }
            ut += static_cast<double>(distinct.size()) / words.size();
            ul += kept / words.size();
        }
        double n = static_cast<double>(u.tweets.size());
        ttr += ut / n;
        ld += ul / n;
        cpt += uc / n;
        hpt += uh / n;
    }
    im::GroupedUsers groups{{im::ClassLabel::Asian, users}};
    for (std::size_t workers : {1, 4}) {
        auto s = im::group_lexical_stats(groups, im::Tokenizer(), stop, workers)[0].mean;
        EXPECT_NEAR(s.type_token_ratio, ttr / 30, 1e-12);
        EXPECT_NEAR(s.lexical_diversity, ld / 30, 1e-12);
        EXPECT_NEAR(s.contractions_per_tweet, cpt / 30, 1e-12);
        EXPECT_NEAR(s.hashtags_per_tweet, hpt / 30, 1e-12);
    }
}

TEST(Lexical, PairwiseTests) {
    im::GroupedUsers groups;
    groups[im::ClassLabel::White] = {with_tweets("a", {tweet("a a")}), with_tweets("b", {tweet("a b")}), with_tweets("c", {tweet("a a b")})};
    groups[im::ClassLabel::Black] = {with_tweets("d", {tweet("x y")}), with_tweets("e", {tweet("x y z")})};
    groups[im::ClassLabel::Asian] = {};
    auto stats = im::group_lexical_stats(groups, im::Tokenizer(), {});
    auto tests = im::pairwise_lexical_tests(stats);
    ASSERT_EQ(tests.size(), 4u * 3u);
    // Only TTR varies; the other features are constant across users.
    for (const auto& t : tests) {
        bool has_empty = t.a == im::ClassLabel::Asian || t.b == im::ClassLabel::Asian;
        if (has_empty || t.feature != "type_token_ratio") {
            EXPECT_FALSE(t.result) << t.feature;
        } else {
            EXPECT_TRUE(t.result) << t.feature;
        }
    }
}

TEST(Behavior, DeviceRules) {
    EXPECT_EQ(im::classify_device("Twitter for Android"), im::Device::android);
    EXPECT_EQ(im::classify_device("Twitter for iPhone"), im::Device::iphone);
    EXPECT_EQ(im::classify_device("Tweetbot for iOS"), im::Device::iphone);
    EXPECT_EQ(im::classify_device("Twitter Web App"), im::Device::desktop);
    EXPECT_EQ(im::classify_device("TweetDeck"), im::Device::desktop);
    EXPECT_EQ(im::classify_device("Buffer"), im::Device::other);
}

TEST(Behavior, Rows) {
    auto u = with_tweets("u", {tweet("hi", "Twitter for Android")});
    u.snapshot_time = fixtures::ts("2020-01-01T00:00:00Z");
    u.profile.account_created_at = u.snapshot_time - std::chrono::seconds(static_cast<long>(10 * im::seconds_per_month));
    u.profile.statuses_count = 100;
    auto p = im::behavioral_profile(im::ClassLabel::White, {u});
    EXPECT_EQ(p.android_pct, 100.0);
    EXPECT_EQ(p.iphone_pct, 0.0);
    EXPECT_NEAR(p.avg_tweets_per_month, 10.0, 1e-9);

    u.profile.account_created_at = u.snapshot_time - std::chrono::hours(24);
    EXPECT_DOUBLE_EQ(im::tweets_per_month(u), 100.0);
}

TEST(Behavior, BruteForceRecount) {
    std::mt19937_64 rng(73);
    const std::vector<std::string> apps{"Twitter for Android", "Twitter for iPhone", "Twitter Web Client", "IFTTT"};
    std::vector<im::UserRecord> users;
    double android = 0, geo = 0, url_users = 0, mention = 0, tweets = 0;
    for (int i = 0; i < 40; ++i) {
        std::vector<im::Tweet> tw;
        bool a = false, g = false;
        for (std::size_t t = 0, n = rng() % 6; t < n; ++t) {
            auto app = apps[rng() % apps.size()];
            bool m = rng() % 2, geotag = rng() % 5 == 0;
            tw.push_back(tweet("x", app, m, false, false, geotag));
            a = a || app == apps[0];
            g = g || geotag;
            mention += m;
            tweets += 1;
        }
        auto u = with_tweets("u" + std::to_string(i), tw);
        u.profile.has_profile_url = rng() % 3 == 0;
        url_users += u.profile.has_profile_url;
        android += a;
        geo += g;
        users.push_back(u);
    }
    auto p = im::behavioral_profile(im::ClassLabel::Black, users);
    EXPECT_NEAR(p.android_pct, 100 * android / 40, 1e-12);
    EXPECT_NEAR(p.geotagged_pct, 100 * geo / 40, 1e-12);
    EXPECT_NEAR(p.profile_url_pct, 100 * url_users / 40, 1e-12);
    EXPECT_NEAR(p.mention_pct, 100 * mention / tweets, 1e-12);
    EXPECT_EQ(p.tweets, static_cast<std::size_t>(tweets));
    for (double v : {p.android_pct, p.iphone_pct, p.desktop_pct, p.profile_url_pct, p.custom_image_pct, p.geo_enabled_pct, p.geotagged_pct, p.mention_pct, p.image_pct, p.url_pct}) {
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 100.0);
    }
}

TEST(Behavior, DuplicatingTweetsMovesOnlyMicroRows) {
    std::vector<im::UserRecord> users{
        with_tweets("a", {tweet("x", "Twitter for iPhone", true), tweet("y", "Twitter for Android", false, true)}),
        with_tweets("b", {tweet("z", "Twitter Web App", false)})
    };
    auto before = im::behavioral_profile(im::ClassLabel::White, users);
    auto dup = users[0].tweets;
    users[0].tweets.insert(users[0].tweets.end(), dup.begin(), dup.end());
    auto after = im::behavioral_profile(im::ClassLabel::White, users);
    EXPECT_EQ(after.android_pct, before.android_pct);
    EXPECT_EQ(after.iphone_pct, before.iphone_pct);
    EXPECT_EQ(after.desktop_pct, before.desktop_pct);
    EXPECT_EQ(after.geotagged_pct, before.geotagged_pct);
    EXPECT_EQ(after.avg_tweets_per_month, before.avg_tweets_per_month);
    EXPECT_DOUBLE_EQ(before.mention_pct, 100.0 / 3.0);
    EXPECT_DOUBLE_EQ(after.mention_pct, 200.0 / 5.0);
    EXPECT_NE(after.image_pct, before.image_pct);
}

TEST(Items, EmoticonsAndRanking) {
    im::EmoticonMatcher m;
    EXPECT_EQ(m.find("great :) day :-D <3 xD D: http://x.co/:) hello"), (std::vector<std::string>{":)", ":-D", "<3", "xD", "D:"}));
    EXPECT_TRUE(m.find("word:)").empty());

    std::istringstream in("# comment\n<3\n[xX][dD]\n");
    auto small = im::EmoticonMatcher::read(in);
    EXPECT_EQ(small.find(":) <3 XD"), (std::vector<std::string>{"<3", "XD"}));
    std::istringstream bad("[unclosed\n");
    EXPECT_THROW(im::EmoticonMatcher::read(bad), im::DataError);

    std::vector<im::UserRecord> users{with_tweets("a", {tweet("#b #a #c #a"), tweet("#c #a")})};
    auto counts = im::count_items(users, im::ItemCategory::hashtag, im::Tokenizer(), im::TagLexicon("NN"), m);
    EXPECT_EQ(counts.at("#a"), 3u);
    EXPECT_EQ(im::ranked_items(counts), (std::vector<std::string>{"#a", "#c", "#b"}));
}

TEST(Items, RankCorrelationsCoverCategoriesAndPairs) {
    im::GroupedUsers groups;
    groups[im::ClassLabel::White] = {with_tweets("a", {tweet("#x #y :) love it")})};
    groups[im::ClassLabel::Black] = {with_tweets("b", {tweet("#y #x :( hate it")})};
    groups[im::ClassLabel::Asian] = {with_tweets("c", {tweet("#x #y :) love it")})};
    auto rc = im::rank_correlations(groups, im::Tokenizer(), im::TagLexicon("NN"), im::EmoticonMatcher());
    EXPECT_EQ(rc.size(), 4u * 2u * 3u);
    for (const auto& c : rc) {
        if (c.category == im::ItemCategory::hashtag && c.a == im::ClassLabel::White && c.b == im::ClassLabel::Asian) {
            EXPECT_EQ(c.tau, 1.0);
        }
    }
}

TEST(Sage, ClosedFormAtZeroPenalty) {
    im::WordCounts bg{{"a", 3}, {"b", 1}};
    im::WordCounts g{{"a", 1}, {"b", 1}};
    im::SageOptions o;
    o.lambda = 0;
    auto eta = im::sage_deviations(g, bg, o);
    EXPECT_NEAR(eta.at("a"), std::log(1.01 / 2.02) - std::log(3.01 / 4.02), 1e-12);
    EXPECT_NEAR(eta.at("b"), std::log(1.01 / 2.02) - std::log(1.01 / 4.02), 1e-12);
    auto kw = im::distinctive_keywords(g, bg, 5, o);
    ASSERT_EQ(kw.size(), 1u);
    EXPECT_EQ(kw[0].word, "b");
}

TEST(Sage, BackgroundEqualsGroup) {
    im::WordCounts bg{{"a", 5}, {"b", 2}, {"c", 9}};
    for (double lambda : {0.0, 1.0}) {
        im::SageOptions o;
        o.lambda = lambda;
        for (const auto& [w, e] : im::sage_deviations(bg, bg, o)) {
            EXPECT_NEAR(e, 0.0, 1e-9) << w;
        }
        EXPECT_TRUE(im::distinctive_keywords(bg, bg, 10, o).empty());
    }
}

TEST(Sage, GroupOnlyWordRanksFirst) {
    im::WordCounts bg{{"common", 100}, {"other", 50}, {"unique", 4}};
    im::WordCounts g{{"common", 40}, {"other", 20}, {"unique", 4}};
    im::SageOptions o;
    o.lambda = 0;
    auto kw = im::distinctive_keywords(g, bg, 3, o);
    ASSERT_FALSE(kw.empty());
    EXPECT_EQ(kw[0].word, "unique");
    EXPECT_THROW(im::sage_deviations({{"absent", 1}}, bg, o), std::invalid_argument);
}

TEST(Sage, PenalizedSolutionSatisfiesOptimality) {
    std::mt19937_64 rng(79);
    im::WordCounts bg, g;
    for (int i = 0; i < 40; ++i) {
        auto w = "w" + std::to_string(i);
        bg[w] = 1 + static_cast<double>(rng() % 200);
        g[w] = static_cast<double>(rng() % 30);
    }
    im::SageOptions o;
    o.lambda = 2.0;
    auto eta = im::sage_deviations(g, bg, o);

    double btot = 0, ctot = 0;
    for (auto& [w, b] : bg) {
        btot += b + o.pseudo_count;
        ctot += g[w] + o.pseudo_count;
    }
    double z = 0;
    std::map<std::string, double> q;
    for (auto& [w, b] : bg) {
        q[w] = std::exp(std::log((b + o.pseudo_count) / btot) + eta.at(w));
        z += q[w];
    }
    double total = 0;
    for (auto& [w, b] : bg) {
        q[w] /= z;
        total += q[w];
        // Subgradient condition of the penalized likelihood.
        double resid = g[w] + o.pseudo_count - ctot * q[w];
        if (eta.at(w) != 0) {
            EXPECT_NEAR(resid, o.lambda * (eta.at(w) > 0 ? 1 : -1), 1e-5) << w;
        } else {
            EXPECT_LE(std::abs(resid), o.lambda + 1e-5) << w;
        }
    }
    EXPECT_NEAR(total, 1.0, 1e-12);

    std::size_t nonzero = 0;
    for (auto& [w, e] : eta) {
        nonzero += e != 0;
    }
    EXPECT_LT(nonzero, eta.size());
}

TEST(Analyze, ReportShapeAndWorkerInvariance) {
    im::GroupedUsers groups;
    groups[im::ClassLabel::White] = {with_tweets("a", {tweet("love the game #tbt :)", "Twitter for iPhone")}), with_tweets("b", {tweet("game day don't stop", "Twitter for Android")})};
    groups[im::ClassLabel::Black] = {with_tweets("c", {tweet("church choir sunday #blessed", "Twitter for Android")}), with_tweets("d", {tweet("choir practice <3")})};
    im::AnalyticsResources res;
    res.stopwords = {"the"};
    im::AnalyticsOptions opts;
    opts.sage.lambda = 0;
    auto one = nlohmann::json(im::analyze_groups(groups, res, opts));
    opts.workers = 3;
    auto three = nlohmann::json(im::analyze_groups(groups, res, opts));
    EXPECT_EQ(one.dump(), three.dump());
    EXPECT_TRUE(one["lexical"].contains("White"));
    EXPECT_TRUE(one["lexical_tests"]["type_token_ratio"].contains("W-B"));
    EXPECT_TRUE(one["kendall"]["emoji"]["k20"].contains("W-B"));
    EXPECT_TRUE(one["kendall"]["pos"]["k50"].contains("W-B"));
    EXPECT_EQ(one["behavior"].size(), 2u);
    EXPECT_EQ(one["keywords"]["Black"][0]["word"].get<std::string>() != "game", true);
}
