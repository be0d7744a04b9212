#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "identminer/stats.hpp"

#include "oracles.hpp"

namespace im = identminer;

namespace {

using oracles::enumerated_u;
using oracles::pair_count_u;
using oracles::brute_tau_b;
using oracles::top_k_ranks;

}

TEST(MannWhitney, Examples) {
    auto sep = im::mann_whitney_u({1, 2}, {3, 4});
    EXPECT_EQ(sep.u, 0.0);
    auto same = im::mann_whitney_u({1, 2, 3, 4}, {1, 2, 3, 4});
    EXPECT_EQ(same.u, 8.0);
    EXPECT_EQ(same.p, 1.0);

    // Reference values from an independent implementation of the same asymptotic test.
    auto r = im::mann_whitney_u({1, 2, 3, 4, 5}, {6, 7, 8, 9, 10});
    EXPECT_EQ(r.u, 0.0);
    EXPECT_NEAR(r.p, 0.012185780355344813, 1e-12);
    auto t = im::mann_whitney_u({3, 1, 4, 1, 5}, {9, 2, 6, 5, 3, 5});
    EXPECT_EQ(t.u, 6.5);
    EXPECT_NEAR(t.p, 0.13862587987892763, 1e-12);
}

TEST(MannWhitney, Errors) {
    EXPECT_THROW(im::mann_whitney_u({}, {1.0}), std::invalid_argument);
    EXPECT_THROW(im::mann_whitney_u({1.0}, {}), std::invalid_argument);
    EXPECT_THROW(im::mann_whitney_u({2, 2, 2}, {2, 2}), std::invalid_argument);
}

TEST(MannWhitney, ExhaustiveOracleSmallSamples) {
    std::mt19937_64 rng(51);
    for (std::size_t na = 1; na <= 8; ++na) {
        for (std::size_t nb = 1; nb <= 8; ++nb) {
            for (int trial = 0; trial < 30; ++trial) {
                std::vector<double> a(na), b(nb);
                std::size_t range = 2 + rng() % 10;
                for (auto& v : a) {
                    v = static_cast<double>(rng() % range);
                }
                for (auto& v : b) {
                    v = static_cast<double>(rng() % range);
                }
                double oracle = enumerated_u(a, b);
                EXPECT_EQ(oracle, pair_count_u(a, b));
                try {
                    auto r = im::mann_whitney_u(a, b);
                    ASSERT_EQ(r.u, oracle);
                    EXPECT_EQ(r.u + im::mann_whitney_u(b, a).u, static_cast<double>(na * nb));
                    EXPECT_GE(r.p, 0.0);
                    EXPECT_LE(r.p, 1.0);
                    EXPECT_EQ(r.p, im::mann_whitney_u(b, a).p);
                } catch (const std::invalid_argument&) {
                    // Only a constant pooled sample has zero variance.
                    EXPECT_EQ(*std::min_element(a.begin(), a.end()), *std::max_element(b.begin(), b.end()));
                    EXPECT_EQ(*std::max_element(a.begin(), a.end()), *std::min_element(b.begin(), b.end()));
                }
            }
        }
    }
}

TEST(Kendall, Examples) {
    std::vector<std::string> l{"a", "b", "c", "d", "e"};
    std::vector<std::string> rev(l.rbegin(), l.rend());
    EXPECT_DOUBLE_EQ(im::kendall_tau_top_k(l, l, 5), 1.0);
    EXPECT_DOUBLE_EQ(im::kendall_tau_top_k(l, rev, 5), -1.0);
    EXPECT_DOUBLE_EQ(im::kendall_tau_top_k({"x"}, {"x"}, 20), 1.0);
    EXPECT_NEAR(im::kendall_tau_b({1, 2, 3, 4, 5, 6, 6}, {2, 1, 4, 3, 6, 6, 6}), 0.737864787372622, 1e-12);
    // Union {x, y, z, v}: ranks (1, 2, 3, 4) and (2, 1, 4, 3).
    EXPECT_NEAR(im::kendall_tau_top_k({"x", "y", "z", "w"}, {"y", "x", "v", "u"}, 3), 1.0 / 3.0, 1e-12);
    // Disjoint except one: ranks (1, 2, 3, 4, 4) and (3, 4, 4, 1, 2).
    EXPECT_NEAR(im::kendall_tau_top_k({"p", "q", "r"}, {"s", "t", "p"}, 3), -4.0 / 9.0, 1e-12);
    EXPECT_THROW(im::kendall_tau_top_k({"a", "a"}, {"a"}, 2), std::invalid_argument);
    EXPECT_THROW(im::kendall_tau_top_k(l, l, 0), std::invalid_argument);
}

TEST(Kendall, QuadraticOracleOnRandomLists) {
    std::mt19937_64 rng(53);
    std::vector<std::string> alphabet;
    for (int i = 0; i < 30; ++i) {
        alphabet.push_back("i" + std::to_string(i));
    }
    for (int trial = 0; trial < 500; ++trial) {
        auto pick = [&]() {
            auto pool = alphabet;
            std::shuffle(pool.begin(), pool.end(), rng);
            pool.resize(1 + rng() % pool.size());
            return pool;
        };
        auto a = pick(), b = pick();
        std::size_t k = 1 + rng() % 25;
        std::set<std::string> uni;
        for (std::size_t i = 0; i < std::min(k, a.size()); ++i) {
            uni.insert(a[i]);
        }
        for (std::size_t i = 0; i < std::min(k, b.size()); ++i) {
            uni.insert(b[i]);
        }
        std::vector<std::string> items(uni.begin(), uni.end());
        auto x = top_k_ranks(a, items, k), y = top_k_ranks(b, items, k);
        double got = im::kendall_tau_top_k(a, b, k);
        if (items.size() >= 2 && std::set<double>(x.begin(), x.end()).size() > 1 && std::set<double>(y.begin(), y.end()).size() > 1) {
            EXPECT_NEAR(got, brute_tau_b(x, y), 1e-12);
        }
        EXPECT_EQ(got, im::kendall_tau_top_k(b, a, k));
        EXPECT_EQ(im::kendall_tau_top_k(a, a, k), 1.0);
        EXPECT_GE(got, -1.0 - 1e-12);
        EXPECT_LE(got, 1.0 + 1e-12);
    }
}

TEST(Kendall, QuadraticOracleOnTiedSamples) {
    std::mt19937_64 rng(59);
    for (int trial = 0; trial < 200; ++trial) {
        std::size_t n = 2 + rng() % 60;
        std::vector<double> x(n), y(n);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = static_cast<double>(rng() % 6);
            y[i] = static_cast<double>(rng() % 6);
        }
        if (std::set<double>(x.begin(), x.end()).size() > 1 && std::set<double>(y.begin(), y.end()).size() > 1) {
            EXPECT_NEAR(im::kendall_tau_b(x, y), brute_tau_b(x, y), 1e-12);
        }
    }
}

TEST(Krippendorff, HandWorkedFixture) {
    using A = im::Annotation;
    im::AnnotationSet set({"i1", "i2", "i3", "i4"}, {"a", "b", "c"});
    set.at(0, 0) = A::yes;
    set.at(0, 1) = A::yes;
    set.at(0, 2) = A::yes;
    set.at(1, 0) = A::yes;
    set.at(1, 1) = A::yes;
    set.at(1, 2) = A::no;
    set.at(2, 0) = A::no;
    set.at(2, 1) = A::no;
    set.at(3, 0) = A::unsure;
    set.at(3, 2) = A::yes;
    // Coincidences: yy 3 + 1, yn 1, ny 1, nn 2, uy 1, yu 1; n = 10, n_y 6, n_n 3, n_u 1.
    // Do = 4 / 10, De = (100 - 36 - 9 - 1) / 90, alpha = 1 - 0.4 / 0.6.
    EXPECT_NEAR(im::krippendorff_alpha_nominal(set), 1.0 / 3.0, 1e-12);
    EXPECT_NEAR(im::krippendorff_alpha_nominal(set), 0.3333, 5e-5);
}

TEST(Krippendorff, ReferenceReliabilityData) {
    std::optional<int> N;
    std::vector<std::vector<std::optional<int> > > coders{
        {1, 2, 3, 3, 2, 1, 4, 1, 2, N, N, N},
        {1, 2, 3, 3, 2, 2, 4, 1, 2, 5, N, 3},
        {N, 3, 3, 3, 2, 3, 4, 2, 2, 5, 1, N},
        {1, 2, 3, 3, 2, 4, 4, 1, 2, 5, 1, N}
    };
    std::vector<std::vector<std::optional<int> > > units(12);
    for (const auto& c : coders) {
        for (std::size_t u = 0; u < 12; ++u) {
            units[u].push_back(c[u]);
        }
    }
    EXPECT_NEAR(im::krippendorff_alpha_nominal(units), 0.743, 5e-4);

    // Relabeling categories leaves alpha unchanged.
    auto relabeled = units;
    for (auto& u : relabeled) {
        for (auto& v : u) {
            if (v) {
                v = 100 - 7 * *v;
            }
        }
    }
    EXPECT_DOUBLE_EQ(im::krippendorff_alpha_nominal(relabeled), im::krippendorff_alpha_nominal(units));
}

TEST(Krippendorff, PerfectAndRandom) {
    std::vector<std::vector<std::optional<int> > > perfect{{1, 1, 1}, {2, 2, std::nullopt}, {3, 3, 3}};
    EXPECT_EQ(im::krippendorff_alpha_nominal(perfect), 1.0);
    std::vector<std::vector<std::optional<int> > > constant{{1, 1}, {1, 1}};
    EXPECT_EQ(im::krippendorff_alpha_nominal(constant), 1.0);

    std::mt19937_64 rng(61);
    std::vector<std::vector<std::optional<int> > > noise(5000);
    for (auto& u : noise) {
        for (int j = 0; j < 3; ++j) {
            u.push_back(static_cast<int>(rng() % 3));
        }
    }
    EXPECT_NEAR(im::krippendorff_alpha_nominal(noise), 0.0, 0.05);

    std::vector<std::vector<std::optional<int> > > lonely{{1, std::nullopt}};
    EXPECT_THROW(im::krippendorff_alpha_nominal(lonely), std::invalid_argument);
    EXPECT_THROW(im::AnnotationSet({"i"}, {"only"}), std::invalid_argument);
}

TEST(MajorityVote, Rules) {
    using A = im::Annotation;
    EXPECT_EQ(im::majority_vote(std::vector<A>{A::yes, A::yes, A::no}), im::Vote::yes);
    EXPECT_EQ(im::majority_vote(std::vector<A>{A::no, A::no, A::yes}), im::Vote::no);
    EXPECT_EQ(im::majority_vote(std::vector<A>{A::unsure, A::unsure, A::yes}), im::Vote::discard);
    EXPECT_EQ(im::majority_vote(std::vector<A>{A::yes, A::no, A::unsure}), im::Vote::discard);
    EXPECT_EQ(im::majority_vote(std::vector<A>{A::yes, A::no}), im::Vote::discard);
    EXPECT_EQ(im::majority_vote(std::vector<A>{}), im::Vote::discard);
    EXPECT_EQ(im::majority_vote(std::vector<std::optional<A> >{A::yes, std::nullopt, A::yes}), im::Vote::yes);
}

TEST(Annotations, ReadTsv) {
    std::istringstream in(
        "# item\tvalue\tannotator\n"
        "u1\tyes\tann1\n"
        "u1\tyes\tann2\n"
        "u2\tunsure\tann1\n"
        "u2\tunsure\tann2\n"
        "u3\tno\tann2\n"
        "u3\tNo\tann1\n");
    auto set = im::read_annotations(in);
    EXPECT_EQ(set.items(), (std::vector<std::string>{"u1", "u2", "u3"}));
    EXPECT_EQ(set.annotators(), (std::vector<std::string>{"ann1", "ann2"}));
    auto labels = im::majority_labels(set);
    EXPECT_EQ(labels, (std::map<std::string, bool>{{"u1", true}, {"u3", false}}));
    EXPECT_EQ(im::krippendorff_alpha_nominal(set), 1.0);

    std::istringstream dup("u1\tyes\ta\nu1\tno\ta\nu1\tno\tb\n");
    EXPECT_THROW(im::read_annotations(dup), im::DataError);
    std::istringstream bad("u1\tmaybe\ta\n");
    EXPECT_THROW(im::read_annotations(bad), im::DataError);
    std::istringstream one("u1\tyes\ta\n");
    EXPECT_THROW(im::read_annotations(one), im::DataError);
}
