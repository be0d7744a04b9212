#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "identminer/textprep.hpp"

#include "fixtures.hpp"

namespace im = identminer;

namespace {

using Pair = std::pair<std::string, im::TokenKind>;

std::vector<Pair> kinds(const std::vector<im::Token>& tokens) {
    std::vector<Pair> out;
    for (const auto& t : tokens) {
        out.emplace_back(t.text, t.kind);
    }
    return out;
}

std::vector<im::TaggedToken> tag(const std::string& text) {
    return im::pos_tag(im::tokenize(text), fixtures::small_lexicon());
}

std::vector<std::pair<std::string, std::string> > candidates(const std::string& text, im::CandidateOptions opt = {}) {
    std::vector<std::pair<std::string, std::string> > out;
    for (auto& c : im::extract_selfreport_candidates(tag(text), opt)) {
        out.emplace_back(c.word, c.pos);
    }
    return out;
}

}

TEST(Tokenize, Empty) {
    EXPECT_TRUE(im::tokenize("").empty());
    EXPECT_TRUE(im::tokenize("   \t\n").empty());
}

TEST(Tokenize, MixedProfile) {
    using K = im::TokenKind;
    auto toks = im::tokenize("Black farmer & dad #blessed @a http://t.co/x");
    std::vector<Pair> expected{
        {"black", K::word}, {"farmer", K::word}, {"&", K::punct}, {"dad", K::word},
        {"#blessed", K::hashtag}, {"@a", K::mention}, {"http://t.co/x", K::url}
    };
    EXPECT_EQ(kinds(toks), expected);
}

TEST(Tokenize, Contractions) {
    using K = im::TokenKind;
    EXPECT_EQ(kinds(im::tokenize("I'm a nurse")), (std::vector<Pair>{{"i'm", K::contraction}, {"a", K::word}, {"nurse", K::word}}));
    // Typographic apostrophe normalizes to the listed form.
    EXPECT_EQ(kinds(im::tokenize("I’m")), (std::vector<Pair>{{"i'm", K::contraction}}));
    EXPECT_EQ(kinds(im::tokenize("mom's")), (std::vector<Pair>{{"mom's", K::word}}));
    EXPECT_EQ(kinds(im::tokenize("rock 'n")), (std::vector<Pair>{{"rock", K::word}, {"'", K::punct}, {"n", K::word}}));
}

TEST(Tokenize, HyphensQuotesAndUrls) {
    using K = im::TokenKind;
    EXPECT_EQ(kinds(im::tokenize("African-American, 3.5 GPA")),
        (std::vector<Pair>{{"african-american", K::word}, {",", K::punct}, {"3.5", K::word}, {"gpa", K::word}}));
    EXPECT_EQ(kinds(im::tokenize("\"once you go black\"")),
        (std::vector<Pair>{{"\"", K::punct}, {"once", K::word}, {"you", K::word}, {"go", K::word}, {"black", K::word}, {"\"", K::punct}}));
    EXPECT_EQ(kinds(im::tokenize("see www.x.com. Wow!!!")),
        (std::vector<Pair>{{"see", K::word}, {"www.x.com", K::url}, {".", K::punct}, {"wow", K::word}, {"!!!", K::punct}}));
    EXPECT_EQ(kinds(im::tokenize("# @ #1")),
        (std::vector<Pair>{{"#", K::punct}, {"@", K::punct}, {"#1", K::hashtag}}));
}

TEST(Tokenize, EmojiSequences) {
    using K = im::TokenKind;
    // thumbs up + skin tone, family ZWJ sequence, two flags, heart + VS16
    std::string text = "ok \U0001F44D\U0001F3FD \U0001F468‍\U0001F469‍\U0001F467 \U0001F1FA\U0001F1F8\U0001F1F2\U0001F1FD ❤️yes";
    auto toks = im::tokenize(text);
    std::vector<Pair> expected{
        {"ok", K::word},
        {"\U0001F44D\U0001F3FD", K::emoji},
        {"\U0001F468‍\U0001F469‍\U0001F467", K::emoji},
        {"\U0001F1FA\U0001F1F8", K::emoji},
        {"\U0001F1F2\U0001F1FD", K::emoji},
        {"❤️", K::emoji},
        {"yes", K::word}
    };
    EXPECT_EQ(kinds(toks), expected);
}

TEST(Tokenize, LatinOneLowercasing) {
    auto toks = im::tokenize("LATINA Mamá ÁRBOL");
    ASSERT_EQ(toks.size(), 3u);
    EXPECT_EQ(toks[0].text, "latina");
    EXPECT_EQ(toks[1].text, "mamá");
    EXPECT_EQ(toks[2].text, "árbol");
}

TEST(Tokenize, SpansReconstructInput) {
    const std::vector<std::string> pieces{
        "Black", "farmer", "&", "#Blessed", "@Bob", "http://t.co/x", "I'm", "don’t", " ", "  ", "\t", ",", "...",
        "\"", "“", "”", "\U0001F525", "\U0001F44D\U0001F3FD", "Mamá", "african-american", "x-", "-y", "3.5", "!", "\n"
    };
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 500; ++trial) {
        std::string text;
        std::size_t count = rng() % 12;
        for (std::size_t i = 0; i < count; ++i) {
            text += pieces[rng() % pieces.size()];
        }
        auto toks = im::tokenize(text);

        std::string rebuilt;
        std::size_t prev = 0;
        for (const auto& t : toks) {
            ASSERT_LE(prev, t.start) << text;
            ASSERT_LT(t.start, t.end) << text;
            for (std::size_t i = prev; i < t.start; ++i) {
                ASSERT_TRUE(text[i] == ' ' || text[i] == '\t' || text[i] == '\n') << text;
            }
            rebuilt += text.substr(prev, t.end - prev);
            prev = t.end;
            if (t.kind == im::TokenKind::word) {
                EXPECT_EQ(t.text, im::utf8::lower(text.substr(t.start, t.end - t.start)));
            }
        }
        for (std::size_t i = prev; i < text.size(); ++i) {
            ASSERT_TRUE(text[i] == ' ' || text[i] == '\t' || text[i] == '\n');
        }
        rebuilt += text.substr(prev);
        EXPECT_EQ(rebuilt, text);
    }
}

TEST(PosTag, LexiconAndSentinels) {
    auto lex = fixtures::small_lexicon();
    EXPECT_TRUE(im::pos_tag({}, lex).empty());

    auto people = im::pos_tag(im::tokenize("people"), lex);
    ASSERT_EQ(people.size(), 1u);
    EXPECT_EQ(people[0].pos, "NNS");

    auto oov = im::pos_tag(im::tokenize("zxqv"), lex);
    EXPECT_EQ(oov[0].pos, "NN");
    EXPECT_EQ(lex.default_tag(), "NN");

    auto mixed = im::pos_tag(im::tokenize("#tag @bob http://x.co \U0001F525 !"), lex);
    std::vector<std::string> tags;
    for (auto& t : mixed) {
        tags.push_back(t.pos);
    }
    EXPECT_EQ(tags, (std::vector<std::string>{"HT", "USR", "URL", "EMJ", "PCT"}));
}

TEST(PosTag, LengthPreserved) {
    auto lex = fixtures::small_lexicon();
    for (const char* text : {"", "a", "i am a proud black farmer", "#x @y z!!"}) {
        auto toks = im::tokenize(text);
        EXPECT_EQ(im::pos_tag(toks, lex).size(), toks.size());
    }
}

TEST(TagLexicon, RejectsInvalidTags) {
    im::TagLexicon lex;
    EXPECT_THROW(lex.add("word", "XYZ"), std::invalid_argument);
    EXPECT_THROW(im::TagLexicon("BAD"), std::invalid_argument);

    std::istringstream good("Farmer\tNN\n# comment\nproud\tJJ\n");
    auto parsed = im::TagLexicon::read(good);
    EXPECT_EQ(parsed.size(), 2u);
    EXPECT_EQ(parsed.tag("farmer"), "NN");

    std::istringstream bad("farmer\tNOUN\n");
    EXPECT_THROW(im::TagLexicon::read(bad), im::DataError);
}

TEST(TagLexicon, ShippedFileLoads) {
    auto lex = im::TagLexicon::load(std::string(IDENTMINER_DATA_DIR) + "/tag_lexicon.tsv");
    EXPECT_GT(lex.size(), 50000u);
    EXPECT_EQ(lex.tag("farmer"), "NN");
    EXPECT_EQ(lex.tag("people"), "NNS");
    EXPECT_EQ(lex.tag("proud"), "JJ");
}

TEST(SelfReportCandidates, Examples) {
    using V = std::vector<std::pair<std::string, std::string> >;
    EXPECT_EQ(candidates("i am a proud black farmer"), (V{{"proud", "JJ"}, {"black", "JJ"}, {"farmer", "NN"}}));
    EXPECT_EQ(candidates("she is a farmer"), V{});
    EXPECT_EQ(candidates("i'm tired"), (V{{"tired", "JJ"}}));
    EXPECT_EQ(candidates("I am really a nurse"), (V{{"nurse", "NN"}}));
    EXPECT_EQ(candidates("i am a"), V{});
    EXPECT_EQ(candidates("i am teachers"), (V{{"teachers", "NNS"}}));
    // A hashtag breaks the adjective run; the run's last adjective becomes the head.
    EXPECT_EQ(candidates("i'm proud #black farmer"), (V{{"proud", "JJ"}}));
    EXPECT_EQ(candidates("i'm a mom. i am a farmer"), (V{{"mom", "NN"}, {"farmer", "NN"}}));
}

TEST(SelfReportCandidates, ImSpellingIsOptIn) {
    using V = std::vector<std::pair<std::string, std::string> >;
    EXPECT_EQ(candidates("im a nurse"), V{});
    EXPECT_EQ(candidates("im a nurse", im::CandidateOptions{true}), (V{{"nurse", "NN"}}));
}

TEST(SelfReportCandidates, CaseInvariant) {
    for (const char* text : {"i am a proud black farmer", "i'm tired", "she is a farmer"}) {
        std::string upper(text);
        for (auto& c : upper) {
            c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        }
        EXPECT_EQ(candidates(text), candidates(upper));
    }
}

TEST(SelfReportLexicon, EmptyCorpus) {
    std::vector<std::string> corpus;
    auto lex = im::build_selfreport_lexicon(corpus, fixtures::small_lexicon());
    EXPECT_TRUE(lex.empty());
    EXPECT_EQ(lex.total_self_reports(), 0u);
}

TEST(SelfReportLexicon, CountsPerDescription) {
    std::vector<std::string> corpus{
        "i am a farmer",
        "i'm a proud farmer",
        "I am a black farmer and a farmer",
        "my dad is a farmer"
    };
    auto lex = im::build_selfreport_lexicon(corpus, fixtures::small_lexicon());
    auto farmer = lex.find("farmer");
    ASSERT_TRUE(farmer);
    EXPECT_EQ(farmer->self_reports, 3u);
    EXPECT_EQ(farmer->occurrences, 4u);

    EXPECT_EQ(lex.find("proud")->self_reports, 1u);
    EXPECT_EQ(lex.find("black")->occurrences, 1u);
    EXPECT_FALSE(lex.contains("dad"));
    EXPECT_EQ(lex.size(), 3u);
    EXPECT_EQ(lex.total_self_reports(), 5u);
}

TEST(SelfReportLexicon, PluralsExcluded) {
    std::vector<std::string> corpus{"i am teachers", "i'm a teacher"};
    auto lex = im::build_selfreport_lexicon(corpus, fixtures::small_lexicon());
    EXPECT_FALSE(lex.contains("teachers"));
    EXPECT_TRUE(lex.contains("teacher"));
}

TEST(SelfReportLexicon, WorksOverRecords) {
    std::vector<im::UserRecord> recs{fixtures::user("a", "I'm a nurse"), fixtures::user("b", "nurse life")};
    auto lex = im::build_selfreport_lexicon(recs, fixtures::small_lexicon());
    EXPECT_EQ(lex.find("nurse")->self_reports, 1u);
    EXPECT_EQ(lex.find("nurse")->occurrences, 2u);
}

TEST(SelfReportLexicon, InvariantsAndMergeOnRandomCorpora) {
    const std::vector<std::string> words{"i", "am", "i'm", "a", "the", "proud", "black", "white", "farmer", "nurse", "mom", "people", "really", "and", "#x", "!"};
    auto lexicon = fixtures::small_lexicon();
    im::Tokenizer tokenizer;
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<std::string> corpus;
        for (int d = 0; d < 60; ++d) {
            std::string desc;
            std::size_t len = rng() % 10;
            for (std::size_t i = 0; i < len; ++i) {
                desc += words[rng() % words.size()] + " ";
            }
            corpus.push_back(desc);
        }
        auto serial = im::build_selfreport_lexicon(corpus, lexicon);
        for (const auto& [w, c] : serial.entries()) {
            EXPECT_GT(c.self_reports, 0u);
            EXPECT_LE(c.self_reports, c.occurrences);
        }

        im::SelfReportCounter left(lexicon, tokenizer), right(lexicon, tokenizer);
        for (std::size_t i = 0; i < corpus.size(); ++i) {
            (i % 3 == 0 ? left : right).add_description(corpus[i]);
        }
        right.merge(left);
        EXPECT_EQ(right.finish().entries(), serial.entries());
    }
}

TEST(SelfReportLexicon, FileRoundTripAndValidation) {
    std::vector<std::string> corpus{"i am a farmer", "i'm a proud nurse", "farmer"};
    auto lex = im::build_selfreport_lexicon(corpus, fixtures::small_lexicon());
    std::stringstream buffer;
    lex.write(buffer);
    EXPECT_EQ(im::SelfReportLexicon::read(buffer).entries(), lex.entries());

    std::istringstream bad("farmer\t5\t4\n");
    EXPECT_THROW(im::SelfReportLexicon::read(bad), im::DataError);
}
