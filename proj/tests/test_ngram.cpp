#include <doctest.h>

#include <cmath>
#include <sstream>

#include "lexdiar/ngram.hpp"
#include "test_util.hpp"

using namespace lexdiar;

namespace {

const std::string kDataDir = LEXDIAR_TEST_DATA_DIR;

NgramModel backoff_model() { return load_arpa(kDataDir + "/toy_backoff.arpa"); }
NgramModel closed_model() { return load_arpa(kDataDir + "/toy_closed.arpa"); }

double score(const NgramModel &m, std::vector<std::string> ctx,
             const std::string &w) {
    return score_word(m, ctx, w);
}

// Dialogue model: continuing speaker 1's open turn with
// "working" is likely, opening a new turn with it is not.
NgramModel dialogue_model() {
    std::ostringstream os;
    os << "\\data\\\n"
       << "ngram 1=23\nngram 2=2\nngram 3=1\n\n"
       << "\\1-grams:\n"
       << "-99\t<s>\t-0.4\n-1.9\t</s>\n-2.5\t<unk>\n";
    for (const char *w :
         {"how", "are", "you", "doing", "these", "days", "things", "going", "very",
          "well", "tell", "me", "more", "there", "is", "a", "project", "i'm",
          "working"})
        os << "-2\t" << w << "\n";
    os << "-2\tthat\t-0.2\n";
    os << "\n\\2-grams:\n-0.4\tthat i'm\t-0.1\n-3\t<s> working\n";
    os << "\n\\3-grams:\n-0.3\tthat i'm working\n";
    os << "\n\\end\\\n";
    std::istringstream in(os.str());
    return parse_arpa(in);
}

} // namespace

TEST_CASE("parsing keeps the file's exact log10 values") {
    NgramModel m = backoff_model();
    CHECK(m.order == 3);
    CHECK(m.tables[0].size() == 7);
    CHECK(m.tables[1].size() == 8);
    CHECK(m.tables[2].size() == 5);
    CHECK(m.vocabulary.count("<unk>") == 1);

    const NgramEntry *ab = m.find(2, "a b");
    REQUIRE(ab != nullptr);
    CHECK(ab->log10_prob == -0.30);
    REQUIRE(ab->has_backoff);
    CHECK(ab->log10_backoff == -0.15);

    const NgramEntry *da = m.find(2, "d a");
    REQUIRE(da != nullptr);
    CHECK_FALSE(da->has_backoff);

    const NgramEntry *abc = m.find(3, "a b c");
    REQUIRE(abc != nullptr);
    CHECK(abc->log10_prob == -0.20);
    CHECK(m.find(2, "b a") == nullptr);
}

TEST_CASE("parser rejects malformed files with line positions") {
    auto parse = [](const std::string &text) {
        std::istringstream in(text);
        return parse_arpa(in);
    };

    CHECK_THROWS_WITH_AS(parse("\\data\\\nngram 1=1\n\n\\1-grams:\n-1\t<unk>\n"),
                         doctest::Contains("\\end\\"), ParseError);
    // declared two unigrams, provided one
    CHECK_THROWS_WITH_AS(
        parse("\\data\\\nngram 1=2\n\n\\1-grams:\n-1\t<unk>\n\n\\end\\\n"),
        doctest::Contains("declares 2"), ParseError);
    CHECK_THROWS_WITH_AS(
        parse("\\data\\\nngram 1=1\n\n\\1-grams:\nxyz\t<unk>\n\n\\end\\\n"),
        doctest::Contains("non-numeric"), ParseError);
    CHECK_THROWS_AS(parse("-1\t<unk>\n\\end\\\n"), ParseError); // no \data\
    // vocabulary must contain <unk>
    CHECK_THROWS_WITH_AS(parse("\\data\\\nngram 1=1\n\n\\1-grams:\n-1\ta\n\n\\end\\\n"),
                         doctest::Contains("<unk>"), ParseError);
    // bigram without its unigram prefix
    CHECK_THROWS_WITH_AS(
        parse("\\data\\\nngram 1=1\nngram 2=1\n\n\\1-grams:\n-1\t<unk>\n"
              "\n\\2-grams:\n-1\tb <unk>\n\n\\end\\\n"),
        doctest::Contains("prefix"), ParseError);
    CHECK_THROWS_WITH_AS(
        parse("\\data\\\nngram 1=2\n\n\\1-grams:\n-1\t<unk>\n-1\t<unk>\n\n\\end\\\n"),
        doctest::Contains("duplicate"), ParseError);
    // a declared section that never appears
    CHECK_THROWS_WITH_AS(
        parse("\\data\\\nngram 1=1\nngram 2=3\n\n\\1-grams:\n-1\t<unk>\n\n\\end\\\n"),
        doctest::Contains("declares 3"), ParseError);
}

TEST_CASE("empty n-gram section with declared count zero is valid") {
    std::istringstream in("\\data\\\nngram 1=1\nngram 2=0\n\n\\1-grams:\n-1\t<unk>\n"
                          "\n\\2-grams:\n\n\\end\\\n");
    NgramModel m = parse_arpa(in);
    CHECK(m.order == 2);
    CHECK(m.tables[1].empty());
}

TEST_CASE("back-off scoring reproduces hand-computed chains") {
    NgramModel m = backoff_model();
    const double tol = 1e-9;

    // direct hits at every order
    CHECK(score(m, {"a", "b"}, "c") == doctest::Approx(-0.20).epsilon(tol));
    CHECK(score(m, {"<s>", "a"}, "b") == doctest::Approx(-0.35).epsilon(tol));
    CHECK(score(m, {"a"}, "b") == doctest::Approx(-0.30).epsilon(tol));
    CHECK(score(m, {"b"}, "c") == doctest::Approx(-0.60).epsilon(tol));
    CHECK(score(m, {"<s>"}, "a") == doctest::Approx(-0.40).epsilon(tol));
    CHECK(score(m, {}, "b") == doctest::Approx(-0.85).epsilon(tol));
    CHECK(score(m, {"c"}, "</s>") == doctest::Approx(-0.90).epsilon(tol));

    // one-level back-off: bo(b) + uni(a)
    CHECK(score(m, {"b"}, "a") == doctest::Approx(-0.10 + -0.70).epsilon(tol));
    // one-level: bo(<s>) + uni(c)
    CHECK(score(m, {"<s>"}, "c") == doctest::Approx(-0.30 + -0.92).epsilon(tol));
    // two-level: bo(a b) + bo(b) + uni(d)
    CHECK(score(m, {"a", "b"}, "d") ==
          doctest::Approx(-0.15 + -0.10 + -1.10).epsilon(tol));
    // two-level: bo(c a) + bo(a) + uni(d)
    CHECK(score(m, {"c", "a"}, "d") ==
          doctest::Approx(-0.25 + -0.25 + -1.10).epsilon(tol));
    // context entry without a backoff weight contributes nothing
    CHECK(score(m, {"d", "a"}, "c") == doctest::Approx(-0.55).epsilon(tol));
    // unlisted context contributes nothing either
    CHECK(score(m, {"b", "a"}, "c") == doctest::Approx(-0.55).epsilon(tol));
    // OOV word maps to <unk>: bo(a) + uni(<unk>)
    CHECK(score(m, {"a"}, "zzz") == doctest::Approx(-0.25 + -1.30).epsilon(tol));
    CHECK(score(m, {"a"}, "zzz") == score(m, {"a"}, "<unk>"));
    // OOV context token maps to <unk>: bo(<unk>) + uni(a)
    CHECK(score(m, {"zzz"}, "a") == doctest::Approx(-0.20 + -0.70).epsilon(tol));
    // context truncates to order-1 tokens
    CHECK(score(m, {"d", "a", "b"}, "c") == score(m, {"a", "b"}, "c"));
}

TEST_CASE("scoring is bit-reproducible") {
    NgramModel m = backoff_model();
    const double a = score(m, {"c", "a"}, "d");
    const double b = score(m, {"c", "a"}, "d");
    CHECK(a == b);
}

TEST_CASE("closed-vocabulary model sums to one over every history") {
    NgramModel m = closed_model();
    std::vector<std::string> predictable;
    for (const std::string &w : m.vocabulary)
        if (w != kSos)
            predictable.push_back(w);

    std::vector<std::vector<std::string>> histories{{}};
    for (const std::string &t : m.vocabulary)
        histories.push_back({t});

    for (const auto &h : histories) {
        double sum = 0.0;
        for (const std::string &w : predictable)
            sum += std::pow(10.0, score_word(m, h, w));
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("context truncation counts words and keeps attached markers") {
    using V = std::vector<std::string>;
    CHECK(truncate_context({}, 3) == V{});
    CHECK(truncate_context({"<s>", "a", "b"}, 5) == V{"<s>", "a", "b"});
    CHECK(truncate_context({"<s>", "a", "b"}, 2) == V{"<s>", "a", "b"});
    CHECK(truncate_context({"<s>", "a", "b"}, 1) == V{"b"});
    CHECK(truncate_context({"<s>", "a", "b"}, 0) == V{});
    CHECK(truncate_context({"<s>", "a", "b", "</s>", "<s>", "c"}, 2) ==
          V{"b", "</s>", "<s>", "c"});
    CHECK(truncate_context({"<s>", "a", "</s>"}, 0) == V{"</s>"});
    CHECK(truncate_context({"<s>"}, 0) == V{"<s>"});
}

TEST_CASE("speaker posterior normalizes raw continuation probabilities") {
    // speaker 0 closed (scores through <s>), speaker 1 open after "y"
    std::istringstream in("\\data\\\nngram 1=6\nngram 2=2\n\n\\1-grams:\n"
                          "-99\t<s>\t0.0\n-1\t</s>\n-9\t<unk>\n-1\tx\n-1\ty\n-9\tw\n"
                          "\n\\2-grams:\n-2\t<s> w\n-1.5228787452803376\ty w\n"
                          "\n\\end\\\n");
    NgramModel m = parse_arpa(in);
    Hypothesis hyp = Hypothesis::initial(2);
    hyp = hyp.extended(0, "x", 0.0);
    hyp = hyp.extended(1, "y", 0.0);

    SpeakerProbVector post = speaker_posterior_ngram(m, hyp, "w", 10);
    // raw p = (0.01, 0.03)
    CHECK(post[0] == doctest::Approx(0.25).epsilon(1e-9));
    CHECK(post[1] == doctest::Approx(0.75).epsilon(1e-9));
    CHECK(post[0] + post[1] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("empty session yields a uniform speaker posterior") {
    NgramModel m = backoff_model();
    Hypothesis hyp = Hypothesis::initial(2);
    SpeakerProbVector post = speaker_posterior_ngram(m, hyp, "a", 4);
    CHECK(post[0] == doctest::Approx(0.5));
    CHECK(post[1] == doctest::Approx(0.5));
}

TEST_CASE("dialogue posterior favors the speaker with the matching context") {
    NgramModel m = dialogue_model();
    Hypothesis hyp = testutil::sample_dialogue_hypothesis();

    SpeakerProbVector post = speaker_posterior_ngram(m, hyp, "working", 40);
    // by the hand chains: p1 = 10^-0.3 (trigram hit), p0 = 10^-3 (via <s>)
    const double p0 = std::pow(10.0, -3.0);
    const double p1 = std::pow(10.0, -0.3);
    CHECK(post[1] > post[0]);
    CHECK(post[0] == doctest::Approx(p0 / (p0 + p1)).epsilon(1e-9));
    CHECK(post[1] == doctest::Approx(p1 / (p0 + p1)).epsilon(1e-9));
}

TEST_CASE("speaker posterior is equivariant under relabeling") {
    NgramModel m = dialogue_model();
    Hypothesis hyp = testutil::sample_dialogue_hypothesis();
    Hypothesis swapped = hyp;
    std::swap(swapped.speaker_contexts[0], swapped.speaker_contexts[1]);
    swapped.last_speaker = 0;

    SpeakerProbVector a = speaker_posterior_ngram(m, hyp, "working", 40);
    SpeakerProbVector b = speaker_posterior_ngram(m, swapped, "working", 40);
    CHECK(a[0] == doctest::Approx(b[1]));
    CHECK(a[1] == doctest::Approx(b[0]));
}

TEST_CASE("posterior falls back to uniform when everything is floored") {
    std::istringstream in("\\data\\\nngram 1=3\n\n\\1-grams:\n"
                          "-99\t<s>\n-15\t</s>\n-15\t<unk>\n\n\\end\\\n");
    NgramModel m = parse_arpa(in);
    Hypothesis hyp = Hypothesis::initial(3);
    SpeakerProbVector post = speaker_posterior_ngram(m, hyp, "anything", 4);
    for (size_t k = 0; k < 3; ++k)
        CHECK(post[k] == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("word probability scores the combined context") {
    NgramModel m = dialogue_model();
    Hypothesis hyp = testutil::sample_dialogue_hypothesis();
    // combined context ends "... that i'm"; order-3 lookup hits the trigram
    CHECK(word_probability_ngram(m, hyp, "working", 40) ==
          doctest::Approx(std::pow(10.0, -0.3)).epsilon(1e-9));

    // unigram-only model: history does not matter
    std::istringstream in("\\data\\\nngram 1=4\n\n\\1-grams:\n"
                          "-99\t<s>\n-1\t</s>\n-2\t<unk>\n-0.5\tword\n\n\\end\\\n");
    NgramModel uni = parse_arpa(in);
    Hypothesis empty = Hypothesis::initial(2);
    CHECK(word_probability_ngram(uni, empty, "word", 8) ==
          doctest::Approx(std::pow(10.0, -0.5)).epsilon(1e-9));

    // floor clamps vanishing probabilities
    CHECK(word_probability_ngram(uni, empty, "zzz", 8, 1e-10) >= 1e-10);
    std::istringstream tiny_in("\\data\\\nngram 1=2\n\n\\1-grams:\n"
                               "-99\t<s>\n-15\t<unk>\n\n\\end\\\n");
    NgramModel tiny = parse_arpa(tiny_in);
    CHECK(word_probability_ngram(tiny, empty, "zzz", 8, 1e-10) == 1e-10);
}
