#include <doctest.h>

#include <random>

#include "lexdiar/core.hpp"
#include "lexdiar/rng.hpp"
#include "test_util.hpp"

using namespace lexdiar;

TEST_CASE("safe_log basics") {
    CHECK(safe_log(1.0, 1e-10) == doctest::Approx(0.0));
    CHECK(safe_log(0.0, 1e-10) == doctest::Approx(-23.025850929940457));
    CHECK(safe_log(0.5, 1e-10) == doctest::Approx(-0.6931471805599453));
    // below-floor values clamp to the floor
    CHECK(safe_log(1e-30, 1e-10) == safe_log(0.0, 1e-10));
}

TEST_CASE("safe_log is monotone non-decreasing") {
    std::mt19937_64 g(11);
    for (int i = 0; i < 500; ++i) {
        double a = rng_uniform(g), b = rng_uniform(g);
        if (a > b)
            std::swap(a, b);
        CHECK(safe_log(a) <= safe_log(b));
    }
}

TEST_CASE("SpeakerProbVector validates") {
    CHECK_NOTHROW(SpeakerProbVector({0.25, 0.75}));
    CHECK_NOTHROW(SpeakerProbVector({1.0}));
    CHECK_THROWS_AS(SpeakerProbVector({0.3, 0.3}), Error);
    CHECK_THROWS_AS(SpeakerProbVector({1.2, -0.2}), Error);
    CHECK_THROWS_AS(SpeakerProbVector(std::vector<double>{}), Error);
    // beyond tolerance rejected, within tolerance fine
    CHECK_THROWS_AS(SpeakerProbVector({0.5, 0.5 + 1e-6}), Error);
    CHECK_NOTHROW(SpeakerProbVector({0.5, 0.5 + 1e-12}));

    SpeakerProbVector u = SpeakerProbVector::uniform(4);
    CHECK(u.size() == 4);
    CHECK(u[2] == doctest::Approx(0.25));

    SpeakerProbVector n = SpeakerProbVector::normalized({1.0, 3.0});
    CHECK(n[0] == doctest::Approx(0.25));
    CHECK(n[1] == doctest::Approx(0.75));
    CHECK_THROWS_AS(SpeakerProbVector::normalized({0.0, 0.0}), Error);
}

TEST_CASE("DecoderConfig validation") {
    DecoderConfig ok;
    CHECK_NOTHROW(ok.validate());
    DecoderConfig bad = ok;
    bad.beam_width = 0;
    CHECK_THROWS_AS(bad.validate(), Error);
    bad = ok;
    bad.context_window = 0;
    CHECK_THROWS_AS(bad.validate(), Error);
    bad = ok;
    bad.prob_floor = 0.0;
    CHECK_THROWS_AS(bad.validate(), Error);
    bad = ok;
    bad.alpha = -0.1;
    CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("hypothesis turn bookkeeping reproduces the dialogue contexts") {
    Hypothesis hyp = testutil::sample_dialogue_hypothesis();

    const std::vector<std::string> expect_spk0 = {
        "<s>", "how", "are", "you", "doing", "these", "days", "</s>",
        "<s>", "well", "tell", "me", "more", "</s>"};
    const std::vector<std::string> expect_spk1 = {
        "<s>", "things", "are", "going", "very", "well", "</s>",
        "<s>", "there", "is", "a", "project", "that", "i'm"};
    const std::vector<std::string> expect_combined = {
        "<s>", "how", "are", "you", "doing", "these", "days", "</s>",
        "<s>", "things", "are", "going", "very", "well", "</s>",
        "<s>", "well", "tell", "me", "more", "</s>",
        "<s>", "there", "is", "a", "project", "that", "i'm"};

    CHECK(hyp.speaker_contexts[0] == expect_spk0);
    CHECK(hyp.speaker_contexts[1] == expect_spk1);
    CHECK(hyp.combined_context == expect_combined);
    CHECK(hyp.last_speaker == 1);
    CHECK(hyp.assignments.size() == 21);
}

TEST_CASE("hypothesis invariants hold along random extension paths") {
    std::mt19937_64 g(5);
    for (int trial = 0; trial < 20; ++trial) {
        const int num_speakers = 2 + static_cast<int>(rng_below(g, 3));
        Hypothesis hyp = Hypothesis::initial(num_speakers);
        const int n = 1 + static_cast<int>(rng_below(g, 12));
        for (int i = 0; i < n; ++i)
            hyp = hyp.extended(static_cast<int>(rng_below(g, num_speakers)),
                               "w" + std::to_string(i), -0.5);

        // exactly one open turn, and it belongs to last_speaker
        int open = 0;
        for (int k = 0; k < num_speakers; ++k) {
            const auto &ctx = hyp.speaker_contexts[static_cast<size_t>(k)];
            if (!ctx.empty() && ctx.back() != kEos) {
                ++open;
                CHECK(k == hyp.last_speaker);
            }
        }
        CHECK(open == 1);

        // combined words = interleaving of speaker context words in onset order
        std::vector<std::string> combined_words, interleaved;
        for (const auto &t : hyp.combined_context)
            if (!is_marker(t))
                combined_words.push_back(t);
        for (int i = 0; i < n; ++i)
            interleaved.push_back("w" + std::to_string(i));
        CHECK(combined_words == interleaved);

        size_t speaker_word_total = 0;
        for (const auto &ctx : hyp.speaker_contexts)
            for (const auto &t : ctx)
                if (!is_marker(t))
                    ++speaker_word_total;
        CHECK(speaker_word_total == static_cast<size_t>(n));
        CHECK(hyp.assignments.size() == static_cast<size_t>(n));
    }
}
