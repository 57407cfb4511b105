#include "lexdiar/decoder.hpp"

#include <algorithm>
#include <cmath>

namespace lexdiar {

double step_score(const SpeakerProbVector &q, int k,
                  const SpeakerProbVector &p_s_given_w, double p_w, double alpha,
                  double beta, double prob_floor) {
    const size_t idx = static_cast<size_t>(k);
    return safe_log(q[idx], prob_floor) +
           beta * (safe_log(p_s_given_w[idx], prob_floor) +
                   alpha * safe_log(p_w, prob_floor));
}

namespace {

SpeakerAttributedTranscript assignments_to_transcript(const SessionInput &session,
                                                      const std::vector<int> &labels) {
    SpeakerAttributedTranscript out;
    out.entries.reserve(session.words.size());
    for (size_t i = 0; i < session.words.size(); ++i) {
        const WordToken &w = session.words[i];
        out.entries.push_back(TranscriptEntry{w.text, w.start, w.end, labels[i]});
    }
    return out;
}

void validate_session(const SessionInput &session) {
    if (session.num_speakers < 1 && !session.words.empty())
        throw Error("session has words but no speakers");
    for (const WordToken &w : session.words)
        if (static_cast<int>(w.acoustic.size()) != session.num_speakers)
            throw Error("word '" + w.text + "' has " +
                        std::to_string(w.acoustic.size()) +
                        " speaker probabilities, expected " +
                        std::to_string(session.num_speakers));
}

// Children of `hyp` for the given word, appended to `out`. The lexical
// quantities are evaluated once per hypothesis; both decoders route through
// here so their scores are bit-identical.
void spawn_children(const Hypothesis &hyp, const WordToken &word,
                    const LexicalScorerPair &scorers, const DecoderConfig &config,
                    int num_speakers, std::vector<Hypothesis> &out) {
    double p_w = 1.0;
    SpeakerProbVector p_s = SpeakerProbVector::uniform(static_cast<size_t>(num_speakers));
    const bool lexical = !scorers.acoustic_only();
    if (lexical) {
        p_w = scorers.word->word_probability(hyp, word.text, config.context_window);
        p_s = scorers.speaker->speaker_posterior(hyp, word.text, config.context_window);
        if (static_cast<int>(p_s.size()) != num_speakers)
            throw Error("speaker scorer returned " + std::to_string(p_s.size()) +
                        " probabilities, expected " + std::to_string(num_speakers));
    }
    for (int k = 0; k < num_speakers; ++k) {
        const double step =
            lexical ? step_score(word.acoustic, k, p_s, p_w, config.alpha,
                                 config.beta, config.prob_floor)
                    : safe_log(word.acoustic[static_cast<size_t>(k)],
                               config.prob_floor);
        out.push_back(hyp.extended(k, word.text, step));
    }
}

bool better_hypothesis(const Hypothesis &a, const Hypothesis &b) {
    if (a.log_score != b.log_score)
        return a.log_score > b.log_score;
    return a.assignments < b.assignments;
}

Hypothesis run_beam(const SessionInput &session, const LexicalScorerPair &scorers,
                    const DecoderConfig &config) {
    scorers.validate();
    config.validate();
    validate_session(session);
    if (session.words.empty())
        return Hypothesis::initial(std::max(session.num_speakers, 1));

    const int num_speakers = session.num_speakers;
    std::vector<Hypothesis> beam{Hypothesis::initial(num_speakers)};
    std::vector<Hypothesis> children;
    for (size_t i = 0; i < session.words.size(); ++i) {
        children.clear();
        children.reserve(beam.size() * static_cast<size_t>(num_speakers));
        try {
            for (const Hypothesis &hyp : beam)
                spawn_children(hyp, session.words[i], scorers, config, num_speakers,
                               children);
        } catch (const Error &e) {
            throw Error("decode aborted at word index " + std::to_string(i) + ": " +
                        e.what());
        }
        std::sort(children.begin(), children.end(), better_hypothesis);
        if (children.size() > static_cast<size_t>(config.beam_width))
            children.resize(static_cast<size_t>(config.beam_width));
        beam.swap(children);
    }
    return beam.front();
}

} // namespace

SpeakerAttributedTranscript decode_beam(const SessionInput &session,
                                        const LexicalScorerPair &scorers,
                                        const DecoderConfig &config) {
    Hypothesis best = run_beam(session, scorers, config);
    return assignments_to_transcript(session, best.assignments);
}

double decode_beam_best_score(const SessionInput &session,
                              const LexicalScorerPair &scorers,
                              const DecoderConfig &config) {
    return run_beam(session, scorers, config).log_score;
}

namespace {

struct OracleSearch {
    const SessionInput &session;
    const LexicalScorerPair &scorers;
    const DecoderConfig &config;
    Hypothesis best;
    bool have_best = false;

    // Children visited in speaker order, so sequences are enumerated
    // lexicographically and a strict improvement test keeps the smallest
    // tying sequence.
    void visit(const Hypothesis &hyp, size_t word_index) {
        if (word_index == session.words.size()) {
            if (!have_best || hyp.log_score > best.log_score) {
                best = hyp;
                have_best = true;
            }
            return;
        }
        std::vector<Hypothesis> children;
        children.reserve(static_cast<size_t>(session.num_speakers));
        try {
            spawn_children(hyp, session.words[word_index], scorers, config,
                           session.num_speakers, children);
        } catch (const Error &e) {
            throw Error("oracle decode aborted at word index " +
                        std::to_string(word_index) + ": " + e.what());
        }
        for (const Hypothesis &child : children)
            visit(child, word_index + 1);
    }
};

} // namespace

SpeakerAttributedTranscript decode_oracle(const SessionInput &session,
                                          const LexicalScorerPair &scorers,
                                          const DecoderConfig &config) {
    scorers.validate();
    config.validate();
    validate_session(session);
    if (session.words.empty())
        return SpeakerAttributedTranscript{};

    const double log_sequences = static_cast<double>(session.words.size()) *
                                 std::log10(static_cast<double>(session.num_speakers));
    if (log_sequences > 7.0)
        throw Error("oracle instance too large: " +
                    std::to_string(session.num_speakers) + "^" +
                    std::to_string(session.words.size()) + " sequences exceed 10^7");

    OracleSearch search{session, scorers, config, {}, false};
    search.visit(Hypothesis::initial(session.num_speakers), 0);
    return assignments_to_transcript(session, search.best.assignments);
}

SpeakerAttributedTranscript ts_match(const SessionInput &session) {
    validate_session(session);
    std::vector<int> labels;
    labels.reserve(session.words.size());
    for (const WordToken &w : session.words) {
        int arg = 0;
        for (int k = 1; k < static_cast<int>(w.acoustic.size()); ++k)
            if (w.acoustic[static_cast<size_t>(k)] >
                w.acoustic[static_cast<size_t>(arg)])
                arg = k;
        labels.push_back(arg);
    }
    return assignments_to_transcript(session, labels);
}

} // namespace lexdiar
