#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace lexdiar {

// Turn-boundary markers shared by the context bookkeeping and the n-gram
// scorer. A token equal to one of these is never counted as a word.
inline constexpr const char *kSos = "<s>";
inline constexpr const char *kEos = "</s>";
inline constexpr const char *kUnk = "<unk>";

inline bool is_marker(const std::string &token) {
    return token == kSos || token == kEos;
}

class Error : public std::runtime_error {
  public:
    explicit Error(const std::string &msg) : std::runtime_error(msg) {}
};

// Malformed input files (session, ARPA, rule tables); carries a line number
// when one is known.
class ParseError : public Error {
  public:
    ParseError(const std::string &msg, long line = -1)
        : Error(line >= 0 ? msg + " (line " + std::to_string(line) + ")" : msg),
          line_(line) {}
    long line() const { return line_; }

  private:
    long line_;
};

// ln(max(p, floor)); the floor absorbs zero probabilities so every score
// stays finite.
inline double safe_log(double p, double floor = 1e-10) {
    return std::log(std::max(p, floor));
}

// Normalized per-word speaker probabilities. Construction enforces the
// probability-vector invariants; use normalized() to build one from raw
// non-negative weights.
class SpeakerProbVector {
  public:
    explicit SpeakerProbVector(std::vector<double> probs) : probs_(std::move(probs)) {
        if (probs_.empty())
            throw Error("speaker probability vector must be non-empty");
        double sum = 0.0;
        for (double p : probs_) {
            if (!(p >= 0.0 && p <= 1.0 + 1e-12))
                throw Error("speaker probability entry outside [0, 1]: " +
                            std::to_string(p));
            sum += p;
        }
        if (std::abs(sum - 1.0) > 1e-9)
            throw Error("speaker probabilities sum to " + std::to_string(sum) +
                        ", expected 1");
    }

    // Rescale non-negative weights to sum to one. Throws when all weights
    // are zero; callers that want a uniform fallback handle that themselves.
    static SpeakerProbVector normalized(const std::vector<double> &weights) {
        double sum = 0.0;
        for (double w : weights) {
            if (w < 0.0)
                throw Error("negative weight in probability normalization");
            sum += w;
        }
        if (sum <= 0.0)
            throw Error("cannot normalize all-zero weight vector");
        std::vector<double> probs(weights.size());
        for (size_t i = 0; i < weights.size(); ++i)
            probs[i] = weights[i] / sum;
        return SpeakerProbVector(std::move(probs));
    }

    static SpeakerProbVector uniform(size_t n) {
        if (n == 0)
            throw Error("uniform vector needs n >= 1");
        return SpeakerProbVector(std::vector<double>(n, 1.0 / static_cast<double>(n)));
    }

    double operator[](size_t k) const { return probs_.at(k); }
    size_t size() const { return probs_.size(); }
    const std::vector<double> &probs() const { return probs_; }

  private:
    std::vector<double> probs_;
};

struct WordToken {
    std::string text;
    double start = 0.0;
    double end = 0.0;
    SpeakerProbVector acoustic{std::vector<double>{1.0}};
};

// Onset-ordered word stream plus the speaker count inferred from the data.
struct SessionInput {
    std::vector<WordToken> words;
    int num_speakers = 0;
};

struct TranscriptEntry {
    std::string text;
    double start = 0.0;
    double end = 0.0;
    int speaker = 0;
};

struct SpeakerAttributedTranscript {
    std::vector<TranscriptEntry> entries;
};

// One maximal run of same-speaker words.
struct Turn {
    int speaker = 0;
    std::vector<std::string> words;
};

// A partial word-to-speaker assignment carried on the beam. Contexts are
// token sequences with <s>/</s> markers; the last turn stays open until the
// speaker changes. speaker_contexts, combined_context and turns are three
// views of the same history, updated together by extended().
struct Hypothesis {
    std::vector<int> assignments;
    double log_score = 0.0;
    std::vector<std::vector<std::string>> speaker_contexts;
    std::vector<std::string> combined_context;
    std::vector<Turn> turns;
    int last_speaker = -1; // -1: no word consumed yet

    static Hypothesis initial(int num_speakers) {
        if (num_speakers < 1)
            throw Error("hypothesis needs at least one speaker");
        Hypothesis h;
        h.speaker_contexts.resize(static_cast<size_t>(num_speakers));
        return h;
    }

    int num_speakers() const { return static_cast<int>(speaker_contexts.size()); }

    // Commit `word` to `speaker`, applying the turn-token rule: a speaker
    // change closes the previous speaker's open turn with </s> and opens a
    // new turn with <s>; the combined context receives </s> then <s> at the
    // boundary.
    Hypothesis extended(int speaker, const std::string &word,
                        double step_log_score) const {
        if (speaker < 0 || speaker >= num_speakers())
            throw Error("speaker index out of range: " + std::to_string(speaker));
        Hypothesis h = *this;
        if (h.last_speaker == speaker) {
            h.speaker_contexts[static_cast<size_t>(speaker)].push_back(word);
            h.combined_context.push_back(word);
            h.turns.back().words.push_back(word);
        } else {
            if (h.last_speaker >= 0) {
                h.speaker_contexts[static_cast<size_t>(h.last_speaker)].push_back(kEos);
                h.combined_context.push_back(kEos);
            }
            h.speaker_contexts[static_cast<size_t>(speaker)].push_back(kSos);
            h.speaker_contexts[static_cast<size_t>(speaker)].push_back(word);
            h.combined_context.push_back(kSos);
            h.combined_context.push_back(word);
            h.turns.push_back(Turn{speaker, {word}});
        }
        h.assignments.push_back(speaker);
        h.last_speaker = speaker;
        h.log_score += step_log_score;
        return h;
    }
};

// Beam search decoding parameters. alpha scales P(W), beta mixes the lexical
// term against the acoustic term, context_window is the word budget C for
// every lexical context.
struct DecoderConfig {
    double alpha = 0.5;
    double beta = 0.5;
    int context_window = 40;
    int beam_width = 16;
    double prob_floor = 1e-10;

    void validate() const {
        if (alpha < 0.0)
            throw Error("alpha must be >= 0");
        if (beta < 0.0)
            throw Error("beta must be >= 0");
        if (context_window < 1)
            throw Error("context_window must be >= 1");
        if (beam_width < 1)
            throw Error("beam_width must be >= 1");
        if (!(prob_floor > 0.0 && prob_floor < 1.0))
            throw Error("prob_floor must lie in (0, 1)");
    }
};

} // namespace lexdiar
