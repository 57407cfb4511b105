#pragma once

#include <string>

#include "lexdiar/core.hpp"

namespace lexdiar {

// Scoring surface for a candidate next word: P(S|W) over speakers and P(W),
// both conditioned on the hypothesis's contexts. Implementations must be
// safe for concurrent read-only use.
class LexicalScorer {
  public:
    virtual ~LexicalScorer() = default;
    virtual SpeakerProbVector speaker_posterior(const Hypothesis &hyp,
                                                const std::string &word,
                                                int context_window) const = 0;
    virtual double word_probability(const Hypothesis &hyp, const std::string &word,
                                    int context_window) const = 0;
};

// Which scorer feeds each term of the beam score. Both null means pure
// acoustic decoding; exactly one null is invalid.
struct LexicalScorerPair {
    const LexicalScorer *speaker = nullptr;
    const LexicalScorer *word = nullptr;

    bool acoustic_only() const { return speaker == nullptr && word == nullptr; }

    void validate() const {
        if ((speaker == nullptr) != (word == nullptr))
            throw Error("scorer pair must set both sides or neither");
    }
};

} // namespace lexdiar
