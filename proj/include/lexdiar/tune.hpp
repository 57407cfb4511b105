#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lexdiar/core.hpp"
#include "lexdiar/scorer.hpp"

namespace lexdiar {

struct DevSession {
    std::string name;
    SessionInput session;
    SpeakerAttributedTranscript reference;
};

struct SearchSpace {
    double alpha_lo = 0.0, alpha_hi = 1.0;
    double beta_lo = 0.0, beta_hi = 1.0;
    std::vector<int> context_values{40};
    std::vector<int> beam_widths{16};
    int budget = 16;
    uint64_t seed = 0;

    void validate() const;
};

enum class TuneObjective { kDeltaSa, kDeltaCp, kSaWer, kCpWer };

struct TuneTrial {
    DecoderConfig config;
    double objective = 0.0;
    bool failed = false;
};

struct TuneResult {
    DecoderConfig best;
    size_t best_index = 0;
    std::vector<TuneTrial> trials;
};

// Seeded uniform random search. Trial 0 is pinned to the low corner of the
// space (alpha_lo, beta_lo, first context, first beam width) so that when
// the space starts at beta = 0 the acoustic-only setting is always among
// the evaluated trials; the remaining budget-1 trials sample uniformly.
// Each trial's objective is pooled over the dev sessions with word-count
// weighting; the lowest objective wins, ties going to the earliest trial.
// Failed trials are skipped; all trials failing is an error.
TuneResult tune(const std::vector<DevSession> &dev_sessions,
                const LexicalScorerPair &scorers, const SearchSpace &space,
                TuneObjective objective = TuneObjective::kDeltaSa);

} // namespace lexdiar
