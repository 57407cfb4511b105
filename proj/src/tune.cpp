#include "lexdiar/tune.hpp"

#include "lexdiar/decoder.hpp"
#include "lexdiar/experiment.hpp"
#include "lexdiar/rng.hpp"

namespace lexdiar {

void SearchSpace::validate() const {
    if (!(alpha_lo <= alpha_hi) || alpha_lo < 0.0)
        throw Error("invalid alpha range");
    if (!(beta_lo <= beta_hi) || beta_lo < 0.0)
        throw Error("invalid beta range");
    if (context_values.empty() || beam_widths.empty())
        throw Error("context_values and beam_widths must be non-empty");
    for (int c : context_values)
        if (c < 1)
            throw Error("context values must be >= 1");
    for (int b : beam_widths)
        if (b < 1)
            throw Error("beam widths must be >= 1");
    if (budget < 1)
        throw Error("budget must be >= 1");
}

namespace {

double objective_value(const MetricCounts &counts, TuneObjective objective) {
    switch (objective) {
    case TuneObjective::kDeltaSa:
        return counts.delta_sa();
    case TuneObjective::kDeltaCp:
        return counts.delta_cp();
    case TuneObjective::kSaWer:
        return counts.sa_rate();
    case TuneObjective::kCpWer:
        return counts.cp_rate();
    }
    throw Error("unknown tune objective");
}

} // namespace

TuneResult tune(const std::vector<DevSession> &dev_sessions,
                const LexicalScorerPair &scorers, const SearchSpace &space,
                TuneObjective objective) {
    space.validate();
    scorers.validate();
    if (dev_sessions.empty())
        throw Error("tune needs at least one dev session");

    std::mt19937_64 g(space.seed);
    TuneResult result;
    bool have_best = false;
    double best_objective = 0.0;

    for (int trial = 0; trial < space.budget; ++trial) {
        DecoderConfig config;
        if (trial == 0) {
            config.alpha = space.alpha_lo;
            config.beta = space.beta_lo;
            config.context_window = space.context_values.front();
            config.beam_width = space.beam_widths.front();
        } else {
            config.alpha = rng_range(g, space.alpha_lo, space.alpha_hi);
            config.beta = rng_range(g, space.beta_lo, space.beta_hi);
            config.context_window =
                space.context_values[rng_below(g, space.context_values.size())];
            config.beam_width =
                space.beam_widths[rng_below(g, space.beam_widths.size())];
        }

        TuneTrial t;
        t.config = config;
        try {
            MetricCounts pooled;
            for (const DevSession &dev : dev_sessions)
                pooled += evaluate_transcripts(
                    dev.reference, decode_beam(dev.session, scorers, config));
            t.objective = objective_value(pooled, objective);
        } catch (const Error &) {
            t.failed = true;
        }
        result.trials.push_back(t);
        if (!t.failed && (!have_best || t.objective < best_objective)) {
            have_best = true;
            best_objective = t.objective;
            result.best = config;
            result.best_index = result.trials.size() - 1;
        }
    }
    if (!have_best)
        throw Error("all tuning trials failed");
    return result;
}

} // namespace lexdiar
