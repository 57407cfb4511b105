#pragma once

#include "lexdiar/core.hpp"
#include "lexdiar/scorer.hpp"

namespace lexdiar {

// One word's contribution to a hypothesis score:
//   log q[k] + beta * (log P(S=k|W) + alpha * log P(W))
// in natural log, with every probability floored before logging.
double step_score(const SpeakerProbVector &q, int k,
                  const SpeakerProbVector &p_s_given_w, double p_w, double alpha,
                  double beta, double prob_floor = 1e-10);

// Contextual beam search over per-word speaker assignments. Each surviving
// hypothesis spawns one child per speaker; children are fully scored before
// pruning to the beam_width best (ties broken by lexicographically smallest
// assignment sequence). With no scorers the lexical term is dropped and the
// result reduces to ts_match.
SpeakerAttributedTranscript decode_beam(const SessionInput &session,
                                        const LexicalScorerPair &scorers,
                                        const DecoderConfig &config);

// Exact reference decoder: enumerates every assignment sequence with the
// same per-word scoring and context bookkeeping as decode_beam and returns
// the maximum (ties: lexicographically smallest). Refuses instances with
// more than 10^7 sequences.
SpeakerAttributedTranscript decode_oracle(const SessionInput &session,
                                          const LexicalScorerPair &scorers,
                                          const DecoderConfig &config);

// Baseline: each word goes to the argmax speaker of its acoustic vector,
// ties to the lowest index.
SpeakerAttributedTranscript ts_match(const SessionInput &session);

// Best achievable total log score, exposed for beam-width diagnostics.
double decode_beam_best_score(const SessionInput &session,
                              const LexicalScorerPair &scorers,
                              const DecoderConfig &config);

} // namespace lexdiar
