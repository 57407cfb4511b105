#include "lexdiar/synth.hpp"

#include <cmath>
#include <map>
#include <sstream>

#include "lexdiar/rng.hpp"

namespace lexdiar {

void SynthConfig::validate() const {
    if (num_speakers < 1)
        throw Error("num_speakers must be >= 1");
    if (num_words < 0)
        throw Error("num_words must be >= 0");
    if (!(lexical_separability >= 0.0 && lexical_separability <= 1.0))
        throw Error("lexical_separability must lie in [0, 1]");
    if (acoustic_noise < 0.0)
        throw Error("acoustic_noise must be >= 0");
    if (!(turn_change_prob > 0.0 && turn_change_prob < 1.0))
        throw Error("turn_change_prob must lie in (0, 1)");
    if (exclusive_vocab_size < 1)
        throw Error("exclusive_vocab_size must be >= 1");
    if (shared_vocab_size < 1)
        throw Error("shared_vocab_size must be >= 1");
}

SynthVocabulary synth_vocabulary(const SynthConfig &cfg) {
    cfg.validate();
    SynthVocabulary vocab;
    vocab.exclusive.resize(static_cast<size_t>(cfg.num_speakers));
    for (int k = 0; k < cfg.num_speakers; ++k)
        for (int i = 0; i < cfg.exclusive_vocab_size; ++i)
            vocab.exclusive[static_cast<size_t>(k)].push_back(
                "spk" + std::to_string(k) + "w" + std::to_string(i));
    for (int i = 0; i < cfg.shared_vocab_size; ++i)
        vocab.shared.push_back("common" + std::to_string(i));
    return vocab;
}

namespace {

SpeakerProbVector acoustic_vector(int true_speaker, int num_speakers,
                                  double temperature, std::mt19937_64 &g) {
    if (temperature <= 0.0) {
        std::vector<double> q(static_cast<size_t>(num_speakers), 0.0);
        q[static_cast<size_t>(true_speaker)] = 1.0;
        return SpeakerProbVector(std::move(q));
    }
    std::vector<double> logits(static_cast<size_t>(num_speakers));
    for (int k = 0; k < num_speakers; ++k)
        logits[static_cast<size_t>(k)] =
            (k == true_speaker ? 1.0 / temperature : 0.0) + rng_gumbel(g);
    const double max_logit = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (double &l : logits) {
        l = std::exp(l - max_logit);
        sum += l;
    }
    for (double &l : logits)
        l /= sum;
    return SpeakerProbVector(std::move(logits));
}

} // namespace

SynthSession generate_synthetic_session(const SynthConfig &cfg) {
    cfg.validate();
    const SynthVocabulary vocab = synth_vocabulary(cfg);
    std::mt19937_64 g(cfg.seed);

    SynthSession out;
    out.session.num_speakers = cfg.num_speakers;

    int speaker = static_cast<int>(rng_below(g, static_cast<uint64_t>(cfg.num_speakers)));
    constexpr double kWordSpacing = 0.30;
    constexpr double kWordLength = 0.24;
    for (int i = 0; i < cfg.num_words; ++i) {
        if (i > 0 && cfg.num_speakers > 1 &&
            rng_uniform(g) < cfg.turn_change_prob) {
            const int other = static_cast<int>(
                rng_below(g, static_cast<uint64_t>(cfg.num_speakers - 1)));
            speaker = other >= speaker ? other + 1 : other;
        }
        std::string word;
        if (rng_uniform(g) < cfg.lexical_separability) {
            const auto &own = vocab.exclusive[static_cast<size_t>(speaker)];
            word = own[rng_below(g, own.size())];
        } else {
            word = vocab.shared[rng_below(g, vocab.shared.size())];
        }
        const double start = static_cast<double>(i) * kWordSpacing;
        const double end = start + kWordLength;

        WordToken token;
        token.text = word;
        token.start = start;
        token.end = end;
        token.acoustic = acoustic_vector(speaker, cfg.num_speakers,
                                         cfg.acoustic_noise, g);
        out.session.words.push_back(std::move(token));
        out.reference.entries.push_back(TranscriptEntry{word, start, end, speaker});
    }
    return out;
}

namespace {

void append_entry(std::ostringstream &os, double log10_prob,
                  const std::string &tokens, const double *log10_backoff) {
    os.precision(17);
    os << log10_prob << '\t' << tokens;
    if (log10_backoff)
        os << '\t' << *log10_backoff;
    os << '\n';
}

} // namespace

std::string build_synthetic_arpa(const SynthConfig &cfg) {
    cfg.validate();
    const SynthVocabulary vocab = synth_vocabulary(cfg);
    const double sep = cfg.lexical_separability;
    const double change = cfg.turn_change_prob;
    const int num_speakers = cfg.num_speakers;

    // Selection probability of each word when speaker k talks.
    auto selection = [&](int k) {
        std::map<std::string, double> dist;
        const auto &own = vocab.exclusive[static_cast<size_t>(k)];
        for (const std::string &w : own)
            dist[w] += sep / static_cast<double>(own.size());
        for (const std::string &w : vocab.shared)
            dist[w] += (1.0 - sep) / static_cast<double>(vocab.shared.size());
        return dist;
    };

    // Unigram marginal over words (speakers uniform in the long run), with
    // mass carved out for the turn-end token and <unk>.
    constexpr double kUnkMass = 1e-4;
    std::map<std::string, double> unigram;
    for (int k = 0; k < num_speakers; ++k)
        for (const auto &kv : selection(k))
            unigram[kv.first] += kv.second / static_cast<double>(num_speakers);
    const double word_mass = 1.0 - change - kUnkMass;
    for (auto &kv : unigram)
        kv.second *= word_mass;
    unigram[kEos] = change;
    unigram[kUnk] = kUnkMass;

    // Bigram rows. Word contexts continue with the same speaker's mixture or
    // end the turn; <s> starts a turn for a uniformly chosen speaker.
    std::map<std::string, std::map<std::string, double>> bigrams;
    for (int k = 0; k < num_speakers; ++k) {
        const auto sel = selection(k);
        for (const auto &ctx : sel) {
            auto &row = bigrams[ctx.first];
            for (const auto &next : sel)
                row[next.first] += (1.0 - change) * next.second;
            row[kEos] += change;
        }
    }
    {
        auto &row = bigrams[kSos];
        for (int k = 0; k < num_speakers; ++k)
            for (const auto &next : selection(k))
                row[next.first] += next.second / static_cast<double>(num_speakers);
    }
    // Shared words accumulate one row per owning speaker; renormalize. Drop
    // zero-probability cells (possible at the separability extremes) so the
    // file never carries log10(0).
    for (auto &ctx : bigrams) {
        double sum = 0.0;
        for (const auto &kv : ctx.second)
            sum += kv.second;
        for (auto it = ctx.second.begin(); it != ctx.second.end();) {
            if (it->second <= 0.0) {
                it = ctx.second.erase(it);
            } else {
                it->second /= sum;
                ++it;
            }
        }
    }
    for (auto it = unigram.begin(); it != unigram.end();)
        it = it->second <= 0.0 ? unigram.erase(it) : std::next(it);
    for (auto it = bigrams.begin(); it != bigrams.end();)
        it = unigram.count(it->first) == 0 && it->first != kSos ? bigrams.erase(it)
                                                                : std::next(it);

    // Cross-vocabulary continuations are only reachable through this
    // penalty, which is what separates the speakers lexically.
    constexpr double kBackoffLog10 = -4.0;

    std::ostringstream os;
    os << "\\data\\\n";
    os << "ngram 1=" << unigram.size() + 1 << "\n"; // + <s>
    size_t bigram_count = 0;
    for (const auto &ctx : bigrams)
        bigram_count += ctx.second.size();
    os << "ngram 2=" << bigram_count << "\n\n";

    os << "\\1-grams:\n";
    const double bo = kBackoffLog10;
    {
        const double sos_prob = -99.0;
        append_entry(os, sos_prob, kSos, &bo);
    }
    for (const auto &kv : unigram)
        append_entry(os, std::log10(kv.second), kv.first, &bo);
    os << "\n\\2-grams:\n";
    for (const auto &ctx : bigrams)
        for (const auto &kv : ctx.second)
            append_entry(os, std::log10(kv.second), ctx.first + " " + kv.first,
                         nullptr);
    os << "\n\\end\\\n";
    return os.str();
}

} // namespace lexdiar
