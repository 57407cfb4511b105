#include "lexdiar/ngram.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace lexdiar {

namespace {

std::string join(const std::vector<std::string> &tokens, size_t first, size_t count) {
    std::string key;
    for (size_t i = first; i < first + count; ++i) {
        if (i > first)
            key += ' ';
        key += tokens[i];
    }
    return key;
}

std::vector<std::string> split_ws(const std::string &line) {
    std::vector<std::string> fields;
    std::istringstream ls(line);
    std::string f;
    while (ls >> f)
        fields.push_back(std::move(f));
    return fields;
}

bool parse_number(const std::string &s, double *out) {
    size_t pos = 0;
    try {
        *out = std::stod(s, &pos);
    } catch (const std::exception &) {
        return false;
    }
    return pos == s.size();
}

} // namespace

NgramModel parse_arpa(std::istream &in) {
    NgramModel model;
    std::vector<long> declared_counts; // declared_counts[n-1]
    std::string line;
    long line_no = 0;

    enum class State { kPreamble, kData, kGrams, kDone };
    State state = State::kPreamble;
    int current_n = 0;
    long parsed_in_section = 0;

    auto begin_section = [&](int n) {
        if (n < 1 || n > static_cast<int>(declared_counts.size()))
            throw ParseError("section \\" + std::to_string(n) +
                                 "-grams: was not declared in \\data\\",
                             line_no);
        current_n = n;
        parsed_in_section = 0;
    };
    auto end_section = [&]() {
        if (current_n == 0)
            return;
        if (parsed_in_section != declared_counts[current_n - 1])
            throw ParseError("\\" + std::to_string(current_n) + "-grams: declares " +
                                 std::to_string(declared_counts[current_n - 1]) +
                                 " entries but " + std::to_string(parsed_in_section) +
                                 " were parsed",
                             line_no);
    };

    while (std::getline(in, line)) {
        ++line_no;
        while (!line.empty() && (line.back() == '\r' || line.back() == '\n'))
            line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos)
            continue;

        if (state == State::kPreamble) {
            if (line == "\\data\\") {
                state = State::kData;
                continue;
            }
            continue; // ARPA files may carry free-text preamble
        }
        if (line == "\\end\\") {
            end_section();
            state = State::kDone;
            break;
        }
        if (line.size() > 1 && line.front() == '\\' && line.find("-grams:") != std::string::npos) {
            if (state == State::kData) {
                model.tables.resize(declared_counts.size());
                state = State::kGrams;
            } else {
                end_section();
            }
            int n = 0;
            if (sscanf(line.c_str(), "\\%d-grams:", &n) != 1)
                throw ParseError("malformed section marker '" + line + "'", line_no);
            begin_section(n);
            continue;
        }

        if (state == State::kData) {
            // ngram N=count
            long n = 0, count = 0;
            if (sscanf(line.c_str(), "ngram %ld=%ld", &n, &count) != 2 || n < 1 ||
                count < 0)
                throw ParseError("malformed count line '" + line + "'", line_no);
            if (static_cast<size_t>(n) > declared_counts.size())
                declared_counts.resize(static_cast<size_t>(n), -1);
            declared_counts[static_cast<size_t>(n) - 1] = count;
            continue;
        }

        if (state != State::kGrams || current_n == 0)
            throw ParseError("unexpected line '" + line + "'", line_no);

        std::vector<std::string> fields = split_ws(line);
        const size_t n = static_cast<size_t>(current_n);
        if (fields.size() != n + 1 && fields.size() != n + 2)
            throw ParseError("expected " + std::to_string(n + 1) + " or " +
                                 std::to_string(n + 2) + " fields, got " +
                                 std::to_string(fields.size()),
                             line_no);
        NgramEntry entry;
        if (!parse_number(fields[0], &entry.log10_prob))
            throw ParseError("non-numeric probability '" + fields[0] + "'", line_no);
        if (fields.size() == n + 2) {
            if (!parse_number(fields.back(), &entry.log10_backoff))
                throw ParseError("non-numeric backoff weight '" + fields.back() + "'",
                                 line_no);
            entry.has_backoff = true;
        }
        std::string key = join(fields, 1, n);
        if (!model.tables[n - 1].emplace(std::move(key), entry).second)
            throw ParseError("duplicate " + std::to_string(n) + "-gram entry",
                             line_no);
        ++parsed_in_section;
        if (n == 1)
            model.vocabulary.insert(fields[1]);
    }

    if (state == State::kPreamble)
        throw ParseError("missing \\data\\ section");
    if (state != State::kDone)
        throw ParseError("missing \\end\\ marker", line_no);
    model.tables.resize(declared_counts.size());
    for (size_t i = 0; i < declared_counts.size(); ++i) {
        if (declared_counts[i] < 0)
            throw ParseError("no count declared for ngram " + std::to_string(i + 1));
        if (static_cast<long>(model.tables[i].size()) != declared_counts[i])
            throw ParseError("\\data\\ declares " + std::to_string(declared_counts[i]) +
                             " " + std::to_string(i + 1) + "-grams but " +
                             std::to_string(model.tables[i].size()) + " were parsed");
    }
    model.order = static_cast<int>(declared_counts.size());
    if (model.order < 1)
        throw ParseError("model declares no n-gram orders");
    if (!model.vocabulary.count(kUnk))
        throw ParseError("vocabulary does not contain " + std::string(kUnk));

    // Every higher-order gram must be reachable through its prefix.
    for (size_t n = 2; n <= model.tables.size(); ++n) {
        for (const auto &kv : model.tables[n - 1]) {
            const std::string &key = kv.first;
            size_t cut = key.rfind(' ');
            std::string prefix = key.substr(0, cut);
            if (model.tables[n - 2].find(prefix) == model.tables[n - 2].end())
                throw ParseError("prefix '" + prefix + "' of " + std::to_string(n) +
                                 "-gram '" + key + "' has no " +
                                 std::to_string(n - 1) + "-gram entry");
        }
    }
    return model;
}

NgramModel load_arpa(const std::string &path) {
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open ARPA file: " + path);
    return parse_arpa(in);
}

double score_word(const NgramModel &model, const std::vector<std::string> &context,
                  const std::string &word) {
    std::vector<std::string> tokens;
    const size_t max_context = static_cast<size_t>(model.order) - 1;
    const size_t take = std::min(context.size(), max_context);
    tokens.reserve(take + 1);
    for (size_t i = context.size() - take; i < context.size(); ++i)
        tokens.push_back(model.in_vocabulary(context[i]) ? context[i]
                                                         : std::string(kUnk));
    tokens.push_back(model.in_vocabulary(word) ? word : std::string(kUnk));

    double backoff_sum = 0.0; // accumulated log10 backoff weights
    size_t first = 0;
    while (true) {
        const size_t n = tokens.size() - first;
        const std::string key = join(tokens, first, n);
        if (const NgramEntry *entry = model.find(n, key))
            return backoff_sum + entry->log10_prob;
        if (n == 1)
            // Unigram of <unk> exists by the parse invariant, so this only
            // triggers for in-vocabulary tokens missing a unigram entry,
            // which the prefix check rules out.
            throw Error("no unigram entry for token '" + key + "'");
        const std::string ctx_key = join(tokens, first, n - 1);
        if (const NgramEntry *ctx = model.find(n - 1, ctx_key))
            if (ctx->has_backoff)
                backoff_sum += ctx->log10_backoff;
        ++first;
    }
}

std::vector<std::string> truncate_context(const std::vector<std::string> &tokens,
                                          int word_budget) {
    if (word_budget < 0)
        word_budget = 0;
    size_t first = tokens.size();
    int words = 0;
    while (first > 0) {
        const bool marker = is_marker(tokens[first - 1]);
        if (!marker && words == word_budget)
            break;
        if (!marker)
            ++words;
        --first;
    }
    return std::vector<std::string>(tokens.begin() + static_cast<long>(first),
                                    tokens.end());
}

SpeakerProbVector speaker_posterior_ngram(const NgramModel &model,
                                          const Hypothesis &hyp,
                                          const std::string &word, int context_window,
                                          double prob_floor) {
    const int num_speakers = hyp.num_speakers();
    std::vector<double> raw(static_cast<size_t>(num_speakers), 0.0);
    double max_raw = 0.0;
    for (int k = 0; k < num_speakers; ++k) {
        std::vector<std::string> ctx = truncate_context(
            hyp.speaker_contexts[static_cast<size_t>(k)], context_window - 1);
        if (k != hyp.last_speaker)
            ctx.push_back(kSos);
        const double p = std::pow(10.0, score_word(model, ctx, word));
        raw[static_cast<size_t>(k)] = p;
        max_raw = std::max(max_raw, p);
    }
    if (max_raw <= prob_floor)
        return SpeakerProbVector::uniform(static_cast<size_t>(num_speakers));
    return SpeakerProbVector::normalized(raw);
}

double word_probability_ngram(const NgramModel &model, const Hypothesis &hyp,
                              const std::string &word, int context_window,
                              double prob_floor) {
    std::vector<std::string> ctx =
        truncate_context(hyp.combined_context, context_window - 1);
    const double p = std::pow(10.0, score_word(model, ctx, word));
    return std::min(std::max(p, prob_floor), 1.0);
}

} // namespace lexdiar
