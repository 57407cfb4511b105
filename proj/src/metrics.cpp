#include "lexdiar/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace lexdiar {

namespace {

bool is_word_char(unsigned char c) { return std::isalnum(c) != 0 || c >= 0x80; }

std::string normalize_word(const std::string &word) {
    size_t begin = 0, end = word.size();
    while (begin < end && !is_word_char(static_cast<unsigned char>(word[begin])))
        ++begin;
    while (end > begin && !is_word_char(static_cast<unsigned char>(word[end - 1])))
        --end;
    std::string out;
    out.reserve(end - begin);
    for (size_t i = begin; i < end; ++i)
        out.push_back(static_cast<char>(
            std::tolower(static_cast<unsigned char>(word[i]))));
    return out;
}

AlignmentResult finalize(long subs, long ins, long dels, long ref_len) {
    AlignmentResult r;
    r.substitutions = subs;
    r.insertions = ins;
    r.deletions = dels;
    r.reference_length = ref_len;
    r.degenerate = ref_len == 0 && r.errors() > 0;
    r.rate = static_cast<double>(r.errors()) /
             static_cast<double>(std::max(ref_len, 1L));
    return r;
}

} // namespace

std::vector<std::string> normalize_text(const std::vector<std::string> &words) {
    std::vector<std::string> out;
    out.reserve(words.size());
    for (const std::string &w : words) {
        std::string n = normalize_word(w);
        if (!n.empty())
            out.push_back(std::move(n));
    }
    return out;
}

SpeakerAttributedTranscript
normalize_transcript(const SpeakerAttributedTranscript &transcript) {
    SpeakerAttributedTranscript out;
    out.entries.reserve(transcript.entries.size());
    for (const TranscriptEntry &e : transcript.entries) {
        std::string n = normalize_word(e.text);
        if (!n.empty())
            out.entries.push_back(TranscriptEntry{std::move(n), e.start, e.end,
                                                  e.speaker});
    }
    return out;
}

AlignmentResult wer(const std::vector<std::string> &reference,
                    const std::vector<std::string> &hypothesis) {
    const size_t n = reference.size(), m = hypothesis.size();
    // dist[i][j]: edit distance between ref[0..i) and hyp[0..j)
    std::vector<std::vector<int>> dist(n + 1, std::vector<int>(m + 1, 0));
    for (size_t i = 0; i <= n; ++i)
        dist[i][0] = static_cast<int>(i);
    for (size_t j = 0; j <= m; ++j)
        dist[0][j] = static_cast<int>(j);
    for (size_t i = 1; i <= n; ++i) {
        for (size_t j = 1; j <= m; ++j) {
            const int sub = dist[i - 1][j - 1] + (reference[i - 1] == hypothesis[j - 1] ? 0 : 1);
            const int del = dist[i - 1][j] + 1;
            const int ins = dist[i][j - 1] + 1;
            dist[i][j] = std::min({sub, del, ins});
        }
    }
    // Backtrace, preferring match/substitution, then deletion, then
    // insertion, so the count split is deterministic.
    long subs = 0, ins = 0, dels = 0;
    size_t i = n, j = m;
    while (i > 0 || j > 0) {
        if (i > 0 && j > 0) {
            const int step = reference[i - 1] == hypothesis[j - 1] ? 0 : 1;
            if (dist[i][j] == dist[i - 1][j - 1] + step) {
                subs += step;
                --i;
                --j;
                continue;
            }
        }
        if (i > 0 && dist[i][j] == dist[i - 1][j] + 1) {
            ++dels;
            --i;
            continue;
        }
        ++ins;
        --j;
    }
    return finalize(subs, ins, dels, static_cast<long>(n));
}

std::vector<std::string> transcript_words(const SpeakerAttributedTranscript &t) {
    std::vector<std::string> words;
    words.reserve(t.entries.size());
    for (const TranscriptEntry &e : t.entries)
        words.push_back(e.text);
    return words;
}

namespace {

std::unordered_map<int, std::vector<std::string>>
words_by_speaker(const SpeakerAttributedTranscript &t) {
    std::unordered_map<int, std::vector<std::string>> by;
    for (const TranscriptEntry &e : t.entries)
        by[e.speaker].push_back(e.text);
    return by;
}

} // namespace

std::unordered_map<int, int>
identity_mapping(const SpeakerAttributedTranscript &hypothesis) {
    std::unordered_map<int, int> mapping;
    for (const TranscriptEntry &e : hypothesis.entries)
        mapping.emplace(e.speaker, e.speaker);
    return mapping;
}

AlignmentResult sa_wer(const SpeakerAttributedTranscript &reference,
                       const SpeakerAttributedTranscript &hypothesis,
                       const std::unordered_map<int, int> &mapping) {
    auto ref_by = words_by_speaker(reference);
    std::unordered_map<int, std::vector<std::string>> hyp_by;
    for (const TranscriptEntry &e : hypothesis.entries) {
        auto it = mapping.find(e.speaker);
        if (it == mapping.end())
            throw Error("no mapping for hypothesis speaker " +
                        std::to_string(e.speaker));
        hyp_by[it->second].push_back(e.text);
    }

    std::set<int> targets;
    for (const auto &kv : ref_by)
        targets.insert(kv.first);
    for (const auto &kv : hyp_by)
        targets.insert(kv.first);

    long subs = 0, ins = 0, dels = 0, ref_len = 0;
    static const std::vector<std::string> kEmpty;
    for (int r : targets) {
        auto ri = ref_by.find(r);
        auto hi = hyp_by.find(r);
        const std::vector<std::string> &ref_words =
            ri == ref_by.end() ? kEmpty : ri->second;
        const std::vector<std::string> &hyp_words =
            hi == hyp_by.end() ? kEmpty : hi->second;
        AlignmentResult a = wer(ref_words, hyp_words);
        subs += a.substitutions;
        ins += a.insertions;
        dels += a.deletions;
        ref_len += a.reference_length;
    }
    return finalize(subs, ins, dels, ref_len);
}

std::pair<AlignmentResult, std::vector<int>>
cp_wer(const SpeakerAttributedTranscript &reference,
       const SpeakerAttributedTranscript &hypothesis) {
    auto ref_by = words_by_speaker(reference);
    auto hyp_by = words_by_speaker(hypothesis);

    int n = 0;
    for (const auto &kv : ref_by)
        n = std::max(n, kv.first + 1);
    for (const auto &kv : hyp_by)
        n = std::max(n, kv.first + 1);
    if (n > 8)
        throw Error("cp_wer supports at most 8 speakers, got " + std::to_string(n));
    if (n == 0)
        return {finalize(0, 0, 0, 0), {}};

    long total_ref = 0;
    for (const auto &kv : ref_by)
        total_ref += static_cast<long>(kv.second.size());

    static const std::vector<std::string> kEmpty;
    auto side = [](const std::unordered_map<int, std::vector<std::string>> &by,
                   int k) -> const std::vector<std::string> & {
        auto it = by.find(k);
        return it == by.end() ? kEmpty : it->second;
    };

    // perm[h] = reference speaker assigned to hypothesis speaker h; the
    // identity comes first, so ties resolve toward it.
    std::vector<int> perm(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i)
        perm[static_cast<size_t>(i)] = i;

    AlignmentResult best;
    std::vector<int> best_perm;
    bool have_best = false;
    do {
        long subs = 0, ins = 0, dels = 0;
        for (int h = 0; h < n; ++h) {
            AlignmentResult a =
                wer(side(ref_by, perm[static_cast<size_t>(h)]), side(hyp_by, h));
            subs += a.substitutions;
            ins += a.insertions;
            dels += a.deletions;
        }
        AlignmentResult r = finalize(subs, ins, dels, total_ref);
        if (!have_best || r.errors() < best.errors()) {
            best = r;
            best_perm = perm;
            have_best = true;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));

    return {best, best_perm};
}

std::pair<double, double> deltas(double wer_rate, double sa_rate, double cp_rate) {
    return {sa_rate - wer_rate, cp_rate - wer_rate};
}

} // namespace lexdiar
