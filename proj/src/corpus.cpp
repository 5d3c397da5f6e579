#include "josh/corpus.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace josh {

namespace {

void split_tokens(const std::string& line, std::vector<std::string>& out) {
    out.clear();
    size_t start = 0;
    while (start < line.size()) {
        size_t end = line.find_first_of(" \t", start);
        if (end == std::string::npos) end = line.size();
        if (end > start) {
            std::string tok = line.substr(start, end - start);
            if (!tok.empty() && tok.back() == '\r') tok.pop_back();
            if (!tok.empty()) out.push_back(std::move(tok));
        }
        start = end + 1;
    }
}

Vocabulary finalize_vocabulary(
    std::vector<std::pair<std::string, long long>>&& retained) {
    std::sort(retained.begin(), retained.end(),
              [](const auto& a, const auto& b) {
                  if (a.second != b.second) return a.second > b.second;
                  return a.first < b.first;
              });
    Vocabulary vocab;
    vocab.tokens.reserve(retained.size());
    vocab.counts.reserve(retained.size());
    for (auto& [token, count] : retained) {
        vocab.ids.emplace(token, static_cast<int>(vocab.tokens.size()));
        vocab.tokens.push_back(std::move(token));
        vocab.counts.push_back(count);
        vocab.total_tokens += count;
    }
    return vocab;
}

}  // namespace

Vocabulary build_vocabulary(const std::string& corpus_path,
                            long long min_count) {
    if (min_count < 1)
        throw std::invalid_argument("build_vocabulary: min_count must be >= 1");
    std::ifstream in(corpus_path);
    if (!in)
        throw std::runtime_error("build_vocabulary: cannot open " + corpus_path);

    std::unordered_map<std::string, long long> counts;
    std::string line;
    std::vector<std::string> toks;
    while (std::getline(in, line)) {
        split_tokens(line, toks);
        for (auto& t : toks) ++counts[t];
    }
    if (in.bad())
        throw std::runtime_error("build_vocabulary: read error on " + corpus_path);

    std::vector<std::pair<std::string, long long>> retained;
    retained.reserve(counts.size());
    for (auto& [token, count] : counts)
        if (count >= min_count) retained.emplace_back(token, count);
    if (retained.empty())
        throw std::runtime_error(
            "build_vocabulary: no token appears at least " +
            std::to_string(min_count) + " times in " + corpus_path);
    return finalize_vocabulary(std::move(retained));
}

Vocabulary make_vocabulary(
    const std::vector<std::pair<std::string, long long>>& token_counts,
    long long min_count) {
    std::vector<std::pair<std::string, long long>> retained;
    retained.reserve(token_counts.size());
    for (const auto& tc : token_counts)
        if (tc.second >= min_count) retained.push_back(tc);
    if (retained.empty())
        throw std::runtime_error("make_vocabulary: empty vocabulary");
    return finalize_vocabulary(std::move(retained));
}

std::vector<Document> load_documents(const std::string& corpus_path,
                                     const Vocabulary& vocab) {
    std::ifstream in(corpus_path);
    if (!in)
        throw std::runtime_error("load_documents: cannot open " + corpus_path);

    std::vector<Document> docs;
    std::string line;
    std::vector<std::string> toks;
    while (std::getline(in, line)) {
        split_tokens(line, toks);
        std::vector<int> ids;
        ids.reserve(toks.size());
        for (const auto& t : toks) {
            const int id = vocab.id(t);
            if (id >= 0) ids.push_back(id);
        }
        if (ids.empty()) continue;
        docs.push_back(Document{static_cast<int>(docs.size()), std::move(ids)});
    }
    if (in.bad())
        throw std::runtime_error("load_documents: read error on " + corpus_path);
    return docs;
}

NegativeSampler::NegativeSampler(const Vocabulary& vocab, std::uint64_t seed,
                                 double power)
    : rng_(seed) {
    if (vocab.size() < 2)
        throw std::invalid_argument(
            "NegativeSampler: vocabulary must have at least 2 tokens");
    cumulative_.resize(vocab.size());
    double acc = 0.0;
    for (size_t i = 0; i < vocab.size(); ++i) {
        acc += std::pow(static_cast<double>(vocab.counts[i]), power);
        cumulative_[i] = acc;
    }
}

int NegativeSampler::sample(int exclude) {
    const auto n = cumulative_.size();
    for (int attempt = 0; attempt < 100; ++attempt) {
        const double u = rng_.uniform01() * cumulative_.back();
        const auto it =
            std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
        int id = static_cast<int>(std::min<size_t>(
            static_cast<size_t>(it - cumulative_.begin()), n - 1));
        if (id != exclude) return id;
    }
    // fall back to uniform over the remaining ids
    int id = static_cast<int>(rng_.below(n - 1));
    if (id >= exclude) ++id;
    return id;
}

std::vector<ContextPair> context_pairs(const Document& doc, int window) {
    if (window < 1)
        throw std::invalid_argument("context_pairs: window must be >= 1");
    std::vector<ContextPair> out;
    for_each_context_pair(doc, window, [&](int center, int context, int doc_id) {
        out.push_back(ContextPair{center, context, doc_id});
    });
    return out;
}

}  // namespace josh
