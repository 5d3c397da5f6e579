#pragma once

#include <algorithm>
#include <string>
#include <unordered_map>
#include <vector>

#include "josh/rng.hpp"

namespace josh {

// Token ids are dense 0..|V|-1, assigned by descending count with ties
// broken lexicographically. Every retained token has count >= min_count.
struct Vocabulary {
    std::vector<std::string> tokens;            // id -> token
    std::vector<long long> counts;              // id -> corpus count
    std::unordered_map<std::string, int> ids;   // token -> id
    long long total_tokens = 0;                 // retained occurrences

    int id(const std::string& token) const {
        auto it = ids.find(token);
        return it == ids.end() ? -1 : it->second;
    }
    size_t size() const { return tokens.size(); }
};

// Corpus file: UTF-8, one document per line, tokens separated by ASCII
// spaces, phrases pre-joined with underscores.
Vocabulary build_vocabulary(const std::string& corpus_path, long long min_count);

// In-memory construction with the same ordering rules (tests, benchmarks).
Vocabulary make_vocabulary(
    const std::vector<std::pair<std::string, long long>>& token_counts,
    long long min_count = 1);

struct Document {
    int doc_id = 0;
    std::vector<int> token_ids;
};

// Out-of-vocabulary tokens are skipped; lines left empty after the skip
// produce no Document. doc_ids number the emitted documents 0,1,2,...
std::vector<Document> load_documents(const std::string& corpus_path,
                                     const Vocabulary& vocab);

// Draws token ids with probability proportional to count^power
// (0.75 by default), never returning `exclude`.
class NegativeSampler {
public:
    NegativeSampler(const Vocabulary& vocab, std::uint64_t seed,
                    double power = 0.75);

    int sample(int exclude);

    Rng& rng() { return rng_; }

private:
    std::vector<double> cumulative_;
    Rng rng_;
};

struct ContextPair {
    int center;
    int context;
    int doc_id;
};

// Every (w_j, w_{j+k}) with -window <= k <= window, k != 0, clipped at
// the document boundaries.
template <class Fn>
void for_each_context_pair(const Document& doc, int window, Fn&& fn) {
    const int n = static_cast<int>(doc.token_ids.size());
    for (int j = 0; j < n; ++j) {
        const int lo = std::max(0, j - window);
        const int hi = std::min(n - 1, j + window);
        for (int k = lo; k <= hi; ++k) {
            if (k == j) continue;
            fn(doc.token_ids[j], doc.token_ids[k], doc.doc_id);
        }
    }
}

std::vector<ContextPair> context_pairs(const Document& doc, int window);

}  // namespace josh
