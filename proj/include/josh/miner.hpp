#pragma once

#include <span>
#include <string>
#include <vector>

#include "josh/model.hpp"

namespace josh {

struct TopicResult {
    std::string category;
    int node_id = -1;
    std::vector<std::string> terms;   // best first, category name excluded
    std::vector<double> scores;       // log vMF densities, non-increasing
};

// Per category: the top-(K+1) tokens by log vMF density under the
// category distribution, with the category's own name removed and the
// rest truncated to K. ROOT is skipped.
std::vector<TopicResult> mine_topics(const ModelState& state);

void write_topics_tsv(const std::vector<TopicResult>& topics,
                      const std::string& path, bool with_scores = false);

enum class ClassifyScope { AllNodes, LeavesOnly, SingleLevel };

struct DocLabel {
    int doc_id = -1;
    int node_id = -1;                  // argmax over candidates
    double log_density = 0.0;          // density at the argmax
    std::vector<int> candidates;       // node ids considered
    std::vector<double> log_densities; // aligned with candidates
    // best candidate per tree level, (level, node_id); one entry per
    // level that contributed at least one candidate
    std::vector<std::pair<int, int>> level_argmax;
};

// Generative assignment: argmax over non-ROOT categories of
// log n_p(kappa_c) + kappa_c <d, c>. Scope restricts the candidate set
// to leaves or to one level.
DocLabel classify(const ModelState& state, std::span<const double> doc_embedding,
                  ClassifyScope scope = ClassifyScope::AllNodes, int level = -1);

struct ClassifySummary {
    std::vector<long long> counts;  // indexed by node_id
    long long total = 0;
};

// classify() applied to every stored document embedding
std::pair<std::vector<DocLabel>, ClassifySummary> classify_corpus(
    const ModelState& state, ClassifyScope scope = ClassifyScope::AllNodes,
    int level = -1);

// TSV lines `doc_id<TAB>node_name<TAB>log_density`
void write_labels_tsv(const ModelState& state,
                      const std::vector<DocLabel>& labels,
                      const std::string& path);

}  // namespace josh
