#include "josh/miner.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <stdexcept>

#include "josh/geometry.hpp"

namespace josh {

namespace {

inline double dot_raw(const double* a, const double* b, size_t p) {
    double s = 0.0;
    for (size_t i = 0; i < p; ++i) s += a[i] * b[i];
    return s;
}

}  // namespace

std::vector<TopicResult> mine_topics(const ModelState& state) {
    const size_t vocab_size = state.vocab.size();
    const size_t p = state.u.dim;
    const size_t keep = std::min<size_t>(
        static_cast<size_t>(state.config.top_k) + 1, vocab_size);

    std::vector<TopicResult> topics;
    std::vector<std::pair<double, int>> scored(vocab_size);
    for (const auto& node : state.taxonomy.nodes) {
        if (node.node_id == Taxonomy::kRoot) continue;
        const double log_c =
            log_vmf_normalizer(static_cast<int>(p), node.kappa);
        for (size_t w = 0; w < vocab_size; ++w)
            scored[w] = {log_c + node.kappa * dot_raw(state.u.row(w),
                                                      node.center.data(), p),
                         static_cast<int>(w)};
        std::partial_sort(scored.begin(), scored.begin() + keep, scored.end(),
                          [](const auto& a, const auto& b) {
                              if (a.first != b.first) return a.first > b.first;
                              return a.second < b.second;
                          });
        TopicResult topic;
        topic.category = node.name;
        topic.node_id = node.node_id;
        for (size_t i = 0;
             i < keep && topic.terms.size() <
                             static_cast<size_t>(state.config.top_k);
             ++i) {
            if (scored[i].second == node.name_token) continue;
            topic.terms.push_back(
                state.vocab.tokens[static_cast<size_t>(scored[i].second)]);
            topic.scores.push_back(scored[i].first);
        }
        topics.push_back(std::move(topic));
    }
    return topics;
}

void write_topics_tsv(const std::vector<TopicResult>& topics,
                      const std::string& path, bool with_scores) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    char buf[64];
    for (const auto& topic : topics) {
        out << topic.category;
        for (size_t i = 0; i < topic.terms.size(); ++i) {
            out << '\t' << topic.terms[i];
            if (with_scores) {
                std::snprintf(buf, sizeof(buf), "%.6g", topic.scores[i]);
                out << ':' << buf;
            }
        }
        out << '\n';
    }
    if (!out) throw std::runtime_error("write error on " + path);
}

DocLabel classify(const ModelState& state,
                  std::span<const double> doc_embedding, ClassifyScope scope,
                  int level) {
    if (doc_embedding.size() != state.u.dim)
        throw std::invalid_argument("classify: dimension mismatch");
    DocLabel label;
    const size_t p = state.u.dim;
    double best = 0.0;
    for (const auto& node : state.taxonomy.nodes) {
        if (node.node_id == Taxonomy::kRoot) continue;
        if (scope == ClassifyScope::LeavesOnly && !node.children.empty())
            continue;
        if (scope == ClassifyScope::SingleLevel && node.level != level)
            continue;
        const double density =
            log_vmf_normalizer(static_cast<int>(p), node.kappa) +
            node.kappa * dot_raw(doc_embedding.data(), node.center.data(), p);
        label.candidates.push_back(node.node_id);
        label.log_densities.push_back(density);
        if (label.node_id < 0 || density > best) {
            best = density;
            label.node_id = node.node_id;
            label.log_density = density;
        }
    }
    if (label.candidates.empty())
        throw std::runtime_error("classify: taxonomy has no candidate nodes");
    std::map<int, std::pair<double, int>> best_per_level;
    for (size_t i = 0; i < label.candidates.size(); ++i) {
        const auto& node = state.taxonomy.node(label.candidates[i]);
        auto it = best_per_level.find(node.level);
        if (it == best_per_level.end() ||
            label.log_densities[i] > it->second.first)
            best_per_level[node.level] = {label.log_densities[i],
                                          node.node_id};
    }
    for (const auto& [lvl, best] : best_per_level)
        label.level_argmax.emplace_back(lvl, best.second);
    return label;
}

std::pair<std::vector<DocLabel>, ClassifySummary> classify_corpus(
    const ModelState& state, ClassifyScope scope, int level) {
    std::vector<DocLabel> labels;
    labels.reserve(state.d.rows);
    ClassifySummary summary;
    summary.counts.assign(state.taxonomy.size(), 0);
    for (size_t i = 0; i < state.d.rows; ++i) {
        DocLabel label = classify(state, state.d.row_span(i), scope, level);
        label.doc_id = static_cast<int>(i);
        ++summary.counts[static_cast<size_t>(label.node_id)];
        ++summary.total;
        labels.push_back(std::move(label));
    }
    return {std::move(labels), std::move(summary)};
}

void write_labels_tsv(const ModelState& state,
                      const std::vector<DocLabel>& labels,
                      const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    char buf[64];
    for (const auto& label : labels) {
        std::snprintf(buf, sizeof(buf), "%.6g", label.log_density);
        out << label.doc_id << '\t'
            << state.taxonomy.node(label.node_id).name << '\t' << buf << '\n';
    }
    if (!out) throw std::runtime_error("write error on " + path);
}

}  // namespace josh
