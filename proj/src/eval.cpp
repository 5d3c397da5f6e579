#include "josh/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <stdexcept>
#include <unordered_map>

namespace josh {

namespace {

std::vector<std::string> split_tab(const std::string& line) {
    std::vector<std::string> fields;
    size_t start = 0;
    while (start <= line.size()) {
        size_t end = line.find('\t', start);
        if (end == std::string::npos) end = line.size();
        fields.push_back(line.substr(start, end - start));
        start = end + 1;
    }
    return fields;
}

}  // namespace

std::vector<TopicTerms> read_topics_tsv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::vector<TopicTerms> topics;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = split_tab(line);
        TopicTerms topic;
        topic.category = fields[0];
        for (size_t i = 1; i < fields.size(); ++i) {
            std::string term = fields[i];
            const auto colon = term.rfind(':');
            if (colon != std::string::npos && colon > 0) {
                // strip a trailing :score if the tail parses as a number
                const std::string tail = term.substr(colon + 1);
                char* end = nullptr;
                std::strtod(tail.c_str(), &end);
                if (end && *end == '\0' && end != tail.c_str())
                    term = term.substr(0, colon);
            }
            if (!term.empty()) topic.terms.push_back(std::move(term));
        }
        topics.push_back(std::move(topic));
    }
    return topics;
}

CoherenceReport topic_coherence(const std::vector<TopicTerms>& topics,
                                const std::string& corpus_path, int window) {
    if (topics.empty())
        throw std::invalid_argument("topic_coherence: no topics");
    if (window < 1)
        throw std::invalid_argument("topic_coherence: window must be >= 1");
    std::ifstream in(corpus_path);
    if (!in) throw std::runtime_error("cannot open " + corpus_path);

    std::unordered_map<std::string, int> term_id;
    for (const auto& topic : topics)
        for (const auto& term : topic.terms)
            term_id.emplace(term, static_cast<int>(term_id.size()));
    const int n_terms = static_cast<int>(term_id.size());

    std::vector<long long> single(n_terms, 0);
    std::map<std::pair<int, int>, long long> joint;
    long long n_windows = 0;

    std::string line;
    std::vector<int> doc;  // term ids per position, -1 for other tokens
    std::vector<int> in_window_count(n_terms, 0);
    std::vector<int> present;
    while (std::getline(in, line)) {
        doc.clear();
        size_t start = 0;
        while (start < line.size()) {
            size_t end = line.find_first_of(" \t", start);
            if (end == std::string::npos) end = line.size();
            if (end > start) {
                std::string tok = line.substr(start, end - start);
                if (!tok.empty() && tok.back() == '\r') tok.pop_back();
                auto it = term_id.find(tok);
                doc.push_back(it == term_id.end() ? -1 : it->second);
            }
            start = end + 1;
        }
        const int n = static_cast<int>(doc.size());
        if (n == 0) continue;
        const int w = std::min(window, n);
        // slide the window, maintaining per-term counts inside it
        auto note_window = [&] {
            ++n_windows;
            present.clear();
            for (int id = 0; id < n_terms; ++id)
                if (in_window_count[id] > 0) present.push_back(id);
            for (size_t a = 0; a < present.size(); ++a) {
                ++single[present[a]];
                for (size_t b = a + 1; b < present.size(); ++b)
                    ++joint[{present[a], present[b]}];
            }
        };
        for (int i = 0; i < w; ++i)
            if (doc[i] >= 0) ++in_window_count[doc[i]];
        note_window();
        for (int i = w; i < n; ++i) {
            if (doc[i] >= 0) ++in_window_count[doc[i]];
            if (doc[i - w] >= 0) --in_window_count[doc[i - w]];
            note_window();
        }
        for (int i = n - w; i < n; ++i)
            if (i >= 0 && doc[i] >= 0) --in_window_count[doc[i]];
    }
    if (n_windows == 0)
        throw std::runtime_error("topic_coherence: empty reference corpus");

    constexpr double kEps = 1e-12;
    CoherenceReport report;
    double macro_sum = 0.0;
    int macro_cats = 0;
    for (const auto& topic : topics) {
        CoherenceReport::Category cat;
        cat.name = topic.category;
        double tc_sum = 0.0;
        for (size_t a = 0; a < topic.terms.size(); ++a) {
            for (size_t b = a + 1; b < topic.terms.size(); ++b) {
                int ia = term_id.at(topic.terms[a]);
                int ib = term_id.at(topic.terms[b]);
                if (single[ia] == 0 || single[ib] == 0) {
                    ++cat.pairs_skipped;
                    std::fprintf(stderr,
                                 "topic_coherence: skipping pair (%s, %s): "
                                 "absent from reference corpus\n",
                                 topic.terms[a].c_str(), topic.terms[b].c_str());
                    continue;
                }
                if (ia > ib) std::swap(ia, ib);
                auto it = joint.find({ia, ib});
                const long long raw_joint =
                    it == joint.end() ? 0 : it->second;
                double npmi;
                if (raw_joint == n_windows) {
                    npmi = 1.0;  // both terms in every window: perfect association
                } else {
                    const double p_ab = (static_cast<double>(raw_joint) + kEps) /
                                        static_cast<double>(n_windows);
                    const double p_a = static_cast<double>(single[ia]) /
                                       static_cast<double>(n_windows);
                    const double p_b = static_cast<double>(single[ib]) /
                                       static_cast<double>(n_windows);
                    npmi = std::log(p_ab / (p_a * p_b)) / -std::log(p_ab);
                    npmi = std::clamp(npmi, -1.0, 1.0);
                }
                tc_sum += npmi;
                ++cat.pairs_used;
            }
        }
        if (cat.pairs_used > 0) {
            cat.tc = tc_sum / static_cast<double>(cat.pairs_used);
            macro_sum += cat.tc;
            ++macro_cats;
        }
        report.pairs_used += cat.pairs_used;
        report.pairs_skipped += cat.pairs_skipped;
        report.per_category.push_back(std::move(cat));
    }
    report.macro_tc = macro_cats ? macro_sum / macro_cats : 0.0;
    return report;
}

std::vector<LabelRow> read_labels_tsv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::vector<LabelRow> rows;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = split_tab(line);
        if (fields.size() < 2)
            throw std::runtime_error("labels file " + path + ": malformed line " +
                                     std::to_string(lineno));
        rows.push_back(LabelRow{std::stoi(fields[0]), fields[1]});
    }
    return rows;
}

F1Result classification_f1(const std::vector<LabelRow>& predicted,
                           const std::vector<LabelRow>& gold) {
    std::unordered_map<int, const std::string*> pred_by_id;
    for (const auto& row : predicted) pred_by_id[row.doc_id] = &row.label;
    if (pred_by_id.size() != predicted.size())
        throw std::runtime_error("classification_f1: duplicate predicted doc_id");

    std::set<std::string> classes;
    for (const auto& row : predicted) classes.insert(row.label);
    for (const auto& row : gold) classes.insert(row.label);

    std::map<std::string, long long> tp, fp, fn;
    long long correct = 0;
    for (const auto& row : gold) {
        auto it = pred_by_id.find(row.doc_id);
        if (it == pred_by_id.end())
            throw std::runtime_error("classification_f1: missing prediction for doc_id " +
                                     std::to_string(row.doc_id));
        const std::string& pred = *it->second;
        if (pred == row.label) {
            ++tp[row.label];
            ++correct;
        } else {
            ++fp[pred];
            ++fn[row.label];
        }
    }
    if (gold.empty())
        throw std::invalid_argument("classification_f1: empty gold labels");

    F1Result out;
    double f1_sum = 0.0;
    for (const auto& cls : classes) {
        const double tpc = static_cast<double>(tp[cls]);
        const double denom = 2.0 * tpc + fp[cls] + fn[cls];
        f1_sum += denom > 0.0 ? 2.0 * tpc / denom : 0.0;
    }
    out.macro_f1 = f1_sum / static_cast<double>(classes.size());
    out.micro_f1 = static_cast<double>(correct) / static_cast<double>(gold.size());
    return out;
}

}  // namespace josh
