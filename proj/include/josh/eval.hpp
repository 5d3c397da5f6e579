#pragma once

#include <string>
#include <vector>

namespace josh {

struct TopicTerms {
    std::string category;
    std::vector<std::string> terms;
};

// `category<TAB>term1<TAB>...`; scored fields `term:score` are accepted
// and the score part dropped.
std::vector<TopicTerms> read_topics_tsv(const std::string& path);

struct CoherenceReport {
    struct Category {
        std::string name;
        double tc = 0.0;
        long long pairs_used = 0;
        long long pairs_skipped = 0;
    };
    std::vector<Category> per_category;
    double macro_tc = 0.0;     // over categories with at least one pair
    long long pairs_used = 0;
    long long pairs_skipped = 0;
};

// NPMI topic coherence with sliding-window co-occurrence counts over the
// reference corpus (window positions step by one; shorter documents form
// a single window). Pairs with a term absent from the reference corpus
// are skipped and counted.
CoherenceReport topic_coherence(const std::vector<TopicTerms>& topics,
                                const std::string& corpus_path,
                                int window = 10);

struct LabelRow {
    int doc_id;
    std::string label;
};

// first two TSV columns: doc_id, label
std::vector<LabelRow> read_labels_tsv(const std::string& path);

struct F1Result {
    double macro_f1 = 0.0;
    double micro_f1 = 0.0;
};

// Standard multi-class Macro/Micro F1; label sets aligned by doc_id,
// throws when an id is missing on either side.
F1Result classification_f1(const std::vector<LabelRow>& predicted,
                           const std::vector<LabelRow>& gold);

}  // namespace josh
