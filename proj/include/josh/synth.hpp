#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace josh {

// Planted-topic benchmark generator. A two-level taxonomy
// (ROOT -> super{s} -> leaf{s}_{t}) with a disjoint topical vocabulary
// per leaf plus a shared noise pool. Each document picks a leaf
// uniformly, then draws tokens from the leaf vocabulary with probability
// (1 - noise) and from the noise pool otherwise.
//
// Token naming: leaf `leaf{s}_{t}` owns `leaf{s}_{t}` itself plus
// `leaf{s}_{t}_w{k}`, k = 1..vocab_per_topic-1; the noise pool is
// `noise_w{k}` with 2*vocab_per_topic entries. Each super name rides in
// the topical draws of its first child leaf at a 5% rate so that it
// appears in the corpus (and still maps to exactly one leaf).
struct SynthConfig {
    int supers = 3;
    int subs = 3;
    int vocab_per_topic = 50;
    int docs = 3000;
    int doc_len = 60;
    double noise = 0.2;
    std::uint64_t seed = 42;

    void validate() const;
};

struct SynthPaths {
    std::string corpus;    // corpus.txt
    std::string taxonomy;  // taxonomy.txt
    std::string gold;      // gold.tsv, lines `doc_id<TAB>leaf_name`
};

SynthPaths generate_synth(const SynthConfig& config,
                          const std::string& out_dir);

// The planted topical vocabulary of one leaf (its name plus its terms).
std::vector<std::string> planted_leaf_vocabulary(const SynthConfig& config,
                                                 int super_index,
                                                 int sub_index);

std::string synth_super_name(int super_index);
std::string synth_leaf_name(int super_index, int sub_index);

}  // namespace josh
