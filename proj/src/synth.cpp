#include "josh/synth.hpp"

#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "josh/rng.hpp"

namespace josh {

namespace {
constexpr double kSuperNameRate = 0.05;
}

void SynthConfig::validate() const {
    if (supers < 1 || subs < 1 || vocab_per_topic < 2 || docs < 1 ||
        doc_len < 1)
        throw std::invalid_argument("synth: sizes must be positive");
    if (noise < 0.0 || noise > 1.0)
        throw std::invalid_argument("synth: noise must be in [0, 1]");
}

std::string synth_super_name(int super_index) {
    return "super" + std::to_string(super_index);
}

std::string synth_leaf_name(int super_index, int sub_index) {
    return "leaf" + std::to_string(super_index) + "_" +
           std::to_string(sub_index);
}

std::vector<std::string> planted_leaf_vocabulary(const SynthConfig& config,
                                                 int super_index,
                                                 int sub_index) {
    std::vector<std::string> vocab;
    const std::string name = synth_leaf_name(super_index, sub_index);
    vocab.push_back(name);
    for (int k = 1; k < config.vocab_per_topic; ++k)
        vocab.push_back(name + "_w" + std::to_string(k));
    return vocab;
}

SynthPaths generate_synth(const SynthConfig& config,
                          const std::string& out_dir) {
    config.validate();
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);

    SynthPaths paths{out_dir + "/corpus.txt", out_dir + "/taxonomy.txt",
                     out_dir + "/gold.tsv"};

    const int n_leaves = config.supers * config.subs;
    std::vector<std::vector<std::string>> leaf_vocab(n_leaves);
    for (int s = 0; s < config.supers; ++s)
        for (int t = 0; t < config.subs; ++t)
            leaf_vocab[s * config.subs + t] =
                planted_leaf_vocabulary(config, s, t);

    const int pool_size = 2 * config.vocab_per_topic;
    std::vector<std::string> noise_pool;
    noise_pool.reserve(pool_size);
    for (int k = 0; k < pool_size; ++k)
        noise_pool.push_back("noise_w" + std::to_string(k));

    {
        std::ofstream tax(paths.taxonomy);
        if (!tax) throw std::runtime_error("cannot open " + paths.taxonomy);
        for (int s = 0; s < config.supers; ++s)
            tax << "ROOT\t" << synth_super_name(s) << '\n';
        for (int s = 0; s < config.supers; ++s)
            for (int t = 0; t < config.subs; ++t)
                tax << synth_super_name(s) << '\t' << synth_leaf_name(s, t)
                    << '\n';
        if (!tax) throw std::runtime_error("write error on " + paths.taxonomy);
    }

    std::ofstream corpus(paths.corpus);
    std::ofstream gold(paths.gold);
    if (!corpus) throw std::runtime_error("cannot open " + paths.corpus);
    if (!gold) throw std::runtime_error("cannot open " + paths.gold);

    Rng rng(config.seed);
    for (int doc = 0; doc < config.docs; ++doc) {
        const int leaf = static_cast<int>(rng.below(n_leaves));
        const int super_index = leaf / config.subs;
        const bool carries_super = leaf % config.subs == 0;
        const auto& vocab = leaf_vocab[leaf];
        for (int i = 0; i < config.doc_len; ++i) {
            if (i) corpus << ' ';
            if (rng.uniform01() < config.noise) {
                corpus << noise_pool[rng.below(pool_size)];
            } else if (carries_super && rng.uniform01() < kSuperNameRate) {
                corpus << synth_super_name(super_index);
            } else {
                corpus << vocab[rng.below(vocab.size())];
            }
        }
        corpus << '\n';
        gold << doc << '\t' << vocab[0] << '\n';
    }
    if (!corpus) throw std::runtime_error("write error on " + paths.corpus);
    if (!gold) throw std::runtime_error("write error on " + paths.gold);
    return paths;
}

}  // namespace josh
