#pragma once

#include <cstdint>

namespace josh {

struct TrainConfig {
    int dim = 100;                  // embedding dimension p
    int window = 5;                 // local context window h
    int top_k = 5;                  // representative terms per category K
    double alpha0 = 0.025;          // initial learning rate
    double margin = 0.25;           // text hinge margin m
    double margin_intra = 0.9;      // intra-category cosine margin
    long long min_count = 5;
    int epochs_per_mstep = 2;
    int tree_passes_per_mstep = 50;
    int threads = 1;
    std::uint64_t seed = 42;

    bool subsample = false;         // optional frequent-word subsampling
    double subsample_t = 1e-3;

    // Re-seed the per-worker negative streams at every epoch so the
    // epoch objective is defined over a fixed tuple set (diagnostics).
    bool reseed_epoch_negatives = false;

    void validate() const;  // throws std::invalid_argument
};

}  // namespace josh
