#pragma once

#include <atomic>
#include <vector>

#include "josh/miner.hpp"
#include "josh/model.hpp"

namespace josh {

// E-step: assign the top-t vocabulary tokens to every non-ROOT category
// by vMF log density (ties broken by ascending token id). t is the EM
// iteration index and must be >= 2; iteration 1 is the name-only
// initialization done by init_model.
void e_step(ModelState& state, int t);

// Mean-resultant concentration estimate,
//   kappa = rbar (p - rbar^2) / (1 - rbar^2),
// rbar clamped to [1e-4, 1-1e-4] and kappa to [1, 1e5].
void update_kappa(ModelState& state);

// One stochastic update per objective term. Each returns whether the
// hinge was active (an update was applied). Gradients are taken
// simultaneously at the pre-step values, projected to the tangent space,
// and applied with the add-and-normalize retraction.
bool text_step(ModelState& state, int center, int context, int doc_id,
               int negative, double alpha);
bool category_step(ModelState& state, int node_id, int token_id, double alpha);
bool tree_step(ModelState& state, int root_id, int child_i, int child_j,
               double margin, double alpha);

// Riemannian gradients of the active branch of each term, as applied by
// the step functions above (the category term carries its kappa factor;
// the steps divide it back out of the learning rate).
struct TextGradients {
    std::vector<double> u_center, u_negative, v_context, d_doc;
};
TextGradients text_hinge_gradients(const ModelState& state, int center,
                                   int context, int doc_id, int negative);
std::vector<double> category_term_gradient_u(const ModelState& state,
                                             int node_id, int token_id);
std::vector<double> category_term_gradient_c(const ModelState& state,
                                             int node_id, int token_id);
struct TreeGradients {
    std::vector<double> child_i, root, child_j;
};
TreeGradients tree_hinge_gradients(const ModelState& state, int root_id,
                                   int child_i, int child_j);

struct TreePassStats {
    long long total = 0;
    long long active = 0;
};

// tree_step over every (local tree, ordered sibling pair), `passes` times
TreePassStats run_tree_passes(ModelState& state,
                              const std::vector<LocalTree>& trees,
                              const LevelMargins& margins, double alpha,
                              int passes);

// The margin-hinge objective the M-step ascends, evaluated over the same
// deterministic negative streams a fresh epoch would draw.
struct ObjectiveBreakdown {
    double text = 0.0;
    double category = 0.0;
    double tree = 0.0;

    double total() const { return text + category + tree; }
};
ObjectiveBreakdown hinge_objective(const ModelState& state,
                                   const std::vector<Document>& docs,
                                   const LevelMargins& margins);

struct MStepStats {
    LevelMargins margins;       // frozen for the whole M-step
    double final_alpha = 0.0;
    double active_fraction = 0.0;   // text hinges, last epoch
    double mean_within_cosine = 0.0;
};

// Runs the M-step corpus epochs with per-worker negative streams and a
// learning rate that decays linearly over the whole run. Workers share
// the embedding rows without locks; threads = 1 is bit-reproducible.
class Trainer {
public:
    Trainer(ModelState& state, const std::vector<Document>& docs);

    void e_step(int t) { josh::e_step(state_, t); }
    void update_kappa() { josh::update_kappa(state_); }
    MStepStats m_step(int t);

private:
    struct Counters {
        long long text_total = 0;
        long long text_active = 0;
    };

    double alpha_at(long long done) const;
    void process_document(const Document& doc, NegativeSampler& sampler,
                          double alpha, Counters& counters);
    void run_epoch(Counters& counters);

    ModelState& state_;
    const std::vector<Document>& docs_;
    std::vector<NegativeSampler> samplers_;
    std::vector<LocalTree> trees_;
    std::vector<std::vector<int>> token_cats_;
    long long total_positions_ = 0;
    long long run_total_ = 0;
    std::atomic<long long> done_{0};
    int log_level_ = 1;
};

// Algorithm: initialize on the sphere with category centers at their
// name embeddings, then iterate t = 2..K+1 of E-step, kappa update,
// M-step; final topics exclude the category names.
ModelState run(const TrainConfig& config, const std::string& corpus_path,
               const std::string& taxonomy_path,
               std::vector<TopicResult>* topics_out = nullptr);

}  // namespace josh
