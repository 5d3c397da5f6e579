#include "josh/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <stdexcept>
#include <string>
#include <thread>

#include "josh/geometry.hpp"

namespace josh {

namespace {

inline double dot_raw(const double* a, const double* b, size_t p) {
    double s = 0.0;
    for (size_t i = 0; i < p; ++i) s += a[i] * b[i];
    return s;
}

// Tangent-project g at theta, move by step, renormalize. The step never
// degenerates: a tangent move from a unit vector has norm >= 1.
inline void riemannian_step(double* theta, const double* g, double step,
                            size_t p) {
    const double radial = dot_raw(theta, g, p);
    double nrm2 = 0.0;
    for (size_t i = 0; i < p; ++i) {
        theta[i] += step * (g[i] - radial * theta[i]);
        nrm2 += theta[i] * theta[i];
    }
    const double inv = 1.0 / std::sqrt(nrm2);
    for (size_t i = 0; i < p; ++i) theta[i] *= inv;
}

int log_level_from_env() {
    const char* env = std::getenv("JOSH_LOG");
    if (!env) return 1;
    if (std::strcmp(env, "quiet") == 0 || std::strcmp(env, "0") == 0) return 0;
    if (std::strcmp(env, "debug") == 0) return 2;
    return 1;
}

std::string format_margins(const LevelMargins& margins) {
    std::string out;
    char buf[48];
    for (size_t level = 0; level < margins.margin.size(); ++level) {
        std::snprintf(buf, sizeof(buf), "%s%zu:%.4f", level ? "," : "", level,
                      margins.margin[level]);
        out += buf;
    }
    return out.empty() ? "-" : out;
}

double mean_within_cosine(const ModelState& state) {
    double sum = 0.0;
    int cats = 0;
    for (const auto& node : state.taxonomy.nodes) {
        if (node.node_id == Taxonomy::kRoot || node.rep_terms.empty()) continue;
        double s = 0.0;
        for (int w : node.rep_terms)
            s += dot_raw(state.u.row(static_cast<size_t>(w)),
                         node.center.data(), state.u.dim);
        sum += s / static_cast<double>(node.rep_terms.size());
        ++cats;
    }
    return cats ? sum / cats : 0.0;
}

}  // namespace

void TrainConfig::validate() const {
    if (dim < 2) throw std::invalid_argument("config: dim must be >= 2");
    if (window < 1) throw std::invalid_argument("config: window must be >= 1");
    if (top_k < 1) throw std::invalid_argument("config: k must be >= 1");
    if (!(alpha0 > 0.0)) throw std::invalid_argument("config: alpha must be > 0");
    if (!(margin > 0.0 && margin < 2.0))
        throw std::invalid_argument("config: margin must be in (0, 2)");
    if (!(margin_intra > 0.0 && margin_intra < 1.0))
        throw std::invalid_argument("config: margin-intra must be in (0, 1)");
    if (min_count < 1)
        throw std::invalid_argument("config: min-count must be >= 1");
    if (epochs_per_mstep < 1)
        throw std::invalid_argument("config: epochs-per-step must be >= 1");
    if (tree_passes_per_mstep < 0)
        throw std::invalid_argument("config: tree-passes must be >= 0");
    if (threads < 1) throw std::invalid_argument("config: threads must be >= 1");
    if (subsample && !(subsample_t > 0.0))
        throw std::invalid_argument("config: subsample threshold must be > 0");
}

void e_step(ModelState& state, int t) {
    if (t < 2) throw std::invalid_argument("e_step: t must be >= 2");
    const size_t vocab_size = state.vocab.size();
    const size_t keep = std::min<size_t>(static_cast<size_t>(t), vocab_size);
    const size_t p = state.u.dim;
    std::vector<std::pair<double, int>> scored(vocab_size);
    for (auto& node : state.taxonomy.nodes) {
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
        node.rep_terms.clear();
        for (size_t i = 0; i < keep; ++i)
            node.rep_terms.push_back(scored[i].second);
    }
}

void update_kappa(ModelState& state) {
    const double p = static_cast<double>(state.config.dim);
    for (auto& node : state.taxonomy.nodes) {
        if (node.node_id == Taxonomy::kRoot || node.rep_terms.empty()) continue;
        double rbar = 0.0;
        for (int w : node.rep_terms)
            rbar += dot_raw(state.u.row(static_cast<size_t>(w)),
                            node.center.data(), state.u.dim);
        rbar /= static_cast<double>(node.rep_terms.size());
        rbar = std::clamp(rbar, 1e-4, 1.0 - 1e-4);
        const double kappa = rbar * (p - rbar * rbar) / (1.0 - rbar * rbar);
        node.kappa = std::clamp(kappa, 1.0, 1e5);
    }
}

bool text_step(ModelState& state, int center, int context, int doc_id,
               int negative, double alpha) {
    if (center == negative) return false;  // identical rows cancel exactly
    const size_t p = state.u.dim;
    double* u_c = state.u.row(static_cast<size_t>(center));
    double* u_n = state.u.row(static_cast<size_t>(negative));
    double* v_x = state.v.row(static_cast<size_t>(context));
    double* d_i = state.d.row(static_cast<size_t>(doc_id));

    const double pos = dot_raw(v_x, u_c, p) + dot_raw(u_c, d_i, p);
    const double neg = dot_raw(v_x, u_n, p) + dot_raw(u_n, d_i, p);
    if (pos - neg >= state.config.margin) return false;

    thread_local std::vector<double> g_shared, g_diff;
    g_shared.resize(p);
    g_diff.resize(p);
    for (size_t i = 0; i < p; ++i) {
        g_shared[i] = v_x[i] + d_i[i];  // d/du_c; negated for u_n
        g_diff[i] = u_c[i] - u_n[i];    // d/dv_x and d/dd_i
    }
    riemannian_step(u_c, g_shared.data(), alpha, p);
    riemannian_step(u_n, g_shared.data(), -alpha, p);
    riemannian_step(v_x, g_diff.data(), alpha, p);
    riemannian_step(d_i, g_diff.data(), alpha, p);
    return true;
}

bool category_step(ModelState& state, int node_id, int token_id, double alpha) {
    auto& node = state.taxonomy.node(node_id);
    const size_t p = state.u.dim;
    double* u_w = state.u.row(static_cast<size_t>(token_id));
    double* c = node.center.data();
    if (dot_raw(u_w, c, p) >= state.config.margin_intra) return false;

    // kappa-normalized ascent on kappa u'c: step directions c and u
    thread_local std::vector<double> u_old;
    u_old.assign(u_w, u_w + p);
    riemannian_step(u_w, c, alpha, p);
    riemannian_step(c, u_old.data(), alpha, p);
    return true;
}

bool tree_step(ModelState& state, int root_id, int child_i, int child_j,
               double margin, double alpha) {
    if (child_i == child_j)
        throw std::invalid_argument("tree_step: sibling pair must be distinct");
    const size_t p = state.u.dim;
    double* c_r = state.taxonomy.node(root_id).center.data();
    double* c_i = state.taxonomy.node(child_i).center.data();
    double* c_j = state.taxonomy.node(child_j).center.data();

    if (dot_raw(c_i, c_r, p) - dot_raw(c_i, c_j, p) >= margin) return false;

    thread_local std::vector<double> g_i, c_i_old;
    g_i.resize(p);
    c_i_old.assign(c_i, c_i + p);
    for (size_t k = 0; k < p; ++k) g_i[k] = c_r[k] - c_j[k];
    riemannian_step(c_i, g_i.data(), alpha, p);
    riemannian_step(c_r, c_i_old.data(), alpha, p);
    riemannian_step(c_j, c_i_old.data(), -alpha, p);
    return true;
}

TextGradients text_hinge_gradients(const ModelState& state, int center,
                                   int context, int doc_id, int negative) {
    const size_t p = state.u.dim;
    auto u_c = state.u.row_span(static_cast<size_t>(center));
    auto u_n = state.u.row_span(static_cast<size_t>(negative));
    auto v_x = state.v.row_span(static_cast<size_t>(context));
    auto d_i = state.d.row_span(static_cast<size_t>(doc_id));
    std::vector<double> shared(p), neg_shared(p), diff(p);
    for (size_t i = 0; i < p; ++i) {
        shared[i] = v_x[i] + d_i[i];
        neg_shared[i] = -shared[i];
        diff[i] = u_c[i] - u_n[i];
    }
    TextGradients g;
    g.u_center = project_to_tangent(u_c, shared);
    g.u_negative = project_to_tangent(u_n, neg_shared);
    g.v_context = project_to_tangent(v_x, diff);
    g.d_doc = project_to_tangent(d_i, diff);
    return g;
}

std::vector<double> category_term_gradient_u(const ModelState& state,
                                             int node_id, int token_id) {
    const auto& node = state.taxonomy.node(node_id);
    std::vector<double> g(node.center);
    for (double& x : g) x *= node.kappa;
    return project_to_tangent(state.u.row_span(static_cast<size_t>(token_id)),
                              g);
}

std::vector<double> category_term_gradient_c(const ModelState& state,
                                             int node_id, int token_id) {
    const auto& node = state.taxonomy.node(node_id);
    auto u_w = state.u.row_span(static_cast<size_t>(token_id));
    std::vector<double> g(u_w.begin(), u_w.end());
    for (double& x : g) x *= node.kappa;
    return project_to_tangent(std::span<const double>(node.center), g);
}

TreeGradients tree_hinge_gradients(const ModelState& state, int root_id,
                                   int child_i, int child_j) {
    const size_t p = state.u.dim;
    std::span<const double> c_r(state.taxonomy.node(root_id).center);
    std::span<const double> c_i(state.taxonomy.node(child_i).center);
    std::span<const double> c_j(state.taxonomy.node(child_j).center);
    std::vector<double> g_i(p), g_j(p);
    for (size_t k = 0; k < p; ++k) {
        g_i[k] = c_r[k] - c_j[k];
        g_j[k] = -c_i[k];
    }
    TreeGradients g;
    g.child_i = project_to_tangent(c_i, g_i);
    g.root = project_to_tangent(c_r, c_i);
    g.child_j = project_to_tangent(c_j, g_j);
    return g;
}

TreePassStats run_tree_passes(ModelState& state,
                              const std::vector<LocalTree>& trees,
                              const LevelMargins& margins, double alpha,
                              int passes) {
    TreePassStats stats;
    for (int pass = 0; pass < passes; ++pass) {
        for (const auto& tree : trees) {
            const double margin =
                margins.at(state.taxonomy.node(tree.root).level);
            for (int i : tree.children) {
                for (int j : tree.children) {
                    if (i == j) continue;
                    ++stats.total;
                    if (tree_step(state, tree.root, i, j, margin, alpha))
                        ++stats.active;
                }
            }
        }
    }
    return stats;
}

ObjectiveBreakdown hinge_objective(const ModelState& state,
                                   const std::vector<Document>& docs,
                                   const LevelMargins& margins) {
    ObjectiveBreakdown obj;
    const auto& cfg = state.config;
    const size_t p = state.u.dim;

    const int workers = cfg.threads;
    const size_t n_docs = docs.size();
    for (int w = 0; w < workers; ++w) {
        NegativeSampler sampler(state.vocab, cfg.seed + static_cast<std::uint64_t>(w));
        const size_t begin = n_docs * w / workers;
        const size_t end = n_docs * (w + 1) / workers;
        for (size_t di = begin; di < end; ++di) {
            const auto& doc = docs[di];
            const double* d_i = state.d.row(static_cast<size_t>(doc.doc_id));
            for_each_context_pair(doc, cfg.window, [&](int center, int context,
                                                       int doc_id) {
                (void)doc_id;
                const int negative = sampler.sample(center);
                const double* u_c = state.u.row(static_cast<size_t>(center));
                const double* u_n = state.u.row(static_cast<size_t>(negative));
                const double* v_x = state.v.row(static_cast<size_t>(context));
                const double pos = dot_raw(v_x, u_c, p) + dot_raw(u_c, d_i, p);
                const double neg = dot_raw(v_x, u_n, p) + dot_raw(u_n, d_i, p);
                obj.text += std::min(0.0, pos - neg - cfg.margin);
            });
        }
    }

    for (const auto& node : state.taxonomy.nodes) {
        if (node.node_id == Taxonomy::kRoot) continue;
        for (int w : node.rep_terms)
            obj.category += std::min(
                0.0, dot_raw(state.u.row(static_cast<size_t>(w)),
                             node.center.data(), p) -
                         cfg.margin_intra);
    }

    for (const auto& tree : local_trees(state.taxonomy)) {
        const double margin = margins.at(state.taxonomy.node(tree.root).level);
        const double* c_r = state.taxonomy.node(tree.root).center.data();
        for (int i : tree.children) {
            const double* c_i = state.taxonomy.node(i).center.data();
            for (int j : tree.children) {
                if (i == j) continue;
                obj.tree += std::min(0.0, dot_raw(c_i, c_r, p) -
                                              dot_raw(c_i,
                                                      state.taxonomy.node(j)
                                                          .center.data(),
                                                      p) -
                                              margin);
            }
        }
    }
    return obj;
}

Trainer::Trainer(ModelState& state, const std::vector<Document>& docs)
    : state_(state), docs_(docs), log_level_(log_level_from_env()) {
    state_.config.validate();
    const auto& cfg = state_.config;
    samplers_.reserve(cfg.threads);
    for (int w = 0; w < cfg.threads; ++w)
        samplers_.emplace_back(state_.vocab,
                               cfg.seed + static_cast<std::uint64_t>(w));
    trees_ = local_trees(state_.taxonomy);
    for (const auto& doc : docs_)
        total_positions_ += static_cast<long long>(doc.token_ids.size());
    // one name-only M-step at t = 1 plus one per EM iteration t = 2..K+1
    run_total_ = static_cast<long long>(cfg.top_k + 1) * cfg.epochs_per_mstep *
                 total_positions_;
    if (log_level_ >= 1)
        std::fprintf(stderr, "iter\tepoch\tlr\tactive_frac\twithin_cos\tm_inter\n");
}

double Trainer::alpha_at(long long done) const {
    const double progress =
        run_total_ > 0 ? static_cast<double>(done) / run_total_ : 1.0;
    return state_.config.alpha0 * std::max(1e-4, 1.0 - progress);
}

void Trainer::process_document(const Document& doc, NegativeSampler& sampler,
                               double alpha, Counters& counters) {
    const auto& cfg = state_.config;
    thread_local std::vector<int> kept;
    const std::vector<int>* seq = &doc.token_ids;
    if (cfg.subsample) {
        kept.clear();
        for (int id : doc.token_ids) {
            const double freq =
                static_cast<double>(state_.vocab.counts[id]) /
                static_cast<double>(state_.vocab.total_tokens);
            const double keep =
                (std::sqrt(freq / cfg.subsample_t) + 1.0) * cfg.subsample_t / freq;
            if (keep >= 1.0 || sampler.rng().uniform01() < keep)
                kept.push_back(id);
        }
        seq = &kept;
    }

    const int n = static_cast<int>(seq->size());
    for (int j = 0; j < n; ++j) {
        const int center = (*seq)[j];
        const int lo = std::max(0, j - cfg.window);
        const int hi = std::min(n - 1, j + cfg.window);
        for (int k = lo; k <= hi; ++k) {
            if (k == j) continue;
            const int negative = sampler.sample(center);
            ++counters.text_total;
            if (text_step(state_, center, (*seq)[k], doc.doc_id, negative,
                          alpha))
                ++counters.text_active;
        }
        for (int cat : token_cats_[static_cast<size_t>(center)])
            category_step(state_, cat, center, alpha);
    }
}

void Trainer::run_epoch(Counters& counters) {
    const auto& cfg = state_.config;
    const size_t n_docs = docs_.size();
    if (cfg.threads == 1) {
        for (const auto& doc : docs_) {
            const double alpha = alpha_at(done_.load(std::memory_order_relaxed));
            process_document(doc, samplers_[0], alpha, counters);
            done_.fetch_add(static_cast<long long>(doc.token_ids.size()),
                            std::memory_order_relaxed);
        }
        return;
    }
    std::vector<Counters> worker_counters(cfg.threads);
    std::vector<std::thread> pool;
    pool.reserve(cfg.threads);
    for (int w = 0; w < cfg.threads; ++w) {
        pool.emplace_back([this, w, n_docs, &worker_counters] {
            const int workers = state_.config.threads;
            const size_t begin = n_docs * w / workers;
            const size_t end = n_docs * (w + 1) / workers;
            for (size_t i = begin; i < end; ++i) {
                const double alpha =
                    alpha_at(done_.load(std::memory_order_relaxed));
                process_document(docs_[i], samplers_[w], alpha,
                                 worker_counters[w]);
                done_.fetch_add(
                    static_cast<long long>(docs_[i].token_ids.size()),
                    std::memory_order_relaxed);
            }
        });
    }
    for (auto& th : pool) th.join();
    for (const auto& wc : worker_counters) {
        counters.text_total += wc.text_total;
        counters.text_active += wc.text_active;
    }
}

MStepStats Trainer::m_step(int t) {
    const auto& cfg = state_.config;
    MStepStats stats;
    stats.margins = compute_level_margins(state_.taxonomy);

    token_cats_.assign(state_.vocab.size(), {});
    for (const auto& node : state_.taxonomy.nodes) {
        if (node.node_id == Taxonomy::kRoot) continue;
        for (int w : node.rep_terms)
            token_cats_[static_cast<size_t>(w)].push_back(node.node_id);
    }

    for (int epoch = 0; epoch < cfg.epochs_per_mstep; ++epoch) {
        if (cfg.reseed_epoch_negatives) {
            samplers_.clear();
            for (int w = 0; w < cfg.threads; ++w)
                samplers_.emplace_back(state_.vocab,
                                       cfg.seed + static_cast<std::uint64_t>(w));
        }
        Counters counters;
        run_epoch(counters);
        const double alpha = alpha_at(done_.load(std::memory_order_relaxed));

        // explicit sweep so rare representative terms still get pulled in
        for (const auto& node : state_.taxonomy.nodes) {
            if (node.node_id == Taxonomy::kRoot) continue;
            for (int w : node.rep_terms)
                category_step(state_, node.node_id, w, alpha);
        }
        const TreePassStats tree_stats = run_tree_passes(
            state_, trees_, stats.margins, alpha, cfg.tree_passes_per_mstep);

        stats.final_alpha = alpha;
        stats.active_fraction =
            counters.text_total
                ? static_cast<double>(counters.text_active) / counters.text_total
                : 0.0;
        stats.mean_within_cosine = mean_within_cosine(state_);
        if (log_level_ >= 1)
            std::fprintf(stderr, "%d\t%d\t%.6g\t%.4f\t%.4f\t%s\n", t, epoch,
                         alpha, stats.active_fraction, stats.mean_within_cosine,
                         format_margins(stats.margins).c_str());
        if (log_level_ >= 2)
            std::fprintf(stderr,
                         "# tree pass: %lld/%lld active\tdone=%lld/%lld\n",
                         tree_stats.active, tree_stats.total,
                         done_.load(std::memory_order_relaxed), run_total_);
    }
    return stats;
}

ModelState run(const TrainConfig& config, const std::string& corpus_path,
               const std::string& taxonomy_path,
               std::vector<TopicResult>* topics_out) {
    config.validate();
    Vocabulary vocab = build_vocabulary(corpus_path, config.min_count);
    const auto docs = load_documents(corpus_path, vocab);
    if (docs.empty())
        throw std::runtime_error("train: corpus has no non-empty documents");
    Taxonomy taxonomy = parse_taxonomy(taxonomy_path, vocab);

    ModelState state = init_model(vocab, docs, taxonomy, config);
    Trainer trainer(state, docs);
    // iteration 1 trains on the name-only assignment, so the first
    // re-ranking at t = 2 sees organized embeddings instead of noise
    trainer.m_step(1);
    for (int t = 2; t <= config.top_k + 1; ++t) {
        state.iteration = t;
        trainer.e_step(t);
        trainer.update_kappa();
        trainer.m_step(t);
    }
    if (topics_out) *topics_out = mine_topics(state);
    return state;
}

}  // namespace josh
