#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "josh/eval.hpp"
#include "josh/geometry.hpp"
#include "josh/miner.hpp"
#include "josh/model.hpp"
#include "josh/synth.hpp"
#include "josh/trainer.hpp"

namespace py = pybind11;

namespace {

josh::ClassifyScope scope_from(const std::string& level, int& level_index) {
    if (level == "all") return josh::ClassifyScope::AllNodes;
    if (level == "leaf") return josh::ClassifyScope::LeavesOnly;
    level_index = std::stoi(level);
    return josh::ClassifyScope::SingleLevel;
}

py::array_t<double> matrix_to_numpy(const josh::EmbeddingMatrix& m) {
    py::array_t<double> out({m.rows, m.dim});
    std::copy(m.data.begin(), m.data.end(), out.mutable_data());
    return out;
}

}  // namespace

PYBIND11_MODULE(_josh, m) {
    m.doc() = "taxonomy-guided topic mining over joint spherical embeddings";

    m.def("log_bessel_i", &josh::log_bessel_i, py::arg("order"),
          py::arg("kappa"),
          "log of the modified Bessel function of the first kind");
    m.def("log_vmf_normalizer", &josh::log_vmf_normalizer, py::arg("dim"),
          py::arg("kappa"), "log normalization constant of the vMF density");
    m.def(
        "log_vmf_density",
        [](const std::vector<double>& x, const std::vector<double>& mean,
           double kappa) {
            return josh::log_vmf_density(x, mean, kappa);
        },
        py::arg("x"), py::arg("mean"), py::arg("kappa"));

    m.def(
        "synth",
        [](const std::string& out_dir, int supers, int subs,
           int vocab_per_topic, int docs, int doc_len, double noise,
           std::uint64_t seed) {
            josh::SynthConfig config;
            config.supers = supers;
            config.subs = subs;
            config.vocab_per_topic = vocab_per_topic;
            config.docs = docs;
            config.doc_len = doc_len;
            config.noise = noise;
            config.seed = seed;
            const auto paths = josh::generate_synth(config, out_dir);
            py::dict out;
            out["corpus"] = paths.corpus;
            out["taxonomy"] = paths.taxonomy;
            out["gold"] = paths.gold;
            return out;
        },
        py::arg("out_dir"), py::arg("supers") = 3, py::arg("subs") = 3,
        py::arg("vocab_per_topic") = 50, py::arg("docs") = 3000,
        py::arg("doc_len") = 60, py::arg("noise") = 0.2, py::arg("seed") = 42,
        "generate a planted-topic benchmark (corpus, taxonomy, gold labels)");

    m.def(
        "train",
        [](const std::string& corpus, const std::string& taxonomy,
           const std::string& out_dir, int dim, int window, int k,
           double alpha, double margin, double margin_intra,
           long long min_count, int epochs_per_step, int tree_passes,
           int threads, std::uint64_t seed) {
            josh::TrainConfig config;
            config.dim = dim;
            config.window = window;
            config.top_k = k;
            config.alpha0 = alpha;
            config.margin = margin;
            config.margin_intra = margin_intra;
            config.min_count = min_count;
            config.epochs_per_mstep = epochs_per_step;
            config.tree_passes_per_mstep = tree_passes;
            config.threads = threads;
            config.seed = seed;
            std::vector<josh::TopicResult> topics;
            {
                py::gil_scoped_release release;
                const auto state = josh::run(config, corpus, taxonomy, &topics);
                josh::save_model(state, out_dir);
                josh::write_topics_tsv(topics, out_dir + "/topics.tsv");
            }
            std::vector<std::pair<std::string, std::vector<std::string>>> out;
            for (const auto& topic : topics)
                out.emplace_back(topic.category, topic.terms);
            return out;
        },
        py::arg("corpus"), py::arg("taxonomy"), py::arg("out_dir"),
        py::arg("dim") = 100, py::arg("window") = 5, py::arg("k") = 5,
        py::arg("alpha") = 0.025, py::arg("margin") = 0.25,
        py::arg("margin_intra") = 0.9, py::arg("min_count") = 5,
        py::arg("epochs_per_step") = 2, py::arg("tree_passes") = 50,
        py::arg("threads") = 1, py::arg("seed") = 42,
        "train the joint embedding and mine one topic per category");

    m.def(
        "mine",
        [](const std::string& model_dir) {
            const auto state = josh::load_model(model_dir);
            std::vector<std::pair<std::string,
                                  std::vector<std::pair<std::string, double>>>>
                out;
            for (const auto& topic : josh::mine_topics(state)) {
                std::vector<std::pair<std::string, double>> terms;
                for (size_t i = 0; i < topic.terms.size(); ++i)
                    terms.emplace_back(topic.terms[i], topic.scores[i]);
                out.emplace_back(topic.category, std::move(terms));
            }
            return out;
        },
        py::arg("model_dir"),
        "re-mine scored topics from a saved model directory");

    m.def(
        "classify_corpus",
        [](const std::string& model_dir, const std::string& level) {
            const auto state = josh::load_model(model_dir);
            int level_index = -1;
            const auto scope = scope_from(level, level_index);
            const auto [labels, summary] =
                josh::classify_corpus(state, scope, level_index);
            std::vector<std::tuple<int, std::string, double>> out;
            for (const auto& label : labels)
                out.emplace_back(label.doc_id,
                                 state.taxonomy.node(label.node_id).name,
                                 label.log_density);
            return out;
        },
        py::arg("model_dir"), py::arg("level") = "all",
        "vMF generative labels for every stored document");

    m.def(
        "topic_coherence",
        [](const std::string& topics_path, const std::string& corpus_path,
           int window) {
            const auto report = josh::topic_coherence(
                josh::read_topics_tsv(topics_path), corpus_path, window);
            py::dict out;
            out["macro_tc"] = report.macro_tc;
            out["pairs_used"] = report.pairs_used;
            out["pairs_skipped"] = report.pairs_skipped;
            py::dict per_category;
            for (const auto& cat : report.per_category)
                per_category[py::str(cat.name)] = cat.tc;
            out["categories"] = per_category;
            return out;
        },
        py::arg("topics_path"), py::arg("corpus_path"), py::arg("window") = 10,
        "sliding-window NPMI coherence of a topics file");

    m.def(
        "classification_f1",
        [](const std::string& pred_path, const std::string& gold_path) {
            const auto result = josh::classification_f1(
                josh::read_labels_tsv(pred_path),
                josh::read_labels_tsv(gold_path));
            return std::make_pair(result.macro_f1, result.micro_f1);
        },
        py::arg("pred_path"), py::arg("gold_path"),
        "(macro_f1, micro_f1) of predicted vs gold label files");

    m.def(
        "embeddings",
        [](const std::string& model_dir, const std::string& which) {
            const auto state = josh::load_model(model_dir);
            std::vector<std::string> labels;
            if (which == "u" || which == "v") {
                labels = state.vocab.tokens;
                return py::make_tuple(labels, matrix_to_numpy(
                                                  which == "u" ? state.u
                                                               : state.v));
            }
            if (which == "doc") {
                for (size_t i = 0; i < state.d.rows; ++i)
                    labels.push_back(std::to_string(i));
                return py::make_tuple(labels, matrix_to_numpy(state.d));
            }
            if (which == "cat") {
                josh::EmbeddingMatrix cat;
                cat.resize(state.taxonomy.size(), state.u.dim,
                           josh::Role::Category);
                for (size_t i = 0; i < state.taxonomy.size(); ++i) {
                    labels.push_back(state.taxonomy.nodes[i].name);
                    std::copy(state.taxonomy.nodes[i].center.begin(),
                              state.taxonomy.nodes[i].center.end(),
                              cat.row(i));
                }
                return py::make_tuple(labels, matrix_to_numpy(cat));
            }
            throw std::invalid_argument(
                "embeddings: which must be u, v, doc, or cat");
        },
        py::arg("model_dir"), py::arg("which") = "u",
        "(labels, matrix) for one embedding table of a saved model");
}
