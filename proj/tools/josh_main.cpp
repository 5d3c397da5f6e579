// josh: taxonomy-guided topic mining over spherical text embeddings.
// Subcommands cover the full pipeline: synthetic benchmark generation,
// training, topic mining, generative classification, and evaluation.

#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "josh/eval.hpp"
#include "josh/miner.hpp"
#include "josh/model.hpp"
#include "josh/synth.hpp"
#include "josh/trainer.hpp"

namespace {

josh::ClassifyScope parse_scope(const std::string& level, int& level_index) {
    if (level == "all") return josh::ClassifyScope::AllNodes;
    if (level == "leaf") return josh::ClassifyScope::LeavesOnly;
    level_index = std::stoi(level);
    return josh::ClassifyScope::SingleLevel;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hierarchical topic mining over joint spherical embeddings"};
    app.require_subcommand(1);

    // train
    josh::TrainConfig config;
    std::string corpus_path, taxonomy_path, out_dir;
    bool scored_topics = false;
    auto* train = app.add_subcommand("train", "train embeddings and mine topics");
    train->add_option("--corpus", corpus_path, "corpus file, one document per line")
        ->required();
    train->add_option("--taxonomy", taxonomy_path, "category tree edge list")
        ->required();
    train->add_option("--out", out_dir, "output model directory")->required();
    train->add_option("--dim", config.dim, "embedding dimension");
    train->add_option("--window", config.window, "context window size");
    train->add_option("--k", config.top_k, "terms to retrieve per category");
    train->add_option("--alpha", config.alpha0, "initial learning rate");
    train->add_option("--margin", config.margin, "text hinge margin");
    train->add_option("--margin-intra", config.margin_intra,
                      "intra-category cosine margin");
    train->add_option("--min-count", config.min_count, "vocabulary threshold");
    train->add_option("--epochs-per-step", config.epochs_per_mstep,
                      "corpus epochs per M-step");
    train->add_option("--tree-passes", config.tree_passes_per_mstep,
                      "tree objective passes per epoch");
    train->add_option("--threads", config.threads, "worker threads");
    train->add_option("--seed", config.seed, "random seed");
    train->add_flag("--subsample", config.subsample,
                    "subsample frequent words");
    train->add_flag("--scores", scored_topics, "append :score to topic terms");

    // synth
    josh::SynthConfig synth_config;
    std::string synth_out;
    auto* synth = app.add_subcommand("synth", "generate a planted-topic benchmark");
    synth->add_option("--super", synth_config.supers, "super-categories");
    synth->add_option("--sub", synth_config.subs, "sub-categories per super");
    synth->add_option("--vocab-per-topic", synth_config.vocab_per_topic,
                      "planted vocabulary per leaf");
    synth->add_option("--docs", synth_config.docs, "documents to generate");
    synth->add_option("--doc-len", synth_config.doc_len, "tokens per document");
    synth->add_option("--noise", synth_config.noise, "noise token fraction");
    synth->add_option("--seed", synth_config.seed, "random seed");
    synth->add_option("--out", synth_out, "output directory")->required();

    // mine
    std::string model_dir, topics_out;
    auto* mine = app.add_subcommand("mine", "re-mine topics from a saved model");
    mine->add_option("--model", model_dir, "model directory")->required();
    mine->add_option("--out", topics_out, "topics TSV path")->required();
    mine->add_flag("--scores", scored_topics, "append :score to topic terms");

    // classify
    std::string classify_model, labels_out, level = "all";
    auto* classify =
        app.add_subcommand("classify", "label documents with the vMF classifier");
    classify->add_option("--model", classify_model, "model directory")->required();
    classify->add_option("--out", labels_out, "labels TSV path")->required();
    classify->add_option("--level", level,
                         "candidate set: all, leaf, or a level number");

    // export-embeddings
    std::string export_model, export_out;
    auto* exporter =
        app.add_subcommand("export-embeddings", "rewrite all export files");
    exporter->add_option("--model", export_model, "model directory")->required();
    exporter->add_option("--out", export_out, "destination directory")->required();

    // eval-coherence
    std::string topics_path, ref_corpus;
    int window = 10;
    bool as_json = false;
    auto* coherence =
        app.add_subcommand("eval-coherence", "NPMI topic coherence report");
    coherence->add_option("--topics", topics_path, "topics TSV")->required();
    coherence->add_option("--corpus", ref_corpus, "reference corpus")->required();
    coherence->add_option("--window", window, "sliding window size");
    coherence->add_flag("--json", as_json, "machine-readable output");

    // eval-f1
    std::string pred_path, gold_path;
    auto* f1 = app.add_subcommand("eval-f1", "Macro/Micro F1 of predicted labels");
    f1->add_option("--pred", pred_path, "predicted labels TSV")->required();
    f1->add_option("--gold", gold_path, "gold labels TSV")->required();
    f1->add_flag("--json", as_json, "machine-readable output");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*train) {
            std::vector<josh::TopicResult> topics;
            const auto state = josh::run(config, corpus_path, taxonomy_path, &topics);
            josh::save_model(state, out_dir);
            josh::write_topics_tsv(topics, out_dir + "/topics.tsv", scored_topics);
            std::printf("model written to %s (%zu topics)\n", out_dir.c_str(),
                        topics.size());
        } else if (*synth) {
            const auto paths = josh::generate_synth(synth_config, synth_out);
            std::printf("%s\n%s\n%s\n", paths.corpus.c_str(),
                        paths.taxonomy.c_str(), paths.gold.c_str());
        } else if (*mine) {
            const auto state = josh::load_model(model_dir);
            josh::write_topics_tsv(josh::mine_topics(state), topics_out,
                                   scored_topics);
            std::printf("topics written to %s\n", topics_out.c_str());
        } else if (*classify) {
            const auto state = josh::load_model(classify_model);
            int level_index = -1;
            const auto scope = parse_scope(level, level_index);
            const auto [labels, summary] =
                josh::classify_corpus(state, scope, level_index);
            josh::write_labels_tsv(state, labels, labels_out);
            std::printf("labeled %lld documents\n", summary.total);
        } else if (*exporter) {
            const auto state = josh::load_model(export_model);
            josh::save_model(state, export_out);
            std::printf("exports written to %s\n", export_out.c_str());
        } else if (*coherence) {
            const auto topics = josh::read_topics_tsv(topics_path);
            const auto report = josh::topic_coherence(topics, ref_corpus, window);
            if (as_json) {
                nlohmann::json j;
                j["macro_tc"] = report.macro_tc;
                j["pairs_used"] = report.pairs_used;
                j["pairs_skipped"] = report.pairs_skipped;
                j["categories"] = nlohmann::json::array();
                for (const auto& cat : report.per_category)
                    j["categories"].push_back({{"name", cat.name},
                                               {"tc", cat.tc},
                                               {"pairs_used", cat.pairs_used},
                                               {"pairs_skipped", cat.pairs_skipped}});
                std::printf("%s\n", j.dump(2).c_str());
            } else {
                std::printf("category\ttc\tpairs_used\tpairs_skipped\n");
                for (const auto& cat : report.per_category)
                    std::printf("%s\t%.6f\t%lld\t%lld\n", cat.name.c_str(), cat.tc,
                                cat.pairs_used, cat.pairs_skipped);
                std::printf("macro\t%.6f\t%lld\t%lld\n", report.macro_tc,
                            report.pairs_used, report.pairs_skipped);
            }
        } else if (*f1) {
            const auto result = josh::classification_f1(
                josh::read_labels_tsv(pred_path), josh::read_labels_tsv(gold_path));
            if (as_json) {
                nlohmann::json j{{"macro_f1", result.macro_f1},
                                 {"micro_f1", result.micro_f1}};
                std::printf("%s\n", j.dump(2).c_str());
            } else {
                std::printf("macro_f1\t%.6f\nmicro_f1\t%.6f\n", result.macro_f1,
                            result.micro_f1);
            }
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
