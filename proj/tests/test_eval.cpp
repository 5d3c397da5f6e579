#include "josh/eval.hpp"

#include <cmath>

#include "doctest.h"
#include "josh/rng.hpp"
#include "testutil.hpp"

using namespace josh;

TEST_CASE("NPMI: perfect association, independence, symmetry, bounds") {
    testutil::TempDir tmp("npmi");
    const auto corpus = tmp.file("ref.txt");

    SUBCASE("terms that always co-occur score 1") {
        // every window containing one contains the other
        testutil::write_file(corpus,
                             "alpha beta filler1 filler2\n"
                             "filler3 filler4 filler5 filler6\n"
                             "alpha beta filler7 filler8\n");
        const auto report =
            topic_coherence({{"c", {"alpha", "beta"}}}, corpus, 4);
        REQUIRE(report.per_category.size() == 1);
        CHECK(report.per_category[0].tc == doctest::Approx(1.0).epsilon(1e-6));
    }

    SUBCASE("independent tokens score near zero") {
        Rng rng(606);
        std::string text;
        for (int doc = 0; doc < 4000; ++doc) {
            for (int i = 0; i < 20; ++i) {
                text += "w" + std::to_string(rng.below(8));
                text += i + 1 < 20 ? ' ' : '\n';
            }
        }
        testutil::write_file(corpus, text);
        const auto report = topic_coherence({{"c", {"w0", "w1"}}}, corpus, 10);
        CHECK(std::abs(report.per_category[0].tc) < 0.05);
    }

    SUBCASE("hand-computed count table on a 5-document corpus") {
        // window 3 over short docs: each document is a single window
        testutil::write_file(corpus,
                             "a b\n"
                             "a b c\n"
                             "a c\n"
                             "c b\n"
                             "a a\n");
        // windows: {a,b}, {a,b,c}, {a,c}, {c,b}, {a}
        // N = 5, C(a) = 4, C(b) = 3, C(c) = 3
        // C(a,b) = 2, C(a,c) = 2, C(b,c) = 2
        const auto report =
            topic_coherence({{"c", {"a", "b", "c"}}}, corpus, 3);
        const double n = 5;
        auto npmi = [&](double cab, double ca, double cb) {
            const double pab = cab / n;
            return std::log(pab / ((ca / n) * (cb / n))) / -std::log(pab);
        };
        const double expected =
            (npmi(2, 4, 3) + npmi(2, 4, 3) + npmi(2, 3, 3)) / 3.0;
        CHECK(report.per_category[0].tc ==
              doctest::Approx(expected).epsilon(1e-9));
        CHECK(report.per_category[0].pairs_used == 3);
    }

    SUBCASE("symmetry and range") {
        Rng rng(607);
        std::string text;
        for (int doc = 0; doc < 500; ++doc) {
            for (int i = 0; i < 12; ++i) {
                text += "v" + std::to_string(rng.below(5));
                text += i + 1 < 12 ? ' ' : '\n';
            }
        }
        testutil::write_file(corpus, text);
        const auto ab = topic_coherence({{"c", {"v0", "v1"}}}, corpus, 6);
        const auto ba = topic_coherence({{"c", {"v1", "v0"}}}, corpus, 6);
        CHECK(ab.per_category[0].tc ==
              doctest::Approx(ba.per_category[0].tc).epsilon(1e-12));
        CHECK(ab.per_category[0].tc >= -1.0);
        CHECK(ab.per_category[0].tc <= 1.0);

        // a pair that never co-occurs lands near -1
        std::string disjoint;
        for (int i = 0; i < 200; ++i)
            disjoint += i % 2 ? "only_a x x x\n" : "only_b y y y\n";
        testutil::write_file(corpus, disjoint);
        const auto never =
            topic_coherence({{"c", {"only_a", "only_b"}}}, corpus, 4);
        CHECK(never.per_category[0].tc < -0.8);
        CHECK(never.per_category[0].tc >= -1.0);
    }

    SUBCASE("absent terms are skipped and counted") {
        testutil::write_file(corpus, "a b\na b\n");
        const auto report =
            topic_coherence({{"c", {"a", "b", "ghost"}}}, corpus, 2);
        CHECK(report.per_category[0].pairs_used == 1);
        CHECK(report.per_category[0].pairs_skipped == 2);
    }

    CHECK_THROWS_AS(topic_coherence({}, corpus, 5), std::invalid_argument);
}

TEST_CASE("classification F1: exact cases and independent scorer") {
    SUBCASE("perfect predictions") {
        std::vector<LabelRow> gold{{0, "a"}, {1, "b"}, {2, "a"}, {3, "c"}};
        const auto f1 = classification_f1(gold, gold);
        CHECK(f1.macro_f1 == doctest::Approx(1.0));
        CHECK(f1.micro_f1 == doctest::Approx(1.0));
    }

    SUBCASE("all-one-class predictions on a balanced 2-class set") {
        std::vector<LabelRow> gold, pred;
        for (int i = 0; i < 10; ++i) {
            gold.push_back({i, i < 5 ? "a" : "b"});
            pred.push_back({i, "a"});
        }
        const auto f1 = classification_f1(pred, gold);
        CHECK(f1.micro_f1 == doctest::Approx(0.5));
        CHECK(f1.macro_f1 == doctest::Approx(1.0 / 3.0));
    }

    SUBCASE("random 3-class case against a confusion-matrix recomputation") {
        Rng rng(808);
        const char* classes[3] = {"x", "y", "z"};
        std::vector<LabelRow> gold, pred;
        for (int i = 0; i < 500; ++i) {
            gold.push_back({i, classes[rng.below(3)]});
            pred.push_back({i, classes[rng.below(3)]});
        }
        const auto f1 = classification_f1(pred, gold);

        // independent scorer straight from the confusion matrix
        double macro = 0.0;
        long long correct = 0;
        for (const auto* cls : classes) {
            long long tp = 0, fp = 0, fn = 0;
            for (int i = 0; i < 500; ++i) {
                const bool in_gold = gold[i].label == cls;
                const bool in_pred = pred[i].label == cls;
                if (in_gold && in_pred) ++tp;
                if (!in_gold && in_pred) ++fp;
                if (in_gold && !in_pred) ++fn;
            }
            macro += tp + fp + fn ? 2.0 * tp / (2.0 * tp + fp + fn) : 0.0;
        }
        macro /= 3.0;
        for (int i = 0; i < 500; ++i)
            if (gold[i].label == pred[i].label) ++correct;

        CHECK(f1.macro_f1 == doctest::Approx(macro).epsilon(1e-12));
        CHECK(f1.micro_f1 ==
              doctest::Approx(correct / 500.0).epsilon(1e-12));
        // micro-F1 equals accuracy in the single-label setting
    }

    SUBCASE("missing doc_id raises") {
        std::vector<LabelRow> gold{{0, "a"}, {1, "b"}};
        std::vector<LabelRow> pred{{0, "a"}};
        CHECK_THROWS_AS(classification_f1(pred, gold), std::runtime_error);
    }
}

TEST_CASE("topics and labels files round-trip through the readers") {
    testutil::TempDir tmp("evalio");
    testutil::write_file(tmp.file("topics.tsv"),
                         "sports\tsoccer\tbaseball\narts\tmusic:1.25\n");
    const auto topics = read_topics_tsv(tmp.file("topics.tsv"));
    REQUIRE(topics.size() == 2);
    CHECK(topics[0].category == "sports");
    CHECK(topics[0].terms == std::vector<std::string>{"soccer", "baseball"});
    CHECK(topics[1].terms == std::vector<std::string>{"music"});  // score stripped

    testutil::write_file(tmp.file("labels.tsv"), "0\ta\t-3.5\n1\tb\t-2\n");
    const auto labels = read_labels_tsv(tmp.file("labels.tsv"));
    REQUIRE(labels.size() == 2);
    CHECK(labels[0].doc_id == 0);
    CHECK(labels[0].label == "a");
    CHECK(labels[1].label == "b");
}
