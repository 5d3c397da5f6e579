#include "josh/model.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include "doctest.h"
#include "josh/geometry.hpp"
#include "testutil.hpp"

using namespace josh;

namespace {

struct Fixture {
    Vocabulary vocab;
    std::vector<Document> docs;
    Taxonomy taxonomy;
    TrainConfig config;

    Fixture() {
        std::vector<std::pair<std::string, long long>> counts;
        for (int i = 0; i < 20; ++i)
            counts.emplace_back("w" + std::to_string(i), 100 - i);
        vocab = make_vocabulary(counts);
        for (int i = 0; i < 6; ++i) {
            Document d{i, {}};
            for (int j = 0; j < 8; ++j) d.token_ids.push_back((i + j) % 20);
            docs.push_back(std::move(d));
        }
        taxonomy = taxonomy_from_edges(
            {{"ROOT", "w0"}, {"ROOT", "w1"}, {"w0", "w2"}, {"w0", "w3"}},
            vocab);
        config.dim = 16;
        config.min_count = 1;
        config.seed = 99;
    }
};

bool states_equal(const ModelState& a, const ModelState& b) {
    if (a.u.data != b.u.data || a.v.data != b.v.data || a.d.data != b.d.data)
        return false;
    if (a.vocab.tokens != b.vocab.tokens || a.vocab.counts != b.vocab.counts)
        return false;
    if (a.taxonomy.size() != b.taxonomy.size()) return false;
    for (size_t i = 0; i < a.taxonomy.size(); ++i) {
        const auto& na = a.taxonomy.nodes[i];
        const auto& nb = b.taxonomy.nodes[i];
        if (na.name != nb.name || na.parent != nb.parent ||
            na.level != nb.level || na.children != nb.children ||
            na.kappa != nb.kappa || na.rep_terms != nb.rep_terms ||
            na.center != nb.center)
            return false;
    }
    return a.iteration == b.iteration;
}

}  // namespace

TEST_CASE("init_model: unit rows, name-anchored centers, determinism") {
    Fixture f;
    const auto state = init_model(f.vocab, f.docs, f.taxonomy, f.config);

    for (size_t i = 0; i < state.u.rows; ++i) {
        CHECK(std::abs(norm(state.u.row_span(i)) - 1.0) <= 1e-12);
        CHECK(std::abs(norm(state.v.row_span(i)) - 1.0) <= 1e-12);
    }
    for (size_t i = 0; i < state.d.rows; ++i)
        CHECK(std::abs(norm(state.d.row_span(i)) - 1.0) <= 1e-12);

    // category centers start exactly at their name embeddings
    for (const auto& node : state.taxonomy.nodes) {
        CHECK(std::abs(norm(std::span<const double>(node.center)) - 1.0) <=
              1e-12);
        CHECK(node.kappa == 10.0);
        if (node.node_id == Taxonomy::kRoot) {
            CHECK(node.rep_terms.empty());
            continue;
        }
        const double* u_name = state.u.row(static_cast<size_t>(node.name_token));
        for (size_t j = 0; j < state.u.dim; ++j)
            CHECK(node.center[j] == u_name[j]);
        CHECK(node.rep_terms == std::vector<int>{node.name_token});
    }
    CHECK(state.iteration == 1);

    const auto again = init_model(f.vocab, f.docs, f.taxonomy, f.config);
    CHECK(states_equal(state, again));

    auto other = f.config;
    other.seed = 100;
    const auto different = init_model(f.vocab, f.docs, f.taxonomy, other);
    CHECK_FALSE(states_equal(state, different));
}

TEST_CASE("init draws are uniform on the sphere (concentration check)") {
    // the mean of 1e5 initialized vectors concentrates near the origin
    const size_t p = 100;
    std::vector<std::pair<std::string, long long>> counts;
    for (int i = 0; i < 50000; ++i)
        counts.emplace_back("tok" + std::to_string(i), 10);
    const auto vocab = make_vocabulary(counts);
    const auto taxonomy = taxonomy_from_edges({{"ROOT", "tok0"}}, vocab);
    TrainConfig config;
    config.dim = static_cast<int>(p);
    config.min_count = 1;
    const auto state = init_model(vocab, {}, taxonomy, config);

    std::vector<double> mean(p, 0.0);
    for (size_t i = 0; i < state.u.rows; ++i)
        for (size_t j = 0; j < p; ++j) mean[j] += state.u.row(i)[j];
    for (size_t i = 0; i < state.v.rows; ++i)
        for (size_t j = 0; j < p; ++j) mean[j] += state.v.row(i)[j];
    const double n = static_cast<double>(state.u.rows + state.v.rows);
    for (auto& x : mean) x /= n;
    CHECK(n == 100000.0);
    CHECK(norm(mean) < 0.02);
}

TEST_CASE("save/load round-trip is exact") {
    Fixture f;
    auto state = init_model(f.vocab, f.docs, f.taxonomy, f.config);
    state.iteration = 3;
    state.taxonomy.node(1).kappa = 123.5;
    state.taxonomy.node(1).rep_terms = {0, 5, 7};

    testutil::TempDir tmp("model");
    save_model(state, tmp.path());

    const auto loaded = load_model(tmp.path());
    CHECK(loaded.iteration == 3);
    CHECK(loaded.config.dim == f.config.dim);
    CHECK(loaded.config.seed == f.config.seed);
    CHECK(loaded.vocab.tokens == state.vocab.tokens);
    CHECK(loaded.vocab.counts == state.vocab.counts);
    CHECK(loaded.taxonomy.node(1).kappa == 123.5);
    CHECK(loaded.taxonomy.node(1).rep_terms == std::vector<int>{0, 5, 7});
    for (size_t i = 0; i < loaded.taxonomy.size(); ++i) {
        CHECK(loaded.taxonomy.nodes[i].name == state.taxonomy.nodes[i].name);
        CHECK(loaded.taxonomy.nodes[i].children ==
              state.taxonomy.nodes[i].children);
        CHECK(loaded.taxonomy.nodes[i].level == state.taxonomy.nodes[i].level);
    }

    // bytes -> state -> bytes is the identity
    testutil::TempDir tmp2("model2");
    save_model(loaded, tmp2.path());
    CHECK(testutil::read_file(tmp.file("model.bin")) ==
          testutil::read_file(tmp2.file("model.bin")));
    const auto reloaded = load_model(tmp2.path());
    CHECK(states_equal(loaded, reloaded));
}

TEST_CASE("load_model rejects corrupted files") {
    Fixture f;
    const auto state = init_model(f.vocab, f.docs, f.taxonomy, f.config);
    testutil::TempDir tmp("modelbad");
    save_model(state, tmp.path());

    SUBCASE("truncated") {
        const auto bytes = testutil::read_file(tmp.file("model.bin"));
        std::ofstream out(tmp.file("model.bin"), std::ios::binary);
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size() / 2));
        out.close();
        CHECK_THROWS_AS(load_model(tmp.path()), std::runtime_error);
    }
    SUBCASE("bad magic") {
        auto bytes = testutil::read_file(tmp.file("model.bin"));
        bytes[0] = 'X';
        std::ofstream out(tmp.file("model.bin"), std::ios::binary);
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        out.close();
        CHECK_THROWS_AS(load_model(tmp.path()), std::runtime_error);
    }
    SUBCASE("zero row fails the norm check") {
        auto bytes = testutil::read_file(tmp.file("model.bin"));
        // first float of the u matrix lives right after the header,
        // config, vocab and doc-count sections; recompute that offset
        size_t offset = 8;                       // magic
        offset += 3 * 4 + 3 * 8 + 8 + 3 * 4 + 8 + 1 + 8;  // config block
        offset += 4;                             // iteration
        offset += 8;                             // vocab size
        for (const auto& token : state.vocab.tokens)
            offset += 4 + token.size() + 8;
        offset += 8;                             // doc count
        const float zero[16] = {};
        std::memcpy(bytes.data() + offset, zero, sizeof(zero));
        std::ofstream out(tmp.file("model.bin"), std::ios::binary);
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        out.close();
        CHECK_THROWS_WITH_AS(load_model(tmp.path()), doctest::Contains("norm"),
                             std::runtime_error);
    }
    SUBCASE("missing file") {
        CHECK_THROWS_AS(load_model(tmp.path() + "/nope"), std::runtime_error);
    }
}

TEST_CASE("text exports carry the declared shape") {
    Fixture f;
    const auto state = init_model(f.vocab, f.docs, f.taxonomy, f.config);
    testutil::TempDir tmp("modeltxt");
    save_model(state, tmp.path());

    std::ifstream u(tmp.file("u.txt"));
    size_t rows, dim;
    u >> rows >> dim;
    CHECK(rows == state.u.rows);
    CHECK(dim == state.u.dim);
    std::string token;
    u >> token;
    CHECK(token == state.vocab.tokens[0]);

    const auto meta = testutil::read_file(tmp.file("meta.tsv"));
    CHECK(meta.find("dim\t16") != std::string::npos);
    CHECK(meta.find("kappa.w0\t10") != std::string::npos);
    CHECK(!meta.empty());
    CHECK(meta.back() == '\n');
}
