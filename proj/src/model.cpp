#include "josh/model.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "josh/geometry.hpp"
#include "josh/rng.hpp"

static_assert(std::endian::native == std::endian::little,
              "model.bin serialization assumes a little-endian host");

namespace josh {

namespace {

constexpr char kMagic[8] = {'J', 'O', 'S', 'H', 'M', '0', '0', '1'};

struct BinWriter {
    std::ofstream out;

    explicit BinWriter(const std::string& path)
        : out(path, std::ios::binary) {
        if (!out) throw std::runtime_error("cannot open " + path);
    }
    void bytes(const void* p, size_t n) {
        out.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
        if (!out) throw std::runtime_error("write error on model.bin");
    }
    template <class T>
    void pod(T v) {
        bytes(&v, sizeof(T));
    }
    void str(const std::string& s) {
        pod<std::uint32_t>(static_cast<std::uint32_t>(s.size()));
        bytes(s.data(), s.size());
    }
};

struct BinReader {
    std::ifstream in;

    explicit BinReader(const std::string& path) : in(path, std::ios::binary) {
        if (!in) throw std::runtime_error("cannot open " + path);
    }
    void bytes(void* p, size_t n) {
        in.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
        if (in.gcount() != static_cast<std::streamsize>(n))
            throw std::runtime_error("truncated or corrupted model file");
    }
    template <class T>
    T pod() {
        T v;
        bytes(&v, sizeof(T));
        return v;
    }
    std::string str(size_t max_len = 1 << 20) {
        const auto n = pod<std::uint32_t>();
        if (n > max_len)
            throw std::runtime_error("truncated or corrupted model file");
        std::string s(n, '\0');
        bytes(s.data(), n);
        return s;
    }
    bool at_eof() {
        in.peek();
        return in.eof();
    }
};

void draw_unit_row(Rng& rng, double* row, size_t dim) {
    while (true) {
        double nrm2 = 0.0;
        for (size_t i = 0; i < dim; ++i) {
            row[i] = rng.gaussian();
            nrm2 += row[i] * row[i];
        }
        if (nrm2 > 1e-24) {
            const double inv = 1.0 / std::sqrt(nrm2);
            for (size_t i = 0; i < dim; ++i) row[i] *= inv;
            return;
        }
    }
}

void write_matrix_f32(BinWriter& w, const EmbeddingMatrix& m) {
    std::vector<float> buf(m.data.size());
    for (size_t i = 0; i < m.data.size(); ++i)
        buf[i] = static_cast<float>(m.data[i]);
    w.bytes(buf.data(), buf.size() * sizeof(float));
}

void read_matrix_f32(BinReader& r, EmbeddingMatrix& m) {
    std::vector<float> buf(m.data.size());
    r.bytes(buf.data(), buf.size() * sizeof(float));
    for (size_t i = 0; i < m.data.size(); ++i)
        m.data[i] = static_cast<double>(buf[i]);
}

void check_row_norms(const EmbeddingMatrix& m, const char* label) {
    for (size_t i = 0; i < m.rows; ++i) {
        const double n = norm(m.row_span(i));
        if (std::abs(n - 1.0) > 1e-3)
            throw std::runtime_error(std::string("load_model: ") + label +
                                     " row " + std::to_string(i) +
                                     " has norm " + std::to_string(n));
    }
}

void write_embedding_text(const std::string& path,
                          const std::vector<std::string>& labels,
                          const EmbeddingMatrix& m) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << m.rows << ' ' << m.dim << '\n';
    char num[64];
    for (size_t i = 0; i < m.rows; ++i) {
        out << labels[i];
        const double* row = m.row(i);
        for (size_t j = 0; j < m.dim; ++j) {
            std::snprintf(num, sizeof(num), "%.6g", row[j]);
            out << ' ' << num;
        }
        out << '\n';
    }
    if (!out) throw std::runtime_error("write error on " + path);
}

void write_config(BinWriter& w, const TrainConfig& c) {
    w.pod<std::int32_t>(c.dim);
    w.pod<std::int32_t>(c.window);
    w.pod<std::int32_t>(c.top_k);
    w.pod<double>(c.alpha0);
    w.pod<double>(c.margin);
    w.pod<double>(c.margin_intra);
    w.pod<std::int64_t>(c.min_count);
    w.pod<std::int32_t>(c.epochs_per_mstep);
    w.pod<std::int32_t>(c.tree_passes_per_mstep);
    w.pod<std::int32_t>(c.threads);
    w.pod<std::uint64_t>(c.seed);
    w.pod<std::uint8_t>(c.subsample ? 1 : 0);
    w.pod<double>(c.subsample_t);
}

TrainConfig read_config(BinReader& r) {
    TrainConfig c;
    c.dim = r.pod<std::int32_t>();
    c.window = r.pod<std::int32_t>();
    c.top_k = r.pod<std::int32_t>();
    c.alpha0 = r.pod<double>();
    c.margin = r.pod<double>();
    c.margin_intra = r.pod<double>();
    c.min_count = r.pod<std::int64_t>();
    c.epochs_per_mstep = r.pod<std::int32_t>();
    c.tree_passes_per_mstep = r.pod<std::int32_t>();
    c.threads = r.pod<std::int32_t>();
    c.seed = r.pod<std::uint64_t>();
    c.subsample = r.pod<std::uint8_t>() != 0;
    c.subsample_t = r.pod<double>();
    return c;
}

}  // namespace

ModelState init_model(const Vocabulary& vocab,
                      const std::vector<Document>& docs,
                      const Taxonomy& taxonomy, const TrainConfig& config) {
    config.validate();
    ModelState state;
    state.config = config;
    state.vocab = vocab;
    state.taxonomy = taxonomy;
    state.iteration = 1;

    const size_t p = static_cast<size_t>(config.dim);
    state.u.resize(vocab.size(), p, Role::CenterWord);
    state.v.resize(vocab.size(), p, Role::ContextWord);
    state.d.resize(docs.size(), p, Role::Document);

    Rng rng(config.seed);
    for (size_t i = 0; i < state.u.rows; ++i) draw_unit_row(rng, state.u.row(i), p);
    for (size_t i = 0; i < state.v.rows; ++i) draw_unit_row(rng, state.v.row(i), p);
    for (size_t i = 0; i < state.d.rows; ++i) draw_unit_row(rng, state.d.row(i), p);

    for (auto& node : state.taxonomy.nodes) {
        node.center.resize(p);
        node.kappa = 10.0;
        node.rep_terms.clear();
        if (node.node_id == Taxonomy::kRoot) {
            draw_unit_row(rng, node.center.data(), p);
            continue;
        }
        if (node.name_token < 0 ||
            static_cast<size_t>(node.name_token) >= vocab.size())
            throw std::invalid_argument("init_model: category name not in vocabulary: " +
                                        node.name);
        const double* src = state.u.row(static_cast<size_t>(node.name_token));
        std::copy(src, src + p, node.center.begin());
        node.rep_terms.push_back(node.name_token);
    }
    return state;
}

void save_model(const ModelState& state, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);

    // text exports
    std::vector<std::string> doc_labels(state.d.rows);
    for (size_t i = 0; i < state.d.rows; ++i) doc_labels[i] = std::to_string(i);
    std::vector<std::string> cat_labels;
    EmbeddingMatrix cat;
    cat.resize(state.taxonomy.size(), state.u.dim, Role::Category);
    for (size_t i = 0; i < state.taxonomy.size(); ++i) {
        const auto& node = state.taxonomy.nodes[i];
        cat_labels.push_back(node.name);
        std::copy(node.center.begin(), node.center.end(), cat.row(i));
    }
    write_embedding_text(dir + "/u.txt", state.vocab.tokens, state.u);
    write_embedding_text(dir + "/v.txt", state.vocab.tokens, state.v);
    write_embedding_text(dir + "/doc.txt", doc_labels, state.d);
    write_embedding_text(dir + "/cat.txt", cat_labels, cat);

    // meta.tsv
    {
        std::ofstream meta(dir + "/meta.tsv");
        if (!meta) throw std::runtime_error("cannot open " + dir + "/meta.tsv");
        const auto& c = state.config;
        char buf[64];
        auto kv = [&meta](const std::string& k, const std::string& v) {
            meta << k << '\t' << v << '\n';
        };
        kv("dim", std::to_string(c.dim));
        kv("window", std::to_string(c.window));
        kv("k", std::to_string(c.top_k));
        std::snprintf(buf, sizeof(buf), "%.17g", c.alpha0);
        kv("alpha", buf);
        std::snprintf(buf, sizeof(buf), "%.17g", c.margin);
        kv("margin", buf);
        std::snprintf(buf, sizeof(buf), "%.17g", c.margin_intra);
        kv("margin_intra", buf);
        kv("min_count", std::to_string(c.min_count));
        kv("epochs_per_step", std::to_string(c.epochs_per_mstep));
        kv("tree_passes", std::to_string(c.tree_passes_per_mstep));
        kv("threads", std::to_string(c.threads));
        kv("seed", std::to_string(c.seed));
        kv("subsample", c.subsample ? "1" : "0");
        kv("iteration", std::to_string(state.iteration));
        for (const auto& node : state.taxonomy.nodes) {
            std::snprintf(buf, sizeof(buf), "%.17g", node.kappa);
            kv("kappa." + node.name, buf);
        }
        if (!meta) throw std::runtime_error("write error on " + dir + "/meta.tsv");
    }

    // lossless binary
    BinWriter w(dir + "/model.bin");
    w.bytes(kMagic, sizeof(kMagic));
    write_config(w, state.config);
    w.pod<std::int32_t>(state.iteration);
    w.pod<std::uint64_t>(state.vocab.size());
    for (size_t i = 0; i < state.vocab.size(); ++i) {
        w.str(state.vocab.tokens[i]);
        w.pod<std::int64_t>(state.vocab.counts[i]);
    }
    w.pod<std::uint64_t>(state.d.rows);
    write_matrix_f32(w, state.u);
    write_matrix_f32(w, state.v);
    write_matrix_f32(w, state.d);
    w.pod<std::uint32_t>(static_cast<std::uint32_t>(state.taxonomy.size()));
    std::vector<float> center_buf(state.u.dim);
    for (const auto& node : state.taxonomy.nodes) {
        w.str(node.name);
        w.pod<std::int32_t>(node.parent);
        w.pod<std::int32_t>(node.name_token);
        w.pod<double>(node.kappa);
        w.pod<std::uint32_t>(static_cast<std::uint32_t>(node.rep_terms.size()));
        for (int term : node.rep_terms) w.pod<std::int32_t>(term);
        for (size_t j = 0; j < node.center.size(); ++j)
            center_buf[j] = static_cast<float>(node.center[j]);
        w.bytes(center_buf.data(), center_buf.size() * sizeof(float));
    }
}

ModelState load_model(const std::string& dir) {
    BinReader r(dir + "/model.bin");
    char magic[8];
    r.bytes(magic, sizeof(magic));
    if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw std::runtime_error("load_model: " + dir +
                                 "/model.bin is not a model file of this version");

    ModelState state;
    state.config = read_config(r);
    state.config.validate();
    state.iteration = r.pod<std::int32_t>();
    const size_t p = static_cast<size_t>(state.config.dim);

    const auto vocab_size = r.pod<std::uint64_t>();
    for (std::uint64_t i = 0; i < vocab_size; ++i) {
        std::string token = r.str();
        const auto count = r.pod<std::int64_t>();
        state.vocab.ids.emplace(token, static_cast<int>(i));
        state.vocab.tokens.push_back(std::move(token));
        state.vocab.counts.push_back(count);
        state.vocab.total_tokens += count;
    }
    const auto doc_count = r.pod<std::uint64_t>();

    state.u.resize(vocab_size, p, Role::CenterWord);
    state.v.resize(vocab_size, p, Role::ContextWord);
    state.d.resize(doc_count, p, Role::Document);
    read_matrix_f32(r, state.u);
    read_matrix_f32(r, state.v);
    read_matrix_f32(r, state.d);

    const auto node_count = r.pod<std::uint32_t>();
    std::vector<float> center_buf(p);
    for (std::uint32_t i = 0; i < node_count; ++i) {
        CategoryNode node;
        node.node_id = static_cast<int>(i);
        node.name = r.str();
        node.parent = r.pod<std::int32_t>();
        node.name_token = r.pod<std::int32_t>();
        node.kappa = r.pod<double>();
        const auto rep_count = r.pod<std::uint32_t>();
        for (std::uint32_t k = 0; k < rep_count; ++k)
            node.rep_terms.push_back(r.pod<std::int32_t>());
        r.bytes(center_buf.data(), center_buf.size() * sizeof(float));
        node.center.resize(p);
        for (size_t j = 0; j < p; ++j)
            node.center[j] = static_cast<double>(center_buf[j]);
        if (node.parent >= static_cast<int>(i) ||
            (i == 0) != (node.parent < 0))
            throw std::runtime_error("load_model: corrupted taxonomy section");
        if (node.parent >= 0) {
            node.level = state.taxonomy.nodes[node.parent].level + 1;
            state.taxonomy.nodes[node.parent].children.push_back(node.node_id);
        }
        state.taxonomy.max_level = std::max(state.taxonomy.max_level, node.level);
        state.taxonomy.nodes.push_back(std::move(node));
    }
    if (!r.at_eof())
        throw std::runtime_error("load_model: trailing bytes in model.bin");

    check_row_norms(state.u, "u");
    check_row_norms(state.v, "v");
    check_row_norms(state.d, "doc");
    for (const auto& node : state.taxonomy.nodes) {
        const double n = norm(std::span<const double>(node.center));
        if (std::abs(n - 1.0) > 1e-3)
            throw std::runtime_error("load_model: category " + node.name +
                                     " has center norm " + std::to_string(n));
    }
    return state;
}

}  // namespace josh
