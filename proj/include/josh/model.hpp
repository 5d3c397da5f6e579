#pragma once

#include <span>
#include <string>
#include <vector>

#include "josh/config.hpp"
#include "josh/corpus.hpp"
#include "josh/taxonomy.hpp"

namespace josh {

enum class Role { CenterWord, ContextWord, Document, Category };

// Dense row-major matrix of unit vectors. Rows stay unit-norm through
// init, every retraction, and persistence.
struct EmbeddingMatrix {
    size_t rows = 0;
    size_t dim = 0;
    Role role = Role::CenterWord;
    std::vector<double> data;

    void resize(size_t r, size_t d, Role ro) {
        rows = r;
        dim = d;
        role = ro;
        data.assign(r * d, 0.0);
    }
    double* row(size_t i) { return data.data() + i * dim; }
    const double* row(size_t i) const { return data.data() + i * dim; }
    std::span<double> row_span(size_t i) { return {row(i), dim}; }
    std::span<const double> row_span(size_t i) const { return {row(i), dim}; }
};

struct ModelState {
    TrainConfig config;
    Vocabulary vocab;
    EmbeddingMatrix u;  // center-word vectors
    EmbeddingMatrix v;  // context-word vectors
    EmbeddingMatrix d;  // document vectors
    Taxonomy taxonomy;  // carries centers, kappa, rep terms
    int iteration = 1;  // EM index t, in [1, K+1]
};

// Random initialization: u, v, d rows are i.i.d. standard normal draws
// normalized onto the sphere; category centers copy the embedding of
// their name token (ROOT gets a random direction); kappa = 10 and the
// representative set starts as the name token alone.
ModelState init_model(const Vocabulary& vocab,
                      const std::vector<Document>& docs,
                      const Taxonomy& taxonomy, const TrainConfig& config);

// Writes u.txt / v.txt / doc.txt / cat.txt (text, 6 significant digits),
// model.bin (little-endian 32-bit floats, length-prefixed tokens), and
// meta.tsv (config, iteration, per-category kappa).
void save_model(const ModelState& state, const std::string& dir);

// Reads model.bin back. Rejects unknown headers, truncated files, and
// any embedding row whose norm deviates from 1 by more than 1e-3.
ModelState load_model(const std::string& dir);

}  // namespace josh
