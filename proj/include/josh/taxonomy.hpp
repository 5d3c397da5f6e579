#pragma once

#include <string>
#include <vector>

#include "josh/corpus.hpp"

namespace josh {

// One node of the category tree. Centers and kappa are filled by the
// model initializer and mutated by the trainer; topology is immutable
// after parsing.
struct CategoryNode {
    std::string name;
    int node_id = 0;
    int level = 0;               // ROOT = 0
    int parent = -1;             // -1 for ROOT
    std::vector<int> children;   // node ids, sorted by name
    int name_token = -1;         // vocabulary id, -1 for ROOT

    std::vector<double> center;  // unit direction on S^(p-1)
    double kappa = 10.0;
    std::vector<int> rep_terms;  // token ids, best first
};

struct Taxonomy {
    std::vector<CategoryNode> nodes;  // indexed by node_id, BFS order
    int max_level = 0;

    static constexpr int kRoot = 0;

    const CategoryNode& node(int id) const { return nodes[id]; }
    CategoryNode& node(int id) { return nodes[id]; }
    size_t size() const { return nodes.size(); }

    // -1 when the name is not in the tree
    int find(const std::string& name) const;
};

// File format: UTF-8 lines `parent<TAB>child`, the reserved name ROOT for
// the virtual root, `#` starts a comment line, order-independent. Every
// non-ROOT name must be a vocabulary token and appear exactly once.
Taxonomy parse_taxonomy(const std::string& path, const Vocabulary& vocab);

Taxonomy taxonomy_from_edges(
    const std::vector<std::pair<std::string, std::string>>& edges,
    const Vocabulary& vocab);

void write_taxonomy(const Taxonomy& taxonomy, const std::string& path);

// A node plus its direct children; the unit of the recursive
// tree-embedding objective.
struct LocalTree {
    int root;
    std::vector<int> children;
};

// One local tree per internal node, in BFS order.
std::vector<LocalTree> local_trees(const Taxonomy& taxonomy);

struct LevelMargins {
    std::vector<double> margin;  // indexed by local-tree root level

    double at(int level) const {
        return level < static_cast<int>(margin.size()) ? margin[level] : 0.0;
    }
};

// m_inter(L): the average of (c_i . c_r - c_i . c_j) over local trees
// rooted at level L and ordered sibling pairs (i, j). Levels without a
// sibling pair get margin 0.
LevelMargins compute_level_margins(const Taxonomy& taxonomy);

}  // namespace josh
