#include "josh/taxonomy.hpp"

#include <deque>
#include <fstream>
#include <map>
#include <set>
#include <stdexcept>

#include "josh/geometry.hpp"

namespace josh {

namespace {
constexpr const char* kRootName = "ROOT";
}

int Taxonomy::find(const std::string& name) const {
    for (const auto& n : nodes)
        if (n.name == name) return n.node_id;
    return -1;
}

Taxonomy taxonomy_from_edges(
    const std::vector<std::pair<std::string, std::string>>& edges,
    const Vocabulary& vocab) {
    if (edges.empty())
        throw std::runtime_error("taxonomy: no edges");

    // map is deterministic regardless of edge order
    std::map<std::string, std::string> parent_of;
    std::map<std::string, std::set<std::string>> children_of;
    std::set<std::string> names;
    for (const auto& [parent, child] : edges) {
        if (child == kRootName)
            throw std::runtime_error("taxonomy: ROOT cannot appear as a child");
        if (parent == child)
            throw std::runtime_error("taxonomy: cycle detected at " + parent);
        if (parent_of.count(child))
            throw std::runtime_error("taxonomy: duplicate name " + child);
        parent_of[child] = parent;
        children_of[parent].insert(child);
        names.insert(parent);
        names.insert(child);
    }
    if (!names.count(kRootName))
        throw std::runtime_error("taxonomy: missing ROOT node");
    for (const auto& name : names) {
        if (name != kRootName && !parent_of.count(name))
            throw std::runtime_error("taxonomy: multiple roots (" + name +
                                     " has no parent)");
        if (name != kRootName && vocab.id(name) < 0)
            throw std::runtime_error("taxonomy: name not in vocabulary: " + name);
    }

    Taxonomy tax;
    std::map<std::string, int> id_of;
    std::deque<std::string> queue{kRootName};
    while (!queue.empty()) {
        std::string name = queue.front();
        queue.pop_front();
        CategoryNode node;
        node.node_id = static_cast<int>(tax.nodes.size());
        node.name = name;
        node.name_token = name == kRootName ? -1 : vocab.id(name);
        if (name != kRootName) {
            node.parent = id_of.at(parent_of.at(name));
            node.level = tax.nodes[node.parent].level + 1;
        }
        id_of[name] = node.node_id;
        tax.max_level = std::max(tax.max_level, node.level);
        tax.nodes.push_back(std::move(node));
        for (const auto& child : children_of[name]) queue.push_back(child);
    }
    if (tax.nodes.size() != names.size())
        throw std::runtime_error("taxonomy: cycle detected (unreachable nodes)");
    for (auto& node : tax.nodes)
        for (const auto& child : children_of[node.name])
            node.children.push_back(id_of.at(child));
    return tax;
}

Taxonomy parse_taxonomy(const std::string& path, const Vocabulary& vocab) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("parse_taxonomy: cannot open " + path);
    std::vector<std::pair<std::string, std::string>> edges;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos || tab == 0 || tab + 1 >= line.size() ||
            line.find('\t', tab + 1) != std::string::npos)
            throw std::runtime_error("parse_taxonomy: malformed line " +
                                     std::to_string(lineno) + " in " + path);
        edges.emplace_back(line.substr(0, tab), line.substr(tab + 1));
    }
    if (in.bad())
        throw std::runtime_error("parse_taxonomy: read error on " + path);
    return taxonomy_from_edges(edges, vocab);
}

void write_taxonomy(const Taxonomy& taxonomy, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("write_taxonomy: cannot open " + path);
    for (const auto& node : taxonomy.nodes)
        for (int child : node.children)
            out << node.name << '\t' << taxonomy.nodes[child].name << '\n';
    if (!out)
        throw std::runtime_error("write_taxonomy: write error on " + path);
}

std::vector<LocalTree> local_trees(const Taxonomy& taxonomy) {
    std::vector<LocalTree> trees;
    for (const auto& node : taxonomy.nodes)
        if (!node.children.empty())
            trees.push_back(LocalTree{node.node_id, node.children});
    return trees;
}

LevelMargins compute_level_margins(const Taxonomy& taxonomy) {
    LevelMargins margins;
    margins.margin.assign(taxonomy.max_level + 1, 0.0);
    std::vector<double> sum(taxonomy.max_level + 1, 0.0);
    std::vector<long long> pairs(taxonomy.max_level + 1, 0);
    for (const auto& node : taxonomy.nodes) {
        if (node.children.size() < 2) continue;
        std::span<const double> root_center(node.center);
        for (int i : node.children) {
            std::span<const double> ci(taxonomy.nodes[i].center);
            for (int j : node.children) {
                if (i == j) continue;
                sum[node.level] +=
                    dot(ci, root_center) - dot(ci, taxonomy.nodes[j].center);
                pairs[node.level] += 1;
            }
        }
    }
    for (size_t level = 0; level < margins.margin.size(); ++level)
        if (pairs[level] > 0) margins.margin[level] = sum[level] / pairs[level];
    return margins;
}

}  // namespace josh
