#include "polytree/skeleton.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "polytree/error.hpp"
#include "polytree/format.hpp"

namespace polytree {

std::vector<UndirectedEdge> UndirectedTree::edge_list() const {
    std::vector<UndirectedEdge> out;
    out.reserve(edges.size());
    for (const auto& e : edges) out.push_back(e.edge());
    return out;
}

UnionFind::UnionFind(std::size_t n) : parent_(n), rank_(n, 0) {
    std::iota(parent_.begin(), parent_.end(), Vertex{0});
}

Vertex UnionFind::find(Vertex x) {
    while (parent_[x] != x) {
        parent_[x] = parent_[parent_[x]];
        x = parent_[x];
    }
    return x;
}

bool UnionFind::unite(Vertex a, Vertex b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
    return true;
}

namespace {

struct Candidate {
    double weight;
    Vertex u;
    Vertex v;
};

} // namespace

UndirectedTree chow_liu(const CorrelationMatrix& corr) {
    const std::size_t p = corr.size();
    if (p < 2) throw InvalidArgument("Chow-Liu tree needs at least 2 variables");

    std::vector<Candidate> candidates;
    candidates.reserve(p * (p - 1) / 2);
    for (Vertex i = 0; i < p; ++i) {
        for (Vertex j = i + 1; j < p; ++j) {
            const double w = std::abs(corr.at(i, j));
            if (std::isnan(w))
                throw DataError("correlation between " + std::to_string(i) + " and " + std::to_string(j) + " is NaN");
            candidates.push_back({w, i, j});
        }
    }
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
        if (a.weight != b.weight) return a.weight > b.weight;
        if (a.u != b.u) return a.u < b.u;
        return a.v < b.v;
    });

    UndirectedTree tree;
    tree.p = p;
    tree.edges.reserve(p - 1);
    UnionFind sets(p);
    for (const auto& c : candidates) {
        if (!sets.unite(c.u, c.v)) continue;
        tree.edges.push_back({c.u, c.v, c.weight});
        if (tree.edges.size() == p - 1) break;
    }
    return tree;
}

void write_skeleton(std::ostream& out, const UndirectedTree& tree) {
    for (const auto& e : tree.edges) out << e.u << ' ' << e.v << ' ' << format_double(e.weight) << '\n';
}

} // namespace polytree
