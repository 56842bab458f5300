#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "polytree/cumulants.hpp"
#include "polytree/graph.hpp"

namespace polytree {

struct WeightedEdge {
    Vertex u = 0;
    Vertex v = 0;
    double weight = 0.0;

    [[nodiscard]] UndirectedEdge edge() const noexcept { return {u, v}; }
};

// Undirected spanning tree on [0, p) with per-edge weights (|rho| for
// Chow-Liu trees, 0 for randomly generated ones).
struct UndirectedTree {
    std::size_t p = 0;
    std::vector<WeightedEdge> edges;

    [[nodiscard]] std::vector<UndirectedEdge> edge_list() const;
};

// Disjoint-set forest with path compression and union by rank.
class UnionFind {
public:
    explicit UnionFind(std::size_t n);

    [[nodiscard]] Vertex find(Vertex x);
    // Returns false when a and b were already in the same set.
    bool unite(Vertex a, Vertex b);

private:
    std::vector<Vertex> parent_;
    std::vector<unsigned char> rank_;
};

// Maximum-weight spanning tree of the complete graph weighted by |rho_ij|
// (Kruskal). Ties are broken by the lexicographically smaller pair. Edges are
// returned in the order Kruskal accepted them. Throws DataError on NaN.
[[nodiscard]] UndirectedTree chow_liu(const CorrelationMatrix& corr);

// One line per edge: "i j weight".
void write_skeleton(std::ostream& out, const UndirectedTree& tree);

} // namespace polytree
