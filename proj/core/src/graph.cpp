#include "polytree/graph.hpp"

#include <numeric>

namespace polytree {

std::vector<std::vector<Vertex>> adjacency(std::size_t p, const std::vector<UndirectedEdge>& edges) {
    std::vector<std::vector<Vertex>> adj(p);
    for (const auto& e : edges) {
        adj[e.u].push_back(e.v);
        adj[e.v].push_back(e.u);
    }
    return adj;
}

bool is_spanning_tree(std::size_t p, const std::vector<UndirectedEdge>& edges) {
    if (p == 0 || edges.size() != p - 1) return false;
    std::vector<Vertex> parent(p);
    std::iota(parent.begin(), parent.end(), Vertex{0});
    auto find = [&](Vertex x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (const auto& e : edges) {
        if (e.u >= p || e.v >= p || e.u == e.v) return false;
        const Vertex a = find(e.u);
        const Vertex b = find(e.v);
        if (a == b) return false;
        parent[a] = b;
    }
    // p - 1 acyclic edges on p vertices are necessarily connected.
    return true;
}

} // namespace polytree
