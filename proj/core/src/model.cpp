#include "polytree/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <unordered_map>
#include <unordered_set>

#include "polytree/error.hpp"
#include "polytree/orient.hpp"

namespace polytree {

DirectedTree::DirectedTree(std::size_t p, std::vector<WeightedDirectedEdge> edges)
    : p_(p), edges_(std::move(edges)), parents_(p), rank_(p) {
    if (p == 0) throw InvalidArgument("polytree needs at least one vertex");
    if (p > std::numeric_limits<Vertex>::max()) throw InvalidArgument("too many vertices");
    std::vector<UndirectedEdge> skeleton;
    skeleton.reserve(edges_.size());
    for (const auto& e : edges_) {
        if (e.parent >= p || e.child >= p)
            throw InvalidArgument("edge " + std::to_string(e.parent) + "->" + std::to_string(e.child) +
                                  " references a vertex outside [0, " + std::to_string(p) + ")");
        if (!std::isfinite(e.lambda)) throw InvalidArgument("edge coefficient must be finite");
        skeleton.push_back(e.directed().undirected());
    }
    if (!is_spanning_tree(p, skeleton))
        throw InvalidArgument("edges do not form a tree on " + std::to_string(p) + " vertices");

    std::vector<std::vector<Vertex>> children(p);
    std::vector<std::size_t> indegree(p, 0);
    for (const auto& e : edges_) {
        parents_[e.child].emplace_back(e.parent, e.lambda);
        children[e.parent].push_back(e.child);
        ++indegree[e.child];
    }
    topo_.reserve(p);
    for (Vertex v = 0; v < p; ++v)
        if (indegree[v] == 0) topo_.push_back(v);
    for (std::size_t head = 0; head < topo_.size(); ++head) {
        for (const Vertex c : children[topo_[head]])
            if (--indegree[c] == 0) topo_.push_back(c);
    }
    for (std::size_t r = 0; r < topo_.size(); ++r) rank_[topo_[r]] = r;
}

std::vector<DirectedEdge> DirectedTree::directed_edges() const {
    std::vector<DirectedEdge> out;
    out.reserve(edges_.size());
    for (const auto& e : edges_) out.push_back(e.directed());
    return out;
}

std::vector<UndirectedEdge> DirectedTree::skeleton() const {
    std::vector<UndirectedEdge> out;
    out.reserve(edges_.size());
    for (const auto& e : edges_) out.push_back(e.directed().undirected());
    return out;
}

std::optional<double> DirectedTree::coefficient(Vertex parent, Vertex child) const {
    if (child >= p_) return std::nullopt;
    for (const auto& [q, lambda] : parents_[child])
        if (q == parent) return lambda;
    return std::nullopt;
}

std::vector<std::pair<Vertex, double>> DirectedTree::ancestors(Vertex v) const {
    std::vector<std::pair<Vertex, double>> out{{v, 1.0}};
    // The skeleton is a tree, so every ancestor is reached exactly once.
    for (std::size_t head = 0; head < out.size(); ++head) {
        const auto [u, weight] = out[head];
        for (const auto& [q, lambda] : parents_[u]) out.emplace_back(q, weight * lambda);
    }
    return out;
}

ErrorCumulants::ErrorCumulants(std::size_t p, int max_order)
    : p_(p), max_order_(max_order), values_(p * static_cast<std::size_t>(std::max(max_order - 1, 0)), 0.0) {
    if (max_order < 2) throw InvalidArgument("error cumulants need max order >= 2");
}

std::size_t ErrorCumulants::index(Vertex v, int k) const {
    if (v >= p_ || k < 2 || k > max_order_)
        throw InvalidArgument("error cumulant (vertex " + std::to_string(v) + ", order " + std::to_string(k) +
                              ") out of range");
    return static_cast<std::size_t>(v) * static_cast<std::size_t>(max_order_ - 1) + static_cast<std::size_t>(k - 2);
}

double Trek::weight() const noexcept {
    double w = 1.0;
    for (const double x : path_weights) w *= x;
    return w;
}

PolytreeModel::PolytreeModel(DirectedTree structure, ErrorCumulants errors)
    : structure_(std::move(structure)), errors_(std::move(errors)) {
    const std::size_t p = structure_.size();
    if (errors_.size() != p)
        throw InvalidArgument("error cumulants cover " + std::to_string(errors_.size()) + " vertices, model has " +
                              std::to_string(p));
    const int kmax = errors_.max_order();
    for (Vertex v = 0; v < p; ++v) {
        for (int k = 2; k <= kmax; ++k)
            if (!std::isfinite(errors_.at(v, k))) throw InvalidArgument("error cumulants must be finite");
        if (!(errors_.at(v, 2) > 0.0))
            throw InvalidArgument("error variance of vertex " + std::to_string(v) + " must be positive");
    }

    // Distinct parents must be trek-free so the diagonal recursion has no
    // cross terms: their ancestor sets are disjoint.
    for (Vertex v = 0; v < p; ++v) {
        const auto& parents = structure_.parents(v);
        if (parents.size() < 2) continue;
        std::unordered_set<Vertex> seen;
        for (const auto& [q, lambda] : parents) {
            (void)lambda;
            for (const auto& [anc, w] : structure_.ancestors(q)) {
                (void)w;
                if (!seen.insert(anc).second)
                    throw InvalidArgument("parents of vertex " + std::to_string(v) + " share an ancestor");
            }
        }
    }

    const auto stride = static_cast<std::size_t>(kmax - 1);
    diagonal_.assign(p * stride, 0.0);
    for (const Vertex v : structure_.topological_order()) {
        for (int k = 2; k <= kmax; ++k) {
            double value = errors_.at(v, k);
            for (const auto& [q, lambda] : structure_.parents(v))
                value += std::pow(lambda, k) * diagonal_[q * stride + static_cast<std::size_t>(k - 2)];
            diagonal_[v * stride + static_cast<std::size_t>(k - 2)] = value;
        }
    }
}

double PolytreeModel::diagonal_cumulant(Vertex v, int k) const {
    if (v >= size() || k < 2 || k > max_order())
        throw InvalidArgument("diagonal cumulant (vertex " + std::to_string(v) + ", order " + std::to_string(k) +
                              ") out of range");
    return diagonal_[v * static_cast<std::size_t>(max_order() - 1) + static_cast<std::size_t>(k - 2)];
}

std::optional<Trek> PolytreeModel::trek(std::span<const Vertex> targets) const {
    if (targets.empty()) return std::nullopt;
    for (const Vertex t : targets)
        if (t >= size()) throw InvalidArgument("trek target " + std::to_string(t) + " out of range");

    std::vector<Vertex> distinct(targets.begin(), targets.end());
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

    std::vector<std::unordered_map<Vertex, double>> reach(distinct.size());
    for (std::size_t t = 0; t < distinct.size(); ++t) {
        const auto anc = structure_.ancestors(distinct[t]);
        reach[t] = std::unordered_map<Vertex, double>(anc.begin(), anc.end());
    }
    // Common ancestors of a polytree vertex set are the ancestors of the trek
    // top, so the top is the common ancestor latest in topological order.
    std::optional<Vertex> top;
    for (const auto& [candidate, w] : reach.front()) {
        (void)w;
        const bool common = std::all_of(reach.begin() + 1, reach.end(),
                                        [&](const auto& r) { return r.contains(candidate); });
        if (common && (!top || structure_.topological_rank(candidate) > structure_.topological_rank(*top)))
            top = candidate;
    }
    if (!top) return std::nullopt;

    Trek result;
    result.top = *top;
    result.path_weights.reserve(targets.size());
    for (const Vertex t : targets) {
        const auto slot = static_cast<std::size_t>(std::lower_bound(distinct.begin(), distinct.end(), t) - distinct.begin());
        result.path_weights.push_back(reach[slot].at(*top));
    }
    return result;
}

double PolytreeModel::cumulant(std::span<const Vertex> targets) const {
    const int k = static_cast<int>(targets.size());
    if (k < 2 || k > max_order())
        throw InvalidArgument("cumulant order " + std::to_string(k) + " outside [2, " + std::to_string(max_order()) + "]");
    const auto t = trek(targets);
    if (!t) return 0.0;
    return diagonal_cumulant(t->top, k) * t->weight();
}

double PolytreeModel::covariance(Vertex i, Vertex j) const {
    const Vertex idx[] = {i, j};
    return cumulant(idx);
}

double PolytreeModel::correlation(Vertex i, Vertex j) const {
    return covariance(i, j) / std::sqrt(diagonal_cumulant(i, 2) * diagonal_cumulant(j, 2));
}

Eigen::MatrixXd population_covariance(const PolytreeModel& model) {
    const std::size_t p = model.size();
    const auto& tree = model.structure();
    std::vector<std::unordered_map<Vertex, double>> reach(p);
    for (Vertex v = 0; v < p; ++v) {
        const auto anc = tree.ancestors(v);
        reach[v] = std::unordered_map<Vertex, double>(anc.begin(), anc.end());
    }
    const auto n = static_cast<Eigen::Index>(p);
    Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(n, n);
    for (Vertex i = 0; i < p; ++i) {
        sigma(i, i) = model.diagonal_cumulant(i, 2);
        for (Vertex j = i + 1; j < p; ++j) {
            std::optional<Vertex> top;
            for (const auto& [a, w] : reach[i]) {
                (void)w;
                if (reach[j].contains(a) && (!top || tree.topological_rank(a) > tree.topological_rank(*top))) top = a;
            }
            if (!top) continue;
            const double value = model.diagonal_cumulant(*top, 2) * reach[i].at(*top) * reach[j].at(*top);
            sigma(i, j) = value;
            sigma(j, i) = value;
        }
    }
    return sigma;
}

PairCumulantTable population_pair_cumulants(const PolytreeModel& model, Vertex i, Vertex j, int max_order) {
    if (i == j) throw InvalidArgument("pair cumulants need two distinct vertices");
    if (i >= model.size() || j >= model.size()) throw InvalidArgument("vertex out of range");
    if (max_order < 3 || max_order > model.max_order())
        throw InvalidArgument("order " + std::to_string(max_order) + " outside [3, " +
                              std::to_string(model.max_order()) + "]");
    const Vertex pair[] = {i, j};
    const auto t = model.trek(pair);
    PairCumulantTable table(i, j, max_order);
    for (int k = 2; k <= max_order; ++k) {
        table.at(k, k) = model.diagonal_cumulant(i, k);
        table.at(0, k) = model.diagonal_cumulant(j, k);
        if (!t) continue;
        const double top = model.diagonal_cumulant(t->top, k);
        for (int m = 1; m < k; ++m)
            table.at(m, k) = top * std::pow(t->path_weights[0], m) * std::pow(t->path_weights[1], k - m);
    }
    return table;
}

ThresholdInterval threshold_interval(double rho_min, double rho_max) {
    if (!(rho_min >= 0.0 && rho_min <= rho_max && rho_max <= 1.0))
        throw InvalidArgument("need 0 <= rho_min <= rho_max <= 1");
    const double gamma = std::min(rho_min / 3.0, (1.0 - rho_max) / 2.0) * rho_min;
    const ThresholdInterval interval{gamma, rho_min * rho_min - gamma};
    if (!(interval.lo < interval.hi))
        throw DegeneracyError("empty threshold interval: gamma = " + std::to_string(interval.lo) +
                              " >= rho_min^2 - gamma = " + std::to_string(interval.hi));
    return interval;
}

ThresholdInterval valid_threshold_interval(const PolytreeModel& model) {
    const auto& edges = model.structure().edges();
    if (edges.empty()) throw InvalidArgument("threshold interval needs at least one edge");
    double rho_min = 1.0;
    double rho_max = 0.0;
    for (const auto& e : edges) {
        const double r = std::abs(model.correlation(e.parent, e.child));
        rho_min = std::min(rho_min, r);
        rho_max = std::max(rho_max, r);
    }
    return threshold_interval(rho_min, rho_max);
}

std::vector<EdgeGenericity> genericity_check(const PolytreeModel& model, int max_order) {
    std::vector<EdgeGenericity> report;
    for (const auto& e : model.structure().edges()) {
        const auto table = population_pair_cumulants(model, e.parent, e.child, max_order);
        const auto reverse = build_moment_matrix(table, e.directed().reversed(), max_order);
        const auto minors = minor_vector(reverse);
        EdgeGenericity g;
        g.edge = e.directed();
        for (const double v : minors.values) g.max_reverse_minor = std::max(g.max_reverse_minor, std::abs(v));
        const double largest = reverse.values.cwiseAbs().maxCoeff();
        g.scale = largest * largest;
        g.generic = g.max_reverse_minor > kPopulationZeroTolerance * g.scale;
        report.push_back(g);
    }
    return report;
}

} // namespace polytree
