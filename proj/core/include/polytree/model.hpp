#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "polytree/graph.hpp"
#include "polytree/pair_table.hpp"

namespace polytree {

struct WeightedDirectedEdge {
    Vertex parent = 0;
    Vertex child = 0;
    double lambda = 0.0;

    [[nodiscard]] DirectedEdge directed() const noexcept { return {parent, child}; }
};

// A directed tree (polytree) with one coefficient per edge. Validated on
// construction: p - 1 edges whose skeleton spans [0, p) without cycles.
class DirectedTree {
public:
    DirectedTree() = default;
    DirectedTree(std::size_t p, std::vector<WeightedDirectedEdge> edges);

    [[nodiscard]] std::size_t size() const noexcept { return p_; }
    [[nodiscard]] const std::vector<WeightedDirectedEdge>& edges() const noexcept { return edges_; }
    [[nodiscard]] std::vector<DirectedEdge> directed_edges() const;
    [[nodiscard]] std::vector<UndirectedEdge> skeleton() const;

    // (parent, lambda) pairs of v.
    [[nodiscard]] const std::vector<std::pair<Vertex, double>>& parents(Vertex v) const { return parents_[v]; }
    // Vertices ordered so that every parent precedes its children.
    [[nodiscard]] const std::vector<Vertex>& topological_order() const noexcept { return topo_; }
    [[nodiscard]] std::size_t topological_rank(Vertex v) const { return rank_[v]; }

    [[nodiscard]] std::optional<double> coefficient(Vertex parent, Vertex child) const;

    // Ancestors of v including v itself, each with the product of
    // coefficients along the unique directed path ancestor -> v.
    [[nodiscard]] std::vector<std::pair<Vertex, double>> ancestors(Vertex v) const;

private:
    std::size_t p_ = 0;
    std::vector<WeightedDirectedEdge> edges_;
    std::vector<std::vector<std::pair<Vertex, double>>> parents_;
    std::vector<Vertex> topo_;
    std::vector<std::size_t> rank_;
};

// Error cumulants eps^{(k)}_v for 2 <= k <= max_order.
class ErrorCumulants {
public:
    ErrorCumulants() = default;
    ErrorCumulants(std::size_t p, int max_order);

    [[nodiscard]] std::size_t size() const noexcept { return p_; }
    [[nodiscard]] int max_order() const noexcept { return max_order_; }
    [[nodiscard]] double at(Vertex v, int k) const { return values_[index(v, k)]; }
    double& at(Vertex v, int k) { return values_[index(v, k)]; }

private:
    [[nodiscard]] std::size_t index(Vertex v, int k) const;

    std::size_t p_ = 0;
    int max_order_ = 2;
    std::vector<double> values_;
};

// Unique simple trek joining a multiset of targets: its top and, per target,
// the coefficient product of the directed path top -> target.
struct Trek {
    Vertex top = 0;
    std::vector<double> path_weights;

    [[nodiscard]] double weight() const noexcept;
};

// Ground-truth linear SEM on a polytree. Immutable; every query is a pure
// function of the model and safe to call concurrently.
class PolytreeModel {
public:
    PolytreeModel(DirectedTree structure, ErrorCumulants errors);

    [[nodiscard]] std::size_t size() const noexcept { return structure_.size(); }
    [[nodiscard]] int max_order() const noexcept { return errors_.max_order(); }
    [[nodiscard]] const DirectedTree& structure() const noexcept { return structure_; }
    [[nodiscard]] const ErrorCumulants& errors() const noexcept { return errors_; }

    // Diagonal cumulant C^{(k)}_v of X_v, from the parent recursion.
    [[nodiscard]] double diagonal_cumulant(Vertex v, int k) const;

    // Simple trek among `targets` (a multiset), if any.
    [[nodiscard]] std::optional<Trek> trek(std::span<const Vertex> targets) const;

    // Joint cumulant of X over the index multiset; the order is targets.size().
    [[nodiscard]] double cumulant(std::span<const Vertex> targets) const;

    [[nodiscard]] double covariance(Vertex i, Vertex j) const;
    [[nodiscard]] double correlation(Vertex i, Vertex j) const;

private:
    DirectedTree structure_;
    ErrorCumulants errors_;
    std::vector<double> diagonal_; // [v * (K - 1) + (k - 2)]
};

[[nodiscard]] Eigen::MatrixXd population_covariance(const PolytreeModel& model);

// Throws InvalidArgument unless i != j and 3 <= K <= model.max_order().
[[nodiscard]] PairCumulantTable population_pair_cumulants(const PolytreeModel& model, Vertex i, Vertex j,
                                                          int max_order);

struct ThresholdInterval {
    double lo = 0.0;
    double hi = 0.0;
};

// (gamma, rho_min^2 - gamma) with gamma = min(rho_min / 3, (1 - rho_max) / 2) * rho_min.
// Throws DegeneracyError when the interval is empty.
[[nodiscard]] ThresholdInterval threshold_interval(double rho_min, double rho_max);

// threshold_interval over the absolute population correlations of the edges.
[[nodiscard]] ThresholdInterval valid_threshold_interval(const PolytreeModel& model);

struct EdgeGenericity {
    DirectedEdge edge;
    double max_reverse_minor = 0.0; // largest |minor| of A along the reversed edge
    double scale = 0.0;             // (largest |entry| of that matrix)^2
    bool generic = false;
};

// Relative tolerance for calling an exact algebraic zero in population mode.
inline constexpr double kPopulationZeroTolerance = 1e-9;

[[nodiscard]] std::vector<EdgeGenericity> genericity_check(const PolytreeModel& model, int max_order);

// Text format: "p K_max", p - 1 lines "parent child lambda", then any number of
// "vertex k value" lines. Lines starting with '#' are comments.
[[nodiscard]] PolytreeModel read_model(std::istream& in);
void write_model(std::ostream& out, const PolytreeModel& model);

} // namespace polytree
