#pragma once

// Test-only helpers: model builders and oracles that do not share code paths
// with the library implementation they check.

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "polytree/cumulants.hpp"
#include "polytree/model.hpp"
#include "polytree/rng.hpp"
#include "polytree/simulate.hpp"

namespace polytree::testing {

// 0 -> 1 with lambda = 0.5, eps2 = (1, 1), eps3 = (2, 0).
inline PolytreeModel golden_chain() {
    ErrorCumulants e(2, 3);
    e.at(0, 2) = 1.0;
    e.at(1, 2) = 1.0;
    e.at(0, 3) = 2.0;
    e.at(1, 3) = 0.0;
    return PolytreeModel(DirectedTree(2, {{0, 1, 0.5}}), e);
}

// Model with the given edges and per-vertex cumulants eps[k-2][v].
inline PolytreeModel make_model(std::size_t p, std::vector<WeightedDirectedEdge> edges,
                                const std::vector<std::vector<double>>& eps) {
    ErrorCumulants e(p, static_cast<int>(eps.size()) + 1);
    for (std::size_t k = 0; k < eps.size(); ++k)
        for (Vertex v = 0; v < p; ++v) e.at(v, static_cast<int>(k) + 2) = eps[k][v];
    return PolytreeModel(DirectedTree(p, std::move(edges)), e);
}

// Random polytree with |lambda| in (0.3, 1) and generic error cumulants:
// eps2 in (0.5, 2); for K = 3 eps3 = +-(0.5, 2); for K = 4 eps3 = 0 and
// eps4 = +-(0.5, 2).
inline PolytreeModel random_generic_model(std::size_t p, std::uint64_t seed, int k_runs, int max_order = 4) {
    const auto structure = random_polytree(random_tree(p, seed), seed);
    Rng rng(derive_seed(seed, {99}));
    ErrorCumulants e(p, max_order);
    for (Vertex v = 0; v < p; ++v) {
        e.at(v, 2) = uniform(rng, 0.5, 2.0);
        const double third = uniform(rng, 0.5, 2.0) * (coin(rng) ? 1.0 : -1.0);
        const double fourth = uniform(rng, 0.5, 2.0) * (coin(rng) ? 1.0 : -1.0);
        if (max_order >= 3) e.at(v, 3) = k_runs == 3 ? third : 0.0;
        if (max_order >= 4) e.at(v, 4) = fourth;
    }
    return PolytreeModel(structure, e);
}

// Sum over all directed paths from -> to of the coefficient products, by
// exhaustive depth-first search over the edge list.
inline double path_weight_sum(const PolytreeModel& model, Vertex from, Vertex to) {
    if (from == to) return 1.0;
    double total = 0.0;
    for (const auto& e : model.structure().edges())
        if (e.parent == from) total += e.lambda * path_weight_sum(model, e.child, to);
    return total;
}

// Multi-trek rule by enumeration: every vertex h is a candidate top;
// C = sum_h eps^{(k)}_h prod_r (sum of directed path weights h -> i_r).
inline double trek_enumeration_cumulant(const PolytreeModel& model, std::span<const Vertex> targets) {
    const int k = static_cast<int>(targets.size());
    double total = 0.0;
    for (Vertex h = 0; h < model.size(); ++h) {
        double term = model.errors().at(h, k);
        for (const Vertex t : targets) term *= path_weight_sum(model, h, t);
        total += term;
    }
    return total;
}

// Total-effect matrix B = (I - Lambda)^{-T} so that X = B eps.
inline Eigen::MatrixXd total_effects(const PolytreeModel& model) {
    const auto p = static_cast<Eigen::Index>(model.size());
    Eigen::MatrixXd lambda = Eigen::MatrixXd::Zero(p, p);
    for (const auto& e : model.structure().edges()) lambda(e.parent, e.child) = e.lambda;
    return (Eigen::MatrixXd::Identity(p, p) - lambda).inverse().transpose();
}

// Exact E[prod_r X_{i_r}] for mean-zero errors with the model's cumulants
// (orders <= 4), by expanding X = B eps over all error index tuples.
class ExactMoments {
public:
    explicit ExactMoments(const PolytreeModel& model) : model_(model), b_(total_effects(model)) {}

    double operator()(std::span<const Vertex> idx) const {
        const std::size_t k = idx.size();
        const std::size_t p = model_.size();
        if (k == 0) return 1.0;
        std::vector<Vertex> h(k, 0);
        double total = 0.0;
        for (;;) {
            double coefficient = 1.0;
            for (std::size_t r = 0; r < k; ++r) coefficient *= b_(idx[r], h[r]);
            if (coefficient != 0.0) total += coefficient * error_moment(h);
            std::size_t r = 0;
            while (r < k && ++h[r] == p) h[r++] = 0;
            if (r == k) break;
        }
        return total;
    }

private:
    double raw_error_moment(Vertex v, int order) const {
        const auto& e = model_.errors();
        switch (order) {
        case 0: return 1.0;
        case 1: return 0.0;
        case 2: return e.at(v, 2);
        case 3: return e.max_order() >= 3 ? e.at(v, 3) : 0.0;
        case 4: return (e.max_order() >= 4 ? e.at(v, 4) : 0.0) + 3.0 * e.at(v, 2) * e.at(v, 2);
        default: throw std::logic_error("moment order > 4");
        }
    }
    double error_moment(const std::vector<Vertex>& h) const {
        std::map<Vertex, int> counts;
        for (const Vertex v : h) ++counts[v];
        double m = 1.0;
        for (const auto& [v, c] : counts) m *= raw_error_moment(v, c);
        return m;
    }

    const PolytreeModel& model_;
    Eigen::MatrixXd b_;
};

// Fisher's univariate k-statistics from raw power sums S_r = sum x^r.
inline double fisher_k(std::span<const double> x, int k) {
    const double n = static_cast<double>(x.size());
    double s1 = 0, s2 = 0, s3 = 0, s4 = 0;
    for (const double v : x) {
        s1 += v;
        s2 += v * v;
        s3 += v * v * v;
        s4 += v * v * v * v;
    }
    switch (k) {
    case 2: return (n * s2 - s1 * s1) / (n * (n - 1));
    case 3: return (2 * s1 * s1 * s1 - 3 * n * s1 * s2 + n * n * s3) / (n * (n - 1) * (n - 2));
    case 4:
        return (-6 * std::pow(s1, 4) + 12 * n * s1 * s1 * s2 - 3 * n * (n - 1) * s2 * s2 - 4 * n * (n + 1) * s1 * s3 +
                n * n * (n + 1) * s4) /
               (n * (n - 1) * (n - 2) * (n - 3));
    default: throw std::logic_error("order");
    }
}

// Joint k-statistic with m copies of x and k - m copies of y by polarisation:
// fisher_k(x + t y) = sum_a C(k, a) t^(k - a) K_a; fit at t = 0..k.
inline double polarized_k(std::span<const double> x, std::span<const double> y, int m, int k) {
    Eigen::MatrixXd vandermonde(k + 1, k + 1);
    Eigen::VectorXd rhs(k + 1);
    std::vector<double> z(x.size());
    for (int t = 0; t <= k; ++t) {
        for (std::size_t s = 0; s < x.size(); ++s) z[s] = x[s] + t * y[s];
        rhs(t) = fisher_k(z, k);
        for (int d = 0; d <= k; ++d) vandermonde(t, d) = std::pow(static_cast<double>(t), d);
    }
    const Eigen::VectorXd coef = vandermonde.fullPivLu().solve(rhs);
    double binom = 1.0;
    for (int r = 1; r <= m; ++r) binom = binom * (k - m + r) / r;
    return coef(k - m) / binom;
}

inline Dataset dataset_from_columns(const std::vector<std::vector<double>>& columns) {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(columns.front().size()), static_cast<Eigen::Index>(columns.size()));
    for (std::size_t c = 0; c < columns.size(); ++c)
        for (std::size_t r = 0; r < columns[c].size(); ++r)
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = columns[c][r];
    return Dataset(std::move(m));
}

} // namespace polytree::testing
