#pragma once

#include <optional>

#include "polytree/cumulants.hpp"
#include "polytree/orient.hpp"
#include "polytree/skeleton.hpp"

namespace polytree {

struct LearnOptions {
    Algorithm algorithm = Algorithm::Pairwise;
    int max_order = 3;
    // Unset: default_threshold of the learned skeleton.
    std::optional<double> threshold;
    unsigned workers = 1;
    std::size_t reduced_precision_above = 8000;
    // Compare minors of raw rather than standardized pair cumulants.
    bool raw_scale = false;
};

struct PhaseTimes {
    double correlation = 0.0;
    double kruskal = 0.0;
    double orientation = 0.0;
};

struct LearnResult {
    UndirectedTree skeleton;
    LearnedGraph graph;
    double threshold = 0.0;
    bool threshold_auto = false;
    PhaseTimes seconds;
};

// Correlation pass, Chow-Liu skeleton, then sample-mode orientation.
[[nodiscard]] LearnResult learn_polytree(const Dataset& data, const LearnOptions& options);

// Orientation only, reusing a skeleton and correlations already computed.
[[nodiscard]] LearnedGraph orient_sample(const Dataset& data, const CorrelationMatrix& corr,
                                         const UndirectedTree& skeleton, Algorithm algorithm, int max_order,
                                         double threshold, unsigned workers, bool raw_scale = false);

} // namespace polytree
