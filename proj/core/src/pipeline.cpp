#include "polytree/pipeline.hpp"

#include <chrono>

#include "polytree/error.hpp"

namespace polytree {

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point start) { return std::chrono::duration<double>(Clock::now() - start).count(); }

} // namespace

LearnedGraph orient_sample(const Dataset& data, const CorrelationMatrix& corr, const UndirectedTree& skeleton,
                           Algorithm algorithm, int max_order, double threshold, unsigned workers, bool raw_scale) {
    const SampleProvider provider(data, &corr);
    OrientOptions options;
    options.max_order = max_order;
    options.mode = Mode::Sample;
    options.threshold = threshold;
    options.workers = workers;
    options.standardize = !raw_scale;
    return orient(algorithm, skeleton, provider, options);
}

LearnResult learn_polytree(const Dataset& data, const LearnOptions& options) {
    if (options.max_order < 3 || options.max_order > 4)
        throw InvalidArgument("unsupported cumulant order K = " + std::to_string(options.max_order) +
                              " (supported: 3, 4)");
    if (data.samples() < static_cast<std::size_t>(options.max_order) + 1)
        throw InvalidArgument("order-" + std::to_string(options.max_order) + " learning needs at least " +
                              std::to_string(options.max_order + 1) + " samples, got " +
                              std::to_string(data.samples()));
    if (data.variables() < 2) throw InvalidArgument("learning needs at least 2 variables");
    if (options.threshold && !(*options.threshold > 0.0 && *options.threshold < 1.0))
        throw InvalidArgument("independence threshold must lie in (0, 1)");

    LearnResult result;
    auto start = Clock::now();
    const auto corr = sample_correlation_matrix(
        data, {.workers = options.workers, .reduced_precision_above = options.reduced_precision_above});
    result.seconds.correlation = since(start);

    start = Clock::now();
    result.skeleton = chow_liu(corr);
    result.seconds.kruskal = since(start);

    result.threshold_auto = !options.threshold.has_value();
    result.threshold = options.threshold ? *options.threshold : default_threshold(result.skeleton);

    start = Clock::now();
    result.graph = orient_sample(data, corr, result.skeleton, options.algorithm, options.max_order, result.threshold,
                                 options.workers, options.raw_scale);
    result.seconds.orientation = since(start);
    return result;
}

} // namespace polytree
