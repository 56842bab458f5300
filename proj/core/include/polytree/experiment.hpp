#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "polytree/eval.hpp"
#include "polytree/orient.hpp"
#include "polytree/simulate.hpp"

namespace polytree {

// How PTO/TPO rows are reduced over the threshold grid.
//   cell-mean:     one threshold per (cell, algorithm), minimising mean SHD
//   per-replicate: best threshold chosen separately for every replicate
//   all:           every grid point is reported
enum class ThresholdSelection { CellMean, PerReplicate, All };

[[nodiscard]] std::string_view to_string(ThresholdSelection selection) noexcept;
[[nodiscard]] ThresholdSelection parse_threshold_selection(std::string_view token);

// "lo:hi:step", inclusive of hi up to rounding.
[[nodiscard]] std::vector<double> parse_threshold_grid(std::string_view text);

struct ExperimentConfig {
    std::vector<std::size_t> p_values{100};
    std::vector<double> ratios{1.0, 10.0, 100.0}; // n = round(ratio * p)
    ErrorSpec errors;
    std::vector<double> gaussian_fractions{0.0};
    int max_order = 3;
    std::vector<Algorithm> algorithms{Algorithm::Pairwise};
    std::size_t replicates = 10;
    std::uint64_t seed = 1;
    std::vector<double> threshold_grid; // empty: default_threshold per replicate
    ThresholdSelection selection = ThresholdSelection::CellMean;
    bool center_errors = false;
    unsigned workers = 1;

    // Throws InvalidArgument when a field is out of range.
    void validate() const;
};

// Flat "key = value" lines; list values are comma separated. Keys: p, ratios,
// error, gauss_fraction, K, algorithms, replicates, seed, threshold_grid,
// threshold_selection, center_errors, workers. '#' starts a comment.
[[nodiscard]] ExperimentConfig read_experiment_config(std::istream& in);
// Applies one key/value pair; throws InvalidArgument on an unknown key.
void apply_config_value(ExperimentConfig& config, std::string_view key, std::string_view value);

struct ResultRow {
    Algorithm algorithm = Algorithm::Pairwise;
    std::size_t p = 0;
    std::size_t n = 0;
    int max_order = 3;
    ErrorFamily family = ErrorFamily::Gamma;
    double gaussian_fraction = 0.0;
    std::optional<double> threshold;
    std::size_t replicate = 0;
    std::optional<ShdReport> report; // empty when the cell failed
    std::string failure;
    double seconds = 0.0;
};

// Runs every (p, ratio, gaussian fraction) cell in order. Replicates within a
// cell run on `workers` threads; rows are ordered by replicate then algorithm
// regardless of completion order. `on_cell` receives each finished cell's rows.
std::vector<ResultRow> run_experiment(const ExperimentConfig& config,
                                      const std::function<void(const std::vector<ResultRow>&)>& on_cell = {});

// CSV columns: algorithm,p,n,K,errorFamily,gaussFraction,threshold,replicate,
// shd,skeletonErrors,orientationErrors,seconds
void write_results_header(std::ostream& out);
void write_result_row(std::ostream& out, const ResultRow& row);

} // namespace polytree
