#include "polytree/experiment.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <string>

#include "polytree/error.hpp"
#include "polytree/format.hpp"
#include "polytree/parallel.hpp"
#include "polytree/rng.hpp"

namespace polytree {

std::string_view to_string(ThresholdSelection selection) noexcept {
    switch (selection) {
    case ThresholdSelection::CellMean: return "cell-mean";
    case ThresholdSelection::PerReplicate: return "per-replicate";
    case ThresholdSelection::All: return "all";
    }
    return "unknown";
}

ThresholdSelection parse_threshold_selection(std::string_view token) {
    if (token == "cell-mean") return ThresholdSelection::CellMean;
    if (token == "per-replicate") return ThresholdSelection::PerReplicate;
    if (token == "all") return ThresholdSelection::All;
    throw InvalidArgument("unknown threshold selection '" + std::string(token) +
                          "' (expected cell-mean, per-replicate or all)");
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_list(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto comma = s.find(',', start);
        const auto item = trim(s.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
        if (!item.empty()) out.push_back(item);
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

double to_double(std::string_view key, std::string_view text) {
    double v = 0.0;
    if (!parse_double(text, v))
        throw InvalidArgument("config key '" + std::string(key) + "': '" + std::string(text) + "' is not a number");
    return v;
}

std::uint64_t to_unsigned(std::string_view key, std::string_view text) {
    const double v = to_double(key, text);
    if (v < 0.0 || v != std::floor(v) || v > 1.8e19)
        throw InvalidArgument("config key '" + std::string(key) + "' needs a non-negative integer");
    return static_cast<std::uint64_t>(v);
}

bool to_bool(std::string_view key, std::string_view text) {
    if (text == "1" || text == "true" || text == "yes") return true;
    if (text == "0" || text == "false" || text == "no") return false;
    throw InvalidArgument("config key '" + std::string(key) + "' needs true or false");
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

struct CellKey {
    std::size_t p;
    std::size_t n;
    double gaussian_fraction;
};

std::vector<ResultRow> run_replicate(const ExperimentConfig& config, const CellKey& cell, std::size_t replicate) {
    ResultRow base;
    base.p = cell.p;
    base.n = cell.n;
    base.max_order = config.max_order;
    base.family = config.errors.family;
    base.gaussian_fraction = cell.gaussian_fraction;
    base.replicate = replicate;

    std::vector<ResultRow> rows;
    auto fail_all = [&](const std::string& why) {
        for (const auto a : config.algorithms) {
            ResultRow row = base;
            row.algorithm = a;
            row.failure = why;
            rows.push_back(row);
        }
    };

    // Model draws depend on (seed, p, replicate) only, so every ratio and
    // Gaussian fraction of a replicate shares one graph and one set of
    // coefficients.
    const std::uint64_t model_seed = derive_seed(config.seed, {cell.p, replicate});
    std::optional<DirectedTree> structure;
    std::optional<Dataset> data;
    try {
        structure = random_polytree(random_tree(cell.p, model_seed), model_seed);
        ErrorSpec spec = config.errors;
        spec.gaussian_fraction = cell.gaussian_fraction;
        const auto errors = draw_node_errors(cell.p, spec, model_seed);
        data = sample_dataset(*structure, errors, cell.n, derive_seed(model_seed, {cell.n}), config.center_errors);
    } catch (const Error& e) {
        fail_all(e.what());
        return rows;
    }

    const auto start = Clock::now();
    CorrelationMatrix corr;
    UndirectedTree skeleton;
    try {
        corr = sample_correlation_matrix(*data);
        skeleton = chow_liu(corr);
    } catch (const Error& e) {
        fail_all(e.what());
        return rows;
    }
    const double skeleton_seconds = seconds_since(start);
    const SampleProvider provider(*data, &corr);
    const auto truth = structure->directed_edges();

    for (const auto algorithm : config.algorithms) {
        std::vector<std::optional<double>> thresholds{std::nullopt};
        if (algorithm != Algorithm::Pairwise) {
            thresholds.clear();
            if (config.threshold_grid.empty())
                thresholds.emplace_back(default_threshold(skeleton));
            else
                thresholds.assign(config.threshold_grid.begin(), config.threshold_grid.end());
        }
        for (const auto& threshold : thresholds) {
            ResultRow row = base;
            row.algorithm = algorithm;
            row.threshold = threshold;
            OrientOptions options;
            options.max_order = config.max_order;
            options.mode = Mode::Sample;
            options.threshold = threshold.value_or(0.0);
            const auto t0 = Clock::now();
            try {
                const auto learned = orient(algorithm, skeleton, provider, options);
                row.seconds = skeleton_seconds + seconds_since(t0);
                row.report = structural_hamming(cell.p, truth, learned);
            } catch (const Error& e) {
                row.seconds = skeleton_seconds + seconds_since(t0);
                row.failure = e.what();
            }
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

// Keeps one threshold per (algorithm[, replicate]) according to `selection`.
std::vector<ResultRow> select_thresholds(std::vector<ResultRow> rows, ThresholdSelection selection) {
    if (selection == ThresholdSelection::All) return rows;
    std::vector<bool> keep(rows.size(), true);

    if (selection == ThresholdSelection::PerReplicate) {
        std::map<std::pair<std::size_t, int>, std::size_t> best;
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (!rows[r].threshold) continue;
            keep[r] = false;
            const auto key = std::make_pair(rows[r].replicate, static_cast<int>(rows[r].algorithm));
            const auto it = best.find(key);
            const double shd = rows[r].report ? rows[r].report->normalized : std::numeric_limits<double>::infinity();
            if (it == best.end()) {
                best.emplace(key, r);
                continue;
            }
            const auto& incumbent = rows[it->second];
            const double best_shd =
                incumbent.report ? incumbent.report->normalized : std::numeric_limits<double>::infinity();
            if (shd < best_shd) it->second = r;
        }
        for (const auto& [key, r] : best) keep[r] = true;
    } else {
        // Mean SHD per (algorithm, threshold) over successful replicates.
        std::map<std::pair<int, double>, std::pair<double, std::size_t>> totals;
        for (const auto& row : rows) {
            if (!row.threshold) continue;
            auto& t = totals[{static_cast<int>(row.algorithm), *row.threshold}];
            if (row.report) {
                t.first += row.report->normalized;
                ++t.second;
            }
        }
        std::map<int, std::pair<double, double>> chosen; // algorithm -> (threshold, mean)
        for (const auto& [key, t] : totals) {
            const double mean = t.second ? t.first / static_cast<double>(t.second) : std::numeric_limits<double>::infinity();
            const auto it = chosen.find(key.first);
            if (it == chosen.end() || mean < it->second.second) chosen[key.first] = {key.second, mean};
        }
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (!rows[r].threshold) continue;
            keep[r] = chosen.at(static_cast<int>(rows[r].algorithm)).first == *rows[r].threshold;
        }
    }

    std::vector<ResultRow> out;
    for (std::size_t r = 0; r < rows.size(); ++r)
        if (keep[r]) out.push_back(std::move(rows[r]));
    return out;
}

} // namespace

std::vector<double> parse_threshold_grid(std::string_view text) {
    text = trim(text);
    std::vector<double> grid;
    if (text.find(':') == std::string_view::npos) {
        for (const auto item : split_list(text)) grid.push_back(to_double("threshold_grid", item));
    } else {
        const auto first = text.find(':');
        const auto second = text.find(':', first + 1);
        if (second == std::string_view::npos) throw InvalidArgument("threshold grid must be lo:hi:step");
        const double lo = to_double("threshold_grid", text.substr(0, first));
        const double hi = to_double("threshold_grid", text.substr(first + 1, second - first - 1));
        const double step = to_double("threshold_grid", text.substr(second + 1));
        if (!(step > 0.0) || !(lo <= hi)) throw InvalidArgument("threshold grid needs lo <= hi and step > 0");
        for (std::size_t i = 0;; ++i) {
            // Rounded to 12 decimals so 0.05 + 2 * 0.05 prints as 0.15.
            const double v = std::round((lo + static_cast<double>(i) * step) * 1e12) / 1e12;
            if (v > hi + 1e-9 * step) break;
            grid.push_back(v);
        }
    }
    for (const double v : grid)
        if (!(v > 0.0 && v < 1.0)) throw InvalidArgument("threshold grid values must lie in (0, 1)");
    return grid;
}

void ExperimentConfig::validate() const {
    if (p_values.empty()) throw InvalidArgument("experiment needs at least one p");
    if (ratios.empty()) throw InvalidArgument("experiment needs at least one n/p ratio");
    if (gaussian_fractions.empty()) throw InvalidArgument("experiment needs at least one gaussian fraction");
    if (algorithms.empty()) throw InvalidArgument("experiment needs at least one algorithm");
    if (max_order < 3 || max_order > 4) throw InvalidArgument("K must be 3 or 4");
    errors.validate();
    for (const double f : gaussian_fractions)
        if (!(f >= 0.0 && f <= 1.0)) throw InvalidArgument("gaussian fractions must lie in [0, 1]");
    for (const double t : threshold_grid)
        if (!(t > 0.0 && t < 1.0)) throw InvalidArgument("threshold grid values must lie in (0, 1)");
    for (const auto p : p_values) {
        if (p < 2) throw InvalidArgument("p must be at least 2");
        for (const double ratio : ratios) {
            if (!(ratio > 0.0)) throw InvalidArgument("n/p ratios must be positive");
            const auto n = std::llround(ratio * static_cast<double>(p));
            if (n < max_order + 1)
                throw InvalidArgument("n = " + std::to_string(n) + " (p = " + std::to_string(p) +
                                      ") is below K + 1 = " + std::to_string(max_order + 1));
        }
    }
}

void apply_config_value(ExperimentConfig& config, std::string_view key, std::string_view value) {
    key = trim(key);
    value = trim(value);
    if (key == "p") {
        config.p_values.clear();
        for (const auto item : split_list(value)) config.p_values.push_back(to_unsigned(key, item));
    } else if (key == "ratios") {
        config.ratios.clear();
        for (const auto item : split_list(value)) config.ratios.push_back(to_double(key, item));
    } else if (key == "error") {
        config.errors.family = parse_error_family(value);
    } else if (key == "gauss_fraction") {
        config.gaussian_fractions.clear();
        for (const auto item : split_list(value)) config.gaussian_fractions.push_back(to_double(key, item));
    } else if (key == "K") {
        config.max_order = static_cast<int>(to_unsigned(key, value));
    } else if (key == "algorithms") {
        config.algorithms.clear();
        for (const auto item : split_list(value)) config.algorithms.push_back(parse_algorithm(item));
    } else if (key == "replicates") {
        config.replicates = to_unsigned(key, value);
    } else if (key == "seed") {
        config.seed = to_unsigned(key, value);
    } else if (key == "threshold_grid") {
        config.threshold_grid = value.empty() ? std::vector<double>{} : parse_threshold_grid(value);
    } else if (key == "threshold_selection") {
        config.selection = parse_threshold_selection(value);
    } else if (key == "center_errors") {
        config.center_errors = to_bool(key, value);
    } else if (key == "workers") {
        config.workers = static_cast<unsigned>(to_unsigned(key, value));
    } else {
        throw InvalidArgument("unknown config key '" + std::string(key) + "'");
    }
}

ExperimentConfig read_experiment_config(std::istream& in) {
    ExperimentConfig config;
    std::size_t keys = 0;
    std::size_t line_number = 0;
    for (std::string line; std::getline(in, line);) {
        ++line_number;
        const auto hash = line.find('#');
        const std::string_view content = trim(std::string_view(line).substr(0, hash));
        if (content.empty()) continue;
        const auto eq = content.find('=');
        if (eq == std::string_view::npos)
            throw InvalidArgument("config line " + std::to_string(line_number) + ": expected 'key = value'");
        apply_config_value(config, content.substr(0, eq), content.substr(eq + 1));
        ++keys;
    }
    if (keys == 0) throw InvalidArgument("experiment config is empty");
    return config;
}

std::vector<ResultRow> run_experiment(const ExperimentConfig& config,
                                      const std::function<void(const std::vector<ResultRow>&)>& on_cell) {
    config.validate();
    std::vector<ResultRow> table;
    if (config.replicates == 0) return table;
    for (const auto p : config.p_values) {
        for (const double ratio : config.ratios) {
            for (const double fraction : config.gaussian_fractions) {
                const CellKey cell{p, static_cast<std::size_t>(std::llround(ratio * static_cast<double>(p))), fraction};
                std::vector<std::vector<ResultRow>> per_replicate(config.replicates);
                parallel_for(config.replicates, config.workers,
                             [&](std::size_t r) { per_replicate[r] = run_replicate(config, cell, r); });
                std::vector<ResultRow> rows;
                for (auto& rep : per_replicate)
                    for (auto& row : rep) rows.push_back(std::move(row));
                rows = select_thresholds(std::move(rows), config.selection);
                if (on_cell) on_cell(rows);
                table.insert(table.end(), rows.begin(), rows.end());
            }
        }
    }
    return table;
}

void write_results_header(std::ostream& out) {
    out << "algorithm,p,n,K,errorFamily,gaussFraction,threshold,replicate,shd,skeletonErrors,orientationErrors,seconds\n";
}

void write_result_row(std::ostream& out, const ResultRow& row) {
    out << to_string(row.algorithm) << ',' << row.p << ',' << row.n << ',' << row.max_order << ','
        << to_string(row.family) << ',' << format_double(row.gaussian_fraction) << ','
        << (row.threshold ? format_double(*row.threshold) : std::string()) << ',' << row.replicate << ',';
    if (row.report)
        out << format_double(row.report->normalized) << ',' << row.report->skeleton_errors() << ','
            << row.report->misoriented;
    else
        out << ",,";
    out << ',' << format_double(row.seconds) << '\n';
}

} // namespace polytree
