#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "polytree/graph.hpp"
#include "polytree/pair_table.hpp"

namespace polytree {

// n samples (rows) by p variables (columns); column-major so each variable is
// contiguous.
class Dataset {
public:
    Dataset() = default;
    explicit Dataset(Eigen::MatrixXd values, std::vector<std::string> names = {});

    [[nodiscard]] std::size_t samples() const noexcept { return static_cast<std::size_t>(values_.rows()); }
    [[nodiscard]] std::size_t variables() const noexcept { return static_cast<std::size_t>(values_.cols()); }
    [[nodiscard]] const Eigen::MatrixXd& values() const noexcept { return values_; }
    [[nodiscard]] const std::vector<std::string>& names() const noexcept { return names_; }
    [[nodiscard]] std::span<const double> column(Vertex v) const;

private:
    Eigen::MatrixXd values_;
    std::vector<std::string> names_;
};

// Reads comma-separated values. The first row is treated as a header when any
// of its fields is non-numeric. Lines starting with '#' are skipped.
[[nodiscard]] Dataset read_csv(std::istream& in);
void write_csv(std::ostream& out, const Dataset& data);

enum class StoragePrecision { Double, Single };

// Symmetric correlation matrix with unit diagonal, stored as the packed
// strict upper triangle.
class CorrelationMatrix {
public:
    CorrelationMatrix() = default;
    CorrelationMatrix(std::size_t p, StoragePrecision precision);

    [[nodiscard]] std::size_t size() const noexcept { return p_; }
    [[nodiscard]] StoragePrecision precision() const noexcept { return precision_; }
    [[nodiscard]] double at(Vertex i, Vertex j) const;
    void set(Vertex i, Vertex j, double value);

private:
    [[nodiscard]] std::size_t index(Vertex i, Vertex j) const noexcept;

    std::size_t p_ = 0;
    StoragePrecision precision_ = StoragePrecision::Double;
    std::vector<double> full_;
    std::vector<float> reduced_;
};

struct CorrelationOptions {
    unsigned workers = 1;
    // Single precision storage kicks in above this many variables.
    std::size_t reduced_precision_above = 8000;
};

// Pearson correlations from unbiased sample covariances. Throws DataError on a
// constant column and InvalidArgument when n < 2.
[[nodiscard]] CorrelationMatrix sample_correlation_matrix(const Dataset& data,
                                                          const CorrelationOptions& options = {});

// Unbiased joint cumulant estimate (k-statistic) of order k in {2, 3, 4} for
// the index multiset with m copies of i and k - m copies of j. i == j gives
// the univariate k-statistic.
[[nodiscard]] double k_statistic(const Dataset& data, Vertex i, Vertex j, int m, int k);

// All k-statistics of the pair (i, j) up to order K in {3, 4}, from a single
// pass over the two columns. Entry-for-entry identical to k_statistic.
[[nodiscard]] PairCumulantTable pair_cumulant_table(const Dataset& data, Vertex i, Vertex j, int max_order);

using MomentProvider = std::function<double(std::span<const Vertex>)>;

// Joint cumulant of the index multiset by the partition formula
// sum over set partitions of (-1)^(L-1) (L-1)! prod_blocks E[prod X].
// Supports up to six indices.
[[nodiscard]] double cumulant_from_moments(const MomentProvider& moments, std::span<const Vertex> indices);

} // namespace polytree
