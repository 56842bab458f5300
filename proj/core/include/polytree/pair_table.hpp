#pragma once

#include <cstddef>
#include <vector>

#include "polytree/graph.hpp"

namespace polytree {

// Joint cumulants of one ordered variable pair (i, j): entry (m, k) is the
// order-k cumulant whose first m indices are i and remaining k - m are j, for
// 2 <= k <= K and 0 <= m <= k. (m, k) = (k, k) is the diagonal cumulant of i
// and (0, k) the diagonal cumulant of j.
class PairCumulantTable {
public:
    PairCumulantTable(Vertex i, Vertex j, int max_order);

    [[nodiscard]] Vertex first() const noexcept { return i_; }
    [[nodiscard]] Vertex second() const noexcept { return j_; }
    [[nodiscard]] int max_order() const noexcept { return max_order_; }

    [[nodiscard]] double at(int m, int k) const { return values_[index(m, k)]; }
    double& at(int m, int k) { return values_[index(m, k)]; }

    // Same cumulants viewed from (j, i): swapped().at(m, k) == at(k - m, k).
    [[nodiscard]] PairCumulantTable swapped() const;

    // Multiply every entry by `factor`.
    void scale(double factor) noexcept;

    // Cumulants of (X_i / sd_i, X_j / sd_j), with the standard deviations
    // read from the order-2 diagonal entries. Throws DataError when either
    // variance is not positive.
    [[nodiscard]] PairCumulantTable standardized() const;

private:
    [[nodiscard]] std::size_t index(int m, int k) const;

    Vertex i_;
    Vertex j_;
    int max_order_;
    std::vector<double> values_;
};

} // namespace polytree
