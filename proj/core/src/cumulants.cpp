#include "polytree/cumulants.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "polytree/error.hpp"
#include "polytree/parallel.hpp"

namespace polytree {

Dataset::Dataset(Eigen::MatrixXd values, std::vector<std::string> names)
    : values_(std::move(values)), names_(std::move(names)) {
    if (!names_.empty() && names_.size() != variables())
        throw InvalidArgument("dataset has " + std::to_string(variables()) + " columns but " +
                              std::to_string(names_.size()) + " names");
    if (!values_.allFinite()) throw DataError("dataset contains non-finite values");
}

std::span<const double> Dataset::column(Vertex v) const {
    if (v >= variables()) throw InvalidArgument("column " + std::to_string(v) + " out of range");
    return {values_.col(static_cast<Eigen::Index>(v)).data(), samples()};
}

CorrelationMatrix::CorrelationMatrix(std::size_t p, StoragePrecision precision) : p_(p), precision_(precision) {
    const std::size_t packed = p < 2 ? 0 : p * (p - 1) / 2;
    if (precision == StoragePrecision::Double)
        full_.assign(packed, 0.0);
    else
        reduced_.assign(packed, 0.0f);
}

std::size_t CorrelationMatrix::index(Vertex i, Vertex j) const noexcept {
    if (i > j) std::swap(i, j);
    const std::size_t a = i;
    return a * (2 * p_ - a - 1) / 2 + (j - a - 1);
}

double CorrelationMatrix::at(Vertex i, Vertex j) const {
    if (i >= p_ || j >= p_) throw InvalidArgument("correlation index out of range");
    if (i == j) return 1.0;
    const auto k = index(i, j);
    return precision_ == StoragePrecision::Double ? full_[k] : static_cast<double>(reduced_[k]);
}

void CorrelationMatrix::set(Vertex i, Vertex j, double value) {
    if (i >= p_ || j >= p_ || i == j) throw InvalidArgument("correlation index out of range");
    const auto k = index(i, j);
    if (precision_ == StoragePrecision::Double)
        full_[k] = value;
    else
        reduced_[k] = static_cast<float>(value);
}

namespace {

constexpr int kMaxStatisticOrder = 4;

double column_mean(std::span<const double> x) {
    double sum = 0.0;
    for (const double v : x) sum += v;
    return sum / static_cast<double>(x.size());
}

bool is_constant(std::span<const double> x) {
    return std::all_of(x.begin(), x.end(), [&](double v) { return v == x.front(); });
}

// Power sums S[a][b] = sum_s cx_s^a cy_s^b of centred columns for 2 <= a + b <= K.
// Powers are built by repeated multiplication from 1 so every caller forms
// bitwise-identical terms.
struct PowerSums {
    std::array<std::array<double, kMaxStatisticOrder + 1>, kMaxStatisticOrder + 1> s{};
};

PowerSums power_sums(std::span<const double> x, std::span<const double> y, int max_order) {
    const double mx = column_mean(x);
    const double my = column_mean(y);
    PowerSums out;
    std::array<double, kMaxStatisticOrder + 1> px{};
    std::array<double, kMaxStatisticOrder + 1> py{};
    for (std::size_t s = 0; s < x.size(); ++s) {
        const double cx = x[s] - mx;
        const double cy = y[s] - my;
        px[0] = 1.0;
        py[0] = 1.0;
        for (int a = 1; a <= max_order; ++a) {
            px[a] = px[a - 1] * cx;
            py[a] = py[a - 1] * cy;
        }
        for (int k = 2; k <= max_order; ++k)
            for (int a = 0; a <= k; ++a) out.s[a][k - a] += px[a] * py[k - a];
    }
    return out;
}

// Sum over the three pairings of (r, s, t, u) of S2_{rs} S2_{tu}, where the
// first `m` of the four indices are x and the rest y.
double pairing_sum(const PowerSums& sums, int m) {
    std::array<int, 4> is_x{};
    for (int r = 0; r < 4; ++r) is_x[r] = r < m ? 1 : 0;
    auto s2 = [&](int r, int t) { return sums.s[is_x[r] + is_x[t]][2 - is_x[r] - is_x[t]]; };
    return s2(0, 1) * s2(2, 3) + s2(0, 2) * s2(1, 3) + s2(0, 3) * s2(1, 2);
}

// k-statistic of order k for the multiset with m copies of x.
double k_statistic_from_sums(const PowerSums& sums, std::size_t samples, int m, int k) {
    const double n = static_cast<double>(samples);
    const double top = sums.s[m][k - m];
    switch (k) {
    case 2:
        return top / (n - 1.0);
    case 3:
        return n * top / ((n - 1.0) * (n - 2.0));
    case 4: {
        const double m4 = top / n;
        const double m22 = pairing_sum(sums, m) / (n * n);
        return n * n / ((n - 1.0) * (n - 2.0) * (n - 3.0)) * ((n + 1.0) * m4 - (n - 1.0) * m22);
    }
    default:
        throw InvalidArgument("k-statistics are implemented for orders 2..4, got " + std::to_string(k));
    }
}

double correlation_from_sums(double sij, double sii, double sjj, std::size_t samples) {
    const double d = static_cast<double>(samples) - 1.0;
    const double r = (sij / d) / std::sqrt((sii / d) * (sjj / d));
    return std::clamp(r, -1.0, 1.0);
}

void check_pair(const Dataset& data, Vertex i, Vertex j) {
    if (i >= data.variables() || j >= data.variables())
        throw InvalidArgument("variable index out of range (p = " + std::to_string(data.variables()) + ")");
}

} // namespace

double k_statistic(const Dataset& data, Vertex i, Vertex j, int m, int k) {
    check_pair(data, i, j);
    if (k < 2 || k > kMaxStatisticOrder)
        throw InvalidArgument("k-statistic order must be in [2, 4], got " + std::to_string(k));
    if (m < 0 || m > k) throw InvalidArgument("multiplicity m must be in [0, k]");
    if (data.samples() < static_cast<std::size_t>(k))
        throw InvalidArgument("order-" + std::to_string(k) + " k-statistic needs at least " + std::to_string(k) +
                              " samples, got " + std::to_string(data.samples()));
    return k_statistic_from_sums(power_sums(data.column(i), data.column(j), k), data.samples(), m, k);
}

PairCumulantTable pair_cumulant_table(const Dataset& data, Vertex i, Vertex j, int max_order) {
    check_pair(data, i, j);
    if (i == j) throw InvalidArgument("pair cumulant table needs two distinct variables");
    if (max_order < 3 || max_order > kMaxStatisticOrder)
        throw InvalidArgument("unsupported cumulant order " + std::to_string(max_order) + " (supported: 3, 4)");
    if (data.samples() < static_cast<std::size_t>(max_order))
        throw InvalidArgument("order-" + std::to_string(max_order) + " table needs at least " +
                              std::to_string(max_order) + " samples");
    const auto sums = power_sums(data.column(i), data.column(j), max_order);
    PairCumulantTable table(i, j, max_order);
    for (int k = 2; k <= max_order; ++k)
        for (int m = 0; m <= k; ++m) table.at(m, k) = k_statistic_from_sums(sums, data.samples(), m, k);
    return table;
}

CorrelationMatrix sample_correlation_matrix(const Dataset& data, const CorrelationOptions& options) {
    const std::size_t n = data.samples();
    const std::size_t p = data.variables();
    if (n < 2) throw InvalidArgument("correlations need at least 2 samples");

    // Row-major centred copy: row s holds sample s across all variables.
    std::vector<double> centred(n * p);
    std::vector<double> sum_sq(p, 0.0);
    for (Vertex v = 0; v < p; ++v) {
        const auto x = data.column(v);
        if (is_constant(x)) throw DataError("column " + std::to_string(v) + " is constant");
        const double mean = column_mean(x);
        double acc = 0.0;
        for (std::size_t s = 0; s < n; ++s) {
            const double c = x[s] - mean;
            centred[s * p + v] = c;
            acc += c * c;
        }
        if (!(acc > 0.0)) throw DataError("column " + std::to_string(v) + " has zero sample variance");
        sum_sq[v] = acc;
    }

    const auto precision =
        p > options.reduced_precision_above ? StoragePrecision::Single : StoragePrecision::Double;
    CorrelationMatrix corr(p, precision);

    constexpr std::size_t kTile = 64;
    const std::size_t blocks = (p + kTile - 1) / kTile;
    std::vector<std::pair<std::size_t, std::size_t>> tiles;
    for (std::size_t a = 0; a < blocks; ++a)
        for (std::size_t b = a; b < blocks; ++b) tiles.emplace_back(a, b);

    // Each pair's cross-product is summed over samples in index order, so the
    // result does not depend on tiling or on the number of workers.
    parallel_for(tiles.size(), options.workers, [&](std::size_t t) {
        const std::size_t i0 = tiles[t].first * kTile;
        const std::size_t j0 = tiles[t].second * kTile;
        const std::size_t ni = std::min(kTile, p - i0);
        const std::size_t nj = std::min(kTile, p - j0);
        std::vector<double> acc(kTile * kTile, 0.0);
        for (std::size_t s = 0; s < n; ++s) {
            const double* row = centred.data() + s * p;
            for (std::size_t a = 0; a < ni; ++a) {
                const double ci = row[i0 + a];
                double* out = acc.data() + a * kTile;
                const double* cj = row + j0;
                for (std::size_t b = 0; b < nj; ++b) out[b] += ci * cj[b];
            }
        }
        for (std::size_t a = 0; a < ni; ++a) {
            for (std::size_t b = 0; b < nj; ++b) {
                const auto i = static_cast<Vertex>(i0 + a);
                const auto j = static_cast<Vertex>(j0 + b);
                if (j <= i) continue;
                corr.set(i, j, correlation_from_sums(acc[a * kTile + b], sum_sq[i], sum_sq[j], n));
            }
        }
    });
    return corr;
}

double cumulant_from_moments(const MomentProvider& moments, std::span<const Vertex> indices) {
    const std::size_t k = indices.size();
    if (k == 0 || k > 6) throw InvalidArgument("partition formula supports 1..6 indices");

    // Restricted growth strings enumerate set partitions of the positions.
    std::array<int, 6> block{};
    std::array<int, 6> running_max{};
    double total = 0.0;
    std::vector<Vertex> members;
    for (;;) {
        const int blocks = running_max[k - 1] + 1;
        double term = 1.0;
        for (int b = 0; b < blocks && term != 0.0; ++b) {
            members.clear();
            for (std::size_t r = 0; r < k; ++r)
                if (block[r] == b) members.push_back(indices[r]);
            term *= moments(members);
        }
        double coefficient = (blocks % 2 == 1) ? 1.0 : -1.0;
        for (int f = 2; f < blocks; ++f) coefficient *= f;
        total += coefficient * term;

        // Advance to the next restricted growth string.
        std::size_t r = k - 1;
        while (r > 0 && block[r] == running_max[r - 1] + 1) --r;
        if (r == 0) break;
        ++block[r];
        running_max[r] = std::max(running_max[r - 1], block[r]);
        for (std::size_t q = r + 1; q < k; ++q) {
            block[q] = 0;
            running_max[q] = running_max[r];
        }
    }
    return total;
}

} // namespace polytree
