#ifndef DNR_SMOOTHING_HPP
#define DNR_SMOOTHING_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"

namespace dnr {

/// How a history of statistic matrices is reduced to one matrix for forecasting.
/// None uses only the most recent window's statistics.
enum class SmootherKind { Mean, Median, Min, Max, Mode, None };

inline const char* smoother_name(SmootherKind k)
{
    switch (k) {
        case SmootherKind::Mean: return "mean";
        case SmootherKind::Median: return "median";
        case SmootherKind::Min: return "min";
        case SmootherKind::Max: return "max";
        case SmootherKind::Mode: return "mode";
        case SmootherKind::None: return "none";
    }
    return "?";
}

inline SmootherKind parse_smoother(const std::string& s)
{
    for (auto k : {SmootherKind::Mean, SmootherKind::Median, SmootherKind::Min, SmootherKind::Max, SmootherKind::Mode,
                   SmootherKind::None})
        if (s == smoother_name(k)) return k;
    throw SpecError("unknown smoother '" + s + "' (expected mean|median|min|max|mode|none)");
}

/// Silverman's rule of thumb, 0.9 min(sd, IQR/1.34) n^(-1/5), falling back to
/// sd, then |x_0|, then 1 when the spread estimate is zero.
inline double silverman_bandwidth(std::vector<double> x)
{
    const std::size_t n = x.size();
    std::sort(x.begin(), x.end());
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= double(n);
    double var = 0.0;
    for (double v : x) var += (v - mean) * (v - mean);
    const double sd = n > 1 ? std::sqrt(var / double(n - 1)) : 0.0;
    auto quantile = [&](double q) {
        const double h = (double(n) - 1.0) * q;
        const auto lo = static_cast<std::size_t>(std::floor(h));
        const auto hi = std::min(lo + 1, n - 1);
        return x[lo] + (h - double(lo)) * (x[hi] - x[lo]);
    };
    double lo = std::min(sd, (quantile(0.75) - quantile(0.25)) / 1.34);
    if (!(lo > 0)) lo = sd;
    if (!(lo > 0)) lo = std::abs(x.front());
    if (!(lo > 0)) lo = 1.0;
    return 0.9 * lo * std::pow(double(n), -0.2);
}

/// Argmax of a Gaussian KDE evaluated on a 512-point grid spanning [min, max].
/// A constant sample returns that constant; ties resolve to the lowest grid point.
inline double kde_mode(const std::vector<double>& sample)
{
    if (sample.empty()) throw InputError("empty sample");
    auto [mn, mx] = std::minmax_element(sample.begin(), sample.end());
    if (*mn == *mx) return *mn;
    // distinct values with multiplicities keep the cost proportional to the support
    std::vector<double> sorted = sample;
    std::sort(sorted.begin(), sorted.end());
    std::vector<std::pair<double, double>> weighted;
    for (double v : sorted) {
        if (!weighted.empty() && weighted.back().first == v) weighted.back().second += 1.0;
        else weighted.emplace_back(v, 1.0);
    }
    const double h = silverman_bandwidth(sample);
    constexpr std::size_t grid = 512;
    double best = *mn, best_density = -1.0;
    for (std::size_t g = 0; g < grid; ++g) {
        const double x = *mn + (*mx - *mn) * double(g) / double(grid - 1);
        double dens = 0.0;
        for (const auto& [v, w] : weighted) {
            const double z = (x - v) / h;
            dens += w * std::exp(-0.5 * z * z);
        }
        if (dens > best_density) {
            best_density = dens;
            best = x;
        }
    }
    return best;
}

/// Element-wise reduction of congruent matrices (flattened). `history` is in
/// time order, oldest first; `window` > 0 restricts it to the last `window`
/// entries.
inline std::vector<double> smooth_stats(const std::vector<std::vector<double>>& history, SmootherKind kind,
                                        std::size_t window = 0)
{
    if (history.empty()) throw InputError("statistic history is empty");
    const std::size_t size = history.front().size();
    for (const auto& m : history)
        if (m.size() != size) throw InputError("statistic matrices differ in shape");
    const std::size_t first = (window > 0 && window < history.size()) ? history.size() - window : 0;
    const std::size_t count = history.size() - first;

    if (kind == SmootherKind::None) return history.back();
    std::vector<double> out(size, 0.0);
    if (kind == SmootherKind::Mean) {
        for (std::size_t t = first; t < history.size(); ++t)
            for (std::size_t e = 0; e < size; ++e) out[e] += history[t][e];
        for (double& v : out) v /= double(count);
        return out;
    }
    std::vector<double> cell(count);
    for (std::size_t e = 0; e < size; ++e) {
        for (std::size_t t = 0; t < count; ++t) cell[t] = history[first + t][e];
        switch (kind) {
            case SmootherKind::Min: out[e] = *std::min_element(cell.begin(), cell.end()); break;
            case SmootherKind::Max: out[e] = *std::max_element(cell.begin(), cell.end()); break;
            case SmootherKind::Median: {
                std::sort(cell.begin(), cell.end());
                out[e] = count % 2 ? cell[count / 2] : 0.5 * (cell[count / 2 - 1] + cell[count / 2]);
                break;
            }
            case SmootherKind::Mode: out[e] = kde_mode(cell); break;
            default: break;
        }
    }
    return out;
}

/// Smoothed per-dyad edge statistics.
inline std::vector<double> smooth_edge_stats(const std::vector<std::vector<double>>& history, SmootherKind kind,
                                             std::size_t window = 0)
{
    return smooth_stats(history, kind, window);
}

/// Smoothed per-vertex statistics. Rows of vertices absent from a window are
/// expected to be zero already, so absence is averaged in as zero.
inline std::vector<double> smooth_vertex_stats(const std::vector<std::vector<double>>& history, SmootherKind kind,
                                               std::size_t window = 0)
{
    return smooth_stats(history, kind, window);
}

/// Incremental smoother: keeps the history and a running sum so the Mean case
/// costs O(size) per step. Other kinds reduce the stored history.
class StatHistory {
public:
    StatHistory(SmootherKind kind, std::size_t window) : kind_(kind), window_(window) {}

    void push(std::vector<double> m)
    {
        if (!history_.empty() && m.size() != history_.front().size())
            throw InputError("statistic matrices differ in shape");
        if (sum_.empty()) sum_.assign(m.size(), 0.0);
        for (std::size_t e = 0; e < m.size(); ++e) sum_[e] += m[e];
        history_.push_back(std::move(m));
        if (window_ > 0 && history_.size() > window_) {
            const auto& old = history_[history_.size() - window_ - 1];
            for (std::size_t e = 0; e < sum_.size(); ++e) sum_[e] -= old[e];
        }
    }

    std::size_t size() const noexcept { return history_.size(); }

    std::vector<double> smoothed() const
    {
        if (kind_ != SmootherKind::Mean) return smooth_stats(history_, kind_, window_);
        if (history_.empty()) throw InputError("statistic history is empty");
        // recompute exactly for short histories; the running sum is otherwise used
        const std::size_t count = (window_ > 0 && window_ < history_.size()) ? window_ : history_.size();
        std::vector<double> out(sum_);
        for (double& v : out) v /= double(count);
        return out;
    }

private:
    SmootherKind kind_;
    std::size_t window_;
    std::vector<std::vector<double>> history_;
    std::vector<double> sum_;
};

}  // namespace dnr

#endif  // DNR_SMOOTHING_HPP
