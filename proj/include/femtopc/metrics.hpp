#pragma once

// Throughput metrics over drops: DRMT, ARFT, percentile user throughput and
// normal-approximation confidence intervals.

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "femtopc/units.hpp"

namespace femtopc {

// Degradation ratio of macrocell throughput.
inline double drmt(double t_m0, double t_m)
{
    if (!(t_m0 > 0.0)) throw DomainError("drmt: reference macro throughput must be positive");
    return (t_m0 - t_m) / t_m0;
}

// Achievement ratio of femtocell throughput.
inline double arft(double t_f, double t_f0)
{
    if (!(t_f0 > 0.0)) throw DomainError("arft: reference femto throughput must be positive");
    return t_f / t_f0;
}

// Empirical p-quantile, linear interpolation between order statistics
// (h = (n - 1) p).
inline double percentile_user_throughput(std::vector<double> values, double p)
{
    if (values.empty()) throw std::invalid_argument("percentile_user_throughput: empty sample");
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("percentile_user_throughput: p outside [0, 1]");
    std::sort(values.begin(), values.end());
    const double h = (static_cast<double>(values.size()) - 1.0) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

struct Estimate {
    double value = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::size_t n = 0;
};

inline constexpr double kZ95 = 1.959963984540054;

inline Estimate mean_ci(std::span<const double> xs)
{
    Estimate e;
    e.n = xs.size();
    if (xs.empty()) return e;
    double sum = 0.0;
    for (double x : xs) sum += x;
    const double mean = sum / static_cast<double>(xs.size());
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    const double sd = xs.size() > 1 ? std::sqrt(ss / static_cast<double>(xs.size() - 1)) : 0.0;
    const double half = kZ95 * sd / std::sqrt(static_cast<double>(xs.size()));
    e.value = mean;
    e.ci_low = mean - half;
    e.ci_high = mean + half;
    return e;
}

// DRMT from per-drop paired macro throughputs.  The point value is the ratio
// of drop-averaged throughputs; the interval comes from the per-drop
// differences scaled by the mean reference.
inline Estimate paired_drmt(std::span<const double> t_m0, std::span<const double> t_m)
{
    if (t_m0.size() != t_m.size()) throw std::invalid_argument("paired_drmt: size mismatch");
    const Estimate ref = mean_ci(t_m0);
    std::vector<double> d(t_m0.size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = (t_m0[i] - t_m[i]) / ref.value;
    Estimate e = mean_ci(d);
    e.value = drmt(ref.value, mean_ci(t_m).value);
    return e;
}

inline Estimate paired_arft(std::span<const double> t_f, std::span<const double> t_f0)
{
    if (t_f0.size() != t_f.size()) throw std::invalid_argument("paired_arft: size mismatch");
    const Estimate ref = mean_ci(t_f0);
    std::vector<double> a(t_f.size());
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = t_f[i] / ref.value;
    Estimate e = mean_ci(a);
    e.value = arft(mean_ci(t_f).value, ref.value);
    return e;
}

// Quantile with a distribution-free interval: order statistics at ranks
// n p -/+ z sqrt(n p (1 - p)).
inline Estimate percentile_ci(const std::vector<double>& values, double p)
{
    Estimate e;
    e.n = values.size();
    if (values.empty()) return e;
    e.value = percentile_user_throughput(values, p);
    const double n = static_cast<double>(values.size());
    const double half = kZ95 * std::sqrt(n * p * (1.0 - p));
    const double lo_p = std::clamp((n * p - half) / n, 0.0, 1.0);
    const double hi_p = std::clamp((n * p + half) / n, 0.0, 1.0);
    e.ci_low = percentile_user_throughput(values, lo_p);
    e.ci_high = percentile_user_throughput(values, hi_p);
    return e;
}

// Spearman rank correlation with tie-averaged ranks.
inline double spearman(std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("spearman: need two equal-length samples");
    auto ranks = [](std::span<const double> v) {
        std::vector<std::size_t> idx(v.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
        std::vector<double> r(v.size());
        for (std::size_t i = 0; i < idx.size();) {
            std::size_t j = i;
            while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
            const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
            for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
            i = j + 1;
        }
        return r;
    };
    const auto rx = ranks(x);
    const auto ry = ranks(y);
    const Estimate mx = mean_ci(rx), my = mean_ci(ry);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        sxy += (rx[i] - mx.value) * (ry[i] - my.value);
        sxx += (rx[i] - mx.value) * (rx[i] - mx.value);
        syy += (ry[i] - my.value) * (ry[i] - my.value);
    }
    if (sxx == 0.0 || syy == 0.0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

} // namespace femtopc
