#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <thread>
#include <variant>
#include <vector>

#include "beamcoh/beam_splitter.hpp"
#include "beamcoh/coherence.hpp"
#include "beamcoh/states.hpp"

namespace beamcoh {

using SweepInput = std::variant<TwoModeState, CoherentPair, TmsvParams>;

struct SweepOptions {
    int grid_points = 721;
    double epsilon = 1e-10;      // truncation target for coherent inputs
    int threads = 0;             // 0 = automatic
    double refine_interval = 1e-8;
};

/// Coherence-vs-theta curve over [0, pi/2] with the refined optimum.
struct SweepResult {
    std::vector<double> thetas;
    std::vector<double> values;
    double best_theta = 0.0;
    double best_value = 0.0;
    double min_value = 0.0;
    Measure measure = Measure::L1;
    std::vector<double> co_optima;   // every refined theta within 1e-9 of the best value
    double truncation_bound = 0.0;   // certified bound at the best theta
};

struct GainReport {
    double gain_percent = 0.0;
    double c_max = 0.0;
    double c_min = 0.0;
};

namespace detail {

template <typename F>
inline void parallel_for(int n, int threads, F&& fn) {
    int t = threads > 0 ? threads
                        : static_cast<int>(std::min(8u, std::max(1u, std::thread::hardware_concurrency())));
    t = std::min(t, n);
    if (t <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(t));
    for (int w = 0; w < t; ++w) {
        pool.emplace_back([w, n, t, &fn] {
            for (int i = w; i < n; i += t) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

/// Golden-section maximization on [a,b]; shrinks the bracket below `tol`
/// without ever leaving it.
template <typename F>
inline std::pair<double, double> golden_max(F&& f, double a, double b, double tol) {
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    const double invphi2 = 1.0 - invphi;
    double h = b - a;
    double x1 = a + invphi2 * h, x2 = a + invphi * h;
    double f1 = f(x1), f2 = f(x2);
    while (h > tol) {
        if (f1 >= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            h = b - a;
            x1 = a + invphi2 * h;
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            h = b - a;
            x2 = a + invphi * h;
            f2 = f(x2);
        }
    }
    double xm = 0.5 * (a + b), fm = f(xm);
    if (f1 > fm) { xm = x1; fm = f1; }
    if (f2 > fm) { xm = x2; fm = f2; }
    return {xm, fm};
}

/// theta -> CoherenceReport evaluator for one sweep input.
inline std::function<CoherenceReport(double)> make_evaluator(const SweepInput& input,
                                                             Measure measure, double epsilon) {
    if (std::holds_alternative<TwoModeState>(input)) {
        const TwoModeState state = std::get<TwoModeState>(input);
        return [state, measure](double theta) {
            const TwoModeState out = apply(make_beam_splitter(theta), state);
            return measure == Measure::L1 ? l1_coherence(out) : entropy_coherence(out);
        };
    }
    if (std::holds_alternative<CoherentPair>(input)) {
        const CoherentPair pair = std::get<CoherentPair>(input);
        return [pair, measure, epsilon](double theta) {
            const CoherentPair out = apply_coherent(make_beam_splitter(theta), pair);
            const TwoModeState state = coherent_to_fock(out, epsilon);
            return measure == Measure::L1 ? l1_coherence(state) : entropy_coherence(state);
        };
    }
    const TmsvParams params = std::get<TmsvParams>(input);
    validate_tmsv(params);
    if (measure == Measure::L1) {
        return [params](double theta) { return tmsv_output_l1(params, make_beam_splitter(theta)); };
    }
    // Entropy path over the orthogonal |n,n> blocks.
    const int cap = tmsv_cap(params.xi, params.epsilon);
    const double entropy_tail = tmsv_tail(params.xi, cap).entropy_bound;
    return [params, cap, entropy_tail](double theta) {
        const BeamSplitter bs = make_beam_splitter(theta);
        const double scale2 = 1.0 - params.xi * params.xi;
        double value = 0.0;
        for (int n = 0; n <= cap; ++n) {
            const double weight2 = scale2 * std::pow(params.xi, 2.0 * n);
            for (const cplx& cj : output_coefficients_closed_form(bs, n, n))
                value += entropy_term(weight2 * std::norm(cj));
        }
        return CoherenceReport{Measure::RelativeEntropy, std::max(0.0, value), entropy_tail};
    };
}

}  // namespace detail

/// Evaluate the chosen coherence on a uniform theta grid over [0, pi/2],
/// then refine every near-best local maximum by golden-section search.
/// Ties within 1e-9 of the best value are all reported in `co_optima`;
/// `best_theta` is the smallest of them.  Deterministic for fixed inputs,
/// independent of the number of worker threads.
inline SweepResult sweep(const SweepInput& input, Measure measure, const SweepOptions& opts = {}) {
    if (opts.grid_points < 3) throw std::domain_error("sweep needs at least 3 grid points");
    const auto eval = detail::make_evaluator(input, measure, opts.epsilon);
    const int n = opts.grid_points;
    const double half_pi = std::numbers::pi / 2.0;

    SweepResult res;
    res.measure = measure;
    res.thetas.resize(static_cast<std::size_t>(n));
    res.values.resize(static_cast<std::size_t>(n));
    detail::parallel_for(n, opts.threads, [&](int i) {
        const double theta = half_pi * (static_cast<double>(i) / (n - 1));
        res.thetas[static_cast<std::size_t>(i)] = theta;
        res.values[static_cast<std::size_t>(i)] = eval(theta).value;
    });

    const auto max_it = std::max_element(res.values.begin(), res.values.end());
    const double grid_max = *max_it;
    res.min_value = *std::min_element(res.values.begin(), res.values.end());

    // Refine every local maximum that could still contend for the optimum.
    struct Optimum {
        double theta, value;
    };
    std::vector<Optimum> refined;
    for (int i = 0; i < n; ++i) {
        const double v = res.values[static_cast<std::size_t>(i)];
        const double left = i > 0 ? res.values[static_cast<std::size_t>(i - 1)] : -1.0;
        const double right = i + 1 < n ? res.values[static_cast<std::size_t>(i + 1)] : -1.0;
        if (v < left || v < right || v < grid_max - 1e-6) continue;
        const double lo = res.thetas[static_cast<std::size_t>(std::max(0, i - 1))];
        const double hi = res.thetas[static_cast<std::size_t>(std::min(n - 1, i + 1))];
        auto [theta_star, value_star] =
            detail::golden_max([&](double t) { return eval(t).value; }, lo, hi,
                               opts.refine_interval);
        if (v > value_star) {
            theta_star = res.thetas[static_cast<std::size_t>(i)];
            value_star = v;
        }
        refined.push_back({theta_star, value_star});
    }
    res.best_value = grid_max;
    for (const auto& opt : refined) res.best_value = std::max(res.best_value, opt.value);
    res.best_theta = res.thetas[static_cast<std::size_t>(
        std::distance(res.values.begin(), max_it))];
    for (const auto& opt : refined) {
        if (opt.value >= res.best_value - 1e-9) res.co_optima.push_back(opt.theta);
    }
    std::sort(res.co_optima.begin(), res.co_optima.end());
    if (!res.co_optima.empty()) res.best_theta = res.co_optima.front();
    res.truncation_bound = eval(res.best_theta).truncation_bound;
    return res;
}

namespace detail {

inline GainReport gain_from_sweep(const SweepResult& res) {
    if (res.min_value < 1e-12)
        throw std::domain_error("gain undefined: minimum coherence over the sweep is zero");
    return GainReport{res.best_value / res.min_value * 100.0, res.best_value, res.min_value};
}

}  // namespace detail

/// Ratio of maximum to minimum coherence over the beam-splitter family,
/// as a percentage.  Defined only for inputs whose sweep minimum is nonzero.
inline GainReport gain(const TmsvParams& input, Measure measure, const SweepOptions& opts = {}) {
    return detail::gain_from_sweep(sweep(SweepInput{input}, measure, opts));
}

inline GainReport gain(const CoherentPair& input, Measure measure, const SweepOptions& opts = {}) {
    return detail::gain_from_sweep(sweep(SweepInput{input}, measure, opts));
}

struct MaxVsPhotonsRow {
    int n_total = 0;
    double achieved = 0.0;
    double bound = 0.0;
    int best_split_n1 = 0;
    double best_theta = 0.0;
};

/// For each total photon number N <= max_total, the best refined optimum over
/// the input splits (n1, N-n1), n1 >= ceil(N/2) (mode relabeling covers the
/// rest), alongside the subspace bound.
inline std::vector<MaxVsPhotonsRow> max_coherence_vs_photons(int max_total, Measure measure,
                                                             const SweepOptions& opts = {}) {
    if (max_total < 1) throw std::domain_error("max_total must be at least 1");
    std::vector<MaxVsPhotonsRow> rows;
    rows.reserve(static_cast<std::size_t>(max_total));
    for (int total = 1; total <= max_total; ++total) {
        MaxVsPhotonsRow row;
        row.n_total = total;
        row.bound = measure == Measure::L1 ? max_l1_in_subspace(total)
                                           : max_entropy_in_subspace(total);
        bool first = true;
        for (int n1 = (total + 1) / 2; n1 <= total; ++n1) {
            const SweepResult res = sweep(SweepInput{number_state(n1, total - n1)}, measure, opts);
            if (first || res.best_value > row.achieved + 1e-12) {
                row.achieved = res.best_value;
                row.best_split_n1 = n1;
                row.best_theta = res.best_theta;
                first = false;
            }
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace beamcoh
