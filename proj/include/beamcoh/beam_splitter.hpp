#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "beamcoh/fock.hpp"
#include "beamcoh/numeric.hpp"

namespace beamcoh {

/// Lossless beam splitter with balance angle theta in [0, pi/2] and four
/// coefficient phases.  The 2x2 mode transform is
///
///     b1 = tau1 a1 + rho2 a2        tau1 = e^{i dt1} cos(theta)
///     b2 = rho1 a1 + tau2 a2        rho1 = e^{i dr1} sin(theta)
///                                   rho2 = e^{i dr2} sin(theta)
///                                   tau2 = e^{i dt2} cos(theta)
///
/// Unitarity constrains the phases to dr1 - dt2 + dr2 - dt1 = pi (mod 2pi),
/// enforced at construction.
class BeamSplitter {
  public:
    BeamSplitter(double theta, double delta_tau1, double delta_tau2, double delta_rho1,
                 double delta_rho2)
        : theta_(theta),
          dt1_(delta_tau1),
          dt2_(delta_tau2),
          dr1_(delta_rho1),
          dr2_(delta_rho2) {
        if (!(theta >= 0.0 && theta <= std::numbers::pi / 2.0))
            throw std::domain_error("beam splitter angle must lie in [0, pi/2]");
        const double residual =
            std::remainder(dr1_ - dt2_ + dr2_ - dt1_ - std::numbers::pi, 2.0 * std::numbers::pi);
        if (std::abs(residual) > 1e-12)
            throw std::domain_error("beam splitter phases violate the unitarity constraint");
    }

    double theta() const { return theta_; }
    double delta_tau1() const { return dt1_; }
    double delta_tau2() const { return dt2_; }
    double delta_rho1() const { return dr1_; }
    double delta_rho2() const { return dr2_; }

    cplx tau1() const { return std::polar(std::cos(theta_), dt1_); }
    cplx tau2() const { return std::polar(std::cos(theta_), dt2_); }
    cplx rho1() const { return std::polar(std::sin(theta_), dr1_); }
    cplx rho2() const { return std::polar(std::sin(theta_), dr2_); }

  private:
    double theta_, dt1_, dt2_, dr1_, dr2_;
};

/// Beam splitter with delta_rho2 derived from the unitarity constraint.
/// All-zero phases yield the default convention dr2 = pi, under which real
/// inputs produce real coefficient arrays.
inline BeamSplitter make_beam_splitter(double theta, double delta_tau1 = 0.0,
                                       double delta_tau2 = 0.0, double delta_rho1 = 0.0) {
    const double delta_rho2 = std::numbers::pi + delta_tau1 + delta_tau2 - delta_rho1;
    return BeamSplitter(theta, delta_tau1, delta_tau2, delta_rho1, delta_rho2);
}

namespace detail {

inline cplx ipow(cplx base, int n) {
    cplx r{1.0, 0.0};
    for (int i = 0; i < n; ++i) r *= base;
    return r;
}

// Signed k-sum for one output coefficient, accumulated in log space with
// max-log rescaling; phases carried exactly per term.
inline std::vector<cplx> coefficients_by_sum(const BeamSplitter& bs, int n1, int n2) {
    const int total = n1 + n2;
    const double c = std::cos(bs.theta());
    const double s = std::sin(bs.theta());
    const double log_c = c > 0.0 ? std::log(c) : -std::numeric_limits<double>::infinity();
    const double log_s = s > 0.0 ? std::log(s) : -std::numeric_limits<double>::infinity();

    std::vector<cplx> coeffs(static_cast<std::size_t>(total) + 1, cplx{0.0, 0.0});
    for (int j = 0; j <= total; ++j) {
        const double prefactor = 0.5 * (log_factorial(n1) + log_factorial(n2) +
                                        log_factorial(j) + log_factorial(total - j));
        const int k_lo = std::max(0, j - n2);
        const int k_hi = std::min(n1, j);

        double max_log = -std::numeric_limits<double>::infinity();
        auto term_log = [&](int k) {
            const int pow_c = n2 + 2 * k - j;
            const int pow_s = n1 + j - 2 * k;
            if ((pow_c > 0 && c == 0.0) || (pow_s > 0 && s == 0.0))
                return -std::numeric_limits<double>::infinity();
            double lg = prefactor - log_factorial(n1 - k) - log_factorial(k) -
                        log_factorial(n2 + k - j) - log_factorial(j - k);
            if (pow_c > 0) lg += pow_c * log_c;
            if (pow_s > 0) lg += pow_s * log_s;
            return lg;
        };
        for (int k = k_lo; k <= k_hi; ++k) max_log = std::max(max_log, term_log(k));
        if (!std::isfinite(max_log)) continue;

        cplx acc{0.0, 0.0};
        for (int k = k_lo; k <= k_hi; ++k) {
            const double lg = term_log(k);
            if (!std::isfinite(lg)) continue;
            const double phase = k * bs.delta_tau1() + (n1 - k) * bs.delta_rho1() +
                                 (j - k) * bs.delta_rho2() + (n2 - j + k) * bs.delta_tau2();
            acc += std::polar(std::exp(lg - max_log), phase);
        }
        const double mag = std::abs(acc);
        if (mag == 0.0) continue;
        coeffs[static_cast<std::size_t>(j)] =
            (acc / mag) * std::exp(max_log + std::log(mag));
    }
    return coeffs;
}

// The alternating k-sum cancels catastrophically for large two-sided blocks
// (relative error ~4^N/2^52 near theta = pi/4).  For those, evaluate the
// polynomial coefficients a_j of (tau1 x + rho1)^{n1} (rho2 x + tau2)^{n2}
// by the three-term recurrence of its first-order differential equation,
// run upward and downward from the two exactly known edge coefficients and
// joined at the envelope peak, where both directions are growth-stable.
inline std::vector<cplx> coefficients_by_recurrence(const BeamSplitter& bs, int n1, int n2) {
    const int total = n1 + n2;
    const cplx t1 = bs.tau1(), t2 = bs.tau2(), r1 = bs.rho1(), r2 = bs.rho2();

    // all-positive envelope of |a_j|: same product with moduli, via one
    // convolution of the two binomial coefficient rows (no cancellation)
    const double c = std::cos(bs.theta());
    const double s = std::sin(bs.theta());
    std::vector<double> row1(static_cast<std::size_t>(n1) + 1);
    std::vector<double> row2(static_cast<std::size_t>(n2) + 1);
    for (int k = 0; k <= n1; ++k)
        row1[static_cast<std::size_t>(k)] =
            std::exp(log_factorial(n1) - log_factorial(k) - log_factorial(n1 - k) +
                     k * std::log(c) + (n1 - k) * std::log(s));
    for (int k = 0; k <= n2; ++k)
        row2[static_cast<std::size_t>(k)] =
            std::exp(log_factorial(n2) - log_factorial(k) - log_factorial(n2 - k) +
                     k * std::log(s) + (n2 - k) * std::log(c));
    int peak = 0;
    {
        std::vector<double> envelope(static_cast<std::size_t>(total) + 1, 0.0);
        for (int p = 0; p <= n1; ++p)
            for (int q = 0; q <= n2; ++q)
                envelope[static_cast<std::size_t>(p + q)] +=
                    row1[static_cast<std::size_t>(p)] * row2[static_cast<std::size_t>(q)];
        for (int j = 1; j <= total; ++j)
            if (envelope[static_cast<std::size_t>(j)] > envelope[static_cast<std::size_t>(peak)])
                peak = j;
    }

    const cplx diag = t1 * t2 + r1 * r2;
    const cplx mixed = static_cast<double>(n1) * (t1 * t2) + static_cast<double>(n2) * (r1 * r2);
    std::vector<cplx> a(static_cast<std::size_t>(total) + 1, cplx{0.0, 0.0});
    a[0] = detail::ipow(r1, n1) * detail::ipow(t2, n2);
    for (int j = 0; j < peak; ++j) {
        const cplx prev = j >= 1 ? a[static_cast<std::size_t>(j) - 1] : cplx{0.0, 0.0};
        a[static_cast<std::size_t>(j) + 1] =
            ((mixed - static_cast<double>(j) * diag) * a[static_cast<std::size_t>(j)] +
             t1 * r2 * static_cast<double>(total - j + 1) * prev) /
            (r1 * t2 * static_cast<double>(j + 1));
    }
    a[static_cast<std::size_t>(total)] = detail::ipow(t1, n1) * detail::ipow(r2, n2);
    for (int j = total; j > peak + 1; --j) {
        const cplx next =
            j + 1 <= total ? a[static_cast<std::size_t>(j) + 1] : cplx{0.0, 0.0};
        a[static_cast<std::size_t>(j) - 1] =
            (r1 * t2 * static_cast<double>(j + 1) * next -
             (mixed - static_cast<double>(j) * diag) * a[static_cast<std::size_t>(j)]) /
            (t1 * r2 * static_cast<double>(total - j + 1));
    }

    std::vector<cplx> coeffs(static_cast<std::size_t>(total) + 1);
    for (int j = 0; j <= total; ++j) {
        const double log_scale = 0.5 * (log_factorial(j) + log_factorial(total - j) -
                                        log_factorial(n1) - log_factorial(n2));
        coeffs[static_cast<std::size_t>(j)] = a[static_cast<std::size_t>(j)] * std::exp(log_scale);
    }
    return coeffs;
}

}  // namespace detail

/// Fock-basis coefficients of the |n1,n2> output: amplitude c_j on
/// |j, n1+n2-j> for j = 0..n1+n2.
inline std::vector<cplx> output_coefficients_closed_form(const BeamSplitter& bs, int n1, int n2) {
    if (n1 < 0 || n2 < 0) throw std::domain_error("photon numbers must be nonnegative");
    const double c = std::cos(bs.theta());
    const double s = std::sin(bs.theta());
    // one-sided blocks have a single k-term per j and the sum never cancels;
    // exact endpoint angles reduce to delta patterns the sum handles exactly
    if (n1 + n2 <= 30 || n1 == 0 || n2 == 0 || c == 0.0 || s == 0.0)
        return detail::coefficients_by_sum(bs, n1, n2);
    return detail::coefficients_by_recurrence(bs, n1, n2);
}

/// Brute-force coefficients: expand (tau1 b1^ + rho1 b2^)^n1 and
/// (rho2 b1^ + tau2 b2^)^n2 term by term, accumulating the multinomially
/// weighted creation-operator monomials.  Independent cross-check for the
/// closed form.
inline std::vector<cplx> output_coefficients_oracle(const BeamSplitter& bs, int n1, int n2) {
    if (n1 < 0 || n2 < 0) throw std::domain_error("photon numbers must be nonnegative");
    using detail::log_factorial;
    const int total = n1 + n2;
    const cplx t1 = bs.tau1(), t2 = bs.tau2(), r1 = bs.rho1(), r2 = bs.rho2();

    std::vector<cplx> amp(static_cast<std::size_t>(total) + 1, cplx{0.0, 0.0});
    for (int p = 0; p <= n1; ++p) {
        for (int q = 0; q <= n2; ++q) {
            const int j = p + q;
            const double log_w = log_factorial(n1) - log_factorial(p) - log_factorial(n1 - p) +
                                 log_factorial(n2) - log_factorial(q) - log_factorial(n2 - q) +
                                 0.5 * (log_factorial(j) + log_factorial(total - j) -
                                        log_factorial(n1) - log_factorial(n2));
            amp[static_cast<std::size_t>(j)] += std::exp(log_w) * detail::ipow(t1, p) *
                                                detail::ipow(r1, n1 - p) * detail::ipow(r2, q) *
                                                detail::ipow(t2, n2 - q);
        }
    }
    return amp;
}

/// Apply the beam splitter to an arbitrary state by linearity.  Support stays
/// on the input's total-photon anti-diagonals; the truncation tail and photon
/// cap are carried through unchanged.
inline TwoModeState apply(const BeamSplitter& bs, const TwoModeState& s) {
    TwoModeState::AmplitudeMap out;
    for (const auto& [key, a] : s.amplitudes()) {
        const auto [n1, n2] = key;
        const auto coeffs = output_coefficients_closed_form(bs, n1, n2);
        const int total = n1 + n2;
        for (int j = 0; j <= total; ++j) {
            const cplx contribution = a * coeffs[static_cast<std::size_t>(j)];
            if (contribution != cplx{0.0, 0.0}) out[{j, total - j}] += contribution;
        }
    }
    return TwoModeState::from_amplitudes(std::move(out), s.total_photon_cap(), s.tail(),
                                         s.prune_floor());
}

/// Beam splitters map product coherent states to product coherent states;
/// this is the induced action on the displacement amplitudes.  Total mean
/// photon number |alpha1|^2 + |alpha2|^2 is conserved.
inline CoherentPair apply_coherent(const BeamSplitter& bs, const CoherentPair& in) {
    return CoherentPair{bs.tau1() * in.alpha1 + bs.rho2() * in.alpha2,
                        bs.rho1() * in.alpha1 + bs.tau2() * in.alpha2};
}

}  // namespace beamcoh
