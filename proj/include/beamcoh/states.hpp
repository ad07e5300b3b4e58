#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "beamcoh/beam_splitter.hpp"
#include "beamcoh/coherence.hpp"
#include "beamcoh/fock.hpp"
#include "beamcoh/numeric.hpp"

namespace beamcoh {

/// Squeezing parameter plus target tail mass for truncating the two-mode
/// squeezed vacuum.
struct TmsvParams {
    double xi = 0.0;
    double epsilon = 1e-10;
};

namespace detail {

inline void validate_tmsv(const TmsvParams& p) {
    if (!(p.xi >= 0.0 && p.xi < 1.0)) throw std::domain_error("squeezing parameter must lie in [0,1)");
    if (!(p.epsilon > 0.0 && p.epsilon < 1.0)) throw std::domain_error("epsilon must lie in (0,1)");
}

/// Smallest cap with geometric tail xi^{2(cap+1)} <= epsilon.
inline int tmsv_cap(double xi, double epsilon) {
    int cap = 0;
    while (std::pow(xi, 2.0 * (cap + 1)) > epsilon) ++cap;
    return cap;
}

/// Certified tail bookkeeping for the TMSV truncated after block `cap`.
inline TruncationTail tmsv_tail(double xi, int cap) {
    TruncationTail tail;
    if (xi == 0.0) return tail;
    const double one_m = 1.0 - xi * xi;
    tail.deficit = std::pow(xi, 2.0 * (cap + 1));
    for (int n = cap + 1;; ++n) {
        const double w = std::sqrt(one_m) * std::pow(xi, n);
        const double p = w * w;
        const double l1_term = w * std::sqrt(2.0 * n + 1.0);
        tail.l1_bound += l1_term;
        tail.entropy_bound += p * std::log(2.0 * n + 1.0) + entropy_term(p);
        if (l1_term < 1e-26 && n > cap + 4) break;
    }
    return tail;
}

/// One Poisson-amplitude mode profile: per-n log magnitudes up to the cap
/// plus the convergent series needed for certified truncation bounds.
struct PoissonMode {
    int cap = 0;
    double mean = 0.0;                  // |alpha|^2
    double arg = 0.0;                   // phase of alpha
    std::vector<double> log_mag;        // ln |a_n| for n = 0..cap
    double tail_mass = 0.0;             // sum p_n, n > cap
    double kept_mass = 1.0;             // 1 - tail_mass
    double u_kept = 1.0, u_full = 1.0;  // sum |a_n| sqrt(n+1)
    double a_kept = 0.0, a_full = 0.0;  // sum p_n (ln(n+1) - ln p_n)
};

inline PoissonMode poisson_mode(cplx alpha, double half_epsilon) {
    PoissonMode mode;
    mode.mean = std::norm(alpha);
    mode.arg = std::arg(alpha);
    if (mode.mean == 0.0) {
        mode.log_mag = {0.0};
        return mode;
    }
    const double lambda = mode.mean;
    const double log_abs_alpha = 0.5 * std::log(lambda);
    auto log_amp = [&](int n) { return -lambda / 2.0 + n * log_abs_alpha - 0.5 * log_factorial(n); };

    // Far end of the distribution; amplitudes beyond are < ~1e-31.
    int n_far = static_cast<int>(lambda) + 10;
    while (log_amp(n_far) > -71.0) {
        ++n_far;
        if (n_far > 10000000) throw std::domain_error("coherent-state truncation cap not reached");
    }

    // Tail masses by backward summation: small terms first, so tiny tails
    // are resolved far below the double's ulp at 1.
    std::vector<double> suffix(static_cast<std::size_t>(n_far) + 2, 0.0);
    for (int n = n_far; n >= 0; --n)
        suffix[static_cast<std::size_t>(n)] =
            suffix[static_cast<std::size_t>(n) + 1] + std::exp(2.0 * log_amp(n));
    int cap = 0;
    while (cap < n_far && suffix[static_cast<std::size_t>(cap) + 1] > half_epsilon) ++cap;

    mode.cap = cap;
    mode.tail_mass = suffix[static_cast<std::size_t>(cap) + 1];
    mode.kept_mass = 1.0 - mode.tail_mass;
    mode.log_mag.resize(static_cast<std::size_t>(cap) + 1);
    for (int n = 0; n <= cap; ++n) mode.log_mag[static_cast<std::size_t>(n)] = log_amp(n);

    mode.u_kept = mode.u_full = 0.0;
    mode.a_kept = mode.a_full = 0.0;
    for (int n = 0; n <= n_far; ++n) {
        const double la = log_amp(n);
        const double mag = std::exp(la);
        const double p = mag * mag;
        const double u_term = mag * std::sqrt(n + 1.0);
        const double a_term = p * (std::log(n + 1.0) - 2.0 * la);
        mode.u_full += u_term;
        mode.a_full += a_term;
        if (n <= cap) {
            mode.u_kept += u_term;
            mode.a_kept += a_term;
        }
    }
    return mode;
}

}  // namespace detail

/// Equal-modulus superposition over the N-photon subspace with caller-chosen
/// phases; the extremal state for both coherence measures.
inline TwoModeState phase_like_state(int total_photons, const std::vector<double>& phases) {
    if (total_photons < 0) throw std::domain_error("total photon number must be nonnegative");
    if (phases.size() != static_cast<std::size_t>(total_photons) + 1)
        throw std::domain_error("phase list must have total_photons + 1 entries");
    const double amp = 1.0 / std::sqrt(static_cast<double>(total_photons) + 1.0);
    TwoModeState::AmplitudeMap m;
    for (int j = 0; j <= total_photons; ++j)
        m[{j, total_photons - j}] = std::polar(amp, phases[static_cast<std::size_t>(j)]);
    return TwoModeState::from_amplitudes(std::move(m));
}

/// Two-mode squeezed vacuum sqrt(1-xi^2) sum_n xi^n |n,n>, truncated at the
/// smallest cap whose geometric tail mass stays below epsilon.
inline TwoModeState tmsv_state(const TmsvParams& p) {
    detail::validate_tmsv(p);
    const int cap = detail::tmsv_cap(p.xi, p.epsilon);
    const double scale = std::sqrt(1.0 - p.xi * p.xi);
    TwoModeState::AmplitudeMap m;
    for (int n = 0; n <= cap; ++n) m[{n, n}] = cplx{scale * std::pow(p.xi, n), 0.0};
    return TwoModeState::from_amplitudes(std::move(m), 2 * cap, detail::tmsv_tail(p.xi, cap));
}

/// Per-mode mean photon number xi^2 / (1 - xi^2) of the TMSV.
inline double tmsv_mean_photons(double xi) {
    if (!(xi >= 0.0 && xi < 1.0)) throw std::domain_error("squeezing parameter must lie in [0,1)");
    return xi * xi / (1.0 - xi * xi);
}

/// Product coherent state in the photon-number basis, each mode truncated at
/// the smallest cap with Poisson tail mass <= epsilon/2.
inline TwoModeState coherent_to_fock(const CoherentPair& c, double epsilon) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::domain_error("epsilon must lie in (0,1)");
    if (!std::isfinite(c.alpha1.real()) || !std::isfinite(c.alpha1.imag()) ||
        !std::isfinite(c.alpha2.real()) || !std::isfinite(c.alpha2.imag()))
        throw std::domain_error("non-finite coherent amplitude");
    const auto m1 = detail::poisson_mode(c.alpha1, epsilon / 2.0);
    const auto m2 = detail::poisson_mode(c.alpha2, epsilon / 2.0);

    TwoModeState::AmplitudeMap amps;
    for (int n = 0; n <= m1.cap; ++n) {
        for (int k = 0; k <= m2.cap; ++k) {
            const double mag = std::exp(m1.log_mag[static_cast<std::size_t>(n)] +
                                        m2.log_mag[static_cast<std::size_t>(k)]);
            amps[{n, k}] = std::polar(mag, n * m1.arg + k * m2.arg);
        }
    }

    TruncationTail tail;
    tail.deficit = m1.tail_mass + m2.tail_mass - m1.tail_mass * m2.tail_mass;
    tail.l1_bound = (m1.u_full - m1.u_kept) * m2.u_full + m1.u_kept * (m2.u_full - m2.u_kept);
    tail.entropy_bound = (m1.a_full - m1.a_kept) + m1.tail_mass * m2.a_full +
                         m1.a_kept * m2.tail_mass + (m2.a_full - m2.a_kept);
    return TwoModeState::from_amplitudes(std::move(amps), m1.cap + m2.cap, tail);
}

/// l1 coherence of the beam-splitter output for a TMSV input, evaluated
/// block by block: the |n,n> blocks stay orthogonal, so their coefficient
/// moduli add inside the l1 sum.
inline CoherenceReport tmsv_output_l1(const TmsvParams& p, const BeamSplitter& bs) {
    detail::validate_tmsv(p);
    const int cap = detail::tmsv_cap(p.xi, p.epsilon);
    const double scale = std::sqrt(1.0 - p.xi * p.xi);
    double sum = 0.0;
    for (int n = 0; n <= cap; ++n) {
        const auto coeffs = output_coefficients_closed_form(bs, n, n);
        double block = 0.0;
        for (const cplx& cj : coeffs) block += std::abs(cj);
        sum += scale * std::pow(p.xi, n) * block;
    }
    const double l = detail::tmsv_tail(p.xi, cap).l1_bound;
    return CoherenceReport{Measure::L1, std::max(0.0, sum * sum - 1.0), 2.0 * sum * l + l * l};
}

}  // namespace beamcoh
