#pragma once

#include <cmath>
#include <stdexcept>

#include "beamcoh/fock.hpp"

namespace beamcoh {

enum class Measure { L1, RelativeEntropy };

/// A coherence value together with a certified upper bound on the error the
/// state's truncation can have introduced.  Exact states get a zero bound.
struct CoherenceReport {
    Measure measure = Measure::L1;
    double value = 0.0;
    double truncation_bound = 0.0;
};

/// l1-norm of coherence for pure states: (sum of amplitude moduli)^2 - 1.
inline CoherenceReport l1_coherence(const TwoModeState& s) {
    double sum = 0.0;
    for (const auto& [key, a] : s.amplitudes()) sum += std::abs(a);
    const double value = std::max(0.0, sum * sum - 1.0);
    const double l = s.tail().l1_bound;
    return CoherenceReport{Measure::L1, value, 2.0 * sum * l + l * l};
}

/// Relative entropy of coherence for pure states: Shannon entropy (nats) of
/// the photon-number distribution.
inline CoherenceReport entropy_coherence(const TwoModeState& s) {
    double value = 0.0;
    for (const auto& [key, a] : s.amplitudes()) value += detail::entropy_term(std::norm(a));
    return CoherenceReport{Measure::RelativeEntropy, std::max(0.0, value),
                           s.tail().entropy_bound};
}

/// Largest l1 coherence attainable in the fixed-energy subspace.
inline double max_l1_in_subspace(int total_photons) {
    if (total_photons < 0) throw std::domain_error("total photon number must be nonnegative");
    return static_cast<double>(total_photons);
}

/// Largest relative entropy of coherence attainable in the subspace.
inline double max_entropy_in_subspace(int total_photons) {
    if (total_photons < 0) throw std::domain_error("total photon number must be nonnegative");
    return std::log(static_cast<double>(total_photons) + 1.0);
}

/// l1 coherence computed through its overlap characterization: maximize the
/// overlap with equal-weight states over their free phases (attained at
/// phi_j = arg c_j), then (sqrt(N+1) |overlap|)^2 - 1.  Defined only on a
/// single total-photon subspace.
inline double l1_via_overlap(const TwoModeState& s) {
    if (s.amplitudes().empty()) throw std::domain_error("empty state");
    const int total = s.amplitudes().begin()->first.first + s.amplitudes().begin()->first.second;
    for (const auto& [key, a] : s.amplitudes()) {
        if (key.first + key.second != total)
            throw std::domain_error("state spans multiple total-photon subspaces");
    }
    const double inv_sqrt_dim = 1.0 / std::sqrt(static_cast<double>(total) + 1.0);
    cplx overlap{0.0, 0.0};
    for (const auto& [key, a] : s.amplitudes()) {
        const cplx phase_entry = std::polar(inv_sqrt_dim, std::arg(a));
        overlap += std::conj(phase_entry) * a;
    }
    const double scaled = std::sqrt(static_cast<double>(total) + 1.0) * std::abs(overlap);
    return std::max(0.0, scaled * scaled - 1.0);
}

}  // namespace beamcoh
