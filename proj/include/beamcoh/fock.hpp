#pragma once

#include <cmath>
#include <complex>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <utility>

#include "beamcoh/numeric.hpp"

namespace beamcoh {

using cplx = std::complex<double>;

/// Basis label |n1,n2> in the two-mode photon-number basis.
using ModePair = std::pair<int, int>;

/// Probability mass lost to truncation or pruning.
struct NormDeficit {
    double deficit = 0.0;
};

/// Two complex displacement amplitudes describing an (untruncated)
/// product coherent state |alpha1,alpha2>.
struct CoherentPair {
    cplx alpha1{0.0, 0.0};
    cplx alpha2{0.0, 0.0};
};

/// Certified bookkeeping for amplitude mass that was dropped from a state.
///
/// `deficit` is the dropped probability mass.  `l1_bound` bounds the sum of
/// dropped-amplitude moduli after the action of any photon-number-conserving
/// unitary (each dropped entry of modulus m in the N-photon block is counted
/// as m*sqrt(N+1), the Cauchy-Schwarz worst case over that block), and
/// `entropy_bound` bounds the Shannon entropy the dropped mass could still
/// contribute.  Both bounds are invariant under beam-splitter action, so they
/// can be attached to a state once and reported after any transformation.
struct TruncationTail {
    double deficit = 0.0;
    double l1_bound = 0.0;
    double entropy_bound = 0.0;
};

/// Sparse two-mode pure state: a finite map |n1,n2> -> complex amplitude.
/// Immutable after construction; all operations on it are pure functions.
class TwoModeState {
  public:
    using AmplitudeMap = std::map<ModePair, cplx>;

    static constexpr double kDefaultPruneFloor = 1e-14;

    /// Build a state from raw amplitudes.  Entries with modulus below
    /// `prune_floor` are dropped and their mass is added to the tail.
    /// States without a `total_photon_cap` must be normalized; capped states
    /// must be normalized up to the recorded deficit.
    static TwoModeState from_amplitudes(AmplitudeMap amps,
                                        std::optional<int> total_photon_cap = std::nullopt,
                                        TruncationTail tail = {},
                                        double prune_floor = kDefaultPruneFloor) {
        for (auto it = amps.begin(); it != amps.end();) {
            const auto [n1, n2] = it->first;
            if (n1 < 0 || n2 < 0) throw std::domain_error("negative photon number in basis label");
            if (!std::isfinite(it->second.real()) || !std::isfinite(it->second.imag()))
                throw std::domain_error("non-finite amplitude");
            const double m = std::abs(it->second);
            if (m < prune_floor) {
                tail.deficit += m * m;
                tail.l1_bound += m * std::sqrt(static_cast<double>(n1 + n2 + 1));
                tail.entropy_bound += m * m * std::log(static_cast<double>(n1 + n2 + 1)) +
                                      detail::entropy_term(m * m);
                it = amps.erase(it);
            } else {
                ++it;
            }
        }
        double norm = 0.0;
        for (const auto& [key, a] : amps) norm += std::norm(a);
        if (!total_photon_cap) {
            if (std::abs(1.0 - norm - tail.deficit) > 1e-9)
                throw std::domain_error("state is not normalized");
        } else {
            if (*total_photon_cap < 0) throw std::domain_error("negative photon cap");
            // Accept per-block roundoff accumulated by large transforms.
            if (norm > 1.0 + 1e-6 || 1.0 - norm > tail.deficit + 1e-6)
                throw std::domain_error("norm inconsistent with recorded truncation tail");
        }
        return TwoModeState(std::move(amps), total_photon_cap, tail, prune_floor);
    }

    const AmplitudeMap& amplitudes() const { return amps_; }

    cplx amplitude(int n1, int n2) const {
        auto it = amps_.find({n1, n2});
        return it == amps_.end() ? cplx{0.0, 0.0} : it->second;
    }

    std::optional<int> total_photon_cap() const { return cap_; }
    const TruncationTail& tail() const { return tail_; }
    double prune_floor() const { return prune_floor_; }
    bool is_exact() const { return !cap_.has_value(); }

    std::size_t size() const { return amps_.size(); }

  private:
    TwoModeState(AmplitudeMap amps, std::optional<int> cap, TruncationTail tail, double floor)
        : amps_(std::move(amps)), cap_(cap), tail_(tail), prune_floor_(floor) {}

    AmplitudeMap amps_;
    std::optional<int> cap_;
    TruncationTail tail_;
    double prune_floor_;
};

/// |n1,n2> as an exact state.
inline TwoModeState number_state(int n1, int n2) {
    if (n1 < 0 || n2 < 0) throw std::domain_error("photon numbers must be nonnegative");
    TwoModeState::AmplitudeMap m;
    m[{n1, n2}] = cplx{1.0, 0.0};
    return TwoModeState::from_amplitudes(std::move(m));
}

/// <a|b> over the shared basis labels.
inline cplx inner_product(const TwoModeState& a, const TwoModeState& b) {
    const auto& small = a.size() <= b.size() ? a : b;
    const auto& large = a.size() <= b.size() ? b : a;
    const bool swapped = !(a.size() <= b.size());
    cplx acc{0.0, 0.0};
    for (const auto& [key, amp] : small.amplitudes()) {
        auto it = large.amplitudes().find(key);
        if (it == large.amplitudes().end()) continue;
        acc += swapped ? std::conj(it->second) * amp : std::conj(amp) * it->second;
    }
    return acc;
}

/// Measured norm deficit 1 - sum |amplitude|^2, clamped at zero.
inline NormDeficit norm_check(const TwoModeState& s) {
    double norm = 0.0;
    for (const auto& [key, a] : s.amplitudes()) norm += std::norm(a);
    return NormDeficit{std::max(0.0, 1.0 - norm)};
}

/// State dump: header `n1,n2,re,im`, one row per entry in basis order,
/// trailing comment record with the measured norm deficit.
inline void write_state_csv(const TwoModeState& s, std::ostream& os) {
    os << "n1,n2,re,im\n";
    for (const auto& [key, a] : s.amplitudes()) {
        os << key.first << ',' << key.second << ',' << detail::fmt_g12(a.real()) << ','
           << detail::fmt_g12(a.imag()) << '\n';
    }
    os << "# norm_deficit," << detail::fmt_g12(norm_check(s).deficit) << '\n';
}

}  // namespace beamcoh
