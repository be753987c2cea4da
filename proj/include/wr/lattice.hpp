// K x L square lattice geometry under periodic, open, or semi-periodic
// boundary conditions: site indexing, deduplicated adjacency, and the
// row / column / stripe views used by the path constructions.
#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace wr {

enum class BoundaryCondition : std::uint8_t {
    periodic,      // both axes wrap
    open,          // neither axis wraps
    semi_periodic, // vertical axis wraps (columns are cycles), horizontal open
};

inline const char* to_string(BoundaryCondition bc) noexcept {
    switch (bc) {
        case BoundaryCondition::periodic: return "periodic";
        case BoundaryCondition::open: return "open";
        case BoundaryCondition::semi_periodic: return "semi";
    }
    return "?";
}

/// Site handle: a flat index in [0, N). Sites are addressed (j, i) with
/// column j in [0, L) and row i in [0, K); index = i*L + j, row-major, so
/// packed configuration codes are stable across runs and platforms.
using SiteId = int;

/// Immutable lattice with a precomputed, deduplicated neighbor table.
///
/// Boundary conventions:
///  - periodic: both indices wrap mod L (horizontal) and mod K (vertical).
///  - open: no wrapping.
///  - semi_periodic: the vertical index wraps mod K and the horizontal
///    direction is open, i.e. columns are cycles and rows are paths. The
///    source material leaves the wrapped axis unnamed and only states the
///    barrier value min{K,2L}+1; this orientation is the one whose
///    brute-force barrier matches that formula (one cleared K-site column
///    seeds a left-to-right sweep, worth K+1, while crossing the wrapped
///    axis needs a two-row stripe, worth 2L+1). Pinned by tests against
///    exhaustive computation on 2x3 and 3x2.
///
/// Wrap neighbors that coincide (K=2 or L=2 on a wrapped axis) are
/// deduplicated: the hard-core constraint and the Metropolis kernel are
/// per distinct pair, not per edge multiplicity.
class Lattice {
public:
    Lattice(int K, int L, BoundaryCondition bc) : K_(K), L_(L), bc_(bc) {
        if (K < 2 || L < 2) {
            throw std::invalid_argument("Lattice: K and L must both be >= 2, got K=" +
                                        std::to_string(K) + " L=" + std::to_string(L));
        }
        const int n = K_ * L_;
        nbr_offset_.resize(static_cast<std::size_t>(n) + 1, 0);
        nbr_flat_.reserve(static_cast<std::size_t>(n) * 4);
        const bool wrap_h = bc == BoundaryCondition::periodic;
        const bool wrap_v = bc != BoundaryCondition::open;
        for (int i = 0; i < K_; ++i) {
            for (int j = 0; j < L_; ++j) {
                SiteId candidates[4];
                int c = 0;
                if (j > 0) candidates[c++] = site(j - 1, i);
                else if (wrap_h) candidates[c++] = site(L_ - 1, i);
                if (j + 1 < L_) candidates[c++] = site(j + 1, i);
                else if (wrap_h) candidates[c++] = site(0, i);
                if (i > 0) candidates[c++] = site(j, i - 1);
                else if (wrap_v) candidates[c++] = site(j, K_ - 1);
                if (i + 1 < K_) candidates[c++] = site(j, i + 1);
                else if (wrap_v) candidates[c++] = site(j, 0);
                std::sort(candidates, candidates + c);
                const SiteId self = site(j, i);
                SiteId prev = -1;
                for (int k = 0; k < c; ++k) {
                    if (candidates[k] != prev && candidates[k] != self) {
                        nbr_flat_.push_back(candidates[k]);
                        prev = candidates[k];
                    }
                }
                nbr_offset_[static_cast<std::size_t>(self) + 1] =
                    static_cast<int>(nbr_flat_.size());
            }
        }
    }

    [[nodiscard]] int rows() const noexcept { return K_; }
    [[nodiscard]] int cols() const noexcept { return L_; }
    [[nodiscard]] int size() const noexcept { return K_ * L_; }
    [[nodiscard]] BoundaryCondition bc() const noexcept { return bc_; }

    [[nodiscard]] SiteId site(int j, int i) const noexcept { return i * L_ + j; }
    [[nodiscard]] int col_of(SiteId v) const noexcept { return v % L_; }
    [[nodiscard]] int row_of(SiteId v) const noexcept { return v / L_; }

    [[nodiscard]] int degree(SiteId v) const {
        check_site(v);
        return nbr_offset_[static_cast<std::size_t>(v) + 1] - nbr_offset_[v];
    }

    /// Distinct neighbors of v, ascending.
    [[nodiscard]] const SiteId* neighbors_begin(SiteId v) const {
        check_site(v);
        return nbr_flat_.data() + nbr_offset_[v];
    }
    [[nodiscard]] const SiteId* neighbors_end(SiteId v) const {
        check_site(v);
        return nbr_flat_.data() + nbr_offset_[static_cast<std::size_t>(v) + 1];
    }
    [[nodiscard]] std::vector<SiteId> neighbors(SiteId v) const {
        return {neighbors_begin(v), neighbors_end(v)};
    }

    [[nodiscard]] int edge_count() const noexcept {
        return static_cast<int>(nbr_flat_.size()) / 2;
    }

    /// Sites of row i, ordered by column.
    [[nodiscard]] std::vector<SiteId> row_sites(int i) const {
        if (i < 0 || i >= K_) throw std::out_of_range("row_sites: row index out of range");
        std::vector<SiteId> out(static_cast<std::size_t>(L_));
        for (int j = 0; j < L_; ++j) out[static_cast<std::size_t>(j)] = site(j, i);
        return out;
    }

    /// Sites of column j, ordered by row.
    [[nodiscard]] std::vector<SiteId> column_sites(int j) const {
        if (j < 0 || j >= L_) throw std::out_of_range("column_sites: column index out of range");
        std::vector<SiteId> out(static_cast<std::size_t>(K_));
        for (int i = 0; i < K_; ++i) out[static_cast<std::size_t>(i)] = site(j, i);
        return out;
    }

    enum class StripeKind : std::uint8_t { horizontal, vertical };

    /// 1-indexed stripes: vertical stripe t is columns {2t-2, 2t-1}
    /// (t <= floor(L/2)); horizontal stripe t is rows {2t-2, 2t-1}
    /// (t <= floor(K/2)). Order: lower-index column/row first, sites in
    /// row/column order within.
    [[nodiscard]] std::vector<SiteId> stripe_sites(StripeKind kind, int t) const {
        std::vector<SiteId> out;
        if (kind == StripeKind::vertical) {
            if (t < 1 || 2 * t > L_) throw std::out_of_range("stripe_sites: vertical stripe index");
            for (int j = 2 * t - 2; j <= 2 * t - 1; ++j)
                for (int i = 0; i < K_; ++i) out.push_back(site(j, i));
        } else {
            if (t < 1 || 2 * t > K_) throw std::out_of_range("stripe_sites: horizontal stripe index");
            for (int i = 2 * t - 2; i <= 2 * t - 1; ++i)
                for (int j = 0; j < L_; ++j) out.push_back(site(j, i));
        }
        return out;
    }

    /// The lattice with rows and columns exchanged. Periodic and open map to
    /// themselves; semi-periodic would swap which axis wraps, so it is
    /// rejected (nothing in the library transposes semi-periodic instances).
    [[nodiscard]] Lattice transposed() const {
        if (bc_ == BoundaryCondition::semi_periodic)
            throw std::invalid_argument("Lattice::transposed: semi-periodic axes are not symmetric");
        return Lattice(L_, K_, bc_);
    }

    bool operator==(const Lattice& other) const noexcept {
        return K_ == other.K_ && L_ == other.L_ && bc_ == other.bc_;
    }

private:
    void check_site(SiteId v) const {
        if (v < 0 || v >= size()) throw std::out_of_range("Lattice: invalid site id");
    }

    int K_;
    int L_;
    BoundaryCondition bc_;
    std::vector<int> nbr_offset_;
    std::vector<SiteId> nbr_flat_;
};

} // namespace wr
