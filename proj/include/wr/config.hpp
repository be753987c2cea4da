// Multicomponent hard-core configurations on a lattice: admissibility,
// energy, single-update distance, bridge / quasi-bridge / cross detection,
// type relabeling and two-type projection, packed integer encoding, and the
// plain-text exchange format used by the CLI.
#pragma once

#include "wr/lattice.hpp"

#include <cstdint>
#include <istream>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace wr {

/// Raised when an instance exceeds the packed-integer or enumeration budget.
struct capacity_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Packed base-(M+1) encoding of a label vector; site v contributes
/// labels[v] * (M+1)^v. Fits instances with (M+1)^N <= 2^63.
using PackedState = std::uint64_t;

/// A site labeling with values in {0, 1, .., M}; 0 is empty, m >= 1 is a
/// particle of type m. Plain value type, cheap to copy, never mutated by
/// the free functions in this header.
struct Configuration {
    int M = 2;
    std::vector<std::int8_t> labels;

    bool operator==(const Configuration& other) const noexcept {
        return M == other.M && labels == other.labels;
    }
};

inline void check_shape(const Lattice& lat, const Configuration& sigma) {
    if (static_cast<int>(sigma.labels.size()) != lat.size())
        throw std::invalid_argument("Configuration: label count does not match lattice size");
    if (sigma.M < 2) throw std::invalid_argument("Configuration: M must be >= 2");
    for (std::int8_t l : sigma.labels)
        if (l < 0 || l > sigma.M)
            throw std::invalid_argument("Configuration: label outside {0..M}");
}

/// True iff no edge joins two different nonzero labels (the hard-core
/// constraint defining the admissible state space).
inline bool is_admissible(const Lattice& lat, const Configuration& sigma) {
    check_shape(lat, sigma);
    const int n = lat.size();
    for (SiteId v = 0; v < n; ++v) {
        const std::int8_t a = sigma.labels[static_cast<std::size_t>(v)];
        if (a == 0) continue;
        for (const SiteId* w = lat.neighbors_begin(v); w != lat.neighbors_end(v); ++w) {
            const std::int8_t b = sigma.labels[static_cast<std::size_t>(*w)];
            if (b != 0 && b != a) return false;
        }
    }
    return true;
}

/// H(sigma) = -(number of particles), type-blind.
inline int energy(const Configuration& sigma) noexcept {
    int particles = 0;
    for (std::int8_t l : sigma.labels) particles += (l != 0);
    return -particles;
}

/// Number of empty sites; equals H(sigma) - H(stable) on a full lattice.
inline int energy_difference(const Configuration& sigma) noexcept {
    int empty = 0;
    for (std::int8_t l : sigma.labels) empty += (l == 0);
    return empty;
}

/// Empty-site count of row r (contribution of the row to energy_difference).
inline int row_energy_difference(const Lattice& lat, const Configuration& sigma, int r) {
    check_shape(lat, sigma);
    int empty = 0;
    for (SiteId v : lat.row_sites(r)) empty += (sigma.labels[static_cast<std::size_t>(v)] == 0);
    return empty;
}

/// Empty-site count of column c.
inline int column_energy_difference(const Lattice& lat, const Configuration& sigma, int c) {
    check_shape(lat, sigma);
    int empty = 0;
    for (SiteId v : lat.column_sites(c)) empty += (sigma.labels[static_cast<std::size_t>(v)] == 0);
    return empty;
}

/// Single-update distance. Per site: 0 if the labels agree, 1 if exactly one
/// is empty (an addition or removal away), 2 if both occupied by different
/// types (a swap needs a removal plus an addition). The source formula
/// literally adds the both-occupied indicator even for equal labels, which
/// would make d(sigma,sigma) positive; this is the evidently intended
/// reading and the one every downstream use relies on.
inline int distance(const Configuration& a, const Configuration& b) {
    if (a.M != b.M || a.labels.size() != b.labels.size())
        throw std::invalid_argument("distance: mismatched shapes");
    int d = 0;
    for (std::size_t v = 0; v < a.labels.size(); ++v) {
        const std::int8_t x = a.labels[v];
        const std::int8_t y = b.labels[v];
        if (x == y) continue;
        d += (x != 0 && y != 0) ? 2 : 1;
    }
    return d;
}

/// All sites occupied by type m.
inline Configuration stable_config(const Lattice& lat, int M, int m) {
    if (m < 1 || m > M) throw std::invalid_argument("stable_config: type out of range");
    Configuration sigma;
    sigma.M = M;
    sigma.labels.assign(static_cast<std::size_t>(lat.size()), static_cast<std::int8_t>(m));
    return sigma;
}

/// Apply a permutation of {1..M} to the particle types; empty sites are
/// fixed. pi is given as pi[m-1] = image of type m.
inline Configuration relabel_types(const Configuration& sigma, const std::vector<int>& pi) {
    if (static_cast<int>(pi.size()) != sigma.M)
        throw std::invalid_argument("relabel_types: permutation size != M");
    std::vector<bool> seen(static_cast<std::size_t>(sigma.M), false);
    for (int image : pi) {
        if (image < 1 || image > sigma.M || seen[static_cast<std::size_t>(image - 1)])
            throw std::invalid_argument("relabel_types: not a permutation of {1..M}");
        seen[static_cast<std::size_t>(image - 1)] = true;
    }
    Configuration out = sigma;
    for (auto& l : out.labels)
        if (l != 0) l = static_cast<std::int8_t>(pi[static_cast<std::size_t>(l - 1)]);
    return out;
}

/// Collapse types {3..M} onto type 1, keeping {0,1,2} fixed. Preserves
/// admissibility and energy; used to reduce multi-type questions to the
/// two-type ("black and gray") case.
inline Configuration project_two_types(const Configuration& sigma) {
    Configuration out = sigma;
    out.M = 2;
    for (auto& l : out.labels)
        if (l > 2) l = 1;
    return out;
}

/// Largest N such that (M+1)^N fits in the packed 63-bit budget.
inline int packed_site_capacity(int M) noexcept {
    const std::uint64_t base = static_cast<std::uint64_t>(M) + 1;
    std::uint64_t value = 1;
    int n = 0;
    while (value <= (0x7FFFFFFFFFFFFFFFULL / base)) {
        value *= base;
        ++n;
    }
    return n;
}

/// Powers (M+1)^v for v in [0, N]; throws capacity_error if (M+1)^N > 2^63.
inline std::vector<std::uint64_t> packed_powers(int N, int M) {
    if (packed_site_capacity(M) < N)
        throw capacity_error("packed state: (M+1)^N exceeds the 63-bit encoding budget for N=" +
                             std::to_string(N) + " M=" + std::to_string(M));
    std::vector<std::uint64_t> pw(static_cast<std::size_t>(N) + 1, 1);
    for (int v = 1; v <= N; ++v) pw[static_cast<std::size_t>(v)] = pw[static_cast<std::size_t>(v - 1)] * (static_cast<std::uint64_t>(M) + 1);
    return pw;
}

inline PackedState encode(const Configuration& sigma) {
    const int n = static_cast<int>(sigma.labels.size());
    if (packed_site_capacity(sigma.M) < n)
        throw capacity_error("encode: configuration too large for 63-bit packing");
    PackedState code = 0;
    const std::uint64_t base = static_cast<std::uint64_t>(sigma.M) + 1;
    for (int v = n - 1; v >= 0; --v)
        code = code * base + static_cast<std::uint64_t>(sigma.labels[static_cast<std::size_t>(v)]);
    return code;
}

inline Configuration decode(PackedState code, const Lattice& lat, int M) {
    const int n = lat.size();
    if (packed_site_capacity(M) < n)
        throw capacity_error("decode: lattice too large for 63-bit packing");
    Configuration sigma;
    sigma.M = M;
    sigma.labels.resize(static_cast<std::size_t>(n));
    const std::uint64_t base = static_cast<std::uint64_t>(M) + 1;
    for (int v = 0; v < n; ++v) {
        sigma.labels[static_cast<std::size_t>(v)] = static_cast<std::int8_t>(code % base);
        code /= base;
    }
    if (code != 0) throw std::invalid_argument("decode: code out of range for this lattice");
    return sigma;
}

// ---------------------------------------------------------------------------
// Bridges, quasi-bridges, crosses.

struct BridgeReport {
    // (row or column index, type)
    std::vector<std::pair<int, int>> horizontal_bridges;
    std::vector<std::pair<int, int>> vertical_bridges;
    // (row or column index, type, empty site)
    std::vector<std::tuple<int, int, SiteId>> horizontal_quasi;
    std::vector<std::tuple<int, int, SiteId>> vertical_quasi;
    // types with both a horizontal and a vertical bridge
    std::vector<int> crosses;
    struct QuasiCross {
        int vertical_type;
        int horizontal_type;
        bool bichromatic; // types differ; the two quasi-bridges share their empty site
    };
    std::vector<QuasiCross> quasi_crosses;
};

namespace detail {
/// Classify one line (row or column) of labels: returns (type, empty site
/// position within the line) with type > 0 and position = -1 for a full
/// bridge, position >= 0 for a quasi-bridge (exactly one empty site, all
/// other sites one type), or type = 0 for neither.
inline std::pair<int, int> classify_line(const Configuration& sigma,
                                         const std::vector<SiteId>& line) {
    int type = 0;
    int empty_pos = -1;
    for (std::size_t k = 0; k < line.size(); ++k) {
        const std::int8_t l = sigma.labels[static_cast<std::size_t>(line[k])];
        if (l == 0) {
            if (empty_pos >= 0) return {0, -1}; // two empty sites
            empty_pos = static_cast<int>(k);
        } else if (type == 0) {
            type = l;
        } else if (l != type) {
            return {0, -1}; // mixed types
        }
    }
    if (type == 0) return {0, -1}; // fully empty line is neither
    return {type, empty_pos};
}
} // namespace detail

/// Exhaustive bridge / quasi-bridge / cross / quasi-cross report.
/// Requires an admissible configuration (the structural statements proved
/// about these objects assume admissibility).
inline BridgeReport detect_bridges(const Lattice& lat, const Configuration& sigma) {
    if (!is_admissible(lat, sigma))
        throw std::invalid_argument("detect_bridges: configuration is not admissible");
    BridgeReport rep;
    for (int i = 0; i < lat.rows(); ++i) {
        auto [type, pos] = detail::classify_line(sigma, lat.row_sites(i));
        if (type == 0) continue;
        if (pos < 0) rep.horizontal_bridges.emplace_back(i, type);
        else rep.horizontal_quasi.emplace_back(i, type, lat.site(pos, i));
    }
    for (int j = 0; j < lat.cols(); ++j) {
        auto [type, pos] = detail::classify_line(sigma, lat.column_sites(j));
        if (type == 0) continue;
        if (pos < 0) rep.vertical_bridges.emplace_back(j, type);
        else rep.vertical_quasi.emplace_back(j, type, lat.site(j, pos));
    }
    for (int m = 1; m <= sigma.M; ++m) {
        bool h = false, v = false;
        for (auto& [i, t] : rep.horizontal_bridges) h |= (t == m);
        for (auto& [j, t] : rep.vertical_bridges) v |= (t == m);
        if (h && v) rep.crosses.push_back(m);
    }
    for (const auto& vq : rep.vertical_quasi) {
        const int vt = std::get<1>(vq);
        for (const auto& hq : rep.horizontal_quasi) {
            const int ht = std::get<1>(hq);
            rep.quasi_crosses.push_back({vt, ht, vt != ht});
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Text exchange format: K lines of L space-separated integers in 0..M,
// row 0 first. Inadmissible input is rejected unless raw = true.

inline void write_configuration(std::ostream& os, const Lattice& lat,
                                const Configuration& sigma) {
    check_shape(lat, sigma);
    for (int i = 0; i < lat.rows(); ++i) {
        for (int j = 0; j < lat.cols(); ++j) {
            if (j) os << ' ';
            os << static_cast<int>(sigma.labels[static_cast<std::size_t>(lat.site(j, i))]);
        }
        os << '\n';
    }
}

inline Configuration read_configuration(std::istream& is, const Lattice& lat, int M,
                                        bool raw = false) {
    Configuration sigma;
    sigma.M = M;
    sigma.labels.assign(static_cast<std::size_t>(lat.size()), 0);
    for (int i = 0; i < lat.rows(); ++i) {
        std::string line;
        // Skip blank lines between blocks.
        while (std::getline(is, line)) {
            if (line.find_first_not_of(" \t\r") != std::string::npos) break;
            line.clear();
        }
        if (line.empty() && i == 0 && is.eof())
            throw std::invalid_argument("read_configuration: empty input");
        std::istringstream row(line);
        for (int j = 0; j < lat.cols(); ++j) {
            int value;
            if (!(row >> value))
                throw std::invalid_argument("read_configuration: row " + std::to_string(i) +
                                            " has fewer than L values");
            if (value < 0 || value > M)
                throw std::invalid_argument("read_configuration: label " + std::to_string(value) +
                                            " outside 0.." + std::to_string(M));
            sigma.labels[static_cast<std::size_t>(lat.site(j, i))] =
                static_cast<std::int8_t>(value);
        }
        int extra;
        if (row >> extra)
            throw std::invalid_argument("read_configuration: row " + std::to_string(i) +
                                        " has more than L values");
    }
    if (!raw && !is_admissible(lat, sigma))
        throw std::invalid_argument(
            "read_configuration: configuration violates the hard-core constraint "
            "(pass raw=true / --raw to load anyway)");
    return sigma;
}

inline std::string to_text(const Lattice& lat, const Configuration& sigma) {
    std::ostringstream os;
    write_configuration(os, lat, sigma);
    return os.str();
}

} // namespace wr
