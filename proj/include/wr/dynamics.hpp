// Metropolis dynamics for the multicomponent hard-core lattice gas: exact
// transition probabilities, single-step simulation, hitting-time sampling
// with a step cap, deterministic multi-replica runs, and the dense exact
// transition matrix for instances small enough to enumerate.
//
// One step draws a (site, type) pair uniformly among N*M choices. On an
// empty site the particle is added when no neighbor holds a different
// type; on a site already holding the drawn type the particle is removed
// with probability e^(-beta). Any other draw is a void move. A removal is
// attempted only when the drawn type matches the occupant, which makes the
// proposal kernel symmetric and the chain reversible with respect to the
// Gibbs measure; the looser reading (remove on any occupied site) would
// weight removals M times too heavily.
#pragma once

#include "wr/config.hpp"
#include "wr/landscape.hpp"
#include "wr/rng.hpp"

#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <utility>
#include <vector>

namespace wr {

/// Raised when a hitting-time run exceeds its step cap. Distinguishable
/// from a sample; callers must not treat it as data.
struct timeout_error : std::runtime_error {
    explicit timeout_error(std::uint64_t steps)
        : std::runtime_error("hitting-time run exceeded the step cap of " +
                             std::to_string(steps) + " steps"),
          steps_taken(steps) {}
    std::uint64_t steps_taken;
};

struct ChainParams {
    Lattice lat;
    int M = 2;
    double beta = 1.0;
    std::uint64_t seed = 0;

    void check() const {
        if (M < 2) throw std::invalid_argument("ChainParams: M must be >= 2");
        if (!(beta >= 0.0)) throw std::invalid_argument("ChainParams: beta must be nonnegative");
    }
};

/// Exact one-step probability P(a -> b). Single-update pairs get
/// 1/(MN) for an addition and e^(-beta)/(MN) for a removal; the diagonal
/// holds the remainder; everything else is 0.
inline double transition_probability(const Configuration& a, const Configuration& b,
                                     const ChainParams& params) {
    params.check();
    if (a.M != params.M || b.M != params.M)
        throw std::invalid_argument("transition_probability: M mismatch");
    if (!is_admissible(params.lat, a) || !is_admissible(params.lat, b))
        throw std::invalid_argument("transition_probability: inadmissible argument");
    const Lattice& lat = params.lat;
    const double q = 1.0 / (static_cast<double>(lat.size()) * params.M);
    if (a == b) {
        int additions = 0, particles = 0;
        for (SiteId v = 0; v < lat.size(); ++v) {
            const std::int8_t l = a.labels[static_cast<std::size_t>(v)];
            if (l != 0) {
                ++particles;
                continue;
            }
            for (int m = 1; m <= params.M; ++m) {
                bool ok = true;
                for (const SiteId* w = lat.neighbors_begin(v); w != lat.neighbors_end(v); ++w) {
                    const std::int8_t n = a.labels[static_cast<std::size_t>(*w)];
                    if (n != 0 && n != m) { ok = false; break; }
                }
                additions += ok;
            }
        }
        return 1.0 - q * (additions + particles * std::exp(-params.beta));
    }
    if (distance(a, b) != 1) return 0.0;
    return (energy(b) < energy(a)) ? q : q * std::exp(-params.beta);
}

/// One in-place step of the chain. The draw order is fixed (one uniform
/// for the site/type pair, then one uniform only when a removal is
/// attempted) so trajectories are reproducible byte for byte.
inline void step_in_place(Configuration& sigma, const ChainParams& params, Rng& rng) {
    const Lattice& lat = params.lat;
    const std::uint64_t u =
        rng.next_below(static_cast<std::uint64_t>(lat.size()) * static_cast<std::uint64_t>(params.M));
    const SiteId v = static_cast<SiteId>(u / static_cast<std::uint64_t>(params.M));
    const std::int8_t m = static_cast<std::int8_t>(u % static_cast<std::uint64_t>(params.M) + 1);
    std::int8_t& l = sigma.labels[static_cast<std::size_t>(v)];
    if (l == 0) {
        for (const SiteId* w = lat.neighbors_begin(v); w != lat.neighbors_end(v); ++w) {
            const std::int8_t n = sigma.labels[static_cast<std::size_t>(*w)];
            if (n != 0 && n != m) return;
        }
        l = m;
    } else if (l == m) {
        if (rng.next_double() < std::exp(-params.beta)) l = 0;
    }
}

/// Pure variant of step_in_place.
inline Configuration step(const Configuration& sigma, const ChainParams& params, Rng& rng) {
    Configuration next = sigma;
    step_in_place(next, params, rng);
    return next;
}

struct TunnelingSample {
    std::uint64_t steps = 0; ///< number of chain steps until first entry
    Configuration exit;      ///< the target configuration that was hit
    double beta = 0.0;
    std::uint64_t seed = 0;
};

/// Run the chain from start until it first enters the target set; returns
/// the step count and exit state. Progress toward each target is tracked
/// as a per-target count of differing sites, updated in O(targets) per
/// accepted move, so no per-step full comparisons happen and instances of
/// any size are supported. Throws timeout_error beyond step_cap.
inline TunnelingSample sample_hitting_time(const Configuration& start,
                                           const std::vector<Configuration>& targets,
                                           const ChainParams& params, Rng& rng,
                                           std::uint64_t step_cap = 10'000'000'000ULL) {
    params.check();
    if (targets.empty())
        throw std::invalid_argument("sample_hitting_time: empty target set");
    if (!is_admissible(params.lat, start))
        throw std::invalid_argument("sample_hitting_time: start is not admissible");
    check_shape(params.lat, start);
    std::vector<int> diff(targets.size(), 0);
    for (std::size_t t = 0; t < targets.size(); ++t) {
        check_shape(params.lat, targets[t]);
        for (std::size_t v = 0; v < start.labels.size(); ++v)
            diff[t] += (start.labels[v] != targets[t].labels[v]);
        if (diff[t] == 0)
            throw std::invalid_argument("sample_hitting_time: start already belongs to the target set");
    }

    const Lattice& lat = params.lat;
    const double removal_p = std::exp(-params.beta);
    const std::uint64_t moves = static_cast<std::uint64_t>(lat.size()) *
                                static_cast<std::uint64_t>(params.M);
    Configuration cur = start;
    std::uint64_t steps = 0;
    while (true) {
        if (steps >= step_cap) throw timeout_error(steps);
        ++steps;
        const std::uint64_t u = rng.next_below(moves);
        const SiteId v = static_cast<SiteId>(u / static_cast<std::uint64_t>(params.M));
        const std::int8_t m = static_cast<std::int8_t>(u % static_cast<std::uint64_t>(params.M) + 1);
        std::int8_t& l = cur.labels[static_cast<std::size_t>(v)];
        std::int8_t from = l, to = l;
        if (l == 0) {
            bool ok = true;
            for (const SiteId* w = lat.neighbors_begin(v); w != lat.neighbors_end(v); ++w) {
                const std::int8_t n = cur.labels[static_cast<std::size_t>(*w)];
                if (n != 0 && n != m) { ok = false; break; }
            }
            if (ok) to = m;
        } else if (l == m) {
            if (rng.next_double() < removal_p) to = 0;
        }
        if (to == from) continue;
        l = to;
        for (std::size_t t = 0; t < targets.size(); ++t) {
            const std::int8_t want = targets[t].labels[static_cast<std::size_t>(v)];
            diff[t] += (to != want) - (from != want);
            if (diff[t] == 0)
                return {steps, targets[t], params.beta, params.seed};
        }
    }
}

/// n independent hitting-time samples with deterministic per-replica seeds
/// derived from params.seed. Replicas are spread over the given number of
/// worker threads; results are identical for any thread count because each
/// replica depends only on its own derived seed.
inline std::vector<TunnelingSample> sample_hitting_times(const Configuration& start,
                                                         const std::vector<Configuration>& targets,
                                                         const ChainParams& params, std::size_t n,
                                                         int threads = 1,
                                                         std::uint64_t step_cap = 10'000'000'000ULL) {
    params.check();
    if (threads < 1) threads = 1;
    std::vector<TunnelingSample> out(n);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&]() {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                ChainParams local = params;
                local.seed = child_seed(params.seed, i);
                Rng rng(local.seed);
                out[i] = sample_hitting_time(start, targets, local, rng, step_cap);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next.store(n);
                return;
            }
        }
    };
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(threads));
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);
    return out;
}

/// Dense row-stochastic transition matrix over the enumerated state space.
struct ExactKernel {
    std::size_t n = 0;
    double beta = 0.0;
    std::vector<PackedState> states; ///< sorted codes, row/column order
    std::vector<int> energies;
    std::vector<double> P; ///< row-major n*n

    double at(std::size_t i, std::size_t j) const { return P.at(i * n + j); }
};

inline ExactKernel exact_kernel(const LandscapeGraph& g, double beta,
                                std::size_t max_states = 20'000) {
    if (!(beta >= 0.0)) throw std::invalid_argument("exact_kernel: beta must be nonnegative");
    if (g.state_count() > max_states)
        throw capacity_error("exact_kernel: " + std::to_string(g.state_count()) +
                             " states exceed the dense-matrix cap of " + std::to_string(max_states));
    ExactKernel k;
    k.n = g.state_count();
    k.beta = beta;
    k.states.resize(k.n);
    k.energies.resize(k.n);
    k.P.assign(k.n * k.n, 0.0);
    const double q = 1.0 / (static_cast<double>(g.lattice().size()) * g.types());
    const double removal = q * std::exp(-beta);
    for (std::size_t i = 0; i < k.n; ++i) {
        k.states[i] = g.code_at(i);
        k.energies[i] = g.energy_at(i);
        double outflow = 0.0;
        g.for_each_neighbor(i, [&](std::size_t j) {
            const double p = (g.energy_at(j) < g.energy_at(i)) ? q : removal;
            k.P[i * k.n + j] = p;
            outflow += p;
        });
        k.P[i * k.n + i] = 1.0 - outflow;
    }
    return k;
}

/// Gibbs weights e^(-beta H) normalized to sum 1, computed relative to the
/// ground energy so nothing overflows.
inline std::vector<double> gibbs_distribution(const LandscapeGraph& g, double beta) {
    const std::size_t n = g.state_count();
    int hmin = 0;
    for (std::size_t i = 0; i < n; ++i) hmin = std::min(hmin, g.energy_at(i));
    std::vector<double> mu(n);
    double z = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mu[i] = std::exp(-beta * static_cast<double>(g.energy_at(i) - hmin));
        z += mu[i];
    }
    for (auto& w : mu) w /= z;
    return mu;
}

} // namespace wr
