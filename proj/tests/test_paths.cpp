#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <string>
#include <vector>

#include "wr/config.hpp"
#include "wr/paths.hpp"
#include "wr/rng.hpp"

namespace {

// Random admissible seed for the reduction: the first stripe_cols columns
// hold only the target type or empties, the rest is arbitrary admissible
// content, produced by rejection.
wr::Configuration random_seed(const wr::Lattice& lat, int M, int target, int stripe_cols,
                              wr::Rng& rng) {
    wr::Configuration sigma;
    sigma.M = M;
    sigma.labels.resize(lat.size());
    for (;;) {
        for (int j = 0; j < lat.cols(); ++j) {
            for (wr::SiteId v : lat.column_sites(j)) {
                if (j < stripe_cols)
                    sigma.labels[static_cast<std::size_t>(v)] =
                        rng.next_below(2) ? static_cast<std::int8_t>(target) : std::int8_t{0};
                else
                    sigma.labels[static_cast<std::size_t>(v)] =
                        static_cast<std::int8_t>(rng.next_below(M + 1));
            }
        }
        if (wr::is_admissible(lat, sigma)) return sigma;
    }
}

}  // namespace

TEST_CASE("path height is the maximal energy and needs a nonempty path") {
    wr::Lattice lat(2, 2, wr::BoundaryCondition::open);
    const auto s1 = wr::stable_config(lat, 2, 1);
    auto mid = s1;
    mid.labels[0] = 0;
    CHECK(wr::path_height({s1, mid, s1}) == wr::energy(mid));
    CHECK(wr::path_height({s1}) == -4);
    CHECK_THROWS_AS(wr::path_height({}), std::invalid_argument);
}

TEST_CASE("path validation flags inadmissible elements and long jumps") {
    wr::Lattice lat(2, 2, wr::BoundaryCondition::open);
    const auto s1 = wr::stable_config(lat, 2, 1);
    const auto s2 = wr::stable_config(lat, 2, 2);
    CHECK(wr::validate_path(lat, {s1, s1, s1}).ok);

    auto bad = s1;
    bad.labels[1] = 2;  // unlike neighbors
    auto one_removed = s1;
    one_removed.labels[0] = 0;
    {
        const auto v = wr::validate_path(lat, {s1, one_removed, bad});
        CHECK_FALSE(v.ok);
        CHECK(v.index == 2);
        CHECK(v.reason.find("hard-core") != std::string::npos);
    }
    {
        const auto v = wr::validate_path(lat, {s1, s2});
        CHECK_FALSE(v.ok);
        CHECK(v.index == 0);
        CHECK(v.reason.find("single update") != std::string::npos);
    }
    CHECK(wr::validate_path(lat, {}).ok);
}

TEST_CASE("compacting removes voids but keeps endpoints and height") {
    wr::Lattice lat(2, 2, wr::BoundaryCondition::open);
    const auto s1 = wr::stable_config(lat, 2, 1);
    auto mid = s1;
    mid.labels[3] = 0;
    const wr::Path padded = {s1, s1, mid, mid, mid, s1, s1};
    const auto tight = wr::compact(padded);
    REQUIRE(tight.size() == 3);
    CHECK(tight.front() == s1);
    CHECK(tight.back() == s1);
    CHECK(wr::path_height(tight) == wr::path_height(padded));
}

TEST_CASE("periodic reduction reaches the stable state under the energy cap") {
    wr::Lattice lat(3, 4, wr::BoundaryCondition::periodic);
    const int M = 3;
    wr::Rng rng(321);
    for (int trial = 0; trial < 1000; ++trial) {
        const int b = 1 + static_cast<int>(rng.next_below(M));
        const auto seed = random_seed(lat, M, b, 2, rng);
        const auto path = wr::reduction_path_periodic(lat, seed, b);
        REQUIRE_FALSE(path.empty());
        CHECK(path.front() == seed);
        CHECK(path.back() == wr::stable_config(lat, M, b));
        CHECK(wr::validate_path(lat, path).ok);
        CHECK(wr::path_height(path) <= wr::energy(seed) + 1);
    }
}

TEST_CASE("open reduction reaches the stable state under the energy cap") {
    wr::Lattice lat(3, 4, wr::BoundaryCondition::open);
    const int M = 3;
    wr::Rng rng(654);
    for (int trial = 0; trial < 1000; ++trial) {
        const int b = 1 + static_cast<int>(rng.next_below(M));
        const auto seed = random_seed(lat, M, b, 1, rng);
        const auto path = wr::reduction_path_open(lat, seed, b);
        REQUIRE_FALSE(path.empty());
        CHECK(path.front() == seed);
        CHECK(path.back() == wr::stable_config(lat, M, b));
        CHECK(wr::validate_path(lat, path).ok);
        CHECK(wr::path_height(path) <= wr::energy(seed) + 1);
    }
}

TEST_CASE("reduction stage endpoints have non-increasing energy") {
    wr::Lattice lat(3, 4, wr::BoundaryCondition::periodic);
    const int K = lat.rows(), L = lat.cols();
    wr::Rng rng(987);
    for (int trial = 0; trial < 200; ++trial) {
        const auto seed = random_seed(lat, 2, 1, 2, rng);
        const auto path = wr::reduction_path_periodic(lat, seed, 1, /*keep_voids=*/true);
        REQUIRE(path.size() == static_cast<std::size_t>(1 + 2 * K * L));
        for (int j = 1; j <= L; ++j) {
            const auto& before = path[static_cast<std::size_t>((j - 1) * 2 * K)];
            const auto& after = path[static_cast<std::size_t>(j * 2 * K)];
            CHECK(wr::energy(after) <= wr::energy(before));
        }
    }
}

TEST_CASE("reduction rejects seeds breaking the stripe condition") {
    wr::Lattice lat(3, 4, wr::BoundaryCondition::periodic);
    wr::Configuration sigma;
    sigma.M = 3;
    sigma.labels.assign(lat.size(), 0);
    sigma.labels[static_cast<std::size_t>(lat.site(1, 1))] = 2;
    CHECK_THROWS_WITH(wr::reduction_path_periodic(lat, sigma, 1),
                      Catch::Matchers::ContainsSubstring("(1,1), which holds type 2"));
    CHECK_NOTHROW(wr::reduction_path_periodic(lat, sigma, 2));

    wr::Lattice open_lat(3, 4, wr::BoundaryCondition::open);
    sigma.labels.assign(lat.size(), 0);
    sigma.labels[static_cast<std::size_t>(open_lat.site(0, 2))] = 3;
    CHECK_THROWS_WITH(wr::reduction_path_open(open_lat, sigma, 1),
                      Catch::Matchers::ContainsSubstring("(0,2), which holds type 3"));
    CHECK_NOTHROW(wr::reduction_path_open(open_lat, sigma, 3));
}

TEST_CASE("reduction rejects the wrong boundary condition and bad types") {
    wr::Lattice open_lat(3, 4, wr::BoundaryCondition::open);
    wr::Lattice per_lat(3, 4, wr::BoundaryCondition::periodic);
    wr::Configuration empty;
    empty.M = 2;
    empty.labels.assign(open_lat.size(), 0);
    CHECK_THROWS_AS(wr::reduction_path_periodic(open_lat, empty, 1), std::invalid_argument);
    CHECK_THROWS_AS(wr::reduction_path_open(per_lat, empty, 1), std::invalid_argument);
    CHECK_THROWS_AS(wr::reduction_path_open(open_lat, empty, 0), std::invalid_argument);
    CHECK_THROWS_AS(wr::reduction_path_open(open_lat, empty, 3), std::invalid_argument);
}

TEST_CASE("reducing a stable or empty seed stays flat") {
    wr::Lattice lat(3, 4, wr::BoundaryCondition::periodic);
    const auto s2 = wr::stable_config(lat, 3, 2);
    const auto from_stable = wr::reduction_path_periodic(lat, s2, 2);
    REQUIRE(from_stable.size() == 1);
    CHECK(from_stable.front() == s2);

    wr::Configuration empty;
    empty.M = 3;
    empty.labels.assign(lat.size(), 0);
    const auto from_empty = wr::reduction_path_periodic(lat, empty, 2);
    CHECK(from_empty.back() == s2);
    CHECK(wr::path_height(from_empty) == 0);
    CHECK(wr::validate_path(lat, from_empty).ok);
}

TEST_CASE("open reference paths achieve exactly the closed-form height") {
    struct Case { int K, L; int gamma; };
    const Case cases[] = {{2, 2, 3}, {3, 3, 4}, {4, 4, 5}, {2, 4, 3}, {4, 2, 3}, {4, 6, 5}};
    for (const auto& c : cases) {
        wr::Lattice lat(c.K, c.L, wr::BoundaryCondition::open);
        const auto from = wr::stable_config(lat, 2, 1);
        const auto to = wr::stable_config(lat, 2, 2);
        const auto path = wr::reference_path(lat, from, to);
        INFO("open " << c.K << "x" << c.L);
        REQUIRE_FALSE(path.empty());
        CHECK(path.front() == from);
        CHECK(path.back() == to);
        CHECK(wr::validate_path(lat, path).ok);
        CHECK(wr::path_height(path) - wr::energy(from) == c.gamma);
    }
}

TEST_CASE("periodic reference paths achieve exactly the closed-form height") {
    struct Case { int K, L; int gamma; };
    const Case cases[] = {
        {2, 2, 3}, {2, 3, 4}, {3, 2, 4},            // exact-search fallback
        {3, 3, 6}, {4, 4, 8}, {5, 5, 10}, {7, 7, 14},
        {2, 4, 5}, {3, 4, 7}, {4, 6, 9}, {6, 4, 9},
    };
    for (const auto& c : cases) {
        wr::Lattice lat(c.K, c.L, wr::BoundaryCondition::periodic);
        const auto from = wr::stable_config(lat, 2, 1);
        const auto to = wr::stable_config(lat, 2, 2);
        const auto path = wr::reference_path(lat, from, to);
        INFO("periodic " << c.K << "x" << c.L);
        REQUIRE_FALSE(path.empty());
        CHECK(path.front() == from);
        CHECK(path.back() == to);
        CHECK(wr::validate_path(lat, path).ok);
        CHECK(wr::path_height(path) - wr::energy(from) == c.gamma);
    }
}

TEST_CASE("reference paths work for more than two types") {
    wr::Lattice lat(3, 3, wr::BoundaryCondition::periodic);
    const auto from = wr::stable_config(lat, 3, 2);
    const auto to = wr::stable_config(lat, 3, 3);
    const auto path = wr::reference_path(lat, from, to);
    CHECK(path.front() == from);
    CHECK(path.back() == to);
    CHECK(wr::validate_path(lat, path).ok);
    CHECK(wr::path_height(path) - wr::energy(from) == 6);
}

TEST_CASE("the traced path exposes the staged intermediate states") {
    {
        // Equal periodic sides, even: channel end sits at H(s)+2K-1 and the
        // reshaped state one lower, with the freed site still to come.
        wr::Lattice lat(4, 4, wr::BoundaryCondition::periodic);
        const auto trace = wr::reference_path_traced(lat, wr::stable_config(lat, 2, 1),
                                                     wr::stable_config(lat, 2, 2));
        const int base = -lat.size();
        REQUIRE(trace.stage_one_end.has_value());
        CHECK(wr::energy(*trace.stage_one_end) == base + 7);
        REQUIRE(trace.stage_two_end.has_value());
        CHECK(wr::energy(*trace.stage_two_end) == base + 6);
    }
    {
        wr::Lattice lat(5, 5, wr::BoundaryCondition::periodic);
        const auto trace = wr::reference_path_traced(lat, wr::stable_config(lat, 2, 1),
                                                     wr::stable_config(lat, 2, 2));
        const int base = -lat.size();
        REQUIRE(trace.stage_one_end.has_value());
        CHECK(wr::energy(*trace.stage_one_end) == base + 9);
        REQUIRE(trace.stage_two_end.has_value());
        CHECK(wr::energy(*trace.stage_two_end) == base + 8);
    }
    {
        // Side 3 skips the reshaping stage.
        wr::Lattice lat(3, 3, wr::BoundaryCondition::periodic);
        const auto trace = wr::reference_path_traced(lat, wr::stable_config(lat, 2, 1),
                                                     wr::stable_config(lat, 2, 2));
        REQUIRE(trace.stage_one_end.has_value());
        CHECK(wr::energy(*trace.stage_one_end) == -9 + 5);
        CHECK_FALSE(trace.stage_two_end.has_value());
    }
    {
        // Unequal periodic sides: the first stage clears the first stripe.
        wr::Lattice lat(4, 6, wr::BoundaryCondition::periodic);
        const auto trace = wr::reference_path_traced(lat, wr::stable_config(lat, 2, 1),
                                                     wr::stable_config(lat, 2, 2));
        REQUIRE(trace.stage_one_end.has_value());
        CHECK(wr::energy(*trace.stage_one_end) == -24 + 8);
        CHECK_FALSE(trace.stage_two_end.has_value());
    }
    {
        // Open boundaries: the first stage clears the first column.
        wr::Lattice lat(3, 4, wr::BoundaryCondition::open);
        const auto trace = wr::reference_path_traced(lat, wr::stable_config(lat, 2, 1),
                                                     wr::stable_config(lat, 2, 2));
        REQUIRE(trace.stage_one_end.has_value());
        CHECK(wr::energy(*trace.stage_one_end) == -12 + 3);
    }
}

TEST_CASE("reference paths reject unsupported or degenerate requests") {
    wr::Lattice semi(3, 3, wr::BoundaryCondition::semi_periodic);
    const auto a = wr::stable_config(semi, 2, 1);
    const auto b = wr::stable_config(semi, 2, 2);
    CHECK_THROWS_AS(wr::reference_path(semi, a, b), std::invalid_argument);

    wr::Lattice lat(3, 3, wr::BoundaryCondition::open);
    const auto s1 = wr::stable_config(lat, 2, 1);
    CHECK_THROWS_AS(wr::reference_path(lat, s1, s1), std::invalid_argument);

    auto not_stable = s1;
    not_stable.labels[0] = 0;
    CHECK_THROWS_AS(wr::reference_path(lat, not_stable, wr::stable_config(lat, 2, 2)),
                    std::invalid_argument);

    auto other_m = wr::stable_config(lat, 3, 2);
    CHECK_THROWS_AS(wr::reference_path(lat, s1, other_m), std::invalid_argument);
}
