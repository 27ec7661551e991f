#include <doctest.h>

#include <cmath>
#include <numbers>

#include "alexkit/convexity.hpp"
#include "alexkit/examples.hpp"
#include "alexkit/sampling.hpp"

using namespace alexkit;
using std::numbers::pi;

namespace {

DomainSpec cap_spec(double r, double h) {
    DomainSpec s;
    s.kind = DomainKind::cap;
    s.r = r;
    s.h = h;
    return s;
}

DomainSpec dense_spec(std::size_t k, double h = 0.02, double delta = 0.2) {
    DomainSpec s;
    s.kind = DomainKind::dense_square;
    s.segments = k;
    s.h = h;
    s.delta = delta;
    return s;
}

}  // namespace

TEST_SUITE("examples") {

TEST_CASE("spec validation") {
    CHECK_THROWS_AS(cap_spec(0.0, 0.1).validate(), DomainError);
    CHECK_THROWS_AS(cap_spec(pi, 0.1).validate(), DomainError);
    CHECK_THROWS_AS(cap_spec(1.0, 0.0).validate(), DomainError);
    DomainSpec d = dense_spec(3);
    d.radii = {0.02, 0.02, 0.02};  // sum 0.06 > delta / 4 = 0.05
    CHECK_THROWS_AS(d.validate(), DomainError);
    d.radii = {0.02, 0.02};
    CHECK_THROWS_AS(d.validate(), DomainError);
    d.radii = {0.02, 0.02, 0.01};
    CHECK_NOTHROW(d.validate());
    const DomainSpec back = DomainSpec::from_json(d.to_json());
    CHECK(back.to_json() == d.to_json());
}

TEST_CASE("too coarse meshes are rejected") {
    CHECK_THROWS_AS((void)generate(cap_spec(0.3, 0.2)), DomainError);
    DomainSpec sq;
    sq.h = 0.25;
    CHECK_THROWS_AS((void)generate(sq), DomainError);
}

TEST_CASE("punctured square: one removed vertex") {
    DomainSpec s;
    s.h = 0.05;
    const DiscreteLengthSpace full = generate(s);
    s.removed_points = {{0.5, 0.5}};
    const DiscreteLengthSpace punct = generate(s);
    CHECK(full.size() == punct.size());
    CHECK(punct.u_vertices().size() == full.u_vertices().size() - 1);
    CHECK(full.u_vertices().size() == full.size());
}

TEST_CASE("generation is deterministic") {
    CHECK(generate(cap_spec(1.0, 0.1), 3).to_json() == generate(cap_spec(1.0, 0.1), 3).to_json());
    CHECK(generate(dense_spec(40, 0.05)).to_json() == generate(dense_spec(40, 0.05)).to_json());
}

TEST_CASE("rational segment enumeration") {
    const auto segs = rational_segments(10);
    REQUIRE(segs.size() == 10);
    // Denominator-1 points (0,0), (0,1), (1,0), (1,1) come first.
    CHECK(segs[0].a.x() == 0.0);
    CHECK(segs[0].a.y() == 0.0);
    CHECK(segs[0].b.x() == 0.0);
    CHECK(segs[0].b.y() == 1.0);
    CHECK(segs[5].b.x() == 1.0);
    CHECK(segs[5].b.y() == 1.0);
    // (1/2, 1/2) is the first denominator-2 point after (0,1/2), (1/2,0).
    for (const auto& s : segs) {
        CHECK(s.a.den >= 1);
        CHECK(s.b.den >= s.a.den);
    }
    const auto r = default_radii(0.2, 200);
    double sum = 0.0;
    for (double x : r) {
        CHECK(x > 0.0);
        sum += x;
    }
    CHECK(std::fabs(sum - 0.05) <= 1e-15);
    CHECK(r[1] == doctest::Approx(r[0] / 2));
}

TEST_CASE("cap metadata and geodesic sanity") {
    for (double r : {0.4 * pi, pi / 2}) {
        const DiscreteLengthSpace cap = generate(cap_spec(r, 0.1), 1);
        CHECK(cap.meta().ambient_exact);
        CHECK(cap.meta().h_err > 0.0);
        CHECK(cap.meta().h_err < 0.1);
        const auto u = cap.u_vertices();
        CHECK(u.size() >= kMinUVertices);
        for (std::size_t v : u) CHECK(std::acos(cap.points()[v].pos[2]) < r);
        // U-graph distances track the great-circle distance.
        for (std::size_t k = 0; k < 4; ++k) {
            Rng rng(2, k);
            const std::size_t src = u[rng.index(0, u.size() - 1)];
            const ShortestPathTree t = shortest_paths(cap, src, true);
            for (std::size_t v : u) {
                const double e = cap.ambient_distance(src, v);
                if (e < 5 * cap.meta().h) continue;
                CHECK(t.dist[v] >= e - 1e-9);
                CHECK(t.dist[v] <= (1 + 1.5 * cap.meta().h_err) * e);
            }
        }
    }
    // Large caps: some U pair is joined in the sphere across the hole, far
    // shorter than any path in U.
    const DiscreteLengthSpace big = generate(cap_spec(0.9 * pi, 0.1), 1);
    CHECK_FALSE(big.meta().ambient_exact);
    const auto u = big.u_vertices();
    double worst = 0.0;
    for (std::size_t k = 0; k < 4; ++k) {
        Rng rng(5, k);
        const std::size_t src = u[rng.index(0, u.size() - 1)];
        const ShortestPathTree t = shortest_paths(big, src, true);
        for (std::size_t v : u) worst = std::max(worst, t.dist[v] / std::max(big.ambient_distance(src, v), 1e-12));
    }
    CHECK(worst > 1 + 2 * big.meta().h_err);
}

TEST_CASE("hemisphere cap is convex") {
    const DiscreteLengthSpace cap = generate(cap_spec(pi / 2, 0.1), 0);
    const auto u = cap.u_vertices();
    const double slack = default_slack(cap);
    for (std::size_t k = 0; k < 6; ++k) {
        Rng rng(8, k);
        const std::size_t p = u[rng.index(0, u.size() - 1)];
        const AeReport ae = ae_convexity_estimate(cap, p, 0, slack, 0);
        CHECK(ae.samples == u.size());
        CHECK(ae.fraction == 1.0);
    }
}

TEST_CASE("dense square: structure") {
    const DiscreteLengthSpace sp = generate(dense_spec(200));
    CHECK(sp.meta().generator == "dense_square");
    const auto& bundle = sp.meta().params.at("bundle");
    CHECK(bundle.size() == 200);
    // Every U vertex has an edge inside U.
    std::vector<char> has(sp.size(), 0);
    for (const SpaceEdge& e : sp.edges())
        if (e.in_u) has[e.i] = has[e.j] = 1;
    for (std::size_t v : sp.u_vertices()) CHECK(has[v]);
    CHECK_NOTHROW(sp.validate());
    // The chain of a bundled segment is a U path of exactly the segment's length.
    const auto segs = rational_segments(200);
    for (std::size_t i : {0u, 7u, 150u}) {
        const auto chain = bundle.at(i).at("chain").get<std::vector<std::size_t>>();
        const ShortestPathTree t = shortest_paths(sp, chain.front(), true);
        const ShortestPathTree c = shortest_paths(sp, chain.front(), false);
        const double len = segs[i].length();
        CHECK(std::fabs(t.dist[chain.back()] - len) <= 1e-12);
        // Endpoints of a bundled segment: completion and U distances agree.
        CHECK(c.dist[chain.back()] <= t.dist[chain.back()] + 1e-12);
        CHECK(c.dist[chain.back()] >= len - 1e-12);
    }
}

TEST_CASE("dense square: area") {
    const AreaEstimate a = area_estimate(dense_spec(200), 100000, 1);
    CHECK(a.estimate <= 0.2 + 3 * a.sigma);
    CHECK(a.estimate <= a.union_bound + 3 * a.sigma);
    DomainSpec tiny = dense_spec(50);
    tiny.radii.assign(50, 1e-9);
    CHECK(area_estimate(tiny, 20000, 1).estimate == 0.0);
    // Union bound sum (2 sqrt(2) r_i + pi r_i^2) < 1 for delta = 0.99.
    const DomainSpec big = dense_spec(3000, 0.02, 0.99);
    const auto radii = default_radii(0.99, 3000);
    double oracle = 0.0;
    for (double r : radii) oracle += 2 * std::sqrt(2.0) * r + pi * r * r;
    CHECK(oracle < 1.0);
    const AreaEstimate b = area_estimate(big, 20000, 2);
    CHECK(b.union_bound <= oracle + 1e-12);
    CHECK(b.estimate < 1.0);
    CHECK(b.estimate <= oracle + 3 * b.sigma);
}

TEST_CASE("completion comparison") {
    const DiscreteLengthSpace sp = generate(dense_spec(200));
    const CompletionReport r = completion_compare(sp, 200, 0.05, 0);
    CHECK(r.pairs == 200);
    CHECK(r.matched + r.misses == 200);
    CHECK(r.matched > 50);
    CHECK(r.max_gap <= 4 * 0.05 + 2 * r.h_err);
    CHECK(r.link_violations == std::array<std::size_t, 3>{0, 0, 0});

    const DiscreteLengthSpace one = generate(dense_spec(1));
    const CompletionReport m = completion_compare(one, 200, 0.05, 0);
    CHECK(m.misses > 150);

    DomainSpec sq;
    sq.h = 0.05;
    CHECK_THROWS_AS((void)completion_compare(generate(sq), 10, 0.05, 0), DomainError);
}

TEST_CASE("custom obstacles") {
    DomainSpec s;
    s.kind = DomainKind::custom;
    s.h = 0.05;
    s.disks = {{0.5, 0.5, 0.2}};
    const DiscreteLengthSpace sp = generate(s);
    CHECK_FALSE(sp.meta().ambient_exact);
    for (std::size_t v : sp.u_vertices()) {
        const auto& p = sp.points()[v].pos;
        CHECK(std::hypot(p[0] - 0.5, p[1] - 0.5) > 0.2);
    }
}

}
