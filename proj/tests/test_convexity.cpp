#include <doctest.h>

#include <cmath>
#include <numbers>

#include "alexkit/convexity.hpp"
#include "alexkit/examples.hpp"
#include "alexkit/sampling.hpp"

using namespace alexkit;
using std::numbers::pi;

namespace {

DiscreteLengthSpace square(double h, std::vector<std::array<double, 2>> removed = {},
                           std::vector<std::array<double, 4>> slits = {}) {
    DomainSpec s;
    s.h = h;
    s.removed_points = std::move(removed);
    s.slits = std::move(slits);
    return generate(s);
}

std::size_t near(const DiscreteLengthSpace& sp, double x, double y, double z = 0.0) {
    std::size_t best = 0;
    double bd = 1e300;
    for (std::size_t v = 0; v < sp.size(); ++v) {
        if (!sp.in_u(v)) continue;
        const auto& p = sp.points()[v].pos;
        const double d = std::hypot(p[0] - x, p[1] - y, p[2] - z);
        if (d < bd) {
            bd = d;
            best = v;
        }
    }
    return best;
}

std::array<double, 3> on_sphere(double colat, double lon) {
    return {std::sin(colat) * std::cos(lon), std::sin(colat) * std::sin(lon), std::cos(colat)};
}

}  // namespace

TEST_SUITE("convexity") {

TEST_CASE("connectable in a convex square") {
    const DiscreteLengthSpace sp = square(0.05);
    for (std::size_t p : {near(sp, 0, 0), near(sp, 0.3, 0.8), near(sp, 1, 0.5)}) {
        const AeReport ae = ae_convexity_estimate(sp, p, 0, 0.0, 0);
        CHECK(ae.fraction == 1.0);
        CHECK(connectable(sp, p, p, 0.0));
    }
}

TEST_CASE("chord through a removed vertex") {
    const DiscreteLengthSpace sp = square(0.1, {{0.5, 0.5}});
    const std::size_t p = near(sp, 0, 0.5), x = near(sp, 1, 0.5);
    const double ratio = shortest_path(sp, p, x, true).length() / shortest_path(sp, p, x, false).length();
    CHECK(ratio > 1.0);
    CHECK_FALSE(connectable(sp, p, x, ratio - 1.0 - 1e-9));
    CHECK(connectable(sp, p, x, ratio - 1.0 + 1e-12));
    CHECK(connectable(sp, p, p, 0.0));
}

TEST_CASE("slack monotonicity") {
    const DiscreteLengthSpace sp = square(0.05, {}, {{0.5, 0.1, 0.5, 0.9}});
    const std::size_t p = near(sp, 0.3, 0.5), q = near(sp, 0.7, 0.2), s = near(sp, 0.7, 0.9);
    double prev = -1.0;
    bool prev_conn = false;
    const std::size_t x = near(sp, 0.7, 0.5);
    for (double slack : {0.0, 0.02, 0.05, 0.1, 0.3, 1.0, 3.0}) {
        const double pr = prob_convexity(sp, p, q, s, 0.0, slack).probability;
        CHECK(pr >= prev);
        prev = pr;
        const bool c = connectable(sp, p, x, slack);
        CHECK((c || !prev_conn));
        prev_conn = c;
    }
    CHECK(prev == 1.0);
}

TEST_CASE("punctured square: generic triple has probability 1") {
    const DiscreteLengthSpace sp = square(0.05, {{0.5, 0.5}});
    const ConvexityReport r = prob_convexity(sp, near(sp, 0.2, 0.3), near(sp, 0.8, 0.1), near(sp, 0.6, 0.9), 0.0,
                                             default_slack(sp));
    CHECK(r.probability == 1.0);
    CHECK(r.samples >= 10);
    CHECK(r.total_measure > 0.0);
}

TEST_CASE("punctured square: almost every vertex connectable") {
    const DiscreteLengthSpace sp = square(0.05, {{0.5, 0.5}});
    const std::size_t p = near(sp, 0.1, 0.5);
    // Oracle: vertices whose straight chord from p passes within h/2 of the
    // puncture are the only candidates for failure.
    const auto& pp = sp.points()[p].pos;
    std::size_t shadow = 0;
    const auto u = sp.u_vertices();
    for (std::size_t v : u) {
        const auto& x = sp.points()[v].pos;
        const double dx = x[0] - pp[0], dy = x[1] - pp[1];
        const double t = std::clamp(((0.5 - pp[0]) * dx + (0.5 - pp[1]) * dy) / (dx * dx + dy * dy + 1e-300), 0.0, 1.0);
        if (std::hypot(pp[0] + t * dx - 0.5, pp[1] + t * dy - 0.5) < 0.5 * 0.05) ++shadow;
    }
    const AeReport ae = ae_convexity_estimate(sp, p, 0, default_slack(sp), 0);
    CHECK(ae.fraction >= 1.0 - static_cast<double>(shadow) / static_cast<double>(u.size()));
    const AeReport strict = ae_convexity_estimate(sp, p, 0, 0.0, 0);
    CHECK(strict.fraction < 1.0);
    CHECK(strict.fraction >= 1.0 - static_cast<double>(shadow) / static_cast<double>(u.size()));
}

TEST_CASE("slit square: obstruction of positive measure") {
    const DiscreteLengthSpace sp = square(0.05, {}, {{0.5, 0.1, 0.5, 0.9}});
    const std::size_t p = near(sp, 0.3, 0.5), q = near(sp, 0.7, 0.2), s = near(sp, 0.7, 0.8);
    const double slack = default_slack(sp);
    const AeReport ae = ae_convexity_estimate(sp, p, 0, slack, 0);
    CHECK(ae.fraction < 0.9);
    const ConvexityReport direct = prob_convexity(sp, p, q, s, 0.0, slack);
    CHECK(direct.probability < 0.5);
    SearchOptions o;
    o.candidates = 8;
    const ConvexityReport few = weak_lambda_search(sp, p, q, s, 0.1, o);
    o.candidates = 48;
    const ConvexityReport many = weak_lambda_search(sp, p, q, s, 0.1, o);
    CHECK(many.lambda_hat >= few.lambda_hat);
    CHECK(many.lambda_hat < 1.0);
    CHECK(many.candidates_tried > few.candidates_tried);
}

TEST_CASE("convex domain: lambda_hat = 1 at once") {
    const DiscreteLengthSpace sp = square(0.05);
    const ConvexityReport r = weak_lambda_search(sp, near(sp, 0.1, 0.1), near(sp, 0.9, 0.2), near(sp, 0.4, 0.9), 0.1);
    CHECK(r.lambda_hat == 1.0);
    CHECK(r.candidates_tried == 1);
}

TEST_CASE("dense square: triples adapted to a bundled segment") {
    DomainSpec s;
    s.kind = DomainKind::dense_square;
    s.h = 0.02;
    s.segments = 200;
    const DiscreteLengthSpace sp = generate(s);
    const auto& bundle = sp.meta().params.at("bundle");
    for (std::size_t i : {0u, 3u, 11u, 60u}) {
        const auto chain = bundle.at(i).at("chain").get<std::vector<std::size_t>>();
        if (chain.size() < 4) continue;
        const std::size_t p = chain[chain.size() / 3];
        const ConvexityReport r = weak_lambda_search(sp, p, chain.front(), chain.back(), 0.02);
        CHECK(r.lambda_hat >= 1.0 - 2 * sp.meta().h_err);
    }
}

TEST_CASE("caps: small caps are convex, large caps are not") {
    DomainSpec s;
    s.kind = DomainKind::cap;
    s.h = 0.08;
    s.r = 0.4 * pi;
    const DiscreteLengthSpace small = generate(s);
    const double slack = default_slack(small);
    const auto u = small.u_vertices();
    for (std::size_t t = 0; t < 20; ++t) {
        Rng rng(1, t);
        const std::size_t p = u[rng.index(0, u.size() - 1)], q = u[rng.index(0, u.size() - 1)],
                          x = u[rng.index(0, u.size() - 1)];
        if (q == x) continue;
        CHECK(prob_convexity(small, p, q, x, 0.0, slack).probability == 1.0);
    }
    s.r = 0.9 * pi;
    const DiscreteLengthSpace big = generate(s);
    const double r_in = 0.9 * pi - 2.5 * big.meta().h;
    std::size_t below = 0;
    for (std::size_t t = 0; t < 12; ++t) {
        Rng rng(2, t);
        const double lon = rng.uniform(0, 2 * pi);
        auto pick = [&](double off) {
            const auto c = on_sphere(r_in, lon + off);
            return near(big, c[0], c[1], c[2]);
        };
        const ConvexityReport r = prob_convexity(big, pick(0.0), pick(2.0), pick(4.2), 0.0, default_slack(big));
        below += r.probability < 1.0 ? 1 : 0;
    }
    CHECK(below > 0);
}

TEST_CASE("reports are deterministic") {
    const DiscreteLengthSpace sp = square(0.05, {}, {{0.5, 0.1, 0.5, 0.9}});
    SearchOptions o;
    o.seed = 9;
    o.candidates = 16;
    const std::size_t p = near(sp, 0.3, 0.5), q = near(sp, 0.7, 0.2), s = near(sp, 0.7, 0.8);
    const ConvexityReport a = weak_lambda_search(sp, p, q, s, 0.1, o);
    const ConvexityReport b = weak_lambda_search(sp, p, q, s, 0.1, o);
    CHECK(a.lambda_hat == b.lambda_hat);
    CHECK(a.p == b.p);
    CHECK(a.q == b.q);
    CHECK(a.s == b.s);
    CHECK(ae_convexity_estimate(sp, p, 300, 0.01, 4).connected == ae_convexity_estimate(sp, p, 300, 0.01, 4).connected);
}

}
