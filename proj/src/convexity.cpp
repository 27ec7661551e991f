#include "alexkit/convexity.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "alexkit/sampling.hpp"

namespace alexkit {

ReachFrom reach_from(const DiscreteLengthSpace& space, std::size_t p) {
    if (!space.in_u(p)) throw DomainError("convexity: base point must lie in U");
    return {shortest_paths(space, p, true), shortest_paths(space, p, false)};
}

double default_slack(const DiscreteLengthSpace& space) { return 2.0 * space.meta().h_err; }

bool connectable(const ReachFrom& from, std::size_t x, double slack) {
    if (x == from.in_u.source) return true;
    if (!from.in_u.reachable(x)) return false;
    return from.in_u.dist[x] <= (1.0 + slack) * from.completion.dist[x];
}

bool connectable(const DiscreteLengthSpace& space, std::size_t p, std::size_t x, double slack) {
    if (p == x) return true;
    if (!space.in_u(p) || !space.in_u(x)) return false;
    return connectable(reach_from(space, p), x, slack);
}

ConvexityReport prob_convexity(const DiscreteLengthSpace& space, const ReachFrom& from, const GeodesicPath& qs,
                               double step, double slack) {
    ConvexityReport rep;
    rep.step = step > 0.0 ? step : space.meta().h;
    rep.slack = slack;
    rep.p = from.in_u.source;
    rep.q = qs.vertices.front();
    rep.s = qs.vertices.back();
    const double len = qs.length();
    if (!(len > 0.0)) throw DomainError("prob_convexity: q and s coincide");
    const auto pieces = static_cast<std::size_t>(std::max(1.0, std::ceil(len / rep.step)));
    const double piece = len / static_cast<double>(pieces);
    std::size_t good = 0;
    for (std::size_t k = 0; k < pieces; ++k) {
        const double t = (static_cast<double>(k) + 0.5) * piece;
        const std::size_t x = qs.vertex_at(t);
        const bool ok = space.in_u(x) && connectable(from, x, slack);
        good += ok ? 1 : 0;
        rep.series.push_back({t, x, ok});
    }
    rep.samples = pieces;
    rep.total_measure = len;
    rep.connected_measure = piece * static_cast<double>(good);
    rep.probability = static_cast<double>(good) / static_cast<double>(pieces);
    rep.margin = wilson_half_width(good, pieces);
    rep.lambda_hat = rep.probability;
    return rep;
}

ConvexityReport prob_convexity(const DiscreteLengthSpace& space, std::size_t p, std::size_t q, std::size_t s,
                               double step, double slack) {
    if (q == s) throw DomainError("prob_convexity: q and s must differ");
    const GeodesicPath qs = shortest_path(space, q, s, false);
    return prob_convexity(space, reach_from(space, p), qs, step, slack);
}

namespace {

// U vertices within epsilon of v (ambient distance when available), grouped
// into distance rings, nearest first.
std::vector<std::vector<std::size_t>> ball_rings(const DiscreteLengthSpace& space, std::size_t v, double epsilon,
                                                 std::size_t rings) {
    std::vector<std::vector<std::size_t>> out(std::max<std::size_t>(rings, 1));
    std::vector<double> d(space.size(), kInfDistance);
    if (space.meta().ambient != Ambient::none) {
        for (std::size_t u = 0; u < space.size(); ++u) d[u] = space.ambient_distance(v, u);
    } else {
        d = shortest_paths(space, v, false).dist;
    }
    for (std::size_t u = 0; u < space.size(); ++u) {
        if (!space.in_u(u) || !(d[u] < epsilon)) continue;
        const auto k = std::min(out.size() - 1, static_cast<std::size_t>(d[u] / epsilon * static_cast<double>(out.size())));
        out[k].push_back(u);
    }
    return out;
}

std::size_t draw(Rng& rng, const std::vector<std::vector<std::size_t>>& rings, std::size_t ring_hint, std::size_t fallback) {
    for (std::size_t k = 0; k < rings.size(); ++k) {
        const auto& r = rings[(ring_hint + k) % rings.size()];
        if (!r.empty()) return r[rng.index(0, r.size() - 1)];
    }
    return fallback;
}

}  // namespace

ConvexityReport weak_lambda_search(const DiscreteLengthSpace& space, std::size_t p, std::size_t q, std::size_t s,
                                   double epsilon, const SearchOptions& opts) {
    if (!(epsilon > 0.0)) throw DomainError("weak_lambda_search: epsilon must be positive");
    const double slack = opts.slack.value_or(default_slack(space));
    const auto rp = ball_rings(space, p, epsilon, opts.rings);
    const auto rq = ball_rings(space, q, epsilon, opts.rings);
    const auto rs = ball_rings(space, s, epsilon, opts.rings);
    auto empty = [](const std::vector<std::vector<std::size_t>>& r) {
        return std::all_of(r.begin(), r.end(), [](const auto& x) { return x.empty(); });
    };
    if (empty(rp) || empty(rq) || empty(rs)) throw DomainError("weak_lambda_search: an epsilon-ball contains no U vertex");

    ConvexityReport best;
    best.lambda_hat = -1.0;
    std::size_t tried = 0;
    for (std::size_t c = 0; c < opts.candidates; ++c) {
        Rng rng(opts.seed, c);
        std::size_t p1 = p, q1 = q, s1 = s;
        if (c > 0 || !space.in_u(p) || !space.in_u(q) || !space.in_u(s)) {
            // Cycle the ring of each point so every distance band is visited.
            p1 = draw(rng, rp, c % opts.rings, p);
            q1 = draw(rng, rq, (c / opts.rings) % opts.rings, q);
            s1 = draw(rng, rs, (c / (opts.rings * opts.rings)) % opts.rings, s);
        }
        if (q1 == s1 || !space.in_u(p1)) continue;
        const ReachFrom from = reach_from(space, p1);
        const GeodesicPath forward = shortest_path(space, q1, s1, false);
        const GeodesicPath backward = shortest_path(space, s1, q1, false);
        for (const GeodesicPath* g : std::array<const GeodesicPath*, 2>{&forward, &backward}) {
            ++tried;
            ConvexityReport r = prob_convexity(space, from, *g, opts.step, slack);
            if (r.probability > best.lambda_hat) {
                best = std::move(r);
                best.lambda_hat = best.probability;
            }
            if (best.lambda_hat >= 1.0) break;
        }
        if (best.lambda_hat >= 1.0) break;
    }
    if (best.lambda_hat < 0.0) throw DomainError("weak_lambda_search: no admissible candidate triple");
    best.epsilon = epsilon;
    best.candidates_tried = tried;
    return best;
}

AeReport ae_convexity_estimate(const DiscreteLengthSpace& space, std::size_t p, std::size_t samples, double slack,
                               std::uint64_t seed) {
    const ReachFrom from = reach_from(space, p);
    const std::vector<std::size_t> u = space.u_vertices();
    AeReport rep;
    rep.slack = slack;
    if (samples == 0) {
        for (std::size_t x : u) rep.connected += connectable(from, x, slack) ? 1 : 0;
        rep.samples = u.size();
    } else {
        for (std::size_t t = 0; t < samples; ++t) {
            Rng rng(seed, t);
            rep.connected += connectable(from, u[rng.index(0, u.size() - 1)], slack) ? 1 : 0;
        }
        rep.samples = samples;
    }
    rep.fraction = rep.samples ? static_cast<double>(rep.connected) / static_cast<double>(rep.samples) : 0.0;
    rep.margin = wilson_half_width(rep.connected, rep.samples);
    return rep;
}

}  // namespace alexkit
