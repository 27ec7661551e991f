#pragma once

// Probabilistic convexity on discretized incomplete domains: the fraction of
// a completion geodesic [qs] that a point p reaches by a geodesic inside U,
// searches over epsilon-perturbations of a triple, and a.e.-convexity.

#include <cstdint>
#include <optional>
#include <vector>

#include "alexkit/metric_space.hpp"

namespace alexkit {

/// Distances from p inside U and in the completion.
struct ReachFrom {
    ShortestPathTree in_u;
    ShortestPathTree completion;
};
[[nodiscard]] ReachFrom reach_from(const DiscreteLengthSpace& space, std::size_t p);

/// Default slack 2 h_err of the space.
[[nodiscard]] double default_slack(const DiscreteLengthSpace& space);

/// x is reached from p by a U-path no longer than (1 + slack) times the
/// completion distance.
[[nodiscard]] bool connectable(const ReachFrom& from, std::size_t x, double slack);
[[nodiscard]] bool connectable(const DiscreteLengthSpace& space, std::size_t p, std::size_t x, double slack);

struct ConvexitySample {
    double arc = 0.0;
    std::size_t vertex = 0;
    bool connectable = false;
};

struct ConvexityReport {
    double probability = 0.0;
    std::size_t samples = 0;
    double connected_measure = 0.0;
    double total_measure = 0.0;
    double margin = 0.0;  // Wilson half-width at 95%
    double lambda_hat = 0.0;
    double epsilon = 0.0;
    double step = 0.0;
    double slack = 0.0;
    std::size_t p = 0, q = 0, s = 0;  // the triple the probability refers to
    std::size_t candidates_tried = 0;
    std::vector<ConvexitySample> series;
};

/// Samples the completion geodesic [qs] at the midpoints of ceil(L/step)
/// equal pieces and reports the connectable fraction.  step <= 0 means one
/// mesh cell.
[[nodiscard]] ConvexityReport prob_convexity(const DiscreteLengthSpace& space, std::size_t p, std::size_t q,
                                             std::size_t s, double step, double slack);

/// Same, with a precomputed reach from p and a given geodesic [qs].
[[nodiscard]] ConvexityReport prob_convexity(const DiscreteLengthSpace& space, const ReachFrom& from,
                                             const GeodesicPath& qs, double step, double slack);

struct SearchOptions {
    std::size_t candidates = 64;
    double step = 0.0;
    std::optional<double> slack;
    std::uint64_t seed = 0;
    std::size_t rings = 4;
};

/// Maximizes prob_convexity over U vertices p1, q1, s1 within epsilon of p,
/// q, s (stratified by distance ring) and over the two geodesics [q1 s1]
/// and [s1 q1].  lambda_hat is the best probability found.
[[nodiscard]] ConvexityReport weak_lambda_search(const DiscreteLengthSpace& space, std::size_t p, std::size_t q,
                                                 std::size_t s, double epsilon, const SearchOptions& opts = {});

struct AeReport {
    double fraction = 0.0;
    std::size_t samples = 0;
    std::size_t connected = 0;
    double margin = 0.0;
    double slack = 0.0;
};

/// Fraction of uniformly sampled U vertices connectable to p (all U
/// vertices when samples == 0).
[[nodiscard]] AeReport ae_convexity_estimate(const DiscreteLengthSpace& space, std::size_t p, std::size_t samples,
                                             double slack, std::uint64_t seed);

}  // namespace alexkit
