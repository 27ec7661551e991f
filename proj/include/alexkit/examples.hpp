#pragma once

// Domain generators: geodesic caps on the unit sphere, the dense family of
// rational-segment neighbourhoods in the unit square, punctured and slit
// squares, and squares with custom obstacles.  Also the completion-distance
// experiment and a Monte Carlo area estimate for the dense family.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "alexkit/metric_space.hpp"

namespace alexkit {

enum class DomainKind { cap, dense_square, punctured, custom };

[[nodiscard]] std::string to_string(DomainKind k);
[[nodiscard]] DomainKind domain_kind_from_string(const std::string& s);

struct DomainSpec {
    DomainKind kind = DomainKind::punctured;
    double h = 0.02;  // mesh parameter

    // cap: open ball of radius r around the north pole of the unit sphere.
    double r = 1.0;

    // Square domains live on [0, side]^2.
    double side = 1.0;

    // dense_square: U = union of B_{r_i}(gamma_i), i = 1..K, sum r_i = delta/4.
    double delta = 0.2;
    std::size_t segments = 200;
    std::vector<double> radii;  // empty: geometric schedule

    // punctured: removed points and slits [x0, y0, x1, y1].
    std::vector<std::array<double, 2>> removed_points;
    std::vector<std::array<double, 4>> slits;

    // custom: removed closed disks [cx, cy, radius] and rectangles
    // [x0, y0, x1, y1].
    std::vector<std::array<double, 3>> disks;
    std::vector<std::array<double, 4>> rects;

    void validate() const;
    [[nodiscard]] nlohmann::json to_json() const;
    static DomainSpec from_json(const nlohmann::json& j);
};

inline constexpr std::size_t kMinUVertices = 100;

/// Generates the discretization.  Rejects (DomainError) meshes with fewer
/// than kMinUVertices vertices in U.  The seed only drives the pair sample
/// used to measure h_err on the sphere.
[[nodiscard]] DiscreteLengthSpace generate(const DomainSpec& spec, std::uint64_t seed = 0);

// ---------------------------------------------------------------------------
// Dense family of rational segments

struct RationalPoint {
    long num_x = 0;
    long num_y = 0;
    long den = 1;
    [[nodiscard]] double x() const { return static_cast<double>(num_x) / static_cast<double>(den); }
    [[nodiscard]] double y() const { return static_cast<double>(num_y) / static_cast<double>(den); }
};

struct RationalSegment {
    RationalPoint a;
    RationalPoint b;
    [[nodiscard]] double length() const;
};

/// Rational points of [0,1]^2 ordered by reduced common denominator, then
/// lexicographically by (x, y); segments (P_i, P_j), i < j, ordered by j then
/// i.  Returns the first `count` segments.
[[nodiscard]] std::vector<RationalSegment> rational_segments(std::size_t count);

/// r_i = (delta/4) 2^{-i} / (1 - 2^{-K}), so that sum r_i = delta/4.
[[nodiscard]] std::vector<double> default_radii(double delta, std::size_t k);

/// Distance from (x, y) to the segment.
[[nodiscard]] double segment_distance(const RationalSegment& s, double x, double y);

struct AreaEstimate {
    double estimate = 0.0;
    double sigma = 0.0;        // binomial standard error of the estimate
    double union_bound = 0.0;  // sum (2 L_i r_i + pi r_i^2)
    std::size_t samples = 0;
    std::size_t hits = 0;
    double delta = 0.0;
};

/// Monte Carlo H^2(U) for a dense_square spec (exact tube membership).
[[nodiscard]] AreaEstimate area_estimate(const DomainSpec& spec, std::size_t samples, std::uint64_t seed);

struct CompletionReport {
    std::size_t pairs = 0;
    std::size_t matched = 0;
    std::size_t misses = 0;  // no bundled segment within epsilon of both points
    double epsilon = 0.0;
    double h_err = 0.0;
    // |d_completion(p, q) - d_U(p', q')| over matched pairs; the chain below
    // bounds it by 4 eps.
    double max_gap = 0.0;
    // Violations of the three links of
    //   d_completion(p,q) >= d_X(p,q) >= d_U(p',q') - 2 eps >= d_completion(p,q) - 4 eps
    // with tolerance 1e-9 on the first two and 2 h_err on the last.
    std::array<std::size_t, 3> link_violations{};
    double max_violation = 0.0;  // largest amount by which a link fails
    struct Witness {
        std::size_t p = 0, q = 0, p_bar = 0, q_bar = 0;
        std::size_t segment = 0;
        double d_completion = 0.0, d_x = 0.0, d_u = 0.0;
    };
    std::optional<Witness> worst;  // pair attaining max_gap
};

/// Requires a dense_square space.  For random vertex pairs (p, q) finds a
/// bundled segment passing within epsilon of both, takes the nearest chain
/// vertices p', q' on it and compares distances.
[[nodiscard]] CompletionReport completion_compare(const DiscreteLengthSpace& space, std::size_t pairs,
                                                  double epsilon, std::uint64_t seed);

}  // namespace alexkit
