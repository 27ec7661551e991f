#pragma once

// Finite metric spaces and discretized length spaces: distance matrices,
// graph geodesics, comparison angles between actual points, quadruple
// curvature scans and a local kappa-domain check.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "alexkit/model_trig.hpp"

namespace alexkit {

inline constexpr double kMetricTol = 1e-9;

// ---------------------------------------------------------------------------
// Finite metric spaces

class FiniteMetricSpace {
  public:
    FiniteMetricSpace() = default;
    /// Row-major n x n matrix; validated (zero diagonal, symmetry and
    /// triangle inequality up to kMetricTol) unless `validate` is false.
    FiniteMetricSpace(std::size_t n, std::vector<double> dist, bool validate = true);

    [[nodiscard]] std::size_t size() const noexcept { return n_; }
    [[nodiscard]] double operator()(std::size_t i, std::size_t j) const noexcept { return d_[i * n_ + j]; }
    [[nodiscard]] const std::vector<double>& matrix() const noexcept { return d_; }

    /// Throws DomainError describing the first violated axiom.
    void check_axioms() const;

    static FiniteMetricSpace from_csv(std::istream& in);
    void to_csv(std::ostream& out) const;

  private:
    std::size_t n_ = 0;
    std::vector<double> d_;
};

/// Points on the unit sphere with great-circle distances.
[[nodiscard]] FiniteMetricSpace sphere_point_space(const std::vector<std::array<double, 3>>& points);

/// n points uniform on the unit sphere from (seed).
[[nodiscard]] std::vector<std::array<double, 3>> random_sphere_points(std::size_t n, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Discretized length spaces

struct SpacePoint {
    std::array<double, 3> pos{0.0, 0.0, 0.0};
    int dim = 2;  // 2: xy, 3: xyz
    bool in_u = true;
};

struct SpaceEdge {
    std::size_t i = 0;
    std::size_t j = 0;
    double w = 0.0;
    // False for edges that exist only in the completion (e.g. crossing a slit).
    bool in_u = true;
};

/// Ambient geometry for exact reference distances.
enum class Ambient { none, plane, sphere };

struct SpaceMeta {
    std::string generator;
    double h = 0.0;
    double h_err = 0.0;
    Ambient ambient = Ambient::none;
    // Ambient distance equals the completion's intrinsic distance.
    bool ambient_exact = false;
    // Worst direction error of a discrete geodesic near its start (radians).
    double angle_res = 0.0;
    nlohmann::json params = nlohmann::json::object();
};

class DiscreteLengthSpace {
  public:
    DiscreteLengthSpace() = default;
    DiscreteLengthSpace(std::vector<SpacePoint> points, std::vector<SpaceEdge> edges, SpaceMeta meta);

    [[nodiscard]] std::size_t size() const noexcept { return points_.size(); }
    [[nodiscard]] const std::vector<SpacePoint>& points() const noexcept { return points_; }
    [[nodiscard]] const std::vector<SpaceEdge>& edges() const noexcept { return edges_; }
    [[nodiscard]] const SpaceMeta& meta() const noexcept { return meta_; }
    [[nodiscard]] bool in_u(std::size_t v) const { return points_.at(v).in_u; }
    [[nodiscard]] std::vector<std::size_t> u_vertices() const;

    struct Arc {
        std::size_t to;
        double w;
        bool in_u;
    };
    [[nodiscard]] const std::vector<Arc>& neighbors(std::size_t v) const { return adj_[v]; }

    /// Distance in the ambient model (plane or unit sphere); throws if none.
    [[nodiscard]] double ambient_distance(std::size_t i, std::size_t j) const;

    /// Checks positive weights, embedded lengths (within kMetricTol, relative
    /// for the coordinate metric) and connectivity of the completion graph.
    void validate() const;

    [[nodiscard]] nlohmann::json to_json() const;
    static DiscreteLengthSpace from_json(const nlohmann::json& j);

  private:
    std::vector<SpacePoint> points_;
    std::vector<SpaceEdge> edges_;
    SpaceMeta meta_;
    std::vector<std::vector<Arc>> adj_;
};

[[nodiscard]] std::string to_string(Ambient a);
[[nodiscard]] Ambient ambient_from_string(const std::string& s);

// ---------------------------------------------------------------------------
// Geodesics

struct GeodesicPath {
    std::vector<std::size_t> vertices;
    std::vector<double> arc;  // cumulative arc length, arc[0] = 0
    [[nodiscard]] double length() const { return arc.empty() ? 0.0 : arc.back(); }
    /// First vertex with arc length >= t (the last vertex if none).
    [[nodiscard]] std::size_t vertex_at(double t) const;
};

inline constexpr double kInfDistance = std::numeric_limits<double>::infinity();

/// Single-source shortest paths.  Among equal-length predecessors the one
/// with the smaller vertex index wins, so paths are deterministic.
struct ShortestPathTree {
    std::size_t source = 0;
    bool restrict_to_u = false;
    std::vector<double> dist;
    std::vector<std::size_t> pred;  // pred[source] == source; unreachable: SIZE_MAX

    [[nodiscard]] bool reachable(std::size_t v) const { return dist[v] < kInfDistance; }
    /// Path source -> v; throws Unreachable.
    [[nodiscard]] GeodesicPath path_to(std::size_t v) const;
};

[[nodiscard]] ShortestPathTree shortest_paths(const DiscreteLengthSpace& space, std::size_t source,
                                              bool restrict_to_u);

[[nodiscard]] GeodesicPath shortest_path(const DiscreteLengthSpace& space, std::size_t from,
                                         std::size_t to, bool restrict_to_u);

/// Finite metric space on a vertex subset, with graph distances (completion
/// or U) or with the ambient distance.
enum class SubsetMetric { completion_graph, u_graph, ambient };
[[nodiscard]] FiniteMetricSpace induced_metric(const DiscreteLengthSpace& space,
                                               const std::vector<std::size_t>& vertices,
                                               SubsetMetric metric);

// ---------------------------------------------------------------------------
// Comparison angles and the quadruple condition

/// angle~_kappa(q; p, s) from the three pairwise distances.
[[nodiscard]] ModelAngle comparison_angle(const FiniteMetricSpace& ms, std::size_t q, std::size_t p,
                                          std::size_t s, Curvature kappa);

/// 2 pi - sum_{i<j} angle~_kappa(p; x_i, x_j); nullopt when some model angle
/// is undefined (the condition is then vacuous).
[[nodiscard]] std::optional<double> quadruple_defect(const FiniteMetricSpace& ms, std::size_t p,
                                                     std::size_t x1, std::size_t x2, std::size_t x3,
                                                     Curvature kappa);

struct ScanOptions {
    std::size_t samples = 100000;
    std::uint64_t seed = 0;
    double tol = 1e-6;
    // Enumerate all ordered quadruples (p; {x1,x2,x3}) when the space has
    // fewer than exhaustive_below points and the count is <= samples.
    std::size_t exhaustive_below = 500;
    bool search_kappa_max = true;
    double kappa_search_lo = -4.0;
    double kappa_search_hi = 4.0;
    int kappa_search_steps = 40;
};

struct QuadrupleWitness {
    std::array<std::size_t, 4> points{};  // p, x1, x2, x3
    double defect = 0.0;
};

struct ScanReport {
    double kappa = 0.0;
    std::size_t samples = 0;
    std::size_t evaluated = 0;
    std::size_t vacuous = 0;
    std::size_t violations = 0;  // defect < -tol
    bool exhaustive = false;
    double min_defect = 0.0;
    std::optional<QuadrupleWitness> worst;
    double tol = 0.0;
    // Largest kappa in the search bracket for which every sampled quadruple
    // has defect >= -tol; kappa_max_bracketed is false when the predicate
    // already holds at the upper end.
    std::optional<double> kappa_max;
    bool kappa_max_bracketed = false;
};

[[nodiscard]] ScanReport scan_quadruples(const FiniteMetricSpace& ms, Curvature kappa,
                                         const ScanOptions& opts = {});

// ---------------------------------------------------------------------------
// Local kappa-domain check

struct LocalCheckOptions {
    std::size_t samples = 200;
    std::uint64_t seed = 0;
    double h_angle_cells = 3.0;
    // Direction error of a discrete geodesic at scale h_angle, in radians,
    // added per direction; defaults to the generator's angular resolution.
    std::optional<double> direction_tol;
};

struct LocalViolation {
    std::string condition;  // "toponogov" or "angle_sum"
    std::array<std::size_t, 4> points{};  // q, p, s, x
    double excess = 0.0;    // amount beyond tolerance
};

struct LocalCheckReport {
    bool vacuous = false;
    std::size_t ball_size = 0;
    std::size_t samples = 0;
    std::size_t evaluated = 0;
    std::size_t undefined = 0;
    std::size_t toponogov_violations = 0;
    std::size_t angle_sum_violations = 0;
    double h_angle = 0.0;
    double direction_tol = 0.0;
    double worst_toponogov = 0.0;   // max of comparison - discrete - tol
    double worst_angle_sum = 0.0;   // max of |sum - pi| - tol
    std::vector<LocalViolation> examples;  // first few violations
    [[nodiscard]] bool passed() const { return toponogov_violations == 0 && angle_sum_violations == 0; }
};

/// Samples q, s in the ball around `center` (intrinsic U-distance < radius),
/// an interior vertex x of the U-geodesic [qs] and a point p, then checks
///   angle(q; p, s) >= angle~_kappa(q; p, s)   and
///   angle(x; p, q) + angle(x; p, s) = pi
/// with angles measured at the scale h_angle.  Throws InsufficientResolution
/// when geodesics in the ball are too short to reach h_angle.
[[nodiscard]] LocalCheckReport local_kappa_domain_check(const DiscreteLengthSpace& space, std::size_t center,
                                                        double radius, Curvature kappa,
                                                        const LocalCheckOptions& opts = {});

}  // namespace alexkit
