#include "alexkit/metric_space.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <queue>
#include <sstream>

#include "alexkit/sampling.hpp"

namespace alexkit {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::size_t kNoVertex = static_cast<std::size_t>(-1);

double great_circle(const std::array<double, 3>& a, const std::array<double, 3>& b) {
    const double cx = a[1] * b[2] - a[2] * b[1];
    const double cy = a[2] * b[0] - a[0] * b[2];
    const double cz = a[0] * b[1] - a[1] * b[0];
    const double dot = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    return std::atan2(std::sqrt(cx * cx + cy * cy + cz * cz), dot);
}

double euclid(const std::array<double, 3>& a, const std::array<double, 3>& b) {
    const double dx = a[0] - b[0];
    const double dy = a[1] - b[1];
    const double dz = a[2] - b[2];
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

}  // namespace

// ---------------------------------------------------------------------------

FiniteMetricSpace::FiniteMetricSpace(std::size_t n, std::vector<double> dist, bool validate)
    : n_(n), d_(std::move(dist)) {
    if (d_.size() != n_ * n_) throw DomainError("FiniteMetricSpace: matrix is not n x n");
    if (validate) check_axioms();
}

void FiniteMetricSpace::check_axioms() const {
    for (std::size_t i = 0; i < n_; ++i) {
        if ((*this)(i, i) != 0.0) throw DomainError("FiniteMetricSpace: nonzero diagonal at " + std::to_string(i));
        for (std::size_t j = 0; j < n_; ++j) {
            const double v = (*this)(i, j);
            if (!(v >= 0.0) || !std::isfinite(v))
                throw DomainError("FiniteMetricSpace: invalid distance at (" + std::to_string(i) + ", " +
                                  std::to_string(j) + ")");
            if (std::fabs(v - (*this)(j, i)) > kMetricTol)
                throw DomainError("FiniteMetricSpace: asymmetric at (" + std::to_string(i) + ", " +
                                  std::to_string(j) + ")");
        }
    }
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t k = 0; k < n_; ++k) {
            const double dik = (*this)(i, k);
            for (std::size_t j = 0; j < n_; ++j)
                if (d_[i * n_ + j] > dik + (*this)(k, j) + kMetricTol)
                    throw DomainError("FiniteMetricSpace: triangle inequality fails for (" + std::to_string(i) +
                                      ", " + std::to_string(k) + ", " + std::to_string(j) + ")");
        }
}

FiniteMetricSpace FiniteMetricSpace::from_csv(std::istream& in) {
    std::vector<double> values;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::stringstream ss(line);
        std::string cell;
        std::size_t c = 0;
        while (std::getline(ss, cell, ',')) {
            try {
                values.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw DomainError("FiniteMetricSpace: bad CSV cell '" + cell + "'");
            }
            ++c;
        }
        if (rows == 0) cols = c;
        if (c != cols) throw DomainError("FiniteMetricSpace: ragged CSV row " + std::to_string(rows));
        ++rows;
    }
    if (rows != cols) throw DomainError("FiniteMetricSpace: CSV matrix is not square");
    return FiniteMetricSpace(rows, std::move(values));
}

void FiniteMetricSpace::to_csv(std::ostream& out) const {
    std::ostringstream os;
    os.precision(17);
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t j = 0; j < n_; ++j) {
            if (j) os << ',';
            os << (*this)(i, j);
        }
        os << '\n';
    }
    out << os.str();
}

FiniteMetricSpace sphere_point_space(const std::vector<std::array<double, 3>>& points) {
    const std::size_t n = points.size();
    std::vector<double> d(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) d[i * n + j] = d[j * n + i] = great_circle(points[i], points[j]);
    // Great-circle distance is a metric; skip the cubic check.
    return FiniteMetricSpace(n, std::move(d), false);
}

std::vector<std::array<double, 3>> random_sphere_points(std::size_t n, std::uint64_t seed) {
    std::vector<std::array<double, 3>> pts(n);
    for (std::size_t i = 0; i < n; ++i) {
        Rng rng(seed, i);
        const double z = rng.uniform(-1.0, 1.0);
        const double phi = rng.uniform(0.0, 2.0 * kPi);
        const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
        pts[i] = {rho * std::cos(phi), rho * std::sin(phi), z};
    }
    return pts;
}

// ---------------------------------------------------------------------------

std::string to_string(Ambient a) {
    switch (a) {
        case Ambient::plane:
            return "plane";
        case Ambient::sphere:
            return "sphere";
        case Ambient::none:
            break;
    }
    return "none";
}

Ambient ambient_from_string(const std::string& s) {
    if (s == "plane") return Ambient::plane;
    if (s == "sphere") return Ambient::sphere;
    if (s == "none" || s.empty()) return Ambient::none;
    throw DomainError("unknown ambient '" + s + "'");
}

DiscreteLengthSpace::DiscreteLengthSpace(std::vector<SpacePoint> points, std::vector<SpaceEdge> edges,
                                         SpaceMeta meta)
    : points_(std::move(points)), edges_(std::move(edges)), meta_(std::move(meta)), adj_(points_.size()) {
    for (const SpaceEdge& e : edges_) {
        if (e.i >= points_.size() || e.j >= points_.size() || e.i == e.j)
            throw DomainError("DiscreteLengthSpace: bad edge endpoints");
        if (!(e.w > 0.0) || !std::isfinite(e.w)) throw DomainError("DiscreteLengthSpace: edge weight must be positive");
        const bool usable = e.in_u && points_[e.i].in_u && points_[e.j].in_u;
        adj_[e.i].push_back({e.j, e.w, usable});
        adj_[e.j].push_back({e.i, e.w, usable});
    }
    for (auto& nb : adj_) std::sort(nb.begin(), nb.end(), [](const Arc& x, const Arc& y) { return x.to < y.to; });
}

std::vector<std::size_t> DiscreteLengthSpace::u_vertices() const {
    std::vector<std::size_t> out;
    for (std::size_t v = 0; v < points_.size(); ++v)
        if (points_[v].in_u) out.push_back(v);
    return out;
}

double DiscreteLengthSpace::ambient_distance(std::size_t i, std::size_t j) const {
    switch (meta_.ambient) {
        case Ambient::plane:
            return euclid(points_.at(i).pos, points_.at(j).pos);
        case Ambient::sphere:
            return great_circle(points_.at(i).pos, points_.at(j).pos);
        case Ambient::none:
            break;
    }
    throw DomainError("ambient_distance: space has no ambient model");
}

void DiscreteLengthSpace::validate() const {
    if (points_.empty()) throw DomainError("DiscreteLengthSpace: no vertices");
    for (const SpaceEdge& e : edges_) {
        if (meta_.ambient == Ambient::none) continue;
        const double amb = ambient_distance(e.i, e.j);
        // Edges follow paths in the space, so they are never shorter than the
        // ambient distance; in the plane they are straight segments.
        const double tol = kMetricTol * std::max(1.0, amb);
        if (e.w < amb - tol || (meta_.ambient == Ambient::plane && e.w > amb + tol))
            throw DomainError("DiscreteLengthSpace: edge (" + std::to_string(e.i) + ", " + std::to_string(e.j) +
                              ") weight does not match its embedding");
    }
    const ShortestPathTree t = shortest_paths(*this, 0, false);
    for (std::size_t v = 0; v < points_.size(); ++v)
        if (!t.reachable(v)) throw DomainError("DiscreteLengthSpace: completion graph is disconnected");
}

nlohmann::json DiscreteLengthSpace::to_json() const {
    nlohmann::json verts = nlohmann::json::array();
    for (const SpacePoint& p : points_) {
        nlohmann::json v;
        if (p.dim == 3) v["xyz"] = {p.pos[0], p.pos[1], p.pos[2]};
        else v["xy"] = {p.pos[0], p.pos[1]};
        v["in_U"] = p.in_u;
        verts.push_back(std::move(v));
    }
    nlohmann::json edges = nlohmann::json::array();
    for (const SpaceEdge& e : edges_) {
        nlohmann::json row = {e.i, e.j, e.w};
        if (!e.in_u) row.push_back(false);
        edges.push_back(std::move(row));
    }
    nlohmann::json meta = {{"generator", meta_.generator},
                           {"h", meta_.h},
                           {"h_err", meta_.h_err},
                           {"ambient", to_string(meta_.ambient)},
                           {"ambient_exact", meta_.ambient_exact},
                           {"angle_res", meta_.angle_res},
                           {"params", meta_.params}};
    return {{"vertices", std::move(verts)}, {"edges", std::move(edges)}, {"meta", std::move(meta)}};
}

DiscreteLengthSpace DiscreteLengthSpace::from_json(const nlohmann::json& j) {
    try {
        std::vector<SpacePoint> pts;
        for (const auto& v : j.at("vertices")) {
            SpacePoint p;
            if (v.contains("xyz")) {
                const auto& c = v.at("xyz");
                p.pos = {c.at(0).get<double>(), c.at(1).get<double>(), c.at(2).get<double>()};
                p.dim = 3;
            } else {
                const auto& c = v.at("xy");
                p.pos = {c.at(0).get<double>(), c.at(1).get<double>(), 0.0};
                p.dim = 2;
            }
            p.in_u = v.value("in_U", true);
            pts.push_back(p);
        }
        std::vector<SpaceEdge> edges;
        for (const auto& e : j.at("edges")) {
            SpaceEdge se;
            se.i = e.at(0).get<std::size_t>();
            se.j = e.at(1).get<std::size_t>();
            se.w = e.at(2).get<double>();
            se.in_u = e.size() > 3 ? e.at(3).get<bool>() : true;
            edges.push_back(se);
        }
        SpaceMeta meta;
        if (j.contains("meta")) {
            const auto& m = j.at("meta");
            meta.generator = m.value("generator", std::string{});
            meta.h = m.value("h", 0.0);
            meta.h_err = m.value("h_err", 0.0);
            meta.ambient = ambient_from_string(m.value("ambient", std::string{"none"}));
            meta.ambient_exact = m.value("ambient_exact", false);
            meta.angle_res = m.value("angle_res", 0.0);
            if (m.contains("params")) meta.params = m.at("params");
        }
        return DiscreteLengthSpace(std::move(pts), std::move(edges), std::move(meta));
    } catch (const nlohmann::json::exception& e) {
        throw DomainError(std::string("DiscreteLengthSpace: malformed JSON: ") + e.what());
    }
}

// ---------------------------------------------------------------------------

std::size_t GeodesicPath::vertex_at(double t) const {
    for (std::size_t i = 0; i < vertices.size(); ++i)
        if (arc[i] >= t) return vertices[i];
    return vertices.back();
}

GeodesicPath ShortestPathTree::path_to(std::size_t v) const {
    if (v >= dist.size() || !reachable(v))
        throw Unreachable("shortest path: vertex " + std::to_string(v) + " unreachable from " +
                          std::to_string(source) + (restrict_to_u ? " inside U" : ""));
    std::vector<std::size_t> rev;
    for (std::size_t u = v; u != source; u = pred[u]) rev.push_back(u);
    rev.push_back(source);
    GeodesicPath p;
    p.vertices.assign(rev.rbegin(), rev.rend());
    p.arc.reserve(p.vertices.size());
    for (std::size_t u : p.vertices) p.arc.push_back(dist[u]);
    return p;
}

ShortestPathTree shortest_paths(const DiscreteLengthSpace& space, std::size_t source, bool restrict_to_u) {
    if (source >= space.size()) throw DomainError("shortest_paths: source out of range");
    if (restrict_to_u && !space.in_u(source)) throw DomainError("shortest_paths: source not in U");
    ShortestPathTree t;
    t.source = source;
    t.restrict_to_u = restrict_to_u;
    t.dist.assign(space.size(), kInfDistance);
    t.pred.assign(space.size(), kNoVertex);
    t.dist[source] = 0.0;
    t.pred[source] = source;
    using Item = std::pair<double, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    heap.emplace(0.0, source);
    std::vector<char> done(space.size(), 0);
    while (!heap.empty()) {
        const auto [du, u] = heap.top();
        heap.pop();
        if (done[u]) continue;
        done[u] = 1;
        for (const auto& arc : space.neighbors(u)) {
            if (restrict_to_u && !arc.in_u) continue;
            if (done[arc.to]) continue;
            const double nd = du + arc.w;
            if (nd < t.dist[arc.to]) {
                t.dist[arc.to] = nd;
                t.pred[arc.to] = u;
                heap.emplace(nd, arc.to);
            } else if (nd == t.dist[arc.to] && u < t.pred[arc.to]) {
                t.pred[arc.to] = u;
            }
        }
    }
    return t;
}

GeodesicPath shortest_path(const DiscreteLengthSpace& space, std::size_t from, std::size_t to, bool restrict_to_u) {
    if (to >= space.size()) throw DomainError("shortest_path: target out of range");
    if (restrict_to_u && !space.in_u(to)) throw Unreachable("shortest_path: target not in U");
    return shortest_paths(space, from, restrict_to_u).path_to(to);
}

FiniteMetricSpace induced_metric(const DiscreteLengthSpace& space, const std::vector<std::size_t>& vertices,
                                 SubsetMetric metric) {
    const std::size_t n = vertices.size();
    std::vector<double> d(n * n, 0.0);
    if (metric == SubsetMetric::ambient) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                d[i * n + j] = d[j * n + i] = space.ambient_distance(vertices[i], vertices[j]);
        return FiniteMetricSpace(n, std::move(d), false);
    }
    const bool restrict_u = metric == SubsetMetric::u_graph;
    parallel_for(n, [&](std::size_t i) {
        const ShortestPathTree t = shortest_paths(space, vertices[i], restrict_u);
        for (std::size_t j = 0; j < n; ++j) {
            if (!t.reachable(vertices[j])) throw Unreachable("induced_metric: subset is disconnected");
            d[i * n + j] = t.dist[vertices[j]];
        }
    });
    // Dijkstra sums edges in different orders from each end; symmetrize.
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) d[i * n + j] = d[j * n + i] = std::min(d[i * n + j], d[j * n + i]);
    return FiniteMetricSpace(n, std::move(d), false);
}

// ---------------------------------------------------------------------------

ModelAngle comparison_angle(const FiniteMetricSpace& ms, std::size_t q, std::size_t p, std::size_t s, Curvature kappa) {
    if (q == p || q == s || p == s) throw DegenerateSide("comparison_angle: points must be distinct");
    return angle_between(kappa, ms(q, p), ms(q, s), ms(p, s));
}

std::optional<double> quadruple_defect(const FiniteMetricSpace& ms, std::size_t p, std::size_t x1, std::size_t x2,
                                       std::size_t x3, Curvature kappa) {
    const std::array<std::size_t, 3> x{x1, x2, x3};
    double sum = 0.0;
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = i + 1; j < 3; ++j) {
            const AngleOutcome o = classify_angle(kappa, ms(p, x[i]), ms(p, x[j]), ms(x[i], x[j]));
            if (!o.ok()) return std::nullopt;
            sum += o.radians;
        }
    return 2.0 * kPi - sum;
}

namespace {

// The sampled or enumerated quadruples of a scan.
std::vector<std::array<std::size_t, 4>> scan_quadruple_set(std::size_t n, const ScanOptions& opts, bool& exhaustive) {
    std::vector<std::array<std::size_t, 4>> quads;
    exhaustive = false;
    if (n < opts.exhaustive_below) {
        // n choices of p times C(n-1, 3) triples.
        const double count = static_cast<double>(n) * (n - 1.0) * (n - 2.0) * (n - 3.0) / 6.0;
        if (count <= static_cast<double>(opts.samples)) {
            exhaustive = true;
            for (std::size_t p = 0; p < n; ++p)
                for (std::size_t a = 0; a < n; ++a)
                    for (std::size_t b = a + 1; b < n; ++b)
                        for (std::size_t c = b + 1; c < n; ++c)
                            if (a != p && b != p && c != p) quads.push_back({p, a, b, c});
            return quads;
        }
    }
    quads.resize(opts.samples);
    for (std::size_t t = 0; t < opts.samples; ++t) {
        Rng rng(opts.seed, t);
        std::array<std::size_t, 4> q{};
        for (std::size_t k = 0; k < 4; ++k) {
            bool fresh = false;
            while (!fresh) {
                q[k] = rng.index(0, n - 1);
                fresh = std::find(q.begin(), q.begin() + static_cast<std::ptrdiff_t>(k), q[k]) ==
                        q.begin() + static_cast<std::ptrdiff_t>(k);
            }
        }
        quads[t] = q;
    }
    return quads;
}

struct QuadPass {
    std::size_t evaluated = 0;
    std::size_t vacuous = 0;
    std::size_t violations = 0;
    double min_defect = std::numeric_limits<double>::infinity();
    std::size_t worst_index = 0;
};

QuadPass evaluate_quads(const FiniteMetricSpace& ms, const std::vector<std::array<std::size_t, 4>>& quads,
                        Curvature kappa, double tol) {
    std::vector<double> defect(quads.size(), std::numeric_limits<double>::quiet_NaN());
    parallel_for(quads.size(), [&](std::size_t t) {
        const auto& q = quads[t];
        if (auto d = quadruple_defect(ms, q[0], q[1], q[2], q[3], kappa)) defect[t] = *d;
    });
    QuadPass out;
    for (std::size_t t = 0; t < quads.size(); ++t) {
        if (std::isnan(defect[t])) {
            ++out.vacuous;
            continue;
        }
        ++out.evaluated;
        if (defect[t] < -tol) ++out.violations;
        if (defect[t] < out.min_defect) {
            out.min_defect = defect[t];
            out.worst_index = t;
        }
    }
    return out;
}

}  // namespace

ScanReport scan_quadruples(const FiniteMetricSpace& ms, Curvature kappa, const ScanOptions& opts) {
    if (ms.size() < 4) throw DomainError("scan_quadruples: need at least 4 points");
    ScanReport rep;
    rep.kappa = kappa.value();
    rep.tol = opts.tol;
    const auto quads = scan_quadruple_set(ms.size(), opts, rep.exhaustive);
    rep.samples = quads.size();
    const QuadPass pass = evaluate_quads(ms, quads, kappa, opts.tol);
    rep.evaluated = pass.evaluated;
    rep.vacuous = pass.vacuous;
    rep.violations = pass.violations;
    rep.min_defect = pass.evaluated ? pass.min_defect : 0.0;
    if (pass.evaluated) rep.worst = QuadrupleWitness{quads[pass.worst_index], pass.min_defect};

    if (opts.search_kappa_max) {
        auto holds = [&](double k) { return evaluate_quads(ms, quads, Curvature{k}, opts.tol).violations == 0; };
        double lo = opts.kappa_search_lo;
        double hi = opts.kappa_search_hi;
        if (holds(hi)) {
            rep.kappa_max = hi;
            rep.kappa_max_bracketed = false;
        } else if (holds(lo)) {
            for (int i = 0; i < opts.kappa_search_steps; ++i) {
                const double mid = 0.5 * (lo + hi);
                if (holds(mid)) lo = mid;
                else hi = mid;
            }
            rep.kappa_max = lo;
            rep.kappa_max_bracketed = true;
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------

namespace {

// First-order sensitivity of angle(adj1, adj2; opp) to relative side errors
// of size rel: each side is perturbed by +-rel * side and the absolute
// angle changes are summed.
double angle_sensitivity(Curvature kappa, double adj1, double adj2, double opp, double rel) {
    const AngleOutcome base = classify_angle(kappa, adj1, adj2, opp);
    if (!base.ok() || rel <= 0.0) return 0.0;
    double total = 0.0;
    const std::array<double, 3> s{adj1, adj2, opp};
    for (std::size_t k = 0; k < 3; ++k) {
        double worst = 0.0;
        for (double sign : {-1.0, 1.0}) {
            std::array<double, 3> t = s;
            t[k] *= 1.0 + sign * rel;
            // Clamp into the admissible range so degenerate triangles stay ok.
            const double lo = std::fabs(t[0] - t[1]);
            t[2] = std::clamp(t[2], lo, t[0] + t[1]);
            const AngleOutcome o = classify_angle(kappa, t[0], t[1], t[2]);
            if (o.ok()) worst = std::max(worst, std::fabs(o.radians - base.radians));
        }
        total += worst;
    }
    return total;
}

}  // namespace

LocalCheckReport local_kappa_domain_check(const DiscreteLengthSpace& space, std::size_t center, double radius,
                                          Curvature kappa, const LocalCheckOptions& opts) {
    LocalCheckReport rep;
    if (center >= space.size() || !space.in_u(center)) throw DomainError("local check: center must be a U vertex");
    const double h = space.meta().h;
    rep.h_angle = opts.h_angle_cells * h;
    rep.direction_tol = opts.direction_tol.value_or(space.meta().angle_res);
    const double rel = space.meta().h_err;

    const ShortestPathTree from_center = shortest_paths(space, center, true);
    std::vector<std::size_t> ball;
    for (std::size_t v = 0; v < space.size(); ++v)
        if (from_center.reachable(v) && from_center.dist[v] < radius) ball.push_back(v);
    rep.ball_size = ball.size();
    if (ball.size() < 4) {
        rep.vacuous = true;
        return rep;
    }
    if (!(radius > 2.0 * rep.h_angle))
        throw InsufficientResolution("local check: ball radius " + std::to_string(radius) +
                                     " does not exceed twice the angle scale " + std::to_string(rep.h_angle));

    struct Sample {
        bool evaluated = false;
        bool undefined = false;
        double topo_excess = -kInfDistance;
        double sum_excess = -kInfDistance;
        std::array<std::size_t, 4> pts{};
    };
    std::vector<Sample> out(opts.samples);
    parallel_for(opts.samples, [&](std::size_t t) {
        Rng rng(opts.seed, t);
        Sample& smp = out[t];
        const std::size_t q = ball[rng.index(0, ball.size() - 1)];
        std::size_t s = q;
        while (s == q) s = ball[rng.index(0, ball.size() - 1)];
        std::size_t p = q;
        while (p == q || p == s) p = ball[rng.index(0, ball.size() - 1)];

        const ShortestPathTree tq = shortest_paths(space, q, true);
        const GeodesicPath qs = tq.path_to(s);
        const GeodesicPath qp = tq.path_to(p);
        if (qs.length() < 2.0 * rep.h_angle || qp.length() < rep.h_angle) return;
        // Interior x with both halves of [qs] resolvable at h_angle.
        std::vector<std::size_t> inner;
        for (std::size_t i = 1; i + 1 < qs.vertices.size(); ++i)
            if (qs.arc[i] >= rep.h_angle && qs.length() - qs.arc[i] >= rep.h_angle) inner.push_back(i);
        if (inner.empty()) return;
        const std::size_t xi = inner[rng.index(0, inner.size() - 1)];
        const std::size_t x = qs.vertices[xi];
        if (x == p) return;
        smp.pts = {q, p, s, x};

        // Toponogov at q: angle(q; p, s) from points at arc h_angle.
        const std::size_t yp = qp.vertex_at(rep.h_angle);
        const std::size_t ys = qs.vertex_at(rep.h_angle);
        const ShortestPathTree typ = shortest_paths(space, yp, true);
        const double dq_yp = tq.dist[yp];
        const double dq_ys = tq.dist[ys];
        const double d_yy = typ.dist[ys];
        const AngleOutcome disc_q = classify_angle(kappa, dq_yp, dq_ys, d_yy);
        const ShortestPathTree tp = shortest_paths(space, p, true);
        const AngleOutcome model_q = classify_angle(kappa, tq.dist[p], tq.dist[s], tp.dist[s]);
        if (!disc_q.ok() || !model_q.ok()) {
            smp.undefined = true;
            return;
        }
        const double tol_q = 2.0 * rep.direction_tol + angle_sensitivity(kappa, dq_yp, dq_ys, d_yy, rel) +
                             angle_sensitivity(kappa, tq.dist[p], tq.dist[s], tp.dist[s], rel);
        smp.topo_excess = model_q.radians - disc_q.radians - tol_q;

        // Angle sum at x: directions to q and s along [qs], to p along [xp].
        const ShortestPathTree tx = shortest_paths(space, x, true);
        const GeodesicPath xp = tx.path_to(p);
        if (xp.length() < rep.h_angle) {
            smp.evaluated = true;
            return;
        }
        const std::size_t zq = qs.vertices[static_cast<std::size_t>(
            std::distance(qs.arc.begin(),
                          std::upper_bound(qs.arc.begin(), qs.arc.end(), qs.arc[xi] - rep.h_angle)) - 1)];
        const std::size_t zs = qs.vertex_at(qs.arc[xi] + rep.h_angle);
        const std::size_t zp = xp.vertex_at(rep.h_angle);
        const ShortestPathTree tzp = shortest_paths(space, zp, true);
        const AngleOutcome a1 = classify_angle(kappa, tx.dist[zp], tx.dist[zq], tzp.dist[zq]);
        const AngleOutcome a2 = classify_angle(kappa, tx.dist[zp], tx.dist[zs], tzp.dist[zs]);
        if (!a1.ok() || !a2.ok()) {
            smp.undefined = true;
            return;
        }
        const double tol_x = 2.0 * rep.direction_tol +
                             angle_sensitivity(kappa, tx.dist[zp], tx.dist[zq], tzp.dist[zq], rel) +
                             angle_sensitivity(kappa, tx.dist[zp], tx.dist[zs], tzp.dist[zs], rel);
        smp.sum_excess = std::fabs(a1.radians + a2.radians - kPi) - tol_x;
        smp.evaluated = true;
    });

    rep.samples = opts.samples;
    rep.worst_toponogov = -kInfDistance;
    rep.worst_angle_sum = -kInfDistance;
    for (const Sample& smp : out) {
        if (smp.undefined) ++rep.undefined;
        if (!smp.evaluated) continue;
        ++rep.evaluated;
        rep.worst_toponogov = std::max(rep.worst_toponogov, smp.topo_excess);
        rep.worst_angle_sum = std::max(rep.worst_angle_sum, smp.sum_excess);
        if (smp.topo_excess > 0.0) {
            ++rep.toponogov_violations;
            if (rep.examples.size() < 8) rep.examples.push_back({"toponogov", smp.pts, smp.topo_excess});
        }
        if (smp.sum_excess > 0.0) {
            ++rep.angle_sum_violations;
            if (rep.examples.size() < 8) rep.examples.push_back({"angle_sum", smp.pts, smp.sum_excess});
        }
    }
    if (rep.evaluated == 0)
        throw InsufficientResolution("local check: no sampled geodesic reaches the angle scale " +
                                     std::to_string(rep.h_angle));
    return rep;
}

}  // namespace alexkit
