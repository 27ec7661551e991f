#include "alexkit/examples.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <set>
#include <tuple>

#include "alexkit/sampling.hpp"

namespace alexkit {

namespace {

constexpr double kPi = std::numbers::pi;
using Vec3 = std::array<double, 3>;

// Largest angular gap of the 16-direction stencil is atan(1/2); a shortest
// stencil path along a direction inside that gap is at most 1/cos(gap/2)
// times longer than the straight segment.
const double kStencilGap = std::atan(0.5);
const double kStencilErr = 1.0 / std::cos(0.5 * std::atan(0.5)) - 1.0;

constexpr std::array<std::array<int, 2>, 8> kStencil{{{1, 0}, {0, 1}, {1, 1}, {1, -1}, {2, 1}, {1, 2}, {2, -1}, {1, -2}}};

double dist2(double ax, double ay, double bx, double by) { return std::hypot(ax - bx, ay - by); }

double point_segment_distance(double px, double py, double ax, double ay, double bx, double by) {
    const double vx = bx - ax;
    const double vy = by - ay;
    const double len2 = vx * vx + vy * vy;
    double t = len2 > 0.0 ? ((px - ax) * vx + (py - ay) * vy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return dist2(px, py, ax + t * vx, ay + t * vy);
}

double cross(double ax, double ay, double bx, double by) { return ax * by - ay * bx; }

// Closed segments [p1 p2] and [p3 p4] intersect.
bool segments_intersect(double x1, double y1, double x2, double y2, double x3, double y3, double x4, double y4) {
    constexpr double eps = 1e-12;
    const double d1 = cross(x4 - x3, y4 - y3, x1 - x3, y1 - y3);
    const double d2 = cross(x4 - x3, y4 - y3, x2 - x3, y2 - y3);
    const double d3 = cross(x2 - x1, y2 - y1, x3 - x1, y3 - y1);
    const double d4 = cross(x2 - x1, y2 - y1, x4 - x1, y4 - y1);
    if (((d1 > eps && d2 < -eps) || (d1 < -eps && d2 > eps)) && ((d3 > eps && d4 < -eps) || (d3 < -eps && d4 > eps)))
        return true;
    auto on_seg = [](double ax, double ay, double bx, double by, double px, double py) {
        return point_segment_distance(px, py, ax, ay, bx, by) <= 1e-12;
    };
    return on_seg(x3, y3, x4, y4, x1, y1) || on_seg(x3, y3, x4, y4, x2, y2) || on_seg(x1, y1, x2, y2, x3, y3) ||
           on_seg(x1, y1, x2, y2, x4, y4);
}

// Closed rectangle [x0,x1] x [y0,y1] meets the segment.
bool segment_hits_rect(double ax, double ay, double bx, double by, const std::array<double, 4>& r) {
    const double x0 = std::min(r[0], r[2]), x1 = std::max(r[0], r[2]);
    const double y0 = std::min(r[1], r[3]), y1 = std::max(r[1], r[3]);
    auto inside = [&](double x, double y) { return x >= x0 && x <= x1 && y >= y0 && y <= y1; };
    if (inside(ax, ay) || inside(bx, by)) return true;
    return segments_intersect(ax, ay, bx, by, x0, y0, x1, y0) || segments_intersect(ax, ay, bx, by, x1, y0, x1, y1) ||
           segments_intersect(ax, ay, bx, by, x1, y1, x0, y1) || segments_intersect(ax, ay, bx, by, x0, y1, x0, y0);
}

// Open rectangle interior meets the segment.
bool segment_enters_open_rect(double ax, double ay, double bx, double by, const std::array<double, 4>& r) {
    const double x0 = std::min(r[0], r[2]), x1 = std::max(r[0], r[2]);
    const double y0 = std::min(r[1], r[3]), y1 = std::max(r[1], r[3]);
    // Liang-Barsky clip against the open box.
    double t0 = 0.0, t1 = 1.0;
    const double dx = bx - ax, dy = by - ay;
    const std::array<double, 4> p{-dx, dx, -dy, dy};
    const std::array<double, 4> q{ax - x0, x1 - ax, ay - y0, y1 - ay};
    for (int k = 0; k < 4; ++k) {
        if (p[k] == 0.0) {
            if (q[k] <= 0.0) return false;
            continue;
        }
        const double t = q[k] / p[k];
        if (p[k] < 0.0) t0 = std::max(t0, t);
        else t1 = std::min(t1, t);
    }
    return t1 - t0 > 1e-12;
}

struct Grid {
    std::size_t n = 0;  // cells per side
    double h = 0.0;
    double side = 1.0;
    [[nodiscard]] std::size_t id(std::size_t i, std::size_t j) const { return j * (n + 1) + i; }
    [[nodiscard]] double x(std::size_t i) const { return side * static_cast<double>(i) / static_cast<double>(n); }
};

Grid make_grid(double side, double h) {
    Grid g;
    g.side = side;
    g.n = static_cast<std::size_t>(std::max(2.0, std::round(side / h)));
    g.h = side / static_cast<double>(g.n);
    return g;
}

// Grid points of [0, side]^2 and all 16-direction edges.
void add_grid(const Grid& g, std::vector<SpacePoint>& pts, std::vector<SpaceEdge>& edges) {
    for (std::size_t j = 0; j <= g.n; ++j)
        for (std::size_t i = 0; i <= g.n; ++i) pts.push_back({{g.x(i), g.x(j), 0.0}, 2, true});
    const long n = static_cast<long>(g.n);
    for (long j = 0; j <= n; ++j)
        for (long i = 0; i <= n; ++i)
            for (const auto& d : kStencil) {
                const long i2 = i + d[0];
                const long j2 = j + d[1];
                if (i2 < 0 || j2 < 0 || i2 > n || j2 > n) continue;
                const std::size_t a = g.id(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
                const std::size_t b = g.id(static_cast<std::size_t>(i2), static_cast<std::size_t>(j2));
                const double w = dist2(pts[a].pos[0], pts[a].pos[1], pts[b].pos[0], pts[b].pos[1]);
                edges.push_back({a, b, w, true});
            }
}

void require_u(const std::vector<SpacePoint>& pts) {
    const auto count = static_cast<std::size_t>(std::count_if(pts.begin(), pts.end(), [](const SpacePoint& p) { return p.in_u; }));
    if (count < kMinUVertices)
        throw DomainError("generate: resolution too coarse (" + std::to_string(count) + " U vertices, need " +
                          std::to_string(kMinUVertices) + ")");
}

// ---------------------------------------------------------------------------
// Flat squares with holes

DiscreteLengthSpace generate_punctured(const DomainSpec& spec) {
    const Grid g = make_grid(spec.side, spec.h);
    std::vector<SpacePoint> pts;
    std::vector<SpaceEdge> edges;
    add_grid(g, pts, edges);
    for (const auto& rp : spec.removed_points) {
        const auto i = static_cast<std::size_t>(std::clamp(std::round(rp[0] / g.h), 0.0, static_cast<double>(g.n)));
        const auto j = static_cast<std::size_t>(std::clamp(std::round(rp[1] / g.h), 0.0, static_cast<double>(g.n)));
        pts[g.id(i, j)].in_u = false;
    }
    for (const auto& s : spec.slits) {
        for (SpacePoint& p : pts)
            if (point_segment_distance(p.pos[0], p.pos[1], s[0], s[1], s[2], s[3]) <= 1e-12) p.in_u = false;
        for (SpaceEdge& e : edges) {
            const auto& a = pts[e.i].pos;
            const auto& b = pts[e.j].pos;
            if (segments_intersect(a[0], a[1], b[0], b[1], s[0], s[1], s[2], s[3])) e.in_u = false;
        }
    }
    require_u(pts);
    SpaceMeta meta;
    meta.generator = "punctured";
    meta.h = g.h;
    meta.h_err = kStencilErr;
    meta.ambient = Ambient::plane;
    meta.ambient_exact = true;
    meta.angle_res = kStencilGap;
    meta.params = spec.to_json();
    return DiscreteLengthSpace(std::move(pts), std::move(edges), std::move(meta));
}

DiscreteLengthSpace generate_custom(const DomainSpec& spec) {
    const Grid g = make_grid(spec.side, spec.h);
    std::vector<SpacePoint> grid_pts;
    std::vector<SpaceEdge> grid_edges;
    add_grid(g, grid_pts, grid_edges);

    // Closed obstacles are removed from U; the completion keeps their
    // boundary and loses only their interior.
    auto in_closed = [&](double x, double y) {
        for (const auto& d : spec.disks)
            if (dist2(x, y, d[0], d[1]) <= d[2]) return true;
        for (const auto& r : spec.rects)
            if (x >= std::min(r[0], r[2]) && x <= std::max(r[0], r[2]) && y >= std::min(r[1], r[3]) &&
                y <= std::max(r[1], r[3]))
                return true;
        return false;
    };
    auto in_open = [&](double x, double y) {
        for (const auto& d : spec.disks)
            if (dist2(x, y, d[0], d[1]) < d[2] - 1e-12) return true;
        for (const auto& r : spec.rects)
            if (x > std::min(r[0], r[2]) + 1e-12 && x < std::max(r[0], r[2]) - 1e-12 &&
                y > std::min(r[1], r[3]) + 1e-12 && y < std::max(r[1], r[3]) - 1e-12)
                return true;
        return false;
    };
    auto edge_hits_closed = [&](const Vec3& a, const Vec3& b) {
        for (const auto& d : spec.disks)
            if (point_segment_distance(d[0], d[1], a[0], a[1], b[0], b[1]) <= d[2]) return true;
        for (const auto& r : spec.rects)
            if (segment_hits_rect(a[0], a[1], b[0], b[1], r)) return true;
        return false;
    };
    auto edge_enters_open = [&](const Vec3& a, const Vec3& b) {
        for (const auto& d : spec.disks)
            if (point_segment_distance(d[0], d[1], a[0], a[1], b[0], b[1]) < d[2] - 1e-12) return true;
        for (const auto& r : spec.rects)
            if (segment_enters_open_rect(a[0], a[1], b[0], b[1], r)) return true;
        return false;
    };

    std::vector<std::size_t> remap(grid_pts.size(), static_cast<std::size_t>(-1));
    std::vector<SpacePoint> pts;
    for (std::size_t v = 0; v < grid_pts.size(); ++v) {
        const auto& p = grid_pts[v].pos;
        if (in_open(p[0], p[1])) continue;
        remap[v] = pts.size();
        pts.push_back({p, 2, !in_closed(p[0], p[1])});
    }
    std::vector<SpaceEdge> edges;
    for (const SpaceEdge& e : grid_edges) {
        if (remap[e.i] == static_cast<std::size_t>(-1) || remap[e.j] == static_cast<std::size_t>(-1)) continue;
        const auto& a = grid_pts[e.i].pos;
        const auto& b = grid_pts[e.j].pos;
        if (edge_enters_open(a, b)) continue;
        edges.push_back({remap[e.i], remap[e.j], e.w, !edge_hits_closed(a, b)});
    }
    require_u(pts);
    SpaceMeta meta;
    meta.generator = "custom";
    meta.h = g.h;
    meta.h_err = kStencilErr;
    meta.ambient = Ambient::plane;
    meta.ambient_exact = spec.disks.empty() && spec.rects.empty();
    meta.angle_res = kStencilGap;
    meta.params = spec.to_json();
    return DiscreteLengthSpace(std::move(pts), std::move(edges), std::move(meta));
}

// ---------------------------------------------------------------------------
// Spherical caps

Vec3 normalize(const Vec3& v) {
    const double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    return {v[0] / n, v[1] / n, v[2] / n};
}

double colatitude(const Vec3& v) { return std::atan2(std::hypot(v[0], v[1]), v[2]); }

double arc(const Vec3& a, const Vec3& b) {
    const double cx = a[1] * b[2] - a[2] * b[1];
    const double cy = a[2] * b[0] - a[0] * b[2];
    const double cz = a[0] * b[1] - a[1] * b[0];
    return std::atan2(std::sqrt(cx * cx + cy * cy + cz * cz), a[0] * b[0] + a[1] * b[1] + a[2] * b[2]);
}

// Largest colatitude along the minor great-circle arc from a to b.
double max_colatitude_on_arc(const Vec3& a, const Vec3& b) {
    const double alpha = arc(a, b);
    double zmin = std::min(a[2], b[2]);
    if (alpha > 0.0 && alpha < kPi) {
        // w: unit tangent at a towards b.
        const double d = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
        Vec3 w{b[0] - d * a[0], b[1] - d * a[1], b[2] - d * a[2]};
        w = normalize(w);
        // z(t) = a_z cos t + w_z sin t has extrema at t = atan2(w_z, a_z) + k pi.
        const double t0 = std::atan2(w[2], a[2]);
        for (double t : {t0, t0 + kPi, t0 - kPi})
            if (t > 0.0 && t < alpha) zmin = std::min(zmin, a[2] * std::cos(t) + w[2] * std::sin(t));
    }
    return std::acos(std::clamp(zmin, -1.0, 1.0));
}

std::vector<Vec3> icosphere(std::size_t freq) {
    const double phi = 0.5 * (1.0 + std::sqrt(5.0));
    const std::array<Vec3, 12> v0{{{-1, phi, 0}, {1, phi, 0}, {-1, -phi, 0}, {1, -phi, 0},
                                   {0, -1, phi}, {0, 1, phi}, {0, -1, -phi}, {0, 1, -phi},
                                   {phi, 0, -1}, {phi, 0, 1}, {-phi, 0, -1}, {-phi, 0, 1}}};
    constexpr std::array<std::array<int, 3>, 20> faces{{{0, 11, 5}, {0, 5, 1}, {0, 1, 7}, {0, 7, 10}, {0, 10, 11},
                                                        {1, 5, 9}, {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                                                        {3, 9, 4}, {3, 4, 2}, {3, 2, 6}, {3, 6, 8}, {3, 8, 9},
                                                        {4, 9, 5}, {2, 4, 11}, {6, 2, 10}, {8, 6, 7}, {9, 8, 1}}};
    std::map<std::tuple<long long, long long, long long>, std::size_t> seen;
    std::vector<Vec3> out;
    const double fn = static_cast<double>(freq);
    for (const auto& f : faces) {
        const Vec3& A = v0[f[0]];
        const Vec3& B = v0[f[1]];
        const Vec3& C = v0[f[2]];
        for (std::size_t i = 0; i <= freq; ++i)
            for (std::size_t j = 0; i + j <= freq; ++j) {
                const double u = static_cast<double>(i) / fn;
                const double w = static_cast<double>(j) / fn;
                Vec3 p{A[0] + u * (B[0] - A[0]) + w * (C[0] - A[0]), A[1] + u * (B[1] - A[1]) + w * (C[1] - A[1]),
                       A[2] + u * (B[2] - A[2]) + w * (C[2] - A[2])};
                p = normalize(p);
                const auto key = std::make_tuple(std::llround(p[0] * 1e9), std::llround(p[1] * 1e9), std::llround(p[2] * 1e9));
                if (seen.emplace(key, out.size()).second) out.push_back(p);
            }
    }
    return out;
}

DiscreteLengthSpace generate_cap(const DomainSpec& spec, std::uint64_t seed) {
    const double r = spec.r;
    // Icosahedron edges subtend 1.1071 rad; choose the frequency so the mesh
    // edge is at most h.
    const double ico_edge = std::atan(2.0);
    const auto freq = static_cast<std::size_t>(std::max(1.0, std::ceil(ico_edge / spec.h)));
    const double ell = ico_edge / static_cast<double>(freq);
    const double reach = 2.5 * ell;

    std::vector<SpacePoint> pts;
    for (const Vec3& p : icosphere(freq))
        if (colatitude(p) < r - 0.5 * ell) pts.push_back({p, 3, true});
    const std::size_t interior = pts.size();
    const auto ring = static_cast<std::size_t>(std::max(8.0, std::ceil(2.0 * kPi * std::sin(r) / ell)));
    for (std::size_t k = 0; k < ring; ++k) {
        const double lon = 2.0 * kPi * static_cast<double>(k) / static_cast<double>(ring);
        pts.push_back({{std::sin(r) * std::cos(lon), std::sin(r) * std::sin(lon), std::cos(r)}, 3, false});
    }
    require_u(pts);

    // Spatial hash on chord length.
    const double cell = 2.0 * std::sin(0.5 * reach);
    auto key = [cell](const Vec3& p) {
        return std::make_tuple(static_cast<long>(std::floor(p[0] / cell)), static_cast<long>(std::floor(p[1] / cell)),
                               static_cast<long>(std::floor(p[2] / cell)));
    };
    std::map<std::tuple<long, long, long>, std::vector<std::size_t>> buckets;
    for (std::size_t v = 0; v < pts.size(); ++v) buckets[key(pts[v].pos)].push_back(v);

    const double cap_tol = 1e-12;
    std::vector<SpaceEdge> edges;
    for (std::size_t v = 0; v < pts.size(); ++v) {
        const auto [kx, ky, kz] = key(pts[v].pos);
        for (long dx = -1; dx <= 1; ++dx)
            for (long dy = -1; dy <= 1; ++dy)
                for (long dz = -1; dz <= 1; ++dz) {
                    const auto it = buckets.find({kx + dx, ky + dy, kz + dz});
                    if (it == buckets.end()) continue;
                    for (std::size_t u : it->second) {
                        if (u <= v) continue;
                        const double w = arc(pts[v].pos, pts[u].pos);
                        if (w > reach) continue;
                        if (max_colatitude_on_arc(pts[v].pos, pts[u].pos) > r + cap_tol) continue;
                        edges.push_back({v, u, w, true});
                    }
                }
    }
    // Consecutive boundary points are joined along the boundary circle when
    // the great-circle arc leaves the cap.
    for (std::size_t k = 0; k < ring; ++k) {
        const std::size_t a = interior + k;
        const std::size_t b = interior + (k + 1) % ring;
        if (max_colatitude_on_arc(pts[a].pos, pts[b].pos) > r + cap_tol)
            edges.push_back({std::min(a, b), std::max(a, b), std::sin(r) * 2.0 * kPi / static_cast<double>(ring), true});
    }
    std::sort(edges.begin(), edges.end(), [](const SpaceEdge& x, const SpaceEdge& y) { return std::tie(x.i, x.j) < std::tie(y.i, y.j); });

    SpaceMeta meta;
    meta.generator = "cap";
    meta.h = ell;
    meta.ambient = Ambient::sphere;
    meta.ambient_exact = r <= kPi / 2.0;
    meta.angle_res = std::atan(ell / reach);
    meta.params = spec.to_json();
    DiscreteLengthSpace space(std::move(pts), std::move(edges), meta);

    // Empirical distortion: graph distance over great-circle distance for
    // sampled U pairs whose great-circle arc stays in the cap.
    constexpr std::size_t kSources = 48;
    constexpr std::size_t kTargets = 8;
    std::vector<double> worst(kSources, 0.0);
    parallel_for(kSources, [&](std::size_t s) {
        Rng rng(seed, s);
        const std::size_t src = rng.index(0, interior - 1);
        const ShortestPathTree t = shortest_paths(space, src, false);
        for (std::size_t k = 0; k < kTargets; ++k) {
            const std::size_t dst = rng.index(0, interior - 1);
            const double a = arc(space.points()[src].pos, space.points()[dst].pos);
            if (a < 5.0 * ell) continue;
            if (max_colatitude_on_arc(space.points()[src].pos, space.points()[dst].pos) > r) continue;
            worst[s] = std::max(worst[s], t.dist[dst] / a - 1.0);
        }
    });
    meta.h_err = *std::max_element(worst.begin(), worst.end());
    return DiscreteLengthSpace(space.points(), space.edges(), meta);
}

// ---------------------------------------------------------------------------
// Dense rational segments

long gcd3(long a, long b, long c) { return std::gcd(std::gcd(a, b), c); }

DiscreteLengthSpace generate_dense(const DomainSpec& spec) {
    const std::vector<RationalSegment> segs = rational_segments(spec.segments);
    const std::vector<double> radii = spec.radii.empty() ? default_radii(spec.delta, spec.segments) : spec.radii;
    const Grid g = make_grid(1.0, spec.h);

    std::vector<SpacePoint> pts;
    std::vector<SpaceEdge> edges;
    add_grid(g, pts, edges);
    const std::size_t n_grid = pts.size();
    for (SpacePoint& p : pts) p.in_u = false;

    // Tubes each vertex lies in (distance < r_i).
    std::vector<std::vector<std::size_t>> tubes(n_grid);
    for (std::size_t s = 0; s < segs.size(); ++s) {
        const double r = radii[s];
        const double x0 = std::min(segs[s].a.x(), segs[s].b.x()) - r, x1 = std::max(segs[s].a.x(), segs[s].b.x()) + r;
        const double y0 = std::min(segs[s].a.y(), segs[s].b.y()) - r, y1 = std::max(segs[s].a.y(), segs[s].b.y()) + r;
        const auto i0 = static_cast<std::size_t>(std::max(0.0, std::floor(x0 / g.h)));
        const auto i1 = static_cast<std::size_t>(std::min(static_cast<double>(g.n), std::ceil(x1 / g.h)));
        const auto j0 = static_cast<std::size_t>(std::max(0.0, std::floor(y0 / g.h)));
        const auto j1 = static_cast<std::size_t>(std::min(static_cast<double>(g.n), std::ceil(y1 / g.h)));
        for (std::size_t j = j0; j <= j1; ++j)
            for (std::size_t i = i0; i <= i1; ++i)
                if (segment_distance(segs[s], g.x(i), g.x(j)) < r) tubes[g.id(i, j)].push_back(s);
    }

    // Chain vertices along every segment; coincident points are shared.
    std::map<std::tuple<long long, long long>, std::size_t> at;
    auto key = [](double x, double y) { return std::make_tuple(std::llround(x * 1e10), std::llround(y * 1e10)); };
    for (std::size_t j = 0; j <= g.n; ++j)
        for (std::size_t i = 0; i <= g.n; ++i) at.emplace(key(g.x(i), g.x(j)), g.id(i, j));
    std::vector<std::vector<std::size_t>> chains(segs.size());
    for (std::size_t s = 0; s < segs.size(); ++s) {
        const double len = segs[s].length();
        const auto m = static_cast<std::size_t>(std::max(1.0, std::ceil(len / g.h)));
        for (std::size_t k = 0; k <= m; ++k) {
            const double t = static_cast<double>(k) / static_cast<double>(m);
            const double x = segs[s].a.x() + t * (segs[s].b.x() - segs[s].a.x());
            const double y = segs[s].a.y() + t * (segs[s].b.y() - segs[s].a.y());
            auto [it, fresh] = at.emplace(key(x, y), pts.size());
            if (fresh) {
                pts.push_back({{x, y, 0.0}, 2, true});
                tubes.emplace_back();
            }
            chains[s].push_back(it->second);
        }
    }
    // Tube membership of chain vertices.
    for (std::size_t v = n_grid; v < pts.size(); ++v)
        for (std::size_t s = 0; s < segs.size(); ++s)
            if (segment_distance(segs[s], pts[v].pos[0], pts[v].pos[1]) < radii[s]) tubes[v].push_back(s);
    for (std::size_t s = 0; s < segs.size(); ++s)
        for (std::size_t v : chains[s])
            if (std::find(tubes[v].begin(), tubes[v].end(), s) == tubes[v].end()) tubes[v].push_back(s);
    for (auto& t : tubes) std::sort(t.begin(), t.end());
    for (std::size_t v = 0; v < pts.size(); ++v) pts[v].in_u = !tubes[v].empty();

    auto share_tube = [&](std::size_t a, std::size_t b) {
        const auto& ta = tubes[a];
        const auto& tb = tubes[b];
        std::size_t i = 0, j = 0;
        while (i < ta.size() && j < tb.size()) {
            if (ta[i] == tb[j]) return true;
            if (ta[i] < tb[j]) ++i;
            else ++j;
        }
        return false;
    };
    std::set<std::pair<std::size_t, std::size_t>> have;
    for (SpaceEdge& e : edges) {
        e.in_u = share_tube(e.i, e.j);
        have.emplace(std::min(e.i, e.j), std::max(e.i, e.j));
    }
    auto add_edge = [&](std::size_t a, std::size_t b) {
        if (a == b) return;
        const auto k = std::make_pair(std::min(a, b), std::max(a, b));
        if (!have.insert(k).second) return;
        const double w = dist2(pts[a].pos[0], pts[a].pos[1], pts[b].pos[0], pts[b].pos[1]);
        edges.push_back({k.first, k.second, w, share_tube(a, b)});
    };
    for (std::size_t s = 0; s < segs.size(); ++s)
        for (std::size_t k = 0; k + 1 < chains[s].size(); ++k) add_edge(chains[s][k], chains[s][k + 1]);
    // Chain vertices join nearby grid points so the completion graph stays a
    // good model of the square.
    for (std::size_t v = n_grid; v < pts.size(); ++v) {
        double reach = 2.0 * g.h;
        for (std::size_t s : tubes[v]) reach = std::max(reach, radii[s] + g.h);
        const double x = pts[v].pos[0], y = pts[v].pos[1];
        const auto i0 = static_cast<std::size_t>(std::max(0.0, std::floor((x - reach) / g.h)));
        const auto i1 = static_cast<std::size_t>(std::min(static_cast<double>(g.n), std::ceil((x + reach) / g.h)));
        const auto j0 = static_cast<std::size_t>(std::max(0.0, std::floor((y - reach) / g.h)));
        const auto j1 = static_cast<std::size_t>(std::min(static_cast<double>(g.n), std::ceil((y + reach) / g.h)));
        for (std::size_t j = j0; j <= j1; ++j)
            for (std::size_t i = i0; i <= i1; ++i)
                if (dist2(x, y, g.x(i), g.x(j)) <= reach) add_edge(v, g.id(i, j));
    }
    // Openness at mesh scale: every U vertex has an edge inside U.
    std::vector<char> has_u_edge(pts.size(), 0);
    for (const SpaceEdge& e : edges)
        if (e.in_u) has_u_edge[e.i] = has_u_edge[e.j] = 1;
    for (std::size_t v = 0; v < pts.size(); ++v)
        if (pts[v].in_u && !has_u_edge[v])
            throw DomainError("generate: U vertex " + std::to_string(v) + " has no edge inside U");
    require_u(pts);

    SpaceMeta meta;
    meta.generator = "dense_square";
    meta.h = g.h;
    meta.h_err = kStencilErr;
    meta.ambient = Ambient::plane;
    meta.ambient_exact = true;
    meta.angle_res = kStencilGap;
    nlohmann::json params = spec.to_json();
    nlohmann::json seg_json = nlohmann::json::array();
    for (std::size_t s = 0; s < segs.size(); ++s)
        seg_json.push_back({{"a", {segs[s].a.num_x, segs[s].a.num_y, segs[s].a.den}},
                            {"b", {segs[s].b.num_x, segs[s].b.num_y, segs[s].b.den}},
                            {"r", radii[s]},
                            {"chain", chains[s]}});
    params["bundle"] = std::move(seg_json);
    meta.params = std::move(params);
    return DiscreteLengthSpace(std::move(pts), std::move(edges), std::move(meta));
}

}  // namespace

// ---------------------------------------------------------------------------

std::string to_string(DomainKind k) {
    switch (k) {
        case DomainKind::cap:
            return "cap";
        case DomainKind::dense_square:
            return "dense_square";
        case DomainKind::punctured:
            return "punctured";
        case DomainKind::custom:
            break;
    }
    return "custom";
}

DomainKind domain_kind_from_string(const std::string& s) {
    if (s == "cap") return DomainKind::cap;
    if (s == "dense_square") return DomainKind::dense_square;
    if (s == "punctured") return DomainKind::punctured;
    if (s == "custom") return DomainKind::custom;
    throw DomainError("unknown domain kind '" + s + "'");
}

void DomainSpec::validate() const {
    if (!(h > 0.0)) throw DomainError("DomainSpec: resolution h must be positive");
    switch (kind) {
        case DomainKind::cap:
            if (!(r > 0.0 && r < kPi)) throw DomainError("DomainSpec: cap radius must lie in (0, pi)");
            break;
        case DomainKind::dense_square: {
            if (!(delta > 0.0 && delta < 1.0)) throw DomainError("DomainSpec: delta must lie in (0, 1)");
            if (segments == 0) throw DomainError("DomainSpec: need at least one segment");
            if (!radii.empty()) {
                if (radii.size() != segments) throw DomainError("DomainSpec: need one radius per segment");
                double sum = 0.0;
                for (double x : radii) {
                    if (!(x > 0.0)) throw DomainError("DomainSpec: radii must be positive");
                    sum += x;
                }
                if (sum > delta / 4.0 * (1.0 + 1e-12)) throw DomainError("DomainSpec: radii sum exceeds delta/4");
            }
            break;
        }
        case DomainKind::punctured:
        case DomainKind::custom:
            if (!(side > 0.0)) throw DomainError("DomainSpec: side must be positive");
            for (const auto& d : disks)
                if (!(d[2] > 0.0)) throw DomainError("DomainSpec: disk radius must be positive");
            break;
    }
}

nlohmann::json DomainSpec::to_json() const {
    nlohmann::json j = {{"kind", to_string(kind)}, {"h", h}};
    switch (kind) {
        case DomainKind::cap:
            j["r"] = r;
            break;
        case DomainKind::dense_square:
            j["delta"] = delta;
            j["segments"] = segments;
            if (!radii.empty()) j["radii"] = radii;
            break;
        case DomainKind::punctured:
            j["side"] = side;
            j["removed_points"] = removed_points;
            j["slits"] = slits;
            break;
        case DomainKind::custom:
            j["side"] = side;
            j["disks"] = disks;
            j["rects"] = rects;
            break;
    }
    return j;
}

DomainSpec DomainSpec::from_json(const nlohmann::json& j) {
    try {
        DomainSpec s;
        s.kind = domain_kind_from_string(j.at("kind").get<std::string>());
        s.h = j.value("h", s.h);
        s.r = j.value("r", s.r);
        s.side = j.value("side", s.side);
        s.delta = j.value("delta", s.delta);
        s.segments = j.value("segments", s.segments);
        if (j.contains("radii")) s.radii = j.at("radii").get<std::vector<double>>();
        if (j.contains("removed_points")) s.removed_points = j.at("removed_points").get<std::vector<std::array<double, 2>>>();
        if (j.contains("slits")) s.slits = j.at("slits").get<std::vector<std::array<double, 4>>>();
        if (j.contains("disks")) s.disks = j.at("disks").get<std::vector<std::array<double, 3>>>();
        if (j.contains("rects")) s.rects = j.at("rects").get<std::vector<std::array<double, 4>>>();
        s.validate();
        return s;
    } catch (const nlohmann::json::exception& e) {
        throw DomainError(std::string("DomainSpec: malformed JSON: ") + e.what());
    }
}

DiscreteLengthSpace generate(const DomainSpec& spec, std::uint64_t seed) {
    spec.validate();
    switch (spec.kind) {
        case DomainKind::cap:
            return generate_cap(spec, seed);
        case DomainKind::dense_square:
            return generate_dense(spec);
        case DomainKind::punctured:
            return generate_punctured(spec);
        case DomainKind::custom:
            break;
    }
    return generate_custom(spec);
}

// ---------------------------------------------------------------------------

double RationalSegment::length() const { return dist2(a.x(), a.y(), b.x(), b.y()); }

std::vector<RationalSegment> rational_segments(std::size_t count) {
    std::vector<RationalPoint> points;
    std::vector<RationalSegment> out;
    for (long den = 1; out.size() < count; ++den) {
        // Points with reduced common denominator exactly `den`, lexicographic.
        for (long a = 0; a <= den; ++a)
            for (long b = 0; b <= den; ++b) {
                if (gcd3(a, b, den) != 1) continue;
                points.push_back({a, b, den});
                const std::size_t j = points.size() - 1;
                for (std::size_t i = 0; i < j && out.size() < count; ++i) out.push_back({points[i], points[j]});
                if (out.size() >= count) return out;
            }
    }
    return out;
}

std::vector<double> default_radii(double delta, std::size_t k) {
    std::vector<double> r(k);
    const double norm = 1.0 - std::ldexp(1.0, -static_cast<int>(std::min<std::size_t>(k, 1000)));
    for (std::size_t i = 0; i < k; ++i) r[i] = 0.25 * delta * std::ldexp(1.0, -static_cast<int>(std::min<std::size_t>(i + 1, 1000))) / norm;
    return r;
}

double segment_distance(const RationalSegment& s, double x, double y) {
    return point_segment_distance(x, y, s.a.x(), s.a.y(), s.b.x(), s.b.y());
}

AreaEstimate area_estimate(const DomainSpec& spec, std::size_t samples, std::uint64_t seed) {
    if (spec.kind != DomainKind::dense_square) throw DomainError("area_estimate: needs a dense_square spec");
    spec.validate();
    const std::vector<RationalSegment> segs = rational_segments(spec.segments);
    const std::vector<double> radii = spec.radii.empty() ? default_radii(spec.delta, spec.segments) : spec.radii;
    AreaEstimate est;
    est.samples = samples;
    est.delta = spec.delta;
    for (std::size_t s = 0; s < segs.size(); ++s) est.union_bound += 2.0 * segs[s].length() * radii[s] + kPi * radii[s] * radii[s];
    std::vector<char> hit(samples, 0);
    parallel_for(samples, [&](std::size_t t) {
        Rng rng(seed, t);
        const double x = rng.uniform01();
        const double y = rng.uniform01();
        for (std::size_t s = 0; s < segs.size(); ++s)
            if (segment_distance(segs[s], x, y) < radii[s]) {
                hit[t] = 1;
                return;
            }
    });
    est.hits = static_cast<std::size_t>(std::count(hit.begin(), hit.end(), 1));
    const double n = static_cast<double>(samples);
    est.estimate = samples ? static_cast<double>(est.hits) / n : 0.0;
    est.sigma = samples ? std::sqrt(est.estimate * (1.0 - est.estimate) / n) : 0.0;
    return est;
}

CompletionReport completion_compare(const DiscreteLengthSpace& space, std::size_t pairs, double epsilon,
                                    std::uint64_t seed) {
    if (space.meta().generator != "dense_square" || !space.meta().params.contains("bundle"))
        throw DomainError("completion_compare: needs a dense_square space");
    if (!(epsilon > 0.0)) throw DomainError("completion_compare: epsilon must be positive");
    const auto& bundle = space.meta().params.at("bundle");
    struct Seg {
        double ax, ay, bx, by;
        std::vector<std::size_t> chain;
    };
    std::vector<Seg> segs;
    for (const auto& b : bundle) {
        const auto a = b.at("a").get<std::array<long, 3>>();
        const auto c = b.at("b").get<std::array<long, 3>>();
        segs.push_back({static_cast<double>(a[0]) / static_cast<double>(a[2]), static_cast<double>(a[1]) / static_cast<double>(a[2]),
                        static_cast<double>(c[0]) / static_cast<double>(c[2]), static_cast<double>(c[1]) / static_cast<double>(c[2]),
                        b.at("chain").get<std::vector<std::size_t>>()});
    }
    CompletionReport rep;
    rep.pairs = pairs;
    rep.epsilon = epsilon;
    rep.h_err = space.meta().h_err;

    struct Row {
        bool matched = false;
        CompletionReport::Witness w;
        double gap = 0.0;
        std::array<double, 3> link{};  // amount by which each link fails
    };
    std::vector<Row> rows(pairs);
    parallel_for(pairs, [&](std::size_t t) {
        Rng rng(seed, t);
        const std::size_t p = rng.index(0, space.size() - 1);
        std::size_t q = p;
        while (q == p) q = rng.index(0, space.size() - 1);
        const auto& pp = space.points()[p].pos;
        const auto& qp = space.points()[q].pos;
        // Bundled segment passing closest to both points.
        std::size_t best = segs.size();
        double best_score = kInfDistance;
        for (std::size_t s = 0; s < segs.size(); ++s) {
            const double dp = point_segment_distance(pp[0], pp[1], segs[s].ax, segs[s].ay, segs[s].bx, segs[s].by);
            const double dq = point_segment_distance(qp[0], qp[1], segs[s].ax, segs[s].ay, segs[s].bx, segs[s].by);
            const double score = std::max(dp, dq);
            if (score < epsilon && score < best_score) {
                best_score = score;
                best = s;
            }
        }
        if (best == segs.size()) return;
        // Nearest chain vertices (rational points of the segment).
        auto nearest = [&](const Vec3& x) {
            std::size_t arg = segs[best].chain.front();
            double bd = kInfDistance;
            for (std::size_t v : segs[best].chain) {
                const double d = dist2(x[0], x[1], space.points()[v].pos[0], space.points()[v].pos[1]);
                if (d < bd) {
                    bd = d;
                    arg = v;
                }
            }
            return std::make_pair(arg, bd);
        };
        const auto [pb, dpb] = nearest(pp);
        const auto [qb, dqb] = nearest(qp);
        if (dpb >= epsilon || dqb >= epsilon || pb == qb) return;
        Row& row = rows[t];
        row.matched = true;
        const ShortestPathTree tp = shortest_paths(space, p, false);
        const ShortestPathTree tpb = shortest_paths(space, pb, true);
        row.w = {p, q, pb, qb, best, tp.dist[q], space.ambient_distance(p, q), tpb.dist[qb]};
        row.gap = std::fabs(row.w.d_completion - row.w.d_u);
        row.link[0] = row.w.d_x - row.w.d_completion - 1e-9;
        row.link[1] = row.w.d_u - 2.0 * epsilon - row.w.d_x - 1e-9;
        row.link[2] = row.w.d_completion - 4.0 * epsilon - (row.w.d_u - 2.0 * epsilon) - 2.0 * rep.h_err;
    });
    for (const Row& row : rows) {
        if (!row.matched) {
            ++rep.misses;
            continue;
        }
        ++rep.matched;
        for (std::size_t k = 0; k < 3; ++k) {
            if (row.link[k] > 0.0) ++rep.link_violations[k];
            rep.max_violation = std::max(rep.max_violation, row.link[k]);
        }
        if (!rep.worst || row.gap > rep.max_gap) {
            rep.max_gap = row.gap;
            rep.worst = row.w;
        }
    }
    return rep;
}

}  // namespace alexkit
