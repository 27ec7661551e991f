#include "alexkit/model_trig.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace alexkit {

namespace {

constexpr double kPi = std::numbers::pi;

// Above sqrt(-kappa) * (b + c) = kScaledHyperbolic the angle formula switches
// to an exponentially scaled form.
constexpr double kScaledHyperbolic = 30.0;

bool use_series(double k, double t) { return std::fabs(k) * t * t < kSeriesThreshold; }

std::string fmt_bracket(double lo, double hi) {
    return "[" + std::to_string(lo) + ", " + std::to_string(hi) + "]";
}

}  // namespace

double sn(Curvature kappa, double t) {
    const double k = kappa.value();
    if (use_series(k, t)) {
        const double x = k * t * t;
        return t * (1.0 - x / 6.0 + x * x / 120.0);
    }
    if (k > 0.0) {
        const double s = std::sqrt(k);
        return std::sin(s * t) / s;
    }
    const double s = std::sqrt(-k);
    return std::sinh(s * t) / s;
}

double cs(Curvature kappa, double t) {
    const double k = kappa.value();
    if (use_series(k, t)) {
        const double x = k * t * t;
        return 1.0 - x / 2.0 + x * x / 24.0;
    }
    if (k > 0.0) return std::cos(std::sqrt(k) * t);
    return std::cosh(std::sqrt(-k) * t);
}

double md(Curvature kappa, double t) {
    const double k = kappa.value();
    if (use_series(k, t)) {
        const double x = k * t * t;
        return t * t * (0.5 - x / 24.0 + x * x / 720.0);
    }
    // 1 - cos(u) = 2 sin^2(u/2) avoids cancellation for short t.
    if (k > 0.0) {
        const double h = std::sin(0.5 * std::sqrt(k) * t);
        return 2.0 * h * h / k;
    }
    const double h = std::sinh(0.5 * std::sqrt(-k) * t);
    return 2.0 * h * h / (-k);
}

double md_inverse(Curvature kappa, double m) {
    const double k = kappa.value();
    if (!(m >= 0.0)) throw DomainError("md_inverse: negative argument");
    if (k == 0.0) return std::sqrt(2.0 * m);
    if (k > 0.0) {
        double x = 0.5 * k * m;  // sin^2(sqrt(k) t / 2)
        if (x > 1.0 + 1e-12) throw DomainError("md_inverse: value exceeds 2/kappa");
        x = std::min(x, 1.0);
        return 2.0 * std::atan2(std::sqrt(x), std::sqrt(1.0 - x)) / std::sqrt(k);
    }
    return 2.0 * std::asinh(std::sqrt(-0.5 * k * m)) / std::sqrt(-k);
}

double sn_dkappa(Curvature kappa, double t) {
    const double k = kappa.value();
    if (std::fabs(k) * t * t < 1e-3) {
        const double t3 = t * t * t;
        const double t2 = t * t;
        return -t3 / 6.0 + k * t3 * t2 / 60.0 - k * k * t3 * t2 * t2 / 1680.0;
    }
    return (t * cs(kappa, t) - sn(kappa, t)) / (2.0 * k);
}

double cs_dkappa(Curvature kappa, double t) { return -0.5 * t * sn(kappa, t); }

double coefficient_pole(double c) { return (kPi / c) * (kPi / c); }

double taylor_coefficient(double c, Curvature kappa) {
    if (!(c > 0.0)) throw DomainError("taylor_coefficient: c must be positive");
    if (kappa.value() >= coefficient_pole(c))
        throw DomainError("taylor_coefficient: kappa at or beyond (pi/c)^2");
    const double s = sn(kappa, c);
    if (!(s > 0.0)) throw DomainError("taylor_coefficient: sn_kappa(c) <= 0");
    return cs(kappa, c) / s;
}

double taylor_coefficient_dkappa(double c, Curvature kappa) {
    const double s = sn(kappa, c);
    if (!(c > 0.0) || !(s > 0.0)) throw DomainError("taylor_coefficient_dkappa: outside domain");
    const double co = cs(kappa, c);
    return (cs_dkappa(kappa, c) * s - co * sn_dkappa(kappa, c)) / (s * s);
}

Curvature taylor_coefficient_inverse(double c, double y, const InverseOptions& opts) {
    if (!(c > 0.0)) throw DomainError("taylor_coefficient_inverse: c must be positive");
    if (!std::isfinite(y)) throw DomainError("taylor_coefficient_inverse: non-finite target");
    double lo = opts.kappa_min;
    double hi = coefficient_pole(c) * (1.0 - opts.pole_margin);
    auto f = [c](double k) { return taylor_coefficient(c, Curvature{k}); };
    const double f_lo = f(lo);
    const double f_hi = f(hi);
    if (y > f_lo || y < f_hi)
        throw RangeError("taylor_coefficient_inverse: target outside image of bracket " +
                             fmt_bracket(lo, hi),
                         lo, hi);
    if (y == f_lo) return Curvature{lo};

    // f is strictly decreasing: f(lo) >= y > f(hi).
    for (int it = 0; it < 400; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (hi - lo <= 1e-12 * std::max(1.0, std::fabs(mid))) break;
        if (f(mid) >= y) lo = mid;
        else hi = mid;
    }
    double k = 0.5 * (lo + hi);
    double resid = std::fabs(f(k) - y);
    for (int step = 0; step < opts.newton_steps && resid > 0.0; ++step) {
        const double slope = taylor_coefficient_dkappa(c, Curvature{k});
        if (!(slope < 0.0)) break;
        const double cand = k - (f(k) - y) / slope;
        if (!(cand >= opts.kappa_min && cand < coefficient_pole(c))) break;
        const double r = std::fabs(f(cand) - y);
        if (r >= resid) break;
        k = cand;
        resid = r;
    }
    return Curvature{k};
}

double model_side(Curvature kappa, double b, double c, ModelAngle alpha) {
    if (!(b >= 0.0 && c >= 0.0)) throw DomainError("model_side: negative side");
    const double k = kappa.value();
    if (k > 0.0) {
        const double lim = kPi / std::sqrt(k);
        if (!(b < lim && c < lim)) throw DomainError("model_side: side reaches pi/sqrt(kappa)");
    }
    // Haversine form of the md cosine law:
    //   md(|BC|) = md(|b - c|) + 2 sn(b) sn(c) sin^2(alpha / 2)
    const double h = std::sin(0.5 * alpha.radians());
    double m = md(kappa, std::fabs(b - c)) + 2.0 * sn(kappa, b) * sn(kappa, c) * h * h;
    if (k > 0.0) m = std::min(m, 2.0 / k);
    return md_inverse(kappa, m);
}

AngleOutcome classify_angle(Curvature kappa, double adj1, double adj2, double opp) noexcept {
    if (!(adj1 >= 0.0 && adj2 >= 0.0 && opp >= 0.0)) return {AngleStatus::inadmissible, 0.0};
    const double perim = adj1 + adj2 + opp;
    const double slack = kTriangleSlack * std::max(1.0, perim);
    const double lo = std::fabs(adj1 - adj2);
    const double hi = adj1 + adj2;
    if (opp < lo - slack || opp > hi + slack) return {AngleStatus::inadmissible, 0.0};
    const double k = kappa.value();
    if (k > 0.0 && perim * std::sqrt(k) >= 2.0 * kPi) return {AngleStatus::undefined, 0.0};
    if (adj1 == 0.0 || adj2 == 0.0) return {AngleStatus::degenerate, 0.0};

    if (k < 0.0 && std::sqrt(-k) * hi > kScaledHyperbolic) {
        // Strongly hyperbolic: sinh/cosh would overflow, so divide every
        // term by exp(s (adj1 + adj2)) first.  All exponents are <= 0.
        const double s = std::sqrt(-k);
        auto om = [](double x) { return -std::expm1(-x); };  // 1 - e^{-x}
        const double den = om(2.0 * s * adj1) * om(2.0 * s * adj2);
        const double e_opp = std::exp(s * (opp - hi)) * om(s * opp) * om(s * opp);
        const double e_lo = std::exp(s * (lo - hi)) * om(s * lo) * om(s * lo);
        const double e_hi = om(s * hi) * om(s * hi);
        const double s2 = (e_opp - e_lo) / den;
        const double c2 = (e_hi - e_opp) / den;
        const double theta = 2.0 * std::atan2(std::sqrt(std::max(s2, 0.0)), std::sqrt(std::max(c2, 0.0)));
        return {AngleStatus::ok, std::clamp(theta, 0.0, kPi)};
    }

    // sin^2(theta/2) and cos^2(theta/2) from two md differences; both are
    // well conditioned near their respective end of [0, pi].
    const double den = 2.0 * sn(kappa, adj1) * sn(kappa, adj2);
    if (!(den > 0.0)) return {AngleStatus::undefined, 0.0};
    const double m_opp = md(kappa, opp);
    const double s2 = (m_opp - md(kappa, lo)) / den;
    const double c2 = (md(kappa, hi) - m_opp) / den;
    const double theta = 2.0 * std::atan2(std::sqrt(std::max(s2, 0.0)), std::sqrt(std::max(c2, 0.0)));
    return {AngleStatus::ok, std::clamp(theta, 0.0, kPi)};
}

ModelAngle angle_between(Curvature kappa, double adj1, double adj2, double opp) {
    const AngleOutcome out = classify_angle(kappa, adj1, adj2, opp);
    switch (out.status) {
        case AngleStatus::ok:
            return ModelAngle{out.radians};
        case AngleStatus::inadmissible:
            throw InadmissibleTriangle("model_angle: sides violate the triangle inequality");
        case AngleStatus::undefined:
            throw UndefinedAngle("model_angle: perimeter reaches 2*pi/sqrt(kappa)");
        case AngleStatus::degenerate:
            break;
    }
    throw DegenerateSide("model_angle: zero side adjacent to the vertex");
}

ModelAngle model_angle(Curvature kappa, const TriangleSides& s, Vertex at) {
    switch (at) {
        case Vertex::A:
            return angle_between(kappa, s.b, s.c, s.a);
        case Vertex::B:
            return angle_between(kappa, s.a, s.c, s.b);
        case Vertex::C:
            break;
    }
    return angle_between(kappa, s.a, s.b, s.c);
}

double taylor_side_expansion(Curvature kappa, double c, double b, ModelAngle beta) {
    const double sb = std::sin(beta.radians());
    return c - b * std::cos(beta.radians()) + 0.5 * sb * sb * taylor_coefficient(c, kappa) * b * b;
}

}  // namespace alexkit
