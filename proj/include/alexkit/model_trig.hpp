#pragma once

// Trigonometry of the model surfaces M^2_kappa (sphere, plane, hyperbolic
// plane) for every real kappa, plus the second-order side coefficient
//
//     f_c(kappa) = cs_kappa(c) / sn_kappa(c)
//
// and its inverse.  Everything here is a pure function.

#include <cmath>
#include <numbers>

#include "alexkit/errors.hpp"

namespace alexkit {

/// Curvature of a model surface, in 1/length^2.  Never NaN or infinite.
class Curvature {
  public:
    constexpr Curvature() = default;
    explicit Curvature(double kappa) : kappa_(kappa) {
        if (!std::isfinite(kappa)) throw DomainError("curvature must be finite");
    }
    [[nodiscard]] constexpr double value() const noexcept { return kappa_; }

    friend constexpr bool operator==(Curvature, Curvature) = default;
    friend constexpr auto operator<=>(Curvature, Curvature) = default;

  private:
    double kappa_ = 0.0;
};

/// Angle of a model triangle, in [0, pi].
class ModelAngle {
  public:
    constexpr ModelAngle() = default;
    explicit ModelAngle(double radians) : theta_(radians) {
        if (!(radians >= 0.0 && radians <= std::numbers::pi))
            throw DomainError("model angle outside [0, pi]");
    }
    [[nodiscard]] constexpr double radians() const noexcept { return theta_; }

  private:
    double theta_ = 0.0;
};

/// Side lengths; side `a` is opposite vertex A, and so on.
struct TriangleSides {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
};

enum class Vertex { A, B, C };

// Below |kappa| * t^2 < kSeriesThreshold the branch formulas are replaced by
// truncated Taylor series in kappa.
inline constexpr double kSeriesThreshold = 1e-6;

// Absolute slack (scaled by max(1, perimeter)) allowed on the triangle
// inequality before sides are rejected; smaller violations are clamped.
inline constexpr double kTriangleSlack = 1e-9;

[[nodiscard]] double sn(Curvature kappa, double t);
[[nodiscard]] double cs(Curvature kappa, double t);
[[nodiscard]] double md(Curvature kappa, double t);

/// Inverse of md on [0, pi/sqrt(kappa)] (or [0, inf) for kappa <= 0).
/// Throws DomainError when m is negative or exceeds 2/kappa.
[[nodiscard]] double md_inverse(Curvature kappa, double m);

/// Partial derivatives of sn and cs with respect to kappa.
[[nodiscard]] double sn_dkappa(Curvature kappa, double t);
[[nodiscard]] double cs_dkappa(Curvature kappa, double t);

/// Largest kappa for which sn_kappa(c) > 0, i.e. (pi/c)^2.
[[nodiscard]] double coefficient_pole(double c);

/// f_c(kappa) = cs_kappa(c) / sn_kappa(c).  Requires c > 0 and
/// kappa < (pi/c)^2; throws DomainError otherwise.
[[nodiscard]] double taylor_coefficient(double c, Curvature kappa);

/// d f_c / d kappa (always negative on the domain).
[[nodiscard]] double taylor_coefficient_dkappa(double c, Curvature kappa);

struct InverseOptions {
    double kappa_min = -1e4;
    // Upper end of the bracket is (pi/c)^2 * (1 - pole_margin).
    double pole_margin = 1e-10;
    double tol_f = 1e-12;
    int newton_steps = 2;
};

/// Solves f_c(kappa) = y by bisection on the monotone bracket followed by
/// Newton polishing.  Throws RangeError (carrying the bracket) when y lies
/// outside f_c's image on the bracket.
[[nodiscard]] Curvature taylor_coefficient_inverse(double c, double y,
                                                   const InverseOptions& opts = {});

/// Length of the side opposite the angle alpha between sides b and c in
/// M^2_kappa, from the cosine law written with md.
[[nodiscard]] double model_side(Curvature kappa, double b, double c, ModelAngle alpha);

enum class AngleStatus { ok, inadmissible, undefined, degenerate };

struct AngleOutcome {
    AngleStatus status = AngleStatus::ok;
    double radians = 0.0;
    [[nodiscard]] bool ok() const noexcept { return status == AngleStatus::ok; }
};

/// Non-throwing model angle between the sides `adj1` and `adj2`, opposite
/// `opp`.  Used in hot loops where undefined angles are routine.
[[nodiscard]] AngleOutcome classify_angle(Curvature kappa, double adj1, double adj2,
                                          double opp) noexcept;

/// Throwing variant of classify_angle.
[[nodiscard]] ModelAngle angle_between(Curvature kappa, double adj1, double adj2, double opp);

/// Angle at vertex `at` of the model triangle with the given sides.
[[nodiscard]] ModelAngle model_angle(Curvature kappa, const TriangleSides& sides, Vertex at);

/// Second-order expansion of the side opposite beta when the adjacent side
/// b is short:  c - b cos(beta) + 1/2 sin^2(beta) f_c(kappa) b^2.
[[nodiscard]] double taylor_side_expansion(Curvature kappa, double c, double b, ModelAngle beta);

}  // namespace alexkit
