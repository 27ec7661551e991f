#pragma once

// Alexandrov-lemma calculators: the classic lemma, the weighted two-triangle
// and multi-triangle blends, the alternating-curvature special case and the
// extension curvature kappa* = f_a^{-1}(f_r(kappa)).  Each calculator has a
// matching randomized verifier that synthesizes hinges in model space and
// measures the conclusion defect.

#include <cstdint>
#include <string>
#include <vector>

#include "alexkit/model_trig.hpp"

namespace alexkit {

inline constexpr double kAngleTol = 1e-9;

// ---------------------------------------------------------------------------
// Classic Alexandrov lemma

/// Five distances among p, q, s and x in the interior of [qs]; |qs| = qx + xs.
struct FivePointDistances {
    double pq = 0.0;
    double ps = 0.0;
    double px = 0.0;
    double qx = 0.0;
    double xs = 0.0;
};

struct AlexandrovReport {
    bool vacuous = false;
    // angle~(q; p, x) >= angle~(q; p, s)
    bool at_q = false;
    // angle~(x; p, q) + angle~(x; p, s) <= pi
    bool at_x = false;
    double margin_q = 0.0;  // angle~(q;p,x) - angle~(q;p,s)
    double margin_x = 0.0;  // pi - angle~(x;p,q) - angle~(x;p,s)
    // The two conditions coincide, or disagree only inside kAngleTol.
    bool agree = true;
};

[[nodiscard]] AlexandrovReport alexandrov_lemma_check(Curvature kappa, const FivePointDistances& d);

// ---------------------------------------------------------------------------
// Weighted lemmas

struct Segment {
    double length = 0.0;
    Curvature kappa;
};

/// A hinge at p over the geodesic [qs] split at x_1..x_{N-1}; segment i
/// is compared in M^2_{kappa_i}.  `a` is |pq|.
struct HingeConfig {
    double a = 0.0;
    std::vector<Segment> segments;

    void validate() const;
    [[nodiscard]] double total_length() const;
};

struct AlternatingBlock {
    double b = 0.0;
    double d = 0.0;
};

struct AlternatingConfig {
    double a = 0.0;
    std::vector<AlternatingBlock> blocks;
    Curvature kappa;
    Curvature kappa_star;

    void validate() const;
};

/// kappa-bar with f_a(kappa-bar) = [(b^2 + 2bd) f_a(k1) + d^2 f_a(k2)] / (b + d)^2.
[[nodiscard]] Curvature kappa_bar_two(double a, double b, double d, Curvature k1, Curvature k2);

/// The two lower bounds of kappa_bar_two that follow from concavity and
/// monotonicity of f.
struct RemarkBounds {
    double weighted = 0.0;  // ((b^2 + 2bd) k1 + d^2 k2) / (b + d)^2
    double floor = 0.0;     // min{k1, (b^2 k1 + d^2 k2) / (b^2 + d^2)}
};
[[nodiscard]] RemarkBounds remark_bounds(double b, double d, Curvature k1, Curvature k2);

struct MultiKappaBar {
    Curvature sharp;  // solves the f-weighted equation
    Curvature lower;  // the kappa-weighted average
};

[[nodiscard]] MultiKappaBar kappa_bar_multi(const HingeConfig& config);

[[nodiscard]] Curvature kappa_bar_alternating(const AlternatingConfig& config);

/// The alternating configuration as a 2N-segment hinge with kappa on odd
/// segments and kappa* on even ones.
[[nodiscard]] HingeConfig as_hinge(const AlternatingConfig& config);

/// kappa* = f_a^{-1}(f_r(kappa)), requires 0 < r <= a.
[[nodiscard]] Curvature kappa_star_extension(double a, double r, Curvature kappa);

// ---------------------------------------------------------------------------
// Verification sweeps

struct SweepOptions {
    std::size_t trials = 10000;
    double scale = 1e-2;
    double kappa_lo = -2.0;
    double kappa_hi = 2.0;
    double a_lo = 0.5;
    double a_hi = 2.0;
    std::uint64_t seed = 0;
    int max_segments = 6;
    double budget_exponent = 2.5;
    double theta_margin = 0.1;
};

/// One synthesized trial. `inputs` is a flat name/value list for reports.
struct TrialWitness {
    std::size_t trial = 0;
    double defect = 0.0;
    double budget = 0.0;
    std::vector<std::pair<std::string, double>> inputs;
};

/// A named pass/fail check attached to a report.
struct CheckResult {
    std::string name;
    bool passed = true;
    bool gated = true;
    double value = 0.0;
    double threshold = 0.0;
    std::string note;
};

struct VerificationReport {
    std::string lemma;
    std::size_t trials = 0;
    std::size_t skipped = 0;
    std::size_t evaluated = 0;
    std::size_t violations = 0;
    double min_defect = 0.0;
    double max_defect = 0.0;  // largest shortfall, max(0, -min_defect)
    double worst_ratio = 0.0; // min over trials of defect / budget
    double budget_exponent = 2.5;
    std::uint64_t seed = 0;
    TrialWitness worst_case;
    std::vector<CheckResult> checks;

    [[nodiscard]] bool passed() const;
};

/// Lemma with two triangles: synthesize a hinge satisfying
/// angle~_{k1}(x;p,q) + angle~_{k2}(x;p,s) <= pi and measure
/// angle~_{k1}(q;p,x) - angle~_{kappa-bar}(q;p,s).
[[nodiscard]] VerificationReport verify_weighted_lemma(const SweepOptions& opts);

/// Chained hinges with 2..max_segments segments.
[[nodiscard]] VerificationReport verify_multi_lemma(const SweepOptions& opts);

/// Alternating corollary: closed form vs direct substitution and the chained
/// conclusion with kappa on odd and [kappa*, kappa] on even segments.
[[nodiscard]] VerificationReport verify_alternating(const SweepOptions& opts);

/// Extension curvature: monotonicity in a and the a -> r limit.
[[nodiscard]] VerificationReport verify_extension(const SweepOptions& opts);

/// Classic lemma: random admissible configurations for kappa in {-1, 0, 1}.
[[nodiscard]] VerificationReport verify_alexandrov(const SweepOptions& opts);

// Hinge synthesis shared by the sweeps and the tests.

struct HingeChain {
    double lhs = 0.0;        // angle~_{k1}(q; p, x_1)
    double ps = 0.0;         // |p s| at the end of the chain
    double total = 0.0;      // |q s|
    bool admissible = true;
};

/// Build a chain: |px_1| = model_side(k_1, a, c_1, theta_q); at each joint
/// x_i the next angle is slack_i * (pi - angle~_{k_i}(x_i; p, x_{i-1})).
[[nodiscard]] HingeChain synthesize_chain(double a, const std::vector<Segment>& segments,
                                          double theta_q, const std::vector<double>& slack);

/// lhs - angle~_{kappa}(q; p, s) for the chain's final triangle.
[[nodiscard]] double chain_defect(const HingeChain& chain, double a, Curvature kappa_bar);

}  // namespace alexkit
