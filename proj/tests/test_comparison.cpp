#include <doctest.h>

#include <cmath>
#include <numbers>

#include "alexkit/comparison.hpp"
#include "alexkit/sampling.hpp"

using namespace alexkit;
using std::numbers::pi;

namespace {

Curvature K(double k) { return Curvature{k}; }

// Reference values from a 40-digit root finder on f.
// f_1(kbar) = (3 f_1(1) + f_1(-1)) / 4
constexpr double kKappaBarTwoRef = 0.54928727384798238659240131967756;
// multi-segment f-form for c = (0.01, 0.02, 0.01), kappa = (1, 0, -1), a = 1
constexpr double kKappaBarMultiSharpRef = 0.39997101061649509802169062769318;
// f_2(kappa*) = f_1(0) = 1
constexpr double kKappaStarRef = -0.91681395612416283626029585368216;

// Independent restatement of the kappa-weighted multi formula.
double kappa_lower_direct(const std::vector<double>& c, const std::vector<double>& k) {
    double num = 0.0, total = 0.0;
    for (double x : c) total += x;
    for (std::size_t i = 0; i < c.size(); ++i) {
        num += c[i] * c[i] * k[i];
        double rest = 0.0;
        for (std::size_t j = i + 1; j < c.size(); ++j) rest += c[j];
        num += 2.0 * rest * c[i] * k[i];
    }
    return num / (total * total);
}

}  // namespace

TEST_SUITE("comparison") {

TEST_CASE("classic lemma: symmetric right-angle configuration") {
    // p=(0,1), q=(-1,0), x=(0,0), s=(1,0)
    FivePointDistances d{std::sqrt(2.0), std::sqrt(2.0), 1.0, 1.0, 1.0};
    const AlexandrovReport r = alexandrov_lemma_check(K(0), d);
    CHECK_FALSE(r.vacuous);
    CHECK(r.at_q);
    CHECK(r.at_x);
    CHECK(std::fabs(r.margin_q) <= 1e-12);
    CHECK(std::fabs(r.margin_x) <= 1e-12);
    CHECK(r.agree);
}

TEST_CASE("classic lemma: collinear configuration") {
    // q=0, x=1, s=2, p=3 on a line: angles at x are 0 and pi.
    FivePointDistances d{3.0, 1.0, 2.0, 1.0, 1.0};
    const AlexandrovReport r = alexandrov_lemma_check(K(0), d);
    CHECK_FALSE(r.vacuous);
    CHECK(r.at_q);
    CHECK(r.at_x);
    CHECK(r.agree);
}

TEST_CASE("classic lemma: vacuous and invalid inputs") {
    FivePointDistances big{3.0, 3.0, 2.9, 1.5, 1.5};
    CHECK(alexandrov_lemma_check(K(1), big).vacuous);
    FivePointDistances bad{1.0, 1.0, 5.0, 0.5, 0.5};
    CHECK_THROWS_AS((void)alexandrov_lemma_check(K(0), bad), InadmissibleTriangle);
    FivePointDistances end{1.0, 1.0, 1.0, 0.0, 1.0};
    CHECK_THROWS_AS((void)alexandrov_lemma_check(K(0), end), DomainError);
}

TEST_CASE("kappa_bar_two") {
    CHECK(kappa_bar_two(1, 0.3, 0, K(2), K(-5)).value() == 2.0);
    for (double k : {-1.5, 0.0, 0.8}) CHECK(std::fabs(kappa_bar_two(1, 0.2, 0.1, K(k), K(k)).value() - k) <= 1e-12);
    const double kb = kappa_bar_two(1, 0.005, 0.005, K(1), K(-1)).value();
    CHECK(std::fabs(kb - kKappaBarTwoRef) <= 1e-10);
    const double y = (3 * taylor_coefficient(1, K(1)) + taylor_coefficient(1, K(-1))) / 4;
    CHECK(std::fabs(taylor_coefficient(1, K(kb)) - y) <= 1e-12);
}

TEST_CASE("remark bounds on random inputs") {
    int n = 0;
    for (std::size_t t = 0; t < 5000; ++t) {
        Rng rng(3, t);
        const double a = rng.uniform(0.5, 2), b = rng.uniform(0, 0.01), d = rng.uniform(0, 0.01);
        const double k1 = rng.uniform(-2, 2), k2 = rng.uniform(-2, 2);
        if (b + d <= 0) continue;
        const double kb = kappa_bar_two(a, b, d, K(k1), K(k2)).value();
        const RemarkBounds rb = remark_bounds(b, d, K(k1), K(k2));
        CHECK(kb >= rb.weighted - 1e-9);
        CHECK(kb >= rb.floor - 1e-9);
        CHECK(rb.weighted >= rb.floor - 1e-12);
        ++n;
    }
    CHECK(n > 4900);
}

TEST_CASE("kappa_bar_two is nondecreasing in both curvatures") {
    for (double k2 = -2; k2 <= 2; k2 += 0.5) {
        double prev = -1e300, prev2 = -1e300;
        for (double k1 = -2; k1 <= 2; k1 += 0.25) {
            const double v = kappa_bar_two(1.2, 0.006, 0.004, K(k1), K(k2)).value();
            const double w = kappa_bar_two(1.2, 0.006, 0.004, K(k2), K(k1)).value();
            CHECK(v >= prev - 1e-12);
            CHECK(w >= prev2 - 1e-12);
            prev = v;
            prev2 = w;
        }
    }
}

TEST_CASE("kappa_bar_multi") {
    HingeConfig one{1.0, {{0.02, K(0.7)}}};
    CHECK(kappa_bar_multi(one).sharp.value() == 0.7);
    CHECK(kappa_bar_multi(one).lower.value() == 0.7);
    HingeConfig same{1.0, {{0.01, K(-0.3)}, {0.02, K(-0.3)}, {0.005, K(-0.3)}}};
    CHECK(kappa_bar_multi(same).sharp.value() == -0.3);
    CHECK(kappa_bar_multi(same).lower.value() == -0.3);

    HingeConfig three{1.0, {{0.01, K(1)}, {0.02, K(0)}, {0.01, K(-1)}}};
    const MultiKappaBar m = kappa_bar_multi(three);
    CHECK(std::fabs(m.lower.value() - kappa_lower_direct({0.01, 0.02, 0.01}, {1, 0, -1})) <= 1e-14);
    CHECK(std::fabs(m.lower.value() - 0.375) <= 1e-14);
    CHECK(std::fabs(m.sharp.value() - kKappaBarMultiSharpRef) <= 1e-10);
    CHECK(m.sharp.value() >= m.lower.value());

    CHECK_THROWS_AS((void)kappa_bar_multi(HingeConfig{1.0, {}}), DomainError);
    CHECK_THROWS_AS((void)kappa_bar_multi(HingeConfig{1.0, {{0.0, K(0)}}}), DomainError);
}

TEST_CASE("kappa_bar_multi with two segments matches kappa_bar_two") {
    for (std::size_t t = 0; t < 500; ++t) {
        Rng rng(17, t);
        const double a = rng.uniform(0.5, 2), b = rng.uniform(1e-4, 0.01), d = rng.uniform(1e-4, 0.01);
        const double k1 = rng.uniform(-2, 2), k2 = rng.uniform(-2, 2);
        const MultiKappaBar m = kappa_bar_multi({a, {{b, K(k1)}, {d, K(k2)}}});
        CHECK(std::fabs(m.sharp.value() - kappa_bar_two(a, b, d, K(k1), K(k2)).value()) <= 1e-10);
    }
}

TEST_CASE("kappa_bar_alternating") {
    CHECK(std::fabs(kappa_bar_alternating({1.0, {{0.1, 0.1}}, K(0), K(-4)}).value() + 3.0) <= 1e-12);
    CHECK(std::fabs(kappa_bar_alternating({1.0, {{0.1, 0.3}, {0.2, 0.05}}, K(2), K(2)}).value() - 2.0) <= 1e-12);
    // sum b = 0.9 of the total
    const AlternatingConfig c{1.0, {{0.3, 0.05}, {0.3, 0.02}, {0.3, 0.03}}, K(1), K(-1)};
    CHECK(std::fabs(kappa_bar_alternating(c).value() - 0.62) <= 1e-12);
    // Never above the kappa-weighted average of the equivalent chain.
    for (std::size_t t = 0; t < 200; ++t) {
        Rng rng(23, t);
        AlternatingConfig g{rng.uniform(0.5, 2), {}, K(rng.uniform(0, 2)), K(0)};
        g.kappa_star = K(g.kappa.value() - rng.uniform(0, 2));
        const int n = static_cast<int>(rng.index(1, 3));
        for (int i = 0; i < n; ++i) g.blocks.push_back({rng.uniform(1e-4, 3e-3), rng.uniform(1e-4, 3e-3)});
        CHECK(kappa_bar_alternating(g).value() <= kappa_bar_multi(as_hinge(g)).lower.value() + 1e-9);
    }
    CHECK_THROWS_AS((void)kappa_bar_alternating({1.0, {{0.1, 0.1}}, K(-1), K(0)}), DomainError);
}

TEST_CASE("kappa_star_extension") {
    CHECK(kappa_star_extension(1, 1, K(0.5)).value() == 0.5);
    const double ks = kappa_star_extension(2, 1, K(0)).value();
    CHECK(ks < 0.0);
    CHECK(std::fabs(ks - kKappaStarRef) <= 1e-10);
    const double k1 = kappa_star_extension(1.0, 0.5, K(1)).value();
    const double k15 = kappa_star_extension(1.5, 0.5, K(1)).value();
    const double k2 = kappa_star_extension(2.0, 0.5, K(1)).value();
    CHECK(k1 > k15);
    CHECK(k15 > k2);
    CHECK(std::fabs(kappa_star_extension(1 + 1e-6, 1, K(0.3)).value() - 0.3) <= 1e-3);
    CHECK_THROWS_AS((void)kappa_star_extension(0.5, 1, K(0)), DomainError);
}

TEST_CASE("tight two-triangle hinge with equal curvatures") {
    // theta_2 = pi - theta_1 and kappa_1 = kappa_2: the hinge is a single
    // model triangle, so the conclusion holds with equality.
    for (std::size_t t = 0; t < 500; ++t) {
        Rng rng(29, t);
        const double k = rng.uniform(-2, 2), a = rng.uniform(0.5, 2);
        const double b = rng.uniform(1e-3, 0.01), d = rng.uniform(1e-3, 0.01);
        const double th = rng.uniform(0.1, pi - 0.1);
        const HingeChain ch = synthesize_chain(a, {{b, K(k)}, {d, K(k)}}, th, {1.0});
        REQUIRE(ch.admissible);
        CHECK(chain_defect(ch, a, kappa_bar_two(a, b, d, K(k), K(k))) >= -1e-9);
    }
}

TEST_CASE("sweeps") {
    SweepOptions o;
    o.trials = 2000;
    SUBCASE("classic lemma equivalence") {
        const VerificationReport r = verify_alexandrov(o);
        CHECK(r.passed());
        CHECK(r.evaluated > 0);
    }
    SUBCASE("multi-segment at the kappa-weighted curvature") {
        const VerificationReport r = verify_multi_lemma(o);
        CHECK(r.passed());
    }
    SUBCASE("alternating corollary") {
        const VerificationReport r = verify_alternating(o);
        CHECK(r.passed());
    }
    SUBCASE("extension curvature") {
        const VerificationReport r = verify_extension(o);
        CHECK(r.passed());
    }
    SUBCASE("weighted remark bounds hold in every trial") {
        const VerificationReport r = verify_weighted_lemma(o);
        for (const CheckResult& c : r.checks)
            if (c.name.rfind("remark", 0) == 0) CHECK_MESSAGE(c.passed, c.name);
    }
}

TEST_CASE("sweeps are deterministic and thread-independent") {
    SweepOptions o;
    o.trials = 500;
    o.seed = 42;
    const VerificationReport a = verify_weighted_lemma(o);
    const VerificationReport b = verify_weighted_lemma(o);
    CHECK(a.min_defect == b.min_defect);
    CHECK(a.violations == b.violations);
    CHECK(a.worst_case.trial == b.worst_case.trial);
}

}
