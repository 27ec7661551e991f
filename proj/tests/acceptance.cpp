// Acceptance run: one PASS/FAIL line per criterion.  Exit status is nonzero
// when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "alexkit/cli.hpp"
#include "alexkit/comparison.hpp"
#include "alexkit/convexity.hpp"
#include "alexkit/examples.hpp"
#include "alexkit/metric_space.hpp"
#include "alexkit/model_trig.hpp"
#include "alexkit/sampling.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace alexkit;
using std::numbers::pi;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Line {
    int id;
    bool pass;
    std::string detail;
};

std::vector<Line> g_lines;

void record(int id, bool pass, const std::string& detail) {
    g_lines.push_back({id, pass, detail});
    std::printf("criterion %2d: %s  %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

fs::path scratch() {
    const fs::path d = fs::temp_directory_path() / "alexkit_acceptance";
    fs::create_directories(d);
    return d;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

int cli(std::vector<std::string> args, const fs::path& out) {
    args.push_back("--no-timestamp");
    args.push_back("-o");
    args.push_back(out.string());
    std::ostringstream o, e;
    const int code = cli::run(args, o, e);
    if (code == cli::kExitUsage) std::fprintf(stderr, "cli usage error: %s\n", e.str().c_str());
    return code;
}

const json* find_check(const json& rep, const std::string& name) {
    for (const auto& c : rep.at("result").at("checks"))
        if (c.at("name") == name) return &c;
    return nullptr;
}

bool check_passed(const json& rep, const std::string& name) {
    const json* c = find_check(rep, name);
    return c && c->at("passed").get<bool>();
}

double check_value(const json& rep, const std::string& name) {
    const json* c = find_check(rep, name);
    return c ? c->at("value").get<double>() : NAN;
}

// ---------------------------------------------------------------------------

json g_weighted;

void criteria_1_2() {
    const fs::path out = scratch() / "weighted2.json";
    const auto t0 = Clock::now();
    const int code = cli({"lemma", "verify", "--which", "weighted2", "--trials", "10000", "--scale", "1e-2", "--seed", "0"}, out);
    const double secs = seconds_since(t0);
    g_weighted = json::parse(slurp(out));
    const auto& r = g_weighted.at("result");
    const std::size_t viol = r.at("violations").get<std::size_t>();
    record(1, code != cli::kExitUsage && viol == 0 && secs < 30.0,
           fmt("weighted2: %zu of %zu evaluated trials below -(b+d)^2.5, min defect %.3e, worst defect/budget %.3f, %.1f s",
               viol, r.at("evaluated").get<std::size_t>(), r.at("min_defect").get<double>(),
               r.at("worst_ratio").get<double>(), secs));
    const bool floor_ok = check_passed(g_weighted, "remark_floor_bound");
    record(2, floor_ok,
           fmt("kappa_bar >= min{k1, (b^2 k1 + d^2 k2)/(b^2 + d^2)} - 1e-9: %.0f failures in %zu trials", check_value(g_weighted, "remark_floor_bound"),
               r.at("evaluated").get<std::size_t>()));
}

void criterion_3() {
    SweepOptions o;
    o.trials = 10000;
    const VerificationReport multi = verify_multi_lemma(o);
    const VerificationReport alt = verify_alternating(o);
    auto find = [](const VerificationReport& r, const std::string& n) -> const CheckResult* {
        for (const auto& c : r.checks)
            if (c.name == n) return &c;
        return nullptr;
    };
    const CheckResult* two = find(multi, "two_segment_consistency");
    const CheckResult* exact = find(alt, "closed_form_exact");
    const bool ok = multi.violations == 0 && alt.violations == 0 && two && two->passed && exact && exact->passed &&
                    multi.passed() && alt.passed();
    record(3, ok,
           fmt("multi N<=6: %zu defects below budget (%zu trials); N=2 vs two-triangle %.2e; alternating: %zu below budget, "
               "closed form vs substitution %.2e",
               multi.violations, multi.evaluated, two ? two->value : NAN, alt.violations, exact ? exact->value : NAN));
}

void criterion_4() {
    SweepOptions o;
    o.trials = 10000;
    const VerificationReport ext = verify_extension(o);
    double limit = NAN, breaks = NAN;
    bool ok = true;
    for (const auto& c : ext.checks) {
        if (c.name == "decreasing_in_a") {
            breaks = c.value;
            ok = ok && c.passed;
        }
        if (c.name == "limit_a_to_r") {
            limit = c.value;
            ok = ok && c.passed;
        }
    }
    record(4, ok, fmt("kappa* decreasing in a on 50-point sweeps: %.0f breaks; worst |kappa*(r+1e-6) - kappa| = %.2e", breaks, limit));
}

void criterion_5() {
    SweepOptions o;
    o.trials = 10000;
    const VerificationReport r = verify_alexandrov(o);
    bool agree = false, covered = false;
    for (const auto& c : r.checks) {
        if (c.name == "conditions_agree") agree = c.passed;
        if (c.name == "coverage") covered = c.passed;
    }
    record(5, agree && covered && r.evaluated == 30000,
           fmt("%zu configurations over kappa in {-1,0,1}: %zu disagreements at tol 1e-9", r.evaluated, r.violations));
}

void criterion_6() {
    const auto t0 = Clock::now();
    const FiniteMetricSpace ms = sphere_point_space(random_sphere_points(400, 7));
    ScanOptions o;
    o.samples = 100000;
    o.seed = 7;
    const ScanReport one = scan_quadruples(ms, Curvature{1.0}, o);
    o.search_kappa_max = false;
    const ScanReport more = scan_quadruples(ms, Curvature{1.5}, o);
    const double secs = seconds_since(t0);
    const bool ok = one.min_defect >= -1e-6 && more.worst && more.worst->defect < 0.0 && secs < 10.0;
    record(6, ok,
           fmt("kappa=1: min defect %.2e over %zu evaluated (kappa_max %.4f); kappa=1.5: witness defect %.3e; %.1f s",
               one.min_defect, one.evaluated, one.kappa_max.value_or(NAN), more.worst ? more.worst->defect : NAN, secs));
}

void criterion_7() {
    DomainSpec s;
    s.kind = DomainKind::cap;
    s.h = 0.05;
    s.r = 0.4 * pi;
    const DiscreteLengthSpace small = generate(s, 0);
    const auto us = small.u_vertices();
    std::vector<double> probs(100, 0.0);
    parallel_for(100, [&](std::size_t t) {
        Rng rng(0, t);
        std::size_t p, q, x;
        do {
            p = us[rng.index(0, us.size() - 1)];
            q = us[rng.index(0, us.size() - 1)];
            x = us[rng.index(0, us.size() - 1)];
        } while (q == x);
        probs[t] = prob_convexity(small, p, q, x, 0.0, default_slack(small)).probability;
    });
    const double small_min = *std::min_element(probs.begin(), probs.end());

    s.r = 0.9 * pi;
    const DiscreteLengthSpace big = generate(s, 0);
    const auto ub = big.u_vertices();
    std::vector<double> bprobs(100, 1.0);
    parallel_for(100, [&](std::size_t t) {
        Rng rng(1, t);
        std::size_t p, q, x;
        do {
            p = ub[rng.index(0, ub.size() - 1)];
            q = ub[rng.index(0, ub.size() - 1)];
            x = ub[rng.index(0, ub.size() - 1)];
        } while (q == x);
        bprobs[t] = prob_convexity(big, p, q, x, 0.0, default_slack(big)).probability;
    });
    const double big_min = *std::min_element(bprobs.begin(), bprobs.end());
    const auto below = std::count_if(bprobs.begin(), bprobs.end(), [](double v) { return v < 1.0; });
    record(7, small_min == 1.0 && big_min < 1.0,
           fmt("r=0.4pi: min probability %.3f over 100 random triples; r=0.9pi: %ld of 100 triples below 1, min %.3f "
               "(slack 2 h_err = %.3f / %.3f)",
               small_min, static_cast<long>(below), big_min, default_slack(small), default_slack(big)));
}

void criterion_8() {
    DomainSpec s;
    s.kind = DomainKind::dense_square;
    s.delta = 0.2;
    s.segments = 200;
    s.h = 0.02;
    const AreaEstimate area = area_estimate(s, 200000, 0);
    const DiscreteLengthSpace sp = generate(s, 0);
    const double eps = 0.05;
    const CompletionReport c = completion_compare(sp, 200, eps, 0);
    const double bound = 4 * eps + 2 * c.h_err;
    const std::size_t links = c.link_violations[0] + c.link_violations[1] + c.link_violations[2];
    const bool ok = area.estimate <= s.delta + 3 * area.sigma && c.max_gap <= bound && links == 0;
    record(8, ok,
           fmt("area %.4f (sigma %.4f) <= 0.2 + 3 sigma; completion: max gap %.4f <= %.4f over %zu matched pairs "
               "(%zu truncation misses), %zu link violations",
               area.estimate, area.sigma, c.max_gap, bound, c.matched, c.misses, links));
}

void criterion_9() {
    std::size_t fails = 0, checks = 0;
    auto expect = [&](bool b) {
        ++checks;
        fails += b ? 0 : 1;
    };
    auto K = [](double k) { return Curvature{k}; };
    // Branch continuity across 0 (first-order term removed; see README) and
    // across the series threshold.
    for (double t = 0.1; t <= 2.0 + 1e-12; t += 0.1)
        for (double e : {1e-8, -1e-8}) {
            expect(std::fabs(sn(K(e), t) - sn(K(0), t) + e * t * t * t / 6) <= 1e-10);
            expect(std::fabs(cs(K(e), t) - cs(K(0), t) + e * t * t / 2) <= 1e-10);
            expect(std::fabs(md(K(e), t) - md(K(0), t) + e * t * t * t * t / 24) <= 1e-10);
            const double k0 = kSeriesThreshold / (t * t) * (e > 0 ? 1 : -1);
            expect(std::fabs(sn(K(k0 * (1 - 1e-9)), t) - sn(K(k0 * (1 + 1e-9)), t)) <= 1e-13);
            expect(std::fabs(md(K(k0 * (1 - 1e-9)), t) - md(K(k0 * (1 + 1e-9)), t)) <= 1e-13);
        }
    // md' = sn
    for (double k = -2; k <= 2; k += 0.5)
        for (double t = 0.1; t < 2.0; t += 0.1)
            expect(std::fabs((md(K(k), t + 1e-5) - md(K(k), t - 1e-5)) / 2e-5 - sn(K(k), t)) <= 1e-6);
    // Euclidean reduction, angle/side round trip
    for (std::size_t i = 0; i < 20000; ++i) {
        Rng rng(9, i);
        const double b = rng.uniform(0.01, 3), c = rng.uniform(0.01, 3), al = rng.uniform(0.0, pi);
        const double s0 = model_side(K(0), b, c, ModelAngle{al});
        expect(std::fabs(s0 * s0 - (b * b + c * c - 2 * b * c * std::cos(al))) <= 1e-12 * std::max(1.0, b * c));
        const double k = rng.uniform(-3, 3), bb = rng.uniform(0.01, 1.2), cc = rng.uniform(0.01, 1.2);
        const double a2 = rng.uniform(0.05, pi - 0.05);
        if (k > 0 && std::max(bb, cc) * std::sqrt(k) >= 0.9 * pi) continue;
        const AngleOutcome back = classify_angle(K(k), bb, cc, model_side(K(k), bb, cc, ModelAngle{a2}));
        expect(back.ok() && std::fabs(back.radians - a2) <= 1e-9);
    }
    // f strictly decreasing and concave on kappa < (pi/c)^2
    for (double c : {0.25, 0.5, 1.0, 2.0, 3.0}) {
        const double lo = -20, hi = coefficient_pole(c) * 0.95;
        const int n = 500;
        double prev = taylor_coefficient(c, K(lo)), prev_d = NAN;
        for (int i = 1; i <= n; ++i) {
            const double cur = taylor_coefficient(c, K(lo + (hi - lo) * i / n));
            expect(cur - prev < 0);
            if (!std::isnan(prev_d)) expect((cur - prev) - prev_d <= 1e-9);
            prev_d = cur - prev;
            prev = cur;
        }
    }
    record(9, fails == 0, fmt("%zu of %zu kernel invariant checks failed", fails, checks));
}

void criterion_10() {
    const fs::path d = scratch();
    const fs::path cap = d / "cap_a.json";
    const std::vector<std::vector<std::string>> commands = {
        {"lemma", "verify", "--which", "weighted2", "--trials", "2000", "--seed", "3"},
        {"lemma", "verify", "--which", "multi", "--trials", "1000", "--seed", "3"},
        {"lemma", "verify", "--which", "alexandrov", "--trials", "1000", "--seed", "3"},
        {"domain", "generate", "--kind", "cap", "--r", "1.2566", "--h", "0.05", "--seed", "3"},
        {"space", "scan", "--sphere-points", "200", "--kappa", "1.2", "--samples", "20000", "--seed", "3"},
        {"domain", "generate", "--kind", "dense_square", "--h", "0.03", "--segments", "80"},
        {"area", "estimate", "--samples", "30000", "--seed", "3"},
    };
    std::size_t identical = 0, total = 0;
    std::string first_diff;
    for (std::size_t i = 0; i < commands.size(); ++i) {
        const fs::path a = d / ("repro_" + std::to_string(i) + "_a.json");
        const fs::path b = d / ("repro_" + std::to_string(i) + "_b.json");
        // Different worker counts must not change a single byte.
        setenv("ALEXKIT_THREADS", "1", 1);
        const int ca = cli(commands[i], a);
        setenv("ALEXKIT_THREADS", "4", 1);
        const int cb = cli(commands[i], b);
        unsetenv("ALEXKIT_THREADS");
        ++total;
        if (ca == cb && ca != cli::kExitUsage && slurp(a) == slurp(b) && !slurp(a).empty()) ++identical;
        else if (first_diff.empty()) first_diff = commands[i][0] + " " + commands[i][1];
    }
    // Commands reading generated files.
    const fs::path space = d / "repro_5_a.json";
    const std::vector<std::vector<std::string>> readers = {
        {"completion", "compare", "--input", space.string(), "--pairs", "60", "--seed", "3"},
        {"convexity", "estimate", "--input", space.string(), "--triples", "5", "--seed", "3"},
        {"convexity", "search", "--input", space.string(), "--p", "0.2,0.3", "--q", "0.1,0.9", "--s", "0.8,0.4",
         "--epsilon", "0.1", "--candidates", "8", "--seed", "3"},
        {"space", "scan", "--input", (d / "repro_3_a.json").string(), "--kappa", "1", "--samples", "5000", "--points",
         "150", "--seed", "3"},
    };
    for (std::size_t i = 0; i < readers.size(); ++i) {
        const fs::path a = d / ("reader_" + std::to_string(i) + "_a.json");
        const fs::path b = d / ("reader_" + std::to_string(i) + "_b.json");
        setenv("ALEXKIT_THREADS", "1", 1);
        const int ca = cli(readers[i], a);
        setenv("ALEXKIT_THREADS", "3", 1);
        const int cb = cli(readers[i], b);
        unsetenv("ALEXKIT_THREADS");
        ++total;
        if (ca == cb && ca != cli::kExitUsage && slurp(a) == slurp(b) && !slurp(a).empty()) ++identical;
        else if (first_diff.empty()) first_diff = readers[i][0] + " " + readers[i][1];
    }
    record(10, identical == total,
           fmt("%zu of %zu commands byte-identical across repeated runs with different thread counts%s%s", identical, total,
               first_diff.empty() ? "" : "; first mismatch: ", first_diff.c_str()));
}

}  // namespace

int main() {
    const std::vector<std::function<void()>> steps = {criteria_1_2, criterion_3, criterion_4, criterion_5,
                                                       criterion_6,  criterion_7, criterion_8, criterion_9,
                                                       criterion_10};
    for (const auto& step : steps) {
        try {
            step();
        } catch (const std::exception& e) {
            std::printf("error while evaluating a criterion: %s\n", e.what());
            record(0, false, "exception");
        }
    }
    std::size_t passed = 0;
    for (const Line& l : g_lines) passed += l.pass ? 1 : 0;
    std::printf("summary: %zu of %zu criteria pass\n", passed, g_lines.size());
    return passed == g_lines.size() ? 0 : 1;
}
