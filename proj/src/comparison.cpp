#include "alexkit/comparison.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>

#include "alexkit/sampling.hpp"

namespace alexkit {

namespace {

constexpr double kPi = std::numbers::pi;

double sq(double x) { return x * x; }

// Per-trial outcome before reduction.
struct TrialResult {
    bool skipped = true;
    double defect = 0.0;
    double budget = 0.0;
    std::vector<std::pair<std::string, double>> inputs;
};

// Extra per-trial check tallies (e.g. the Remark bound).
struct Tally {
    std::size_t failures = 0;
    double worst = std::numeric_limits<double>::infinity();
    void add(double margin, double tol) {
        worst = std::min(worst, margin);
        if (margin < -tol) ++failures;
    }
};

void reduce_trials(VerificationReport& rep, const std::vector<TrialResult>& results) {
    rep.trials = results.size();
    rep.min_defect = std::numeric_limits<double>::infinity();
    rep.worst_ratio = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < results.size(); ++i) {
        const TrialResult& r = results[i];
        if (r.skipped) {
            ++rep.skipped;
            continue;
        }
        ++rep.evaluated;
        rep.min_defect = std::min(rep.min_defect, r.defect);
        if (r.defect < -r.budget) ++rep.violations;
        const double ratio = r.budget > 0.0 ? r.defect / r.budget : r.defect;
        if (ratio < rep.worst_ratio) {
            rep.worst_ratio = ratio;
            rep.worst_case = TrialWitness{i, r.defect, r.budget, r.inputs};
        }
    }
    if (rep.evaluated == 0) {
        rep.min_defect = 0.0;
        rep.worst_ratio = 0.0;
    }
    rep.max_defect = std::max(0.0, -rep.min_defect);
}

// Splits `total` into n pieces with weights in [lo_w, 1].
std::vector<double> split_length(Rng& rng, double total, std::size_t n, double lo_w) {
    std::vector<double> w(n);
    double sum = 0.0;
    for (auto& x : w) {
        x = rng.uniform(lo_w, 1.0);
        sum += x;
    }
    for (auto& x : w) x = total * x / sum;
    return w;
}

// Half the joints are tight (slack 1), the rest relaxed in [0.5, 1).
double joint_slack(Rng& rng) { return rng.coin(0.5) ? 1.0 : rng.uniform(0.5, 1.0); }

}  // namespace

// ---------------------------------------------------------------------------

AlexandrovReport alexandrov_lemma_check(Curvature kappa, const FivePointDistances& d) {
    AlexandrovReport rep;
    if (!(d.qx > 0.0 && d.xs > 0.0)) throw DomainError("alexandrov_lemma_check: x must be interior");
    const double qs = d.qx + d.xs;
    const AngleOutcome q_px = classify_angle(kappa, d.pq, d.qx, d.px);
    const AngleOutcome q_ps = classify_angle(kappa, d.pq, qs, d.ps);
    const AngleOutcome x_pq = classify_angle(kappa, d.px, d.qx, d.pq);
    const AngleOutcome x_ps = classify_angle(kappa, d.px, d.xs, d.ps);
    for (const AngleOutcome* o : {&q_px, &q_ps, &x_pq, &x_ps}) {
        if (o->status == AngleStatus::inadmissible)
            throw InadmissibleTriangle("alexandrov_lemma_check: inadmissible distances");
    }
    if (!(q_px.ok() && q_ps.ok() && x_pq.ok() && x_ps.ok())) {
        rep.vacuous = true;
        return rep;
    }
    rep.margin_q = q_px.radians - q_ps.radians;
    rep.margin_x = kPi - x_pq.radians - x_ps.radians;
    rep.at_q = rep.margin_q >= -kAngleTol;
    rep.at_x = rep.margin_x >= -kAngleTol;
    rep.agree = (rep.at_q == rep.at_x) || std::fabs(rep.margin_q) <= kAngleTol ||
                std::fabs(rep.margin_x) <= kAngleTol;
    return rep;
}

// ---------------------------------------------------------------------------

void HingeConfig::validate() const {
    if (!(a > 0.0)) throw DomainError("HingeConfig: a must be positive");
    if (segments.empty()) throw DomainError("HingeConfig: no segments");
    for (const Segment& s : segments)
        if (!(s.length > 0.0)) throw DomainError("HingeConfig: segment lengths must be positive");
}

double HingeConfig::total_length() const {
    double t = 0.0;
    for (const Segment& s : segments) t += s.length;
    return t;
}

void AlternatingConfig::validate() const {
    if (!(a > 0.0)) throw DomainError("AlternatingConfig: a must be positive");
    if (kappa < kappa_star) throw DomainError("AlternatingConfig: kappa must be >= kappa*");
    if (blocks.empty()) throw DomainError("AlternatingConfig: no blocks");
    double total = 0.0;
    for (const AlternatingBlock& blk : blocks) {
        if (!(blk.b >= 0.0 && blk.d >= 0.0)) throw DomainError("AlternatingConfig: negative length");
        total += blk.b + blk.d;
    }
    if (!(total > 0.0)) throw DomainError("AlternatingConfig: all lengths zero");
}

Curvature kappa_bar_two(double a, double b, double d, Curvature k1, Curvature k2) {
    if (!(b >= 0.0 && d >= 0.0 && b + d > 0.0)) throw DomainError("kappa_bar_two: need b, d >= 0, b + d > 0");
    const double f1 = taylor_coefficient(a, k1);
    const double f2 = taylor_coefficient(a, k2);
    if (d == 0.0 || k1 == k2) return k1;
    if (b == 0.0) return k2;
    const double target = ((b * b + 2.0 * b * d) * f1 + d * d * f2) / sq(b + d);
    return taylor_coefficient_inverse(a, target);
}

RemarkBounds remark_bounds(double b, double d, Curvature k1, Curvature k2) {
    RemarkBounds r;
    const double k1v = k1.value();
    const double k2v = k2.value();
    r.weighted = ((b * b + 2.0 * b * d) * k1v + d * d * k2v) / sq(b + d);
    r.floor = std::min(k1v, (b * b * k1v + d * d * k2v) / (b * b + d * d));
    return r;
}

MultiKappaBar kappa_bar_multi(const HingeConfig& config) {
    config.validate();
    const auto& seg = config.segments;
    const std::size_t n = seg.size();
    const double total = config.total_length();

    bool uniform = true;
    for (const Segment& s : seg) uniform = uniform && (s.kappa == seg.front().kappa);

    std::vector<double> f(n);
    for (std::size_t i = 0; i < n; ++i) f[i] = taylor_coefficient(config.a, seg[i].kappa);
    if (n == 1 || uniform) return {seg.front().kappa, seg.front().kappa};

    // f-weighted form: sum c_i^2 f_i + 2 sum_{i<N} (f_1 c_1 + ... + f_i c_i) c_{i+1}
    double num_f = 0.0;
    double running = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        num_f += sq(seg[i].length) * f[i];
        if (i + 1 < n) {
            running += f[i] * seg[i].length;
            num_f += 2.0 * running * seg[i + 1].length;
        }
    }
    // kappa-weighted form: sum c_i^2 k_i + 2 sum_{i<N} (c_{i+1} + ... + c_N) c_i k_i
    double num_k = 0.0;
    double tail = total;
    for (std::size_t i = 0; i < n; ++i) {
        tail -= seg[i].length;
        num_k += (sq(seg[i].length) + 2.0 * std::max(tail, 0.0) * seg[i].length) * seg[i].kappa.value();
    }
    const double t2 = total * total;
    return {taylor_coefficient_inverse(config.a, num_f / t2), Curvature{num_k / t2}};
}

Curvature kappa_bar_alternating(const AlternatingConfig& config) {
    config.validate();
    double sum_b = 0.0;
    double sum_all = 0.0;
    for (const AlternatingBlock& blk : config.blocks) {
        sum_b += blk.b;
        sum_all += blk.b + blk.d;
    }
    const double ks = config.kappa_star.value();
    return Curvature{sq(sum_b) * (config.kappa.value() - ks) / sq(sum_all) + ks};
}

HingeConfig as_hinge(const AlternatingConfig& config) {
    HingeConfig h;
    h.a = config.a;
    for (const AlternatingBlock& blk : config.blocks) {
        if (blk.b > 0.0) h.segments.push_back({blk.b, config.kappa});
        if (blk.d > 0.0) h.segments.push_back({blk.d, config.kappa_star});
    }
    return h;
}

Curvature kappa_star_extension(double a, double r, Curvature kappa) {
    if (!(r > 0.0 && r <= a)) throw DomainError("kappa_star_extension: need 0 < r <= a");
    const double target = taylor_coefficient(r, kappa);
    if (a == r) return kappa;
    return taylor_coefficient_inverse(a, target);
}

// ---------------------------------------------------------------------------

HingeChain synthesize_chain(double a, const std::vector<Segment>& segments, double theta_q,
                            const std::vector<double>& slack) {
    HingeChain chain;
    try {
        const Segment& first = segments.front();
        double p_prev = a;
        double p_cur = model_side(first.kappa, a, first.length, ModelAngle{theta_q});
        chain.lhs = angle_between(first.kappa, a, first.length, p_cur).radians();
        chain.total = first.length;
        for (std::size_t i = 1; i < segments.size(); ++i) {
            const Segment& prev = segments[i - 1];
            const Segment& next = segments[i];
            // angle~_{k_i}(x_i; p, x_{i-1}) in the triangle p x_{i-1} x_i
            const double phi = angle_between(prev.kappa, prev.length, p_cur, p_prev).radians();
            const double theta = slack.at(i - 1) * (kPi - phi);
            const double p_next = model_side(next.kappa, p_cur, next.length, ModelAngle{theta});
            p_prev = p_cur;
            p_cur = p_next;
            chain.total += next.length;
        }
        chain.ps = p_cur;
    } catch (const GeometryError&) {
        chain.admissible = false;
    }
    return chain;
}

double chain_defect(const HingeChain& chain, double a, Curvature kappa_bar) {
    return chain.lhs - angle_between(kappa_bar, a, chain.total, chain.ps).radians();
}

bool VerificationReport::passed() const {
    for (const CheckResult& c : checks)
        if (c.gated && !c.passed) return false;
    return true;
}

// ---------------------------------------------------------------------------

VerificationReport verify_weighted_lemma(const SweepOptions& opts) {
    VerificationReport rep;
    rep.lemma = "weighted2";
    rep.seed = opts.seed;
    rep.budget_exponent = opts.budget_exponent;

    std::vector<TrialResult> results(opts.trials);
    std::vector<double> remark_margin(opts.trials, std::numeric_limits<double>::infinity());
    std::vector<double> weighted_margin(opts.trials, std::numeric_limits<double>::infinity());
    std::vector<double> weighted_defect(opts.trials, std::numeric_limits<double>::infinity());

    parallel_for(opts.trials, [&](std::size_t t) {
        Rng rng(opts.seed, t);
        const double a = rng.uniform(opts.a_lo, opts.a_hi);
        const Curvature k1{rng.uniform(opts.kappa_lo, opts.kappa_hi)};
        const Curvature k2{rng.uniform(opts.kappa_lo, opts.kappa_hi)};
        const double total = rng.uniform(0.1 * opts.scale, opts.scale);
        const double w = rng.uniform(0.05, 0.95);
        const double b = w * total;
        const double d = total - b;
        const double theta = rng.uniform(opts.theta_margin, kPi - opts.theta_margin);
        const double slack = joint_slack(rng);

        TrialResult& r = results[t];
        r.inputs = {{"a", a}, {"b", b}, {"d", d}, {"kappa1", k1.value()}, {"kappa2", k2.value()},
                    {"theta_q", theta}, {"slack", slack}};
        try {
            const Curvature kb = kappa_bar_two(a, b, d, k1, k2);
            const RemarkBounds rb = remark_bounds(b, d, k1, k2);
            remark_margin[t] = kb.value() - rb.floor;
            weighted_margin[t] = kb.value() - rb.weighted;
            r.inputs.emplace_back("kappa_bar", kb.value());

            const HingeChain chain = synthesize_chain(a, {{b, k1}, {d, k2}}, theta, {slack});
            if (!chain.admissible) return;
            r.defect = chain_defect(chain, a, kb);
            r.budget = std::pow(b + d, opts.budget_exponent);
            r.skipped = false;
            weighted_defect[t] = chain_defect(chain, a, Curvature{rb.weighted}) + r.budget;
        } catch (const GeometryError&) {
            r.skipped = true;
        }
    });
    reduce_trials(rep, results);

    Tally remark;
    Tally weighted;
    Tally relaxed;
    for (std::size_t t = 0; t < opts.trials; ++t) {
        if (std::isfinite(remark_margin[t])) remark.add(remark_margin[t], 1e-9);
        if (std::isfinite(weighted_margin[t])) weighted.add(weighted_margin[t], 1e-9);
        if (std::isfinite(weighted_defect[t])) relaxed.add(weighted_defect[t], 0.0);
    }
    rep.checks.push_back({"conclusion_defect_floor", rep.violations == 0, true,
                          static_cast<double>(rep.violations), 0.0,
                          "trials with defect < -(b+d)^" + std::to_string(opts.budget_exponent)});
    rep.checks.push_back({"remark_floor_bound", remark.failures == 0, true,
                          static_cast<double>(remark.failures), 0.0,
                          "kappa_bar >= min{k1, (b^2 k1 + d^2 k2)/(b^2 + d^2)} - 1e-9"});
    rep.checks.push_back({"remark_weighted_bound", weighted.failures == 0, true,
                          static_cast<double>(weighted.failures), 0.0,
                          "kappa_bar >= ((b^2 + 2bd) k1 + d^2 k2)/(b + d)^2 - 1e-9"});
    rep.checks.push_back({"conclusion_with_weighted_kappa", relaxed.failures == 0, false,
                          static_cast<double>(relaxed.failures), 0.0,
                          "diagnostic: same hinges compared at the kappa-weighted lower bound"});
    return rep;
}

VerificationReport verify_multi_lemma(const SweepOptions& opts) {
    VerificationReport rep;
    rep.lemma = "multi";
    rep.seed = opts.seed;
    rep.budget_exponent = opts.budget_exponent;

    const int n_max = std::max(2, opts.max_segments);
    std::vector<TrialResult> results(opts.trials);
    std::vector<double> sharp_defect(opts.trials, std::numeric_limits<double>::infinity());
    std::vector<double> order_margin(opts.trials, std::numeric_limits<double>::infinity());
    std::vector<double> two_mismatch(opts.trials, 0.0);

    parallel_for(opts.trials, [&](std::size_t t) {
        Rng rng(opts.seed, t);
        const double a = rng.uniform(opts.a_lo, opts.a_hi);
        const auto n = static_cast<std::size_t>(rng.index(2, static_cast<std::size_t>(n_max)));
        const double total = rng.uniform(0.1 * opts.scale, opts.scale);
        const std::vector<double> lengths = split_length(rng, total, n, 0.05);
        HingeConfig cfg{a, {}};
        for (std::size_t i = 0; i < n; ++i)
            cfg.segments.push_back({lengths[i], Curvature{rng.uniform(opts.kappa_lo, opts.kappa_hi)}});
        const double theta = rng.uniform(opts.theta_margin, kPi - opts.theta_margin);
        std::vector<double> slack(n - 1);
        for (auto& s : slack) s = joint_slack(rng);

        TrialResult& r = results[t];
        r.inputs = {{"a", a}, {"segments", static_cast<double>(n)}, {"theta_q", theta}};
        for (std::size_t i = 0; i < n; ++i) {
            r.inputs.emplace_back("c" + std::to_string(i + 1), lengths[i]);
            r.inputs.emplace_back("kappa" + std::to_string(i + 1), cfg.segments[i].kappa.value());
        }
        try {
            const MultiKappaBar kb = kappa_bar_multi(cfg);
            order_margin[t] = kb.sharp.value() - kb.lower.value();
            if (n == 2) {
                const Curvature two = kappa_bar_two(a, lengths[0], lengths[1], cfg.segments[0].kappa,
                                                    cfg.segments[1].kappa);
                two_mismatch[t] = std::fabs(two.value() - kb.sharp.value());
            }
            r.inputs.emplace_back("kappa_bar_lower", kb.lower.value());
            r.inputs.emplace_back("kappa_bar_sharp", kb.sharp.value());
            const HingeChain chain = synthesize_chain(a, cfg.segments, theta, slack);
            if (!chain.admissible) return;
            r.budget = std::pow(total, opts.budget_exponent);
            r.defect = chain_defect(chain, a, kb.lower);
            r.skipped = false;
            sharp_defect[t] = chain_defect(chain, a, kb.sharp) + r.budget;
        } catch (const GeometryError&) {
            r.skipped = true;
        }
    });
    reduce_trials(rep, results);

    Tally order;
    Tally sharp;
    double worst_two = 0.0;
    for (std::size_t t = 0; t < opts.trials; ++t) {
        if (std::isfinite(order_margin[t])) order.add(order_margin[t], 1e-9);
        if (std::isfinite(sharp_defect[t])) sharp.add(sharp_defect[t], 0.0);
        worst_two = std::max(worst_two, two_mismatch[t]);
    }
    rep.checks.push_back({"conclusion_defect_floor", rep.violations == 0, true,
                          static_cast<double>(rep.violations), 0.0,
                          "kappa-weighted kappa_bar; trials with defect < -|qs|^" +
                              std::to_string(opts.budget_exponent)});
    rep.checks.push_back({"sharp_not_below_lower", order.failures == 0, true,
                          static_cast<double>(order.failures), 0.0, "kappa_bar_f >= kappa_bar_lower - 1e-9"});
    rep.checks.push_back({"two_segment_consistency", worst_two <= 1e-10, true, worst_two, 1e-10,
                          "|kappa_bar_multi(N=2) - kappa_bar_two|"});
    rep.checks.push_back({"conclusion_with_sharp_kappa", sharp.failures == 0, false,
                          static_cast<double>(sharp.failures), 0.0,
                          "diagnostic: same hinges compared at the f-weighted kappa_bar"});
    return rep;
}

VerificationReport verify_alternating(const SweepOptions& opts) {
    VerificationReport rep;
    rep.lemma = "alternating";
    rep.seed = opts.seed;
    rep.budget_exponent = opts.budget_exponent;

    const std::size_t max_blocks = static_cast<std::size_t>(std::max(1, opts.max_segments / 2));
    std::vector<TrialResult> results(opts.trials);
    std::vector<double> formula_err(opts.trials, 0.0);
    std::vector<double> range_margin(opts.trials, std::numeric_limits<double>::infinity());
    std::vector<double> lower_margin(opts.trials, std::numeric_limits<double>::infinity());

    parallel_for(opts.trials, [&](std::size_t t) {
        Rng rng(opts.seed, t);
        const double a = rng.uniform(opts.a_lo, opts.a_hi);
        const double kv = rng.uniform(opts.kappa_lo, opts.kappa_hi);
        const double ksv = rng.uniform(opts.kappa_lo, kv);
        const std::size_t n = rng.index(1, max_blocks);
        const double total = rng.uniform(0.1 * opts.scale, opts.scale);
        const std::vector<double> lengths = split_length(rng, total, 2 * n, 0.05);
        AlternatingConfig cfg{a, {}, Curvature{kv}, Curvature{ksv}};
        HingeConfig chain_cfg{a, {}};
        for (std::size_t i = 0; i < n; ++i) {
            cfg.blocks.push_back({lengths[2 * i], lengths[2 * i + 1]});
            chain_cfg.segments.push_back({lengths[2 * i], Curvature{kv}});
            chain_cfg.segments.push_back({lengths[2 * i + 1], Curvature{rng.uniform(ksv, kv)}});
        }
        const double theta = rng.uniform(opts.theta_margin, kPi - opts.theta_margin);
        std::vector<double> slack(2 * n - 1);
        for (auto& s : slack) s = joint_slack(rng);

        TrialResult& r = results[t];
        r.inputs = {{"a", a}, {"kappa", kv}, {"kappa_star", ksv}, {"blocks", static_cast<double>(n)},
                    {"theta_q", theta}};
        try {
            const Curvature kb = kappa_bar_alternating(cfg);
            // Direct substitution of both sums, accumulated in long double.
            long double sb = 0.0L;
            long double st = 0.0L;
            for (const auto& blk : cfg.blocks) {
                sb += blk.b;
                st += blk.b + blk.d;
            }
            const long double direct = sb * sb * (static_cast<long double>(kv) - ksv) / (st * st) + ksv;
            formula_err[t] = static_cast<double>(std::fabs(direct - static_cast<long double>(kb.value())));
            range_margin[t] = std::min(kb.value() - ksv, kv - kb.value());
            lower_margin[t] = kappa_bar_multi(chain_cfg).lower.value() - kb.value();
            r.inputs.emplace_back("kappa_bar", kb.value());

            const HingeChain chain = synthesize_chain(a, chain_cfg.segments, theta, slack);
            if (!chain.admissible) return;
            r.budget = std::pow(total, opts.budget_exponent);
            r.defect = chain_defect(chain, a, kb);
            r.skipped = false;
        } catch (const GeometryError&) {
            r.skipped = true;
        }
    });
    reduce_trials(rep, results);

    double worst_formula = 0.0;
    Tally range;
    Tally lower;
    for (std::size_t t = 0; t < opts.trials; ++t) {
        worst_formula = std::max(worst_formula, formula_err[t]);
        if (std::isfinite(range_margin[t])) range.add(range_margin[t], 1e-12);
        if (std::isfinite(lower_margin[t])) lower.add(lower_margin[t], 1e-9);
    }
    rep.checks.push_back({"conclusion_defect_floor", rep.violations == 0, true,
                          static_cast<double>(rep.violations), 0.0,
                          "trials with defect < -|qs|^" + std::to_string(opts.budget_exponent)});
    rep.checks.push_back({"closed_form_exact", worst_formula <= 1e-12, true, worst_formula, 1e-12,
                          "|closed form - direct substitution|"});
    rep.checks.push_back({"within_kappa_star_kappa", range.failures == 0, true,
                          static_cast<double>(range.failures), 0.0, "kappa* <= kappa_bar <= kappa"});
    rep.checks.push_back({"not_above_chain_average", lower.failures == 0, true,
                          static_cast<double>(lower.failures), 0.0,
                          "kappa_bar <= kappa-weighted average of the chain + 1e-9"});
    return rep;
}

VerificationReport verify_extension(const SweepOptions& opts) {
    VerificationReport rep;
    rep.lemma = "extension";
    rep.seed = opts.seed;
    rep.budget_exponent = opts.budget_exponent;

    constexpr int kSweepPoints = 50;
    std::vector<TrialResult> results(opts.trials);
    std::vector<int> monotone_breaks(opts.trials, 0);
    std::vector<double> limit_gap(opts.trials, 0.0);
    std::vector<double> identity_gap(opts.trials, 0.0);

    parallel_for(opts.trials, [&](std::size_t t) {
        Rng rng(opts.seed, t);
        const double r = rng.uniform(0.2, 1.0);
        const Curvature kappa{rng.uniform(opts.kappa_lo, opts.kappa_hi)};
        const double span = rng.uniform(0.5, 1.5);
        const double b = rng.uniform(0.1 * opts.scale, opts.scale);
        const double theta = rng.uniform(opts.theta_margin, kPi - opts.theta_margin);

        TrialResult& res = results[t];
        res.inputs = {{"r", r}, {"kappa", kappa.value()}, {"span", span}, {"b", b}, {"theta", theta}};
        try {
            identity_gap[t] = std::fabs(kappa_star_extension(r, r, kappa).value() - kappa.value());
            limit_gap[t] = std::fabs(kappa_star_extension(r + 1e-6, r, kappa).value() - kappa.value());
            double prev = std::numeric_limits<double>::infinity();
            for (int i = 1; i <= kSweepPoints; ++i) {
                const double a = r + span * i / kSweepPoints;
                const double ks = kappa_star_extension(a, r, kappa).value();
                if (!(ks < prev)) ++monotone_breaks[t];
                prev = ks;
            }
            // Conclusion with the extreme extension |yz| = |y0 y| + |y0 z|.
            const double a = r + span;
            const Curvature ks = kappa_star_extension(a, r, kappa);
            const double y0z = model_side(kappa, r, b, ModelAngle{theta});
            const double yz = (a - r) + y0z;
            const double lhs = angle_between(kappa, r, b, y0z).radians();
            res.defect = lhs - angle_between(ks, a, b, yz).radians();
            res.budget = std::pow(b, opts.budget_exponent);
            res.skipped = false;
        } catch (const GeometryError&) {
            res.skipped = true;
        }
    });
    reduce_trials(rep, results);

    std::size_t breaks = 0;
    double worst_limit = 0.0;
    double worst_identity = 0.0;
    for (std::size_t t = 0; t < opts.trials; ++t) {
        breaks += static_cast<std::size_t>(monotone_breaks[t]);
        worst_limit = std::max(worst_limit, limit_gap[t]);
        worst_identity = std::max(worst_identity, identity_gap[t]);
    }
    rep.checks.push_back({"decreasing_in_a", breaks == 0, true, static_cast<double>(breaks), 0.0,
                          "non-decreasing steps on 50-point a-sweeps"});
    rep.checks.push_back({"limit_a_to_r", worst_limit <= 1e-3, true, worst_limit, 1e-3,
                          "|kappa*(r + 1e-6) - kappa|"});
    rep.checks.push_back({"identity_a_equals_r", worst_identity <= 1e-8, true, worst_identity, 1e-8,
                          "|kappa*(r) - kappa|"});
    rep.checks.push_back({"conclusion_defect_floor", rep.violations == 0, false,
                          static_cast<double>(rep.violations), 0.0,
                          "diagnostic: angle~_k(x;y0,z) - angle~_k*(x;y,z) against b^" +
                              std::to_string(opts.budget_exponent)});
    return rep;
}

VerificationReport verify_alexandrov(const SweepOptions& opts) {
    VerificationReport rep;
    rep.lemma = "alexandrov";
    rep.seed = opts.seed;
    rep.budget_exponent = 0.0;

    const std::array<double, 3> kappas{-1.0, 0.0, 1.0};
    const std::size_t per = opts.trials;
    std::vector<TrialResult> results(per * kappas.size());
    std::vector<int> outcome(results.size(), -1);  // bit0: at_q, bit1: at_x

    parallel_for(results.size(), [&](std::size_t t) {
        const Curvature kappa{kappas[t / per]};
        Rng rng(opts.seed, t);
        TrialResult& r = results[t];
        // Rejection sampling of admissible distances with sides <= 1.
        for (int attempt = 0; attempt < 64; ++attempt) {
            FivePointDistances d;
            d.pq = rng.uniform(0.1, 1.0);
            d.qx = rng.uniform(0.05, 1.0);
            d.xs = rng.uniform(0.05, 1.0);
            d.px = rng.uniform(std::fabs(d.pq - d.qx), d.pq + d.qx);
            const double qs = d.qx + d.xs;
            const double lo = std::max(std::fabs(d.px - d.xs), std::fabs(d.pq - qs));
            const double hi = std::min(d.px + d.xs, d.pq + qs);
            if (!(hi > lo)) continue;
            d.ps = rng.uniform(lo, hi);
            try {
                const AlexandrovReport a = alexandrov_lemma_check(kappa, d);
                if (a.vacuous) continue;
                r.inputs = {{"kappa", kappa.value()}, {"pq", d.pq}, {"ps", d.ps}, {"px", d.px},
                            {"qx", d.qx}, {"xs", d.xs}, {"margin_q", a.margin_q}, {"margin_x", a.margin_x}};
                r.skipped = false;
                r.defect = a.agree ? 0.0 : -1.0;
                r.budget = 0.5;
                outcome[t] = (a.at_q ? 1 : 0) | (a.at_x ? 2 : 0);
                return;
            } catch (const GeometryError&) {
            }
        }
    });
    reduce_trials(rep, results);
    rep.trials = results.size();

    std::array<std::size_t, 4> counts{};
    for (int o : outcome)
        if (o >= 0) ++counts[static_cast<std::size_t>(o)];
    rep.checks.push_back({"conditions_agree", rep.violations == 0, true,
                          static_cast<double>(rep.violations), 0.0,
                          "configurations where the two conditions disagree beyond 1e-9"});
    rep.checks.push_back({"both_hold", true, false, static_cast<double>(counts[3]), 0.0, "count"});
    rep.checks.push_back({"both_fail", true, false, static_cast<double>(counts[0]), 0.0, "count"});
    rep.checks.push_back({"coverage", rep.evaluated == rep.trials, true,
                          static_cast<double>(rep.evaluated), static_cast<double>(rep.trials),
                          "admissible configurations generated"});
    return rep;
}

}  // namespace alexkit
