#include "alexkit/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "alexkit/comparison.hpp"
#include "alexkit/convexity.hpp"
#include "alexkit/examples.hpp"
#include "alexkit/metric_space.hpp"
#include "alexkit/sampling.hpp"

namespace alexkit::cli {

namespace {

using nlohmann::json;

// Input problems detected after parsing (bad files, inconsistent flags).
class UsageError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct Common {
    std::string output;
    bool no_timestamp = false;
    std::uint64_t seed = 0;
};

void add_common(CLI::App* sub, Common& c, bool with_seed = true) {
    sub->add_option("-o,--output", c.output, "Output file ('-' or empty: stdout)");
    sub->add_flag("--no-timestamp", c.no_timestamp, "Omit the timestamp so reports are byte-reproducible");
    if (with_seed) sub->add_option("--seed", c.seed, "Random seed (default 0)");
}

std::string utc_timestamp() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// Writes via a temporary file in the target directory and renames over the
// destination, so readers never see a partial file.
void write_atomic(const std::string& path, const std::string& content, std::ostream& out) {
    if (path.empty() || path == "-") {
        out << content;
        return;
    }
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw UsageError("cannot write " + tmp.string());
        f << content;
        f.flush();
        if (!f) throw UsageError("write failed for " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp);
        throw UsageError("cannot rename onto " + path + ": " + ec.message());
    }
}

json envelope(const std::string& command, const Common& c, json config, json tolerances) {
    json j;
    j["tool"] = kToolName;
    j["version"] = kVersion;
    j["command"] = command;
    j["seed"] = c.seed;
    j["config"] = std::move(config);
    j["tolerances"] = std::move(tolerances);
    if (!c.no_timestamp) j["timestamp"] = utc_timestamp();
    return j;
}

void emit_report(const json& report, const Common& c, std::ostream& out) {
    write_atomic(c.output, report.dump(2) + "\n", out);
}

json read_json_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw UsageError("cannot open " + path);
    try {
        return json::parse(f);
    } catch (const json::exception& e) {
        throw UsageError(path + ": " + e.what());
    }
}

DiscreteLengthSpace load_space(const std::string& path) {
    try {
        return DiscreteLengthSpace::from_json(read_json_file(path));
    } catch (const GeometryError& e) {
        throw UsageError(path + ": " + e.what());
    }
}

json space_summary(const DiscreteLengthSpace& s) {
    const auto& m = s.meta();
    return {{"generator", m.generator},
            {"vertices", s.size()},
            {"u_vertices", s.u_vertices().size()},
            {"edges", s.edges().size()},
            {"h", m.h},
            {"h_err", m.h_err},
            {"angle_res", m.angle_res},
            {"ambient", to_string(m.ambient)},
            {"ambient_exact", m.ambient_exact}};
}

// A vertex given either as an index ("17") or as comma-separated coordinates
// ("0.25,0.5" or "x,y,z"), which select the nearest U vertex.
std::size_t resolve_vertex(const DiscreteLengthSpace& space, const std::string& text, const std::string& flag) {
    if (text.find(',') == std::string::npos) {
        std::size_t pos = 0;
        unsigned long long v = 0;
        try {
            v = std::stoull(text, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (pos != text.size()) throw UsageError(flag + ": expected a vertex index or coordinates, got '" + text + "'");
        if (v >= space.size()) throw UsageError(flag + ": vertex " + text + " out of range");
        return static_cast<std::size_t>(v);
    }
    std::vector<double> c;
    std::stringstream ss(text);
    for (std::string tok; std::getline(ss, tok, ',');) {
        try {
            c.push_back(std::stod(tok));
        } catch (const std::exception&) {
            throw UsageError(flag + ": bad coordinate '" + tok + "'");
        }
    }
    if (c.size() < 2 || c.size() > 3) throw UsageError(flag + ": expected 2 or 3 coordinates");
    std::size_t best = space.size();
    double best_d = kInfDistance;
    for (std::size_t v = 0; v < space.size(); ++v) {
        if (!space.in_u(v)) continue;
        const auto& p = space.points()[v].pos;
        double d = 0.0;
        for (std::size_t k = 0; k < c.size(); ++k) d += (p[k] - c[k]) * (p[k] - c[k]);
        if (d < best_d) {
            best_d = d;
            best = v;
        }
    }
    if (best == space.size()) throw UsageError(flag + ": the space has no U vertex");
    return best;
}

json vertex_json(const DiscreteLengthSpace& s, std::size_t v) {
    const auto& p = s.points()[v];
    json pos = json::array();
    for (int k = 0; k < p.dim; ++k) pos.push_back(p.pos[static_cast<std::size_t>(k)]);
    return {{"index", v}, {"pos", pos}, {"in_U", p.in_u}};
}

// ---------------------------------------------------------------------------
// lemma verify

json to_json(const VerificationReport& r) {
    json inputs = json::object();
    for (const auto& [k, v] : r.worst_case.inputs) inputs[k] = v;
    json checks = json::array();
    for (const auto& c : r.checks)
        checks.push_back({{"name", c.name},
                          {"passed", c.passed},
                          {"gated", c.gated},
                          {"value", c.value},
                          {"threshold", c.threshold},
                          {"note", c.note}});
    return {{"lemma", r.lemma},
            {"trials", r.trials},
            {"skipped", r.skipped},
            {"evaluated", r.evaluated},
            {"violations", r.violations},
            {"min_defect", r.min_defect},
            {"max_defect", r.max_defect},
            {"worst_ratio", r.worst_ratio},
            {"budget_exponent", r.budget_exponent},
            {"worst_case",
             {{"trial", r.worst_case.trial},
              {"defect", r.worst_case.defect},
              {"budget", r.worst_case.budget},
              {"inputs", inputs}}},
            {"checks", checks}};
}

struct LemmaArgs {
    Common c;
    std::string which;
    SweepOptions sweep;
    double series_r = 1.0;
    double series_kappa = 0.5;
};

int cmd_lemma(const LemmaArgs& a, std::ostream& out) {
    SweepOptions o = a.sweep;
    o.seed = a.c.seed;
    VerificationReport rep;
    if (a.which == "weighted2") rep = verify_weighted_lemma(o);
    else if (a.which == "multi") rep = verify_multi_lemma(o);
    else if (a.which == "alternating") rep = verify_alternating(o);
    else if (a.which == "extension") rep = verify_extension(o);
    else rep = verify_alexandrov(o);

    json config = {{"which", a.which},        {"trials", o.trials},       {"scale", o.scale},
                   {"kappa_lo", o.kappa_lo},  {"kappa_hi", o.kappa_hi},   {"a_lo", o.a_lo},
                   {"a_hi", o.a_hi},          {"max_segments", o.max_segments},
                   {"theta_margin", o.theta_margin}};
    json tol = {{"budget", "(b+d)^" + std::to_string(o.budget_exponent)},
                {"budget_exponent", o.budget_exponent},
                {"angle_tol", kAngleTol}};
    json j = envelope("lemma verify", a.c, config, tol);
    j["result"] = to_json(rep);
    if (a.which == "extension") {
        // kappa*(a) for a in [r, 2r]: the curve behind the monotonicity check.
        config["series_r"] = a.series_r;
        config["series_kappa"] = a.series_kappa;
        j["config"] = config;
        json series = json::array();
        for (int i = 0; i < 50; ++i) {
            const double av = a.series_r * (1.0 + static_cast<double>(i) / 49.0);
            const double ks = kappa_star_extension(av, a.series_r, Curvature{a.series_kappa}).value();
            series.push_back({{"a", av}, {"kappa_star", ks}});
        }
        j["result"]["series"] = series;
    }
    j["passed"] = rep.passed();
    emit_report(j, a.c, out);
    return rep.passed() ? kExitOk : kExitAssertion;
}

// ---------------------------------------------------------------------------
// domain generate

struct DomainArgs {
    Common c;
    std::string spec_file;
    std::string kind = "punctured";
    DomainSpec spec;
    std::vector<std::string> removed, slits, disks, rects;
};

template <std::size_t N>
std::array<double, N> parse_tuple(const std::string& text, const std::string& flag) {
    std::array<double, N> out{};
    std::stringstream ss(text);
    std::size_t k = 0;
    for (std::string tok; std::getline(ss, tok, ',');) {
        if (k >= N) throw UsageError(flag + ": too many values in '" + text + "'");
        try {
            out[k++] = std::stod(tok);
        } catch (const std::exception&) {
            throw UsageError(flag + ": bad number '" + tok + "'");
        }
    }
    if (k != N) throw UsageError(flag + ": expected " + std::to_string(N) + " comma-separated values");
    return out;
}

int cmd_domain(DomainArgs& a, std::ostream& out) {
    DomainSpec spec;
    if (!a.spec_file.empty()) {
        try {
            spec = DomainSpec::from_json(read_json_file(a.spec_file));
        } catch (const GeometryError& e) {
            throw UsageError(a.spec_file + ": " + e.what());
        }
    } else {
        spec = a.spec;
        try {
            spec.kind = domain_kind_from_string(a.kind);
        } catch (const GeometryError& e) {
            throw UsageError(std::string("--kind: ") + e.what());
        }
        for (const auto& s : a.removed) spec.removed_points.push_back(parse_tuple<2>(s, "--remove"));
        for (const auto& s : a.slits) spec.slits.push_back(parse_tuple<4>(s, "--slit"));
        for (const auto& s : a.disks) spec.disks.push_back(parse_tuple<3>(s, "--disk"));
        for (const auto& s : a.rects) spec.rects.push_back(parse_tuple<4>(s, "--rect"));
        try {
            spec.validate();
        } catch (const GeometryError& e) {
            throw UsageError(e.what());
        }
    }
    DiscreteLengthSpace space;
    try {
        space = generate(spec, a.c.seed);
    } catch (const DomainError& e) {
        throw UsageError(e.what());
    }
    json j = space.to_json();
    json prov = {{"tool", kToolName}, {"version", kVersion}, {"spec", spec.to_json()}, {"seed", a.c.seed}};
    if (!a.c.no_timestamp) prov["timestamp"] = utc_timestamp();
    j["generated_by"] = prov;
    write_atomic(a.c.output, j.dump() + "\n", out);
    return kExitOk;
}

// ---------------------------------------------------------------------------
// space scan / local-check

struct ScanArgs {
    Common c;
    std::string input;
    std::size_t sphere_points = 0;
    double kappa = 0.0;
    std::size_t points = 400;
    std::string metric = "auto";
    ScanOptions scan;
    bool no_kappa_max = false;
};

int cmd_scan(const ScanArgs& a, std::ostream& out) {
    if (a.input.empty() == (a.sphere_points == 0))
        throw UsageError("space scan: give exactly one of --input and --sphere-points");
    FiniteMetricSpace ms;
    json source;
    std::vector<std::size_t> chosen;
    if (a.sphere_points > 0) {
        ms = sphere_point_space(random_sphere_points(a.sphere_points, a.c.seed));
        source = {{"kind", "sphere_points"}, {"points", a.sphere_points}, {"metric", "great_circle"}};
    } else if (a.input.size() > 4 && a.input.substr(a.input.size() - 4) == ".csv") {
        std::ifstream f(a.input);
        if (!f) throw UsageError("cannot open " + a.input);
        try {
            ms = FiniteMetricSpace::from_csv(f);
        } catch (const GeometryError& e) {
            throw UsageError(a.input + ": " + e.what());
        }
        source = {{"kind", "distance_matrix"}, {"points", ms.size()}};
    } else {
        const DiscreteLengthSpace space = load_space(a.input);
        SubsetMetric metric = SubsetMetric::u_graph;
        std::string name = a.metric;
        if (name == "auto") name = space.meta().ambient_exact ? "ambient" : "u_graph";
        if (name == "ambient") metric = SubsetMetric::ambient;
        else if (name == "completion_graph") metric = SubsetMetric::completion_graph;
        else if (name != "u_graph") throw UsageError("--metric: unknown metric '" + a.metric + "'");
        // Deterministic subset of U: a seeded shuffle, then sorted.
        chosen = space.u_vertices();
        Rng rng(a.c.seed, 0x5ca9);
        std::shuffle(chosen.begin(), chosen.end(), rng.engine());
        if (chosen.size() > a.points) chosen.resize(a.points);
        std::sort(chosen.begin(), chosen.end());
        if (chosen.size() < 4) throw UsageError("space scan: fewer than 4 U vertices");
        ms = induced_metric(space, chosen, metric);
        source = space_summary(space);
        source["kind"] = "space";
        source["metric"] = name;
        source["points"] = chosen.size();
    }
    if (ms.size() < 4) throw UsageError("space scan: need at least 4 points");

    ScanOptions o = a.scan;
    o.seed = a.c.seed;
    o.search_kappa_max = !a.no_kappa_max;
    const ScanReport r = scan_quadruples(ms, Curvature{a.kappa}, o);

    json config = {{"kappa", a.kappa}, {"samples", o.samples}, {"exhaustive_below", o.exhaustive_below},
                   {"kappa_max_search", o.search_kappa_max}, {"kappa_search_lo", o.kappa_search_lo},
                   {"kappa_search_hi", o.kappa_search_hi}, {"kappa_search_steps", o.kappa_search_steps},
                   {"input", a.input}, {"metric", a.metric}, {"points", a.points}};
    json tol = {{"defect_tol", o.tol}};
    if (source.contains("h_err")) tol["h_err"] = source["h_err"];
    json j = envelope("space scan", a.c, config, tol);
    json res = {{"kappa", r.kappa},         {"samples", r.samples},       {"evaluated", r.evaluated},
                {"vacuous", r.vacuous},     {"violations", r.violations}, {"exhaustive", r.exhaustive},
                {"min_defect", r.min_defect}, {"source", source}};
    if (r.worst) {
        json pts = json::array();
        for (std::size_t v : r.worst->points) pts.push_back(chosen.empty() ? v : chosen[v]);
        res["worst"] = {{"points", pts}, {"defect", r.worst->defect}};
    }
    if (r.kappa_max) {
        res["kappa_max"] = *r.kappa_max;
        res["kappa_max_bracketed"] = r.kappa_max_bracketed;
    }
    j["result"] = res;
    const bool ok = r.violations == 0;
    j["passed"] = ok;
    emit_report(j, a.c, out);
    return ok ? kExitOk : kExitAssertion;
}

struct LocalArgs {
    Common c;
    std::string input;
    std::string center;
    double radius = 0.0;
    double kappa = 0.0;
    LocalCheckOptions opts;
    std::optional<double> direction_tol;
};

std::size_t central_u_vertex(const DiscreteLengthSpace& space) {
    const auto u = space.u_vertices();
    if (u.empty()) throw UsageError("the space has no U vertex");
    std::array<double, 3> c{0.0, 0.0, 0.0};
    for (std::size_t v : u)
        for (std::size_t k = 0; k < 3; ++k) c[k] += space.points()[v].pos[k];
    for (double& x : c) x /= static_cast<double>(u.size());
    std::size_t best = u.front();
    double best_d = kInfDistance;
    for (std::size_t v : u) {
        const auto& p = space.points()[v].pos;
        const double d = std::hypot(p[0] - c[0], p[1] - c[1], p[2] - c[2]);
        if (d < best_d) {
            best_d = d;
            best = v;
        }
    }
    return best;
}

int cmd_local(const LocalArgs& a, std::ostream& out) {
    const DiscreteLengthSpace space = load_space(a.input);
    const std::size_t center = a.center.empty() ? central_u_vertex(space) : resolve_vertex(space, a.center, "--center");
    LocalCheckOptions o = a.opts;
    o.seed = a.c.seed;
    o.direction_tol = a.direction_tol;
    LocalCheckReport r;
    try {
        r = local_kappa_domain_check(space, center, a.radius, Curvature{a.kappa}, o);
    } catch (const InsufficientResolution& e) {
        throw UsageError(e.what());
    }
    json config = {{"input", a.input},     {"center", vertex_json(space, center)}, {"radius", a.radius},
                   {"kappa", a.kappa},     {"samples", o.samples},                 {"h_angle_cells", o.h_angle_cells}};
    json tol = {{"h_angle", r.h_angle}, {"direction_tol", r.direction_tol}, {"h_err", space.meta().h_err}};
    json j = envelope("space local-check", a.c, config, tol);
    json ex = json::array();
    for (const auto& v : r.examples)
        ex.push_back({{"condition", v.condition}, {"points_qpsx", v.points}, {"excess", v.excess}});
    j["result"] = {{"vacuous", r.vacuous},
                   {"ball_size", r.ball_size},
                   {"samples", r.samples},
                   {"evaluated", r.evaluated},
                   {"undefined", r.undefined},
                   {"toponogov_violations", r.toponogov_violations},
                   {"angle_sum_violations", r.angle_sum_violations},
                   {"worst_toponogov", r.worst_toponogov},
                   {"worst_angle_sum", r.worst_angle_sum},
                   {"examples", ex},
                   {"space", space_summary(space)}};
    j["passed"] = r.passed();
    emit_report(j, a.c, out);
    return r.passed() ? kExitOk : kExitAssertion;
}

// ---------------------------------------------------------------------------
// convexity estimate / search

struct ConvexityArgs {
    Common c;
    std::string input;
    std::string p, q, s;
    std::size_t triples = 0;
    double step = 0.0;
    std::optional<double> slack;
    std::size_t ae_samples = 0;
    bool ae = false;
    double min_probability = 0.0;
    // search
    double epsilon = 0.0;
    SearchOptions search;
};

json series_json(const ConvexityReport& r) {
    json s = json::array();
    for (const auto& x : r.series) s.push_back({{"arc", x.arc}, {"vertex", x.vertex}, {"connectable", x.connectable}});
    return s;
}

json triple_json(const ConvexityReport& r) {
    return {{"p", r.p},
            {"q", r.q},
            {"s", r.s},
            {"probability", r.probability},
            {"margin", r.margin},
            {"samples", r.samples},
            {"connected_measure", r.connected_measure},
            {"total_measure", r.total_measure}};
}

int cmd_convexity_estimate(const ConvexityArgs& a, std::ostream& out) {
    const DiscreteLengthSpace space = load_space(a.input);
    const double slack = a.slack.value_or(default_slack(space));
    const double step = a.step > 0.0 ? a.step : space.meta().h;
    std::vector<std::array<std::size_t, 3>> triples;
    const bool given = !a.p.empty() || !a.q.empty() || !a.s.empty();
    if (given) {
        if (a.p.empty() || a.q.empty() || a.s.empty()) throw UsageError("convexity estimate: --p, --q and --s go together");
        if (a.triples > 0) throw UsageError("convexity estimate: --triples excludes --p/--q/--s");
        triples.push_back({resolve_vertex(space, a.p, "--p"), resolve_vertex(space, a.q, "--q"),
                           resolve_vertex(space, a.s, "--s")});
        if (!space.in_u(triples[0][0])) throw UsageError("--p must lie in U");
        if (triples[0][1] == triples[0][2]) throw UsageError("--q and --s must differ");
    } else if (a.triples > 0) {
        const auto u = space.u_vertices();
        if (u.size() < 3) throw UsageError("convexity estimate: fewer than 3 U vertices");
        for (std::size_t t = 0; t < a.triples; ++t) {
            Rng rng(a.c.seed, t);
            std::size_t p = 0, q = 0, s = 0;
            do {
                p = u[rng.index(0, u.size() - 1)];
                q = u[rng.index(0, u.size() - 1)];
                s = u[rng.index(0, u.size() - 1)];
            } while (q == s || p == q || p == s);
            triples.push_back({p, q, s});
        }
    } else if (!a.ae) {
        throw UsageError("convexity estimate: give --p/--q/--s, --triples or --ae");
    }

    std::vector<ConvexityReport> reps(triples.size());
    parallel_for(triples.size(), [&](std::size_t i) {
        reps[i] = prob_convexity(space, triples[i][0], triples[i][1], triples[i][2], step, slack);
    });

    json config = {{"input", a.input}, {"triples", a.triples}, {"step", step}, {"ae", a.ae}, {"ae_samples", a.ae_samples},
                   {"min_probability", a.min_probability}};
    if (given) config["triple"] = triples.front();
    json tol = {{"slack", slack}, {"h_err", space.meta().h_err}, {"step", step}};
    json j = envelope("convexity estimate", a.c, config, tol);
    json res = {{"space", space_summary(space)}};
    bool ok = true;
    if (!reps.empty()) {
        json list = json::array();
        double mn = 1.0, sum = 0.0;
        std::size_t worst = 0, below = 0;
        for (std::size_t i = 0; i < reps.size(); ++i) {
            list.push_back(triple_json(reps[i]));
            sum += reps[i].probability;
            below += reps[i].probability < 1.0 ? 1 : 0;
            if (reps[i].probability < mn) {
                mn = reps[i].probability;
                worst = i;
            }
        }
        res["triples"] = list;
        res["min_probability"] = mn;
        res["mean_probability"] = sum / static_cast<double>(reps.size());
        res["below_one"] = below;
        res["worst"] = triple_json(reps[worst]);
        res["series"] = series_json(reps[worst]);
        ok = mn >= a.min_probability;
    }
    if (a.ae) {
        const std::size_t p = given ? triples.front()[0] : central_u_vertex(space);
        const AeReport ae = ae_convexity_estimate(space, p, a.ae_samples, slack, a.c.seed);
        res["ae"] = {{"p", p}, {"fraction", ae.fraction}, {"samples", ae.samples}, {"connected", ae.connected},
                     {"margin", ae.margin}};
    }
    j["result"] = res;
    j["passed"] = ok;
    emit_report(j, a.c, out);
    return ok ? kExitOk : kExitAssertion;
}

int cmd_convexity_search(const ConvexityArgs& a, std::ostream& out) {
    const DiscreteLengthSpace space = load_space(a.input);
    if (a.p.empty() || a.q.empty() || a.s.empty()) throw UsageError("convexity search: --p, --q and --s are required");
    const std::size_t p = resolve_vertex(space, a.p, "--p");
    const std::size_t q = resolve_vertex(space, a.q, "--q");
    const std::size_t s = resolve_vertex(space, a.s, "--s");
    SearchOptions o = a.search;
    o.seed = a.c.seed;
    o.step = a.step;
    o.slack = a.slack;
    if (!(a.epsilon > 0.0)) throw UsageError("--epsilon must be positive");
    ConvexityReport r;
    try {
        r = weak_lambda_search(space, p, q, s, a.epsilon, o);
    } catch (const DomainError& e) {
        throw UsageError(e.what());
    }
    json config = {{"input", a.input},
                   {"p", vertex_json(space, p)},
                   {"q", vertex_json(space, q)},
                   {"s", vertex_json(space, s)},
                   {"epsilon", a.epsilon},
                   {"candidates", o.candidates},
                   {"rings", o.rings},
                   {"min_lambda", a.min_probability}};
    json tol = {{"slack", r.slack}, {"step", r.step}, {"h_err", space.meta().h_err}};
    json j = envelope("convexity search", a.c, config, tol);
    json res = triple_json(r);
    res["lambda_hat"] = r.lambda_hat;
    res["candidates_tried"] = r.candidates_tried;
    res["series"] = series_json(r);
    res["space"] = space_summary(space);
    j["result"] = res;
    const bool ok = r.lambda_hat >= a.min_probability;
    j["passed"] = ok;
    emit_report(j, a.c, out);
    return ok ? kExitOk : kExitAssertion;
}

// ---------------------------------------------------------------------------
// completion compare / area estimate

struct CompletionArgs {
    Common c;
    std::string input;
    std::size_t pairs = 200;
    double epsilon = 0.05;
};

int cmd_completion(const CompletionArgs& a, std::ostream& out) {
    const DiscreteLengthSpace space = load_space(a.input);
    CompletionReport r;
    try {
        r = completion_compare(space, a.pairs, a.epsilon, a.c.seed);
    } catch (const DomainError& e) {
        throw UsageError(e.what());
    }
    const double bound = 4.0 * a.epsilon + 2.0 * r.h_err;
    json config = {{"input", a.input}, {"pairs", a.pairs}, {"epsilon", a.epsilon}};
    json tol = {{"gap_bound", bound}, {"h_err", r.h_err}, {"link_tol", 1e-9}};
    json j = envelope("completion compare", a.c, config, tol);
    json res = {{"pairs", r.pairs},
                {"matched", r.matched},
                {"misses", r.misses},
                {"max_gap", r.max_gap},
                {"link_violations", r.link_violations},
                {"max_violation", r.max_violation},
                {"space", space_summary(space)}};
    if (r.worst)
        res["worst"] = {{"p", r.worst->p},
                        {"q", r.worst->q},
                        {"p_bar", r.worst->p_bar},
                        {"q_bar", r.worst->q_bar},
                        {"segment", r.worst->segment},
                        {"d_completion", r.worst->d_completion},
                        {"d_x", r.worst->d_x},
                        {"d_u", r.worst->d_u}};
    j["result"] = res;
    const bool ok = r.max_gap <= bound && r.link_violations[0] + r.link_violations[1] + r.link_violations[2] == 0;
    j["passed"] = ok;
    emit_report(j, a.c, out);
    return ok ? kExitOk : kExitAssertion;
}

struct AreaArgs {
    Common c;
    std::string spec_file;
    double delta = 0.2;
    std::size_t segments = 200;
    std::size_t samples = 200000;
};

int cmd_area(const AreaArgs& a, std::ostream& out) {
    DomainSpec spec;
    if (!a.spec_file.empty()) {
        try {
            spec = DomainSpec::from_json(read_json_file(a.spec_file));
        } catch (const GeometryError& e) {
            throw UsageError(a.spec_file + ": " + e.what());
        }
    } else {
        spec.kind = DomainKind::dense_square;
        spec.delta = a.delta;
        spec.segments = a.segments;
    }
    if (spec.kind != DomainKind::dense_square) throw UsageError("area estimate: needs a dense_square spec");
    try {
        spec.validate();
    } catch (const GeometryError& e) {
        throw UsageError(e.what());
    }
    const AreaEstimate r = area_estimate(spec, a.samples, a.c.seed);
    const double bound = r.delta + 3.0 * r.sigma;
    json config = {{"spec", spec.to_json()}, {"samples", a.samples}};
    json tol = {{"bound", "delta + 3 sigma"}, {"bound_value", bound}};
    json j = envelope("area estimate", a.c, config, tol);
    j["result"] = {{"estimate", r.estimate}, {"sigma", r.sigma},   {"union_bound", r.union_bound},
                   {"samples", r.samples},   {"hits", r.hits},     {"delta", r.delta}};
    const bool ok = r.estimate <= bound;
    j["passed"] = ok;
    emit_report(j, a.c, out);
    return ok ? kExitOk : kExitAssertion;
}

// ---------------------------------------------------------------------------
// plot emit

struct PlotArgs {
    Common c;
    std::string input;
    std::string series = "result.series";
};

std::string csv_cell(const json& v) {
    if (v.is_string()) {
        std::string s = v.get<std::string>();
        if (s.find_first_of(",\"\n") == std::string::npos) return s;
        std::string q = "\"";
        for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
        return q + "\"";
    }
    if (v.is_boolean()) return v.get<bool>() ? "1" : "0";
    if (v.is_null()) return "";
    return v.dump();
}

int cmd_plot(const PlotArgs& a, std::ostream& out) {
    const json rep = read_json_file(a.input);
    const json* node = &rep;
    std::stringstream ss(a.series);
    for (std::string key; std::getline(ss, key, '.');) {
        if (!node->is_object() || !node->contains(key))
            throw UsageError("--series: '" + a.series + "' not found in " + a.input);
        node = &(*node)[key];
    }
    if (!node->is_array()) throw UsageError("--series: '" + a.series + "' is not an array");
    std::vector<std::string> cols;
    for (const auto& row : *node) {
        if (!row.is_object()) throw UsageError("--series: rows must be objects");
        for (const auto& [k, v] : row.items())
            if (std::find(cols.begin(), cols.end(), k) == cols.end() && !v.is_structured()) cols.push_back(k);
    }
    std::ostringstream csv;
    for (std::size_t i = 0; i < cols.size(); ++i) csv << (i ? "," : "") << cols[i];
    csv << "\n";
    for (const auto& row : *node) {
        for (std::size_t i = 0; i < cols.size(); ++i)
            csv << (i ? "," : "") << (row.contains(cols[i]) ? csv_cell(row[cols[i]]) : std::string());
        csv << "\n";
    }
    write_atomic(a.c.output, csv.str(), out);
    return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"alexkit: comparison geometry in model spaces and discretized domains", kToolName};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    std::function<int()> action;

    // lemma verify
    LemmaArgs lemma;
    auto* lemma_cmd = app.add_subcommand("lemma", "Alexandrov-lemma calculators");
    lemma_cmd->require_subcommand(1);
    auto* verify = lemma_cmd->add_subcommand("verify", "Randomized verification sweep for one lemma");
    verify->add_option("--which", lemma.which, "weighted2 | multi | alternating | extension | alexandrov")
        ->required()
        ->check(CLI::IsMember({"weighted2", "multi", "alternating", "extension", "alexandrov"}));
    verify->add_option("--trials", lemma.sweep.trials, "Number of random trials")->check(CLI::PositiveNumber);
    verify->add_option("--scale", lemma.sweep.scale, "Upper end of the sampled total length b+d")
        ->check(CLI::PositiveNumber);
    verify->add_option("--kappa-lo", lemma.sweep.kappa_lo, "Lower end of the curvature range");
    verify->add_option("--kappa-hi", lemma.sweep.kappa_hi, "Upper end of the curvature range");
    verify->add_option("--a-lo", lemma.sweep.a_lo, "Lower end of |pq|")->check(CLI::PositiveNumber);
    verify->add_option("--a-hi", lemma.sweep.a_hi, "Upper end of |pq|")->check(CLI::PositiveNumber);
    verify->add_option("--max-segments", lemma.sweep.max_segments, "Largest chain length for multi")
        ->check(CLI::Range(2, 64));
    verify->add_option("--budget-exponent", lemma.sweep.budget_exponent, "Defect budget (b+d)^e");
    verify->add_option("--series-r", lemma.series_r, "extension: r of the emitted kappa*(a) curve")
        ->check(CLI::PositiveNumber);
    verify->add_option("--series-kappa", lemma.series_kappa, "extension: kappa of the emitted curve");
    add_common(verify, lemma.c);
    verify->callback([&] {
        if (!(lemma.sweep.a_lo <= lemma.sweep.a_hi)) throw CLI::ValidationError("--a-lo", "must not exceed --a-hi");
        if (!(lemma.sweep.kappa_lo <= lemma.sweep.kappa_hi))
            throw CLI::ValidationError("--kappa-lo", "must not exceed --kappa-hi");
        action = [&] { return cmd_lemma(lemma, out); };
    });

    // domain generate
    DomainArgs dom;
    auto* dom_cmd = app.add_subcommand("domain", "Domain generators");
    dom_cmd->require_subcommand(1);
    auto* gen = dom_cmd->add_subcommand("generate", "Discretize a domain and write the space file");
    gen->set_help_flag("--help", "Print this help message and exit");  // frees --h for the mesh size
    gen->add_option("--spec", dom.spec_file, "DomainSpec JSON (overrides the other domain flags)");
    gen->add_option("--kind", dom.kind, "cap | dense_square | punctured | custom")
        ->check(CLI::IsMember({"cap", "dense_square", "punctured", "custom"}));
    gen->add_option("--h", dom.spec.h, "Mesh parameter")->check(CLI::PositiveNumber);
    gen->add_option("--r", dom.spec.r, "cap: geodesic radius on the unit sphere");
    gen->add_option("--side", dom.spec.side, "Square side length")->check(CLI::PositiveNumber);
    gen->add_option("--delta", dom.spec.delta, "dense_square: sum of radii is delta/4");
    gen->add_option("--segments", dom.spec.segments, "dense_square: number K of bundled segments");
    gen->add_option("--radius", dom.spec.radii, "dense_square: explicit radii r_1..r_K");
    gen->add_option("--remove", dom.removed, "punctured: removed point x,y (repeatable)");
    gen->add_option("--slit", dom.slits, "punctured: removed slit x0,y0,x1,y1 (repeatable)");
    gen->add_option("--disk", dom.disks, "custom: removed closed disk cx,cy,radius (repeatable)");
    gen->add_option("--rect", dom.rects, "custom: removed closed rectangle x0,y0,x1,y1 (repeatable)");
    add_common(gen, dom.c);
    gen->callback([&] { action = [&] { return cmd_domain(dom, out); }; });

    // space scan / local-check
    ScanArgs scan;
    LocalArgs local;
    auto* space_cmd = app.add_subcommand("space", "Curvature checks on metric spaces");
    space_cmd->require_subcommand(1);
    auto* sc = space_cmd->add_subcommand("scan", "Quadruple condition over sampled quadruples");
    sc->add_option("--input", scan.input, "Space JSON or distance-matrix CSV");
    sc->add_option("--sphere-points", scan.sphere_points, "Use N seeded random points of the unit sphere instead");
    sc->add_option("--kappa", scan.kappa, "Comparison curvature")->required();
    sc->add_option("--samples", scan.scan.samples, "Number of sampled quadruples");
    sc->add_option("--tol", scan.scan.tol, "Defects below -tol count as violations");
    sc->add_option("--points", scan.points, "Space JSON: number of U vertices in the scanned subset");
    sc->add_option("--metric", scan.metric, "Space JSON: auto | ambient | u_graph | completion_graph");
    sc->add_flag("--no-kappa-max", scan.no_kappa_max, "Skip the kappa_max bisection");
    sc->add_option("--kappa-search-lo", scan.scan.kappa_search_lo, "Lower end of the kappa_max bracket");
    sc->add_option("--kappa-search-hi", scan.scan.kappa_search_hi, "Upper end of the kappa_max bracket");
    sc->add_option("--kappa-search-steps", scan.scan.kappa_search_steps, "Bisection steps for kappa_max");
    add_common(sc, scan.c);
    sc->callback([&] { action = [&] { return cmd_scan(scan, out); }; });

    auto* lc = space_cmd->add_subcommand("local-check", "Discrete kappa-domain check in a ball");
    lc->add_option("--input", local.input, "Space JSON")->required();
    lc->add_option("--center", local.center, "Ball centre: vertex index or coordinates (default: central U vertex)");
    lc->add_option("--radius", local.radius, "Ball radius (intrinsic U distance)")->required()->check(CLI::PositiveNumber);
    lc->add_option("--kappa", local.kappa, "Comparison curvature")->required();
    lc->add_option("--samples", local.opts.samples, "Sampled (q, s, x, p) configurations");
    lc->add_option("--h-angle-cells", local.opts.h_angle_cells, "Angle scale in mesh cells")->check(CLI::PositiveNumber);
    lc->add_option("--direction-tol", local.direction_tol, "Per-direction angle tolerance (default: mesh angular resolution)");
    add_common(lc, local.c);
    lc->callback([&] { action = [&] { return cmd_local(local, out); }; });

    // convexity estimate / search
    ConvexityArgs conv;
    auto* conv_cmd = app.add_subcommand("convexity", "Probabilistic convexity of U");
    conv_cmd->require_subcommand(1);
    auto add_triple = [&](CLI::App* sub) {
        sub->add_option("--input", conv.input, "Space JSON")->required();
        sub->add_option("--p", conv.p, "Vertex index or coordinates");
        sub->add_option("--q", conv.q, "Vertex index or coordinates");
        sub->add_option("--s", conv.s, "Vertex index or coordinates");
        sub->add_option("--step", conv.step, "Sampling step along [qs] (default: mesh h)");
        sub->add_option("--slack", conv.slack, "Relative length slack (default: 2 h_err)");
        add_common(sub, conv.c);
    };
    auto* est = conv_cmd->add_subcommand("estimate", "Pr(p < [qs]) for one triple or random triples");
    add_triple(est);
    est->add_option("--triples", conv.triples, "Number of random U triples");
    est->add_flag("--ae", conv.ae, "Also estimate the fraction of U connectable to p");
    est->add_option("--ae-samples", conv.ae_samples, "Sampled vertices for --ae (0: all of U)");
    est->add_option("--min-probability", conv.min_probability, "Assert every probability is at least this");
    est->callback([&] { action = [&] { return cmd_convexity_estimate(conv, out); }; });
    auto* srch = conv_cmd->add_subcommand("search", "Best probability over epsilon-perturbed triples");
    add_triple(srch);
    srch->add_option("--epsilon", conv.epsilon, "Perturbation radius")->required();
    srch->add_option("--candidates", conv.search.candidates, "Perturbed triples to try");
    srch->add_option("--rings", conv.search.rings, "Distance rings for stratified draws")->check(CLI::PositiveNumber);
    srch->add_option("--min-lambda", conv.min_probability, "Assert lambda_hat is at least this");
    srch->callback([&] { action = [&] { return cmd_convexity_search(conv, out); }; });

    // completion compare
    CompletionArgs comp;
    auto* comp_cmd = app.add_subcommand("completion", "Completion-distance experiment");
    comp_cmd->require_subcommand(1);
    auto* cc = comp_cmd->add_subcommand("compare", "Compare completion and perturbed U distances");
    cc->add_option("--input", comp.input, "dense_square space JSON")->required();
    cc->add_option("--pairs", comp.pairs, "Sampled vertex pairs");
    cc->add_option("--epsilon", comp.epsilon, "Perturbation radius")->check(CLI::PositiveNumber);
    add_common(cc, comp.c);
    cc->callback([&] { action = [&] { return cmd_completion(comp, out); }; });

    // area estimate
    AreaArgs area;
    auto* area_cmd = app.add_subcommand("area", "Measure estimates");
    area_cmd->require_subcommand(1);
    auto* ae = area_cmd->add_subcommand("estimate", "Monte Carlo area of a dense_square domain");
    ae->add_option("--spec", area.spec_file, "DomainSpec JSON of kind dense_square");
    ae->add_option("--delta", area.delta, "delta (sum of radii is delta/4)");
    ae->add_option("--segments", area.segments, "Number K of segments");
    ae->add_option("--samples", area.samples, "Monte Carlo samples")->check(CLI::PositiveNumber);
    add_common(ae, area.c);
    ae->callback([&] { action = [&] { return cmd_area(area, out); }; });

    // plot emit
    PlotArgs plot;
    auto* plot_cmd = app.add_subcommand("plot", "Plot data");
    plot_cmd->require_subcommand(1);
    auto* pe = plot_cmd->add_subcommand("emit", "Write a report's series as CSV");
    pe->add_option("--input", plot.input, "Report JSON")->required();
    pe->add_option("--series", plot.series, "Dotted path of the series array");
    add_common(pe, plot.c, false);
    pe->callback([&] { action = [&] { return cmd_plot(plot, out); }; });

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }
    try {
        return action ? action() : kExitUsage;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const GeometryError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
}

int run(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run(args, std::cout, std::cerr);
}

}  // namespace alexkit::cli
