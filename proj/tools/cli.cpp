#include "cli.hpp"

#include "boundedsnr/analysis.hpp"
#include "boundedsnr/errors.hpp"
#include "boundedsnr/serialize.hpp"
#include "boundedsnr/svg.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

namespace snr::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr const char* kSuites[] = {"specfun", "h-properties", "r1-inequality", "decomposition",
                                   "dominance"};

struct Failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

double parse_real(const std::string& s, const std::string& field) {
    if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
    double v = 0.0;
    const auto* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || ptr != end)
        throw ConfigurationError(fmt::format("{}: '{}' is not a number", field, s));
    return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) parts.push_back(cur);
    if (!s.empty() && s.back() == sep) parts.emplace_back();
    return parts;
}

// ---------------------------------------------------------------------------
// Flags and configuration.

struct Flags {
    int p = 5;
    int k = 20;
    double m = 2.0;
    double l = 0.0;
    double radius = 0.0;
    std::vector<std::string> specs;
    std::string lambda_grid;
    std::string t_grid;
    std::int64_t replicates = 200000;
    std::uint64_t seed = 20120601;
    unsigned workers = 0;
    std::string out;
    bool svg = false;
    std::string config;
    std::string suite;
};

struct Registered {
    std::map<std::string, CLI::Option*> options;

    bool given(const std::string& name) const {
        const auto it = options.find(name);
        return it != options.end() && it->second->count() > 0;
    }
};

Registered register_flags(CLI::App& app, Flags& f) {
    Registered r;
    r.options["p"] = app.add_option("--p", f.p, "Dimension of X");
    r.options["k"] = app.add_option("--k", f.k, "Degrees of freedom of S^2");
    r.options["m"] = app.add_option("--m", f.m, "Bound on ||theta|| / sigma");
    r.options["l"] = app.add_option("--l", f.l, "Exponent of the sigma^2 prior for boundary_uniform");
    r.options["radius"] =
        app.add_option("--radius", f.radius, "Sphere radius for boundary_uniform (default m)");
    r.options["spec"] = app.add_option("--spec", f.specs, "Estimator: JSON object or kind name")
                            ->take_all()
                            ->expected(1)
                            ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    r.options["lambda-grid"] = app.add_option("--lambda-grid", f.lambda_grid, "lo:hi:n");
    r.options["t-grid"] = app.add_option("--t-grid", f.t_grid, "lo:hi:n[:log]");
    r.options["replicates"] = app.add_option("--replicates", f.replicates, "Monte Carlo replicates");
    r.options["seed"] = app.add_option("--seed", f.seed, "Random seed");
    r.options["workers"] = app.add_option("--workers", f.workers, "Worker threads (0 = all cores)");
    r.options["out"] = app.add_option("--out", f.out, "Output directory");
    r.options["svg"] = app.add_flag("--svg", f.svg, "Also write SVG plots");
    r.options["config"] = app.add_option("--config", f.config, "JSON configuration file");
    return r;
}

struct Pending {
    std::optional<int> p, k;
    std::optional<double> m, l, radius;
    std::vector<std::string> specs;
    bool specs_given = false;
    std::optional<std::string> lambda_grid, t_grid, out;
    std::optional<std::int64_t> replicates;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> workers;
    std::optional<bool> svg;
};

template <class T>
T json_field(const json& j, const char* name) {
    try {
        return j.at(name).get<T>();
    } catch (const json::exception&) {
        throw ConfigurationError(fmt::format("config: field '{}' has the wrong type", name));
    }
}

void load_config_file(const std::string& path, Pending& pend) {
    std::ifstream in(path);
    if (!in) throw ConfigurationError(fmt::format("--config: cannot open '{}'", path));
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigurationError(fmt::format("--config: '{}' is not valid JSON ({})", path, e.what()));
    }
    if (!j.is_object()) throw ConfigurationError("--config: top level must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        if (key == "p") pend.p = json_field<int>(j, "p");
        else if (key == "k") pend.k = json_field<int>(j, "k");
        else if (key == "m") pend.m = json_field<double>(j, "m");
        else if (key == "l") pend.l = json_field<double>(j, "l");
        else if (key == "radius") pend.radius = json_field<double>(j, "radius");
        else if (key == "lambda_grid") pend.lambda_grid = json_field<std::string>(j, "lambda_grid");
        else if (key == "t_grid") pend.t_grid = json_field<std::string>(j, "t_grid");
        else if (key == "replicates") pend.replicates = json_field<std::int64_t>(j, "replicates");
        else if (key == "seed") pend.seed = json_field<std::uint64_t>(j, "seed");
        else if (key == "workers") pend.workers = json_field<unsigned>(j, "workers");
        else if (key == "out") pend.out = json_field<std::string>(j, "out");
        else if (key == "svg") pend.svg = json_field<bool>(j, "svg");
        else if (key == "specs") {
            if (!value.is_array()) throw ConfigurationError("config: field 'specs' must be an array");
            pend.specs.clear();
            pend.specs_given = true;
            for (const auto& s : value) pend.specs.push_back(s.is_string() ? s.get<std::string>() : s.dump());
        } else {
            throw ConfigurationError(fmt::format("config: unknown field '{}'", key));
        }
    }
}

EstimatorSpec resolve_spec(const std::string& text, const RunConfig& cfg) {
    EstimatorSpec spec;
    try {
        spec = parse_spec(text);
    } catch (const ConfigurationError& e) {
        throw ConfigurationError(fmt::format("--spec '{}': {}", text, e.what()));
    }
    const bool bare = text.find('{') == std::string::npos;
    if (bare && spec.is<kind::BoundaryUniform>()) spec = EstimatorSpec::boundary_uniform(cfg.l, cfg.radius);
    if (bare && spec.is<kind::RadialMixture>()) spec = EstimatorSpec::radial_mixture(cfg.l, BallUniform{});
    try {
        validate(spec, cfg.problem);
    } catch (const ConfigurationError& e) {
        throw ConfigurationError(fmt::format("--spec '{}': {}", text, e.what()));
    }
    return spec;
}

struct Resolved {
    RunConfig cfg;
    bool problem_given = false;
};

Resolved resolve(const Flags& f, const Registered& reg) {
    Pending pend;
    if (reg.given("config")) load_config_file(f.config, pend);
    if (reg.given("p")) pend.p = f.p;
    if (reg.given("k")) pend.k = f.k;
    if (reg.given("m")) pend.m = f.m;
    if (reg.given("l")) pend.l = f.l;
    if (reg.given("radius")) pend.radius = f.radius;
    if (reg.given("spec")) {
        pend.specs = f.specs;
        pend.specs_given = true;
    }
    if (reg.given("lambda-grid")) pend.lambda_grid = f.lambda_grid;
    if (reg.given("t-grid")) pend.t_grid = f.t_grid;
    if (reg.given("replicates")) pend.replicates = f.replicates;
    if (reg.given("seed")) pend.seed = f.seed;
    if (reg.given("workers")) pend.workers = f.workers;
    if (reg.given("out")) pend.out = f.out;
    if (reg.given("svg")) pend.svg = f.svg;

    Resolved res;
    RunConfig& cfg = res.cfg;
    res.problem_given = pend.p || pend.k;
    try {
        cfg.problem = Problem(pend.p.value_or(5), pend.k.value_or(20), pend.m.value_or(2.0));
    } catch (const ConfigurationError& e) {
        throw ConfigurationError(fmt::format("problem: {}", e.what()));
    }
    cfg.l = pend.l.value_or(0.0);
    cfg.radius = pend.radius;
    if (pend.lambda_grid) {
        cfg.lambda_grid = parse_grid(*pend.lambda_grid, "--lambda-grid");
        try {
            validate_lambda_grid(cfg.lambda_grid->values(), cfg.problem);
        } catch (const ConfigurationError& e) {
            throw ConfigurationError(fmt::format("--lambda-grid: {}", e.what()));
        }
    }
    if (pend.t_grid) {
        cfg.t_grid = parse_grid(*pend.t_grid, "--t-grid");
        if (cfg.t_grid->lo < 0.0) throw ConfigurationError("--t-grid: values must be >= 0");
    }
    if (pend.replicates) cfg.sample.replicates = *pend.replicates;
    if (pend.seed) cfg.sample.seed = *pend.seed;
    if (pend.workers) cfg.sample.workers = *pend.workers;
    try {
        cfg.sample.validate();
    } catch (const ConfigurationError& e) {
        throw ConfigurationError(fmt::format("--replicates: {}", e.what()));
    }
    if (pend.out) {
        cfg.out = *pend.out;
        cfg.out_given = true;
    }
    cfg.svg = pend.svg.value_or(false);
    if (pend.specs_given && pend.specs.empty()) throw ConfigurationError("--spec: no estimators given");
    for (const auto& s : pend.specs) cfg.specs.push_back(resolve_spec(s, cfg));
    return res;
}

// ---------------------------------------------------------------------------
// Output helpers.

std::vector<double> lambda_values(const RunConfig& cfg) {
    if (cfg.lambda_grid) return cfg.lambda_grid->values();
    return analysis::default_lambda_grid(cfg.problem);
}

std::vector<double> t_values(const RunConfig& cfg) {
    if (cfg.t_grid) return cfg.t_grid->values();
    return analysis::default_t_grid();
}

std::vector<EstimatorSpec> specs_or(const RunConfig& cfg, std::vector<EstimatorSpec> fallback) {
    return cfg.specs.empty() ? fallback : cfg.specs;
}

std::vector<EstimatorSpec> standard_specs(const RunConfig& cfg) {
    return {EstimatorSpec::unbiased(), EstimatorSpec::mle(),
            EstimatorSpec::boundary_uniform(cfg.l, cfg.radius)};
}

std::vector<std::string> unique_labels(const std::vector<EstimatorSpec>& specs) {
    std::vector<std::string> out;
    std::map<std::string, int> seen;
    for (const auto& s : specs) {
        std::string label = s.label();
        const int n = ++seen[label];
        if (n > 1) label += fmt::format("_{}", n);
        out.push_back(label);
    }
    return out;
}

std::string problem_line(const Problem& prob) {
    return fmt::format("p={} k={} m={:g}", prob.p, prob.k, prob.m);
}

std::vector<std::string> provenance(const std::string& command, const Problem& prob,
                                    const SampleConfig& sample, const std::vector<EstimatorSpec>& specs,
                                    const std::vector<std::string>& labels) {
    std::vector<std::string> lines{fmt::format("bsnr {}", command), problem_line(prob),
                                   fmt::format("seed={}", sample.seed)};
    for (std::size_t i = 0; i < specs.size(); ++i)
        lines.push_back(fmt::format("spec {} = {}", labels[i], to_json(specs[i]).dump()));
    return lines;
}

void write_file(const fs::path& path, const std::string& content) {
    std::error_code ec;
    if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Failure(fmt::format("--out: cannot write '{}'", path.string()));
    f << content;
    if (!f) throw Failure(fmt::format("--out: error writing '{}'", path.string()));
}

std::string real(double v) { return fmt::format("{:.12g}", v); }

std::string multiplier_csv(const Problem& prob, const std::vector<EstimatorSpec>& specs,
                           const std::vector<double>& ts, const std::vector<std::string>& comments) {
    const auto labels = unique_labels(specs);
    std::vector<MultiplierFn> hs;
    for (const auto& s : specs) hs.push_back(make_multiplier(s, prob));
    std::string out;
    for (const auto& c : comments) out += "# " + c + "\n";
    out += "t";
    for (const auto& l : labels) out += "," + l;
    out += "\n";
    for (double t : ts) {
        out += real(t);
        for (const auto& h : hs) out += "," + real(h(t));
        out += "\n";
    }
    return out;
}

std::string multiplier_svg(const std::string& title, const Problem& prob,
                           const std::vector<EstimatorSpec>& specs, const std::vector<double>& ts) {
    svg::Chart chart{title, "t", "h(t)", {}, true};
    const auto labels = unique_labels(specs);
    for (std::size_t i = 0; i < specs.size(); ++i) {
        const auto h = make_multiplier(specs[i], prob);
        svg::Series s{labels[i], {}, {}};
        for (double t : ts) {
            s.x.push_back(t);
            s.y.push_back(h(t));
        }
        chart.series.push_back(std::move(s));
    }
    return svg::render(chart);
}

std::string risk_svg(const std::string& title, const PairedCurves& curves,
                     const std::vector<std::string>& labels) {
    svg::Chart chart{title, "lambda", "risk", {}, false};
    for (std::size_t i = 0; i < curves.curves.size(); ++i) {
        svg::Series s{labels[i], {}, {}};
        for (const auto& pt : curves.curves[i].points) {
            s.x.push_back(pt.lambda);
            s.y.push_back(pt.estimate);
        }
        chart.series.push_back(std::move(s));
    }
    return svg::render(chart);
}

std::string risk_csv(const RiskCurve& curve, const std::vector<std::string>& comments) {
    std::ostringstream os;
    write_risk_csv(os, curve, comments);
    return os.str();
}

void status(std::ostream& out, const fs::path& path) { out << "wrote " << path.string() << "\n"; }

// ---------------------------------------------------------------------------
// Commands.

int cmd_multiplier(const RunConfig& cfg, std::ostream& out) {
    const auto specs = specs_or(cfg, standard_specs(cfg));
    const auto labels = unique_labels(specs);
    const auto ts = t_values(cfg);
    auto comments = provenance("multiplier", cfg.problem, cfg.sample, specs, labels);
    const std::string csv = multiplier_csv(cfg.problem, specs, ts, comments);
    if (cfg.out_given) {
        write_file(cfg.out / "multiplier.csv", csv);
        status(out, cfg.out / "multiplier.csv");
    } else {
        out << csv;
    }
    if (cfg.svg) {
        write_file(cfg.out / "multiplier.svg",
                   multiplier_svg("Multipliers, " + problem_line(cfg.problem), cfg.problem, specs, ts));
        if (cfg.out_given) status(out, cfg.out / "multiplier.svg");
    }
    return 0;
}

int cmd_risk_curve(const RunConfig& cfg, std::ostream& out) {
    const auto specs = specs_or(cfg, standard_specs(cfg));
    const auto labels = unique_labels(specs);
    const auto grid = lambda_values(cfg);
    const PairedCurves curves = paired_risk_curves(specs, 0, cfg.problem, grid, cfg.sample);

    auto comments = provenance("risk-curve", cfg.problem, cfg.sample, specs, labels);
    comments.push_back(fmt::format("replicates={}", cfg.sample.replicates));
    comments.push_back(fmt::format("common random numbers shared across all estimators and lambda"));
    std::vector<std::pair<fs::path, std::string>> files;
    for (std::size_t i = 0; i < specs.size(); ++i) {
        auto c = comments;
        c.push_back("estimator " + labels[i]);
        files.emplace_back(cfg.out / ("risk_" + labels[i] + ".csv"), risk_csv(curves.curves[i], c));
    }
    if (cfg.svg)
        files.emplace_back(cfg.out / "risk.svg",
                           risk_svg("Risks, " + problem_line(cfg.problem), curves, labels));
    for (const auto& [path, content] : files) {
        write_file(path, content);
        status(out, path);
    }
    out << "lambda";
    for (const auto& l : labels) out << "," << l;
    out << "\n";
    for (std::size_t j = 0; j < grid.size(); ++j) {
        out << fmt::format("{:.6g}", grid[j]);
        for (const auto& c : curves.curves) out << fmt::format(",{:.6g}", c.points[j].estimate);
        out << "\n";
    }
    return 0;
}

json truncation_entry(const EstimatorSpec& spec, const Problem& prob, const std::vector<double>& ts) {
    const auto tr = analysis::build_dominating_truncation(spec, prob, ts);
    json j = to_json(tr);
    j["base"] = spec.label();
    return j;
}

json problem_json(const Problem& prob) { return {{"p", prob.p}, {"k", prob.k}, {"m", prob.m}}; }

int cmd_dominance(const RunConfig& cfg, std::ostream& out) {
    const auto specs = specs_or(cfg, {EstimatorSpec::mle()});
    const auto ts = t_values(cfg);
    json j{{"problem", problem_json(cfg.problem)}, {"truncations", json::array()}};
    for (const auto& s : specs) j["truncations"].push_back(truncation_entry(s, cfg.problem, ts));
    if (specs.size() >= 2)
        j["midpoint"] = to_json(analysis::midpoint_dominance_check(specs[0], specs[1], cfg.problem, ts));
    const std::string text = j.dump(2) + "\n";
    if (cfg.out_given) {
        write_file(cfg.out / "dominance.json", text);
        status(out, cfg.out / "dominance.json");
    }
    out << text;
    return 0;
}

std::vector<analysis::VerificationReport> suite_specfun() {
    std::vector<double> z_linear{0.0};
    for (int i = 1; i <= 100; ++i) z_linear.push_back(0.5 * i);
    return {
        analysis::verify_ratio_properties({12.5}, {2.5}, z_linear),
        analysis::verify_ratio_properties({0.5, 1.0, 2.5, 5.0, 12.5, 25.0}, {0.5, 1.5, 2.5, 5.0},
                                          analysis::default_z_grid()),
        analysis::verify_recurrence({1.0, 5.0, 12.5}, {1.5, 2.5}, {0.1, 1.0, 10.0, 100.0}),
    };
}

int cmd_verify(const std::string& suite, const Resolved& res, std::ostream& out) {
    const RunConfig& cfg = res.cfg;
    const Problem& prob = cfg.problem;
    std::vector<analysis::VerificationReport> reports;
    json extra = json::object();

    if (suite == "specfun") {
        reports = suite_specfun();
    } else if (suite == "h-properties") {
        reports.push_back(analysis::verify_h_properties(prob, analysis::default_l_grid(prob), t_values(cfg),
                                                        lambda_values(cfg)));
    } else if (suite == "r1-inequality") {
        std::vector<std::pair<int, int>> pairs;
        if (res.problem_given) {
            pairs.emplace_back(prob.p, prob.k);
        } else {
            for (int p = 2; p <= 6; ++p)
                for (int k = 2; k <= 6; ++k) pairs.emplace_back(p, k);
        }
        for (const auto& [p, k] : pairs)
            reports.push_back(analysis::verify_inequality_r1(p, k, analysis::default_z_grid()));
    } else if (suite == "decomposition") {
        const auto specs = specs_or(cfg, {EstimatorSpec::unbiased(), EstimatorSpec::mle(),
                                          EstimatorSpec::boundary_uniform(cfg.l, cfg.radius)});
        const auto grid = cfg.lambda_grid ? cfg.lambda_grid->values()
                                          : std::vector<double>{0.0, prob.m / 2, prob.m};
        for (const auto& s : specs) {
            analysis::VerificationReport rep;
            rep.name = "risk decomposition " + s.label();
            rep.grid_description = fmt::format("{}; lambda: {} points; replicates={} seed={}",
                                               problem_line(prob), grid.size(), cfg.sample.replicates,
                                               cfg.sample.seed);
            for (double lam : grid) {
                const auto d = conditional_decomposition_check(s, lam, prob, cfg.sample);
                rep.record(d.agrees(), "|direct - decomposition| <= 4 SE", {{"lambda", lam}}, d.lhs, d.rhs);
            }
            reports.push_back(std::move(rep));
        }
    } else {
        const auto specs = specs_or(cfg, {EstimatorSpec::mle()});
        const auto ts = t_values(cfg);
        extra["truncations"] = json::array();
        for (const auto& s : specs) {
            const auto tr = analysis::build_dominating_truncation(s, prob, ts);
            json entry = to_json(tr);
            entry["base"] = s.label();
            extra["truncations"].push_back(entry);
            auto rep = analysis::midpoint_dominance_check(s, tr.spec, prob, ts);
            const auto h = make_multiplier(tr.spec, prob);
            for (double t : ts) {
                rep.record(h(t) <= envelope(t, prob) + analysis::kSlack, "truncation <= envelope",
                           {{"t", t}}, h(t), envelope(t, prob));
            }
            reports.push_back(std::move(rep));
        }
    }

    bool passed = true;
    json jr = json::array();
    for (const auto& r : reports) {
        if (!r.exploratory) passed = passed && r.passed;
        jr.push_back(to_json(r));
    }
    json j{{"suite", suite}, {"passed", passed}, {"problem", problem_json(prob)}, {"reports", jr}};
    for (const auto& [key, value] : extra.items()) j[key] = value;
    const std::string text = j.dump(2) + "\n";
    const fs::path path = cfg.out / fmt::format("verify_{}.json", suite);
    write_file(path, text);
    status(out, path);
    for (const auto& r : reports) {
        out << fmt::format("{} {} ({} checks, {} violations)\n",
                           r.exploratory ? "INFO" : (r.passed ? "PASS" : "FAIL"), r.name, r.checks,
                           r.violations.size());
    }
    out << (passed ? "suite passed" : "suite FAILED") << "\n";
    return passed ? 0 : 1;
}

struct FigureConfig {
    std::string tag;
    Problem problem;
    std::vector<EstimatorSpec> specs;
    /// (baseline index, challenger index) pairs reported in the summary.
    std::vector<std::pair<std::size_t, std::size_t>> gains;
};

std::vector<FigureConfig> figure_configs() {
    const auto ub = EstimatorSpec::unbiased();
    const auto mle = EstimatorSpec::mle();
    const auto bu = EstimatorSpec::boundary_uniform(0.0);
    return {
        {"p5_k10_m2", Problem(5, 10, 2.0), {ub, mle, bu}, {{1, 2}}},
        {"p5_k20_m2", Problem(5, 20, 2.0), {ub, mle, bu}, {{1, 2}}},
        {"p5_k20_m3", Problem(5, 20, 3.0), {ub, mle, bu}, {{1, 2}}},
        {"p3_k20_m3_a2.5", Problem(3, 20, 3.0), {ub, mle, bu, EstimatorSpec::boundary_uniform(0.0, 2.5)},
         {{1, 2}, {2, 3}}},
    };
}

int cmd_figures(const RunConfig& cfg, std::ostream& out) {
    std::vector<std::pair<fs::path, std::string>> files;
    std::string summary = fmt::format("# bsnr figures\n# seed={} replicates={}\n", cfg.sample.seed,
                                      cfg.sample.replicates);
    summary += "# gain = (R_baseline - R_challenger) / R_baseline on common random numbers\n";
    const auto ts = analysis::default_t_grid();
    for (const auto& fc : figure_configs()) {
        const auto labels = unique_labels(fc.specs);
        const auto grid = analysis::default_lambda_grid(fc.problem);
        const auto curves = paired_risk_curves(fc.specs, 0, fc.problem, grid, cfg.sample);
        auto comments = provenance("figures", fc.problem, cfg.sample, fc.specs, labels);
        files.emplace_back(cfg.out / (fc.tag + "_multiplier.csv"),
                           multiplier_csv(fc.problem, fc.specs, ts, comments));
        files.emplace_back(cfg.out / (fc.tag + "_multiplier.svg"),
                           multiplier_svg("Multipliers, " + problem_line(fc.problem), fc.problem, fc.specs, ts));
        comments.push_back(fmt::format("replicates={}", cfg.sample.replicates));
        for (std::size_t i = 0; i < fc.specs.size(); ++i) {
            auto c = comments;
            c.push_back("estimator " + labels[i]);
            files.emplace_back(cfg.out / (fc.tag + "_risk_" + labels[i] + ".csv"),
                               risk_csv(curves.curves[i], c));
        }
        files.emplace_back(cfg.out / (fc.tag + "_risk.svg"),
                           risk_svg("Risks, " + problem_line(fc.problem), curves, labels));

        for (const auto& [base, chal] : fc.gains) {
            const auto& rb = curves.curves[base].points;
            const auto& rc = curves.curves[chal].points;
            std::vector<double> gains;
            for (std::size_t j = 0; j < grid.size(); ++j)
                gains.push_back(100.0 * (rb[j].estimate - rc[j].estimate) / rb[j].estimate);
            const auto [lo, hi] = std::minmax_element(gains.begin(), gains.end());
            summary += fmt::format(
                "{} {} over {}: gain at lambda=0 {:.2f}%, at lambda={:g} {:.2f}%, range [{:.2f}%, {:.2f}%]\n",
                problem_line(fc.problem), labels[chal], labels[base], gains.front(), grid.back(),
                gains.back(), *lo, *hi);
        }
    }
    files.emplace_back(cfg.out / "summary.txt", summary);
    for (const auto& [path, content] : files) {
        write_file(path, content);
        status(out, path);
    }
    out << summary;
    return 0;
}

}  // namespace

std::vector<double> GridSpec::values() const {
    return log ? analysis::log_grid(lo, hi, n) : linear_grid(lo, hi, n);
}

std::string GridSpec::text() const { return fmt::format("{:g}:{:g}:{}{}", lo, hi, n, log ? ":log" : ""); }

GridSpec parse_grid(const std::string& text, const std::string& field) {
    const auto parts = split(text, ':');
    if (parts.size() != 3 && parts.size() != 4)
        throw ConfigurationError(fmt::format("{}: expected lo:hi:n or lo:hi:n:log, got '{}'", field, text));
    GridSpec g;
    g.lo = parse_real(parts[0], field);
    g.hi = parse_real(parts[1], field);
    std::size_t n = 0;
    const auto* end = parts[2].data() + parts[2].size();
    const auto [ptr, ec] = std::from_chars(parts[2].data(), end, n);
    if (ec != std::errc() || ptr != end || n == 0)
        throw ConfigurationError(fmt::format("{}: point count must be a positive integer, got '{}'", field, parts[2]));
    g.n = n;
    if (parts.size() == 4) {
        if (parts[3] != "log") throw ConfigurationError(fmt::format("{}: unknown spacing '{}'", field, parts[3]));
        g.log = true;
    }
    if (!std::isfinite(g.lo) || !std::isfinite(g.hi) || g.hi < g.lo)
        throw ConfigurationError(fmt::format("{}: need finite lo <= hi, got '{}'", field, text));
    if (g.log && !(g.lo > 0.0)) throw ConfigurationError(fmt::format("{}: log spacing needs lo > 0", field));
    return g;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Estimation of a normal mean with bounded signal-to-noise ratio", "bsnr"};
    app.require_subcommand(1);

    struct Command {
        CLI::App* app;
        Flags flags;
        Registered reg;
    };
    std::map<std::string, Command> commands;
    const std::vector<std::pair<std::string, std::string>> names{
        {"multiplier", "Tabulate multipliers h(t) over a t grid"},
        {"risk-curve", "Monte Carlo risk curves over a lambda grid"},
        {"dominance", "Envelope violations, truncations and the midpoint condition"},
        {"verify", "Run a verification suite"},
        {"figures", "Multiplier and risk plots for the four reference configurations"}};
    for (const auto& [name, help] : names) {
        auto& c = commands[name];
        c.app = app.add_subcommand(name, help);
        c.reg = register_flags(*c.app, c.flags);
    }
    commands["verify"]
        .app->add_option("suite", commands["verify"].flags.suite, "Suite name")
        ->required()
        ->check(CLI::IsMember(std::vector<std::string>(std::begin(kSuites), std::end(kSuites))));

    std::vector<std::string> argv_store{"bsnr"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& a : argv_store) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        for (auto& [name, c] : commands) {
            if (!c.app->parsed()) continue;
            const Resolved res = resolve(c.flags, c.reg);
            if (name == "multiplier") return cmd_multiplier(res.cfg, out);
            if (name == "risk-curve") return cmd_risk_curve(res.cfg, out);
            if (name == "dominance") return cmd_dominance(res.cfg, out);
            if (name == "verify") return cmd_verify(c.flags.suite, res, out);
            return cmd_figures(res.cfg, out);
        }
    } catch (const ConfigurationError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

}  // namespace snr::cli
