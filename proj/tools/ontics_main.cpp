#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "ontics/analysis.hpp"
#include "ontics/coloring.hpp"
#include "ontics/device.hpp"
#include "ontics/models.hpp"
#include "ontics/report.hpp"

namespace {

using namespace ontics;

struct RunConfig {
    std::uint64_t seed = 1;
    long long samples = 1'000'000;
    double epsilon = 1e-9;
    std::string format = "text";
    std::string model = "all";
};

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::uint64_t name_salt(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::vector<models::Model> all_models() {
    std::vector<models::Model> v = models::qubit_models();
    v.push_back(device::aerts_coarse_model());
    return v;
}

std::vector<models::Model> select_models(const std::string& name) {
    std::vector<models::Model> all = all_models();
    if (name == "all") return all;
    for (const auto& m : all)
        if (m.name == name) return {m};
    throw UsageError("unknown model: " + name);
}

PureState tilted_state() { return qubit(std::cos(M_PI / 8), std::sin(M_PI / 8)); }

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

bool cmd_verify(const RunConfig& cfg, const std::string& model_name, int pairs,
                report::Writer& out) {
    bool all_pass = true;
    for (const auto& m : select_models(model_name)) {
        std::uint64_t base = mix_seed(cfg.seed, name_salt(m.name));
        Rng rng(base);
        for (int r = 0; r < pairs; ++r) {
            PureState psi = random_state(rng, 2);
            PureState phi = random_state(rng, 2);
            EpistemicState mu = m.epistemic(psi);
            IndicatorFunction xi = m.pvm_indicator(ray_test(phi));
            Integrator integ = Integrator::automatic(cfg.samples, mix_seed(base, 0x9000 + r));
            PredictResult pr = predict(mu, xi, 0, integ);
            double target = born_probability(psi, PovmEffect(phi));
            double diff = std::abs(pr.estimate - target);
            double tol = std::max(3.0 * pr.standard_error, 1e-3);
            bool ok = diff <= tol;
            all_pass = all_pass && ok;

            report::ReportRecord rec;
            rec.check = "born-reproduction";
            rec.model = m.name;
            rec.inputs = "pair=" + std::to_string(r);
            rec.estimate = pr.estimate;
            rec.standard_error = pr.standard_error;
            rec.verdict = ok ? "pass" : "fail";
            rec.claim = "predicted outcome frequency matches the Born probability of the test";
            rec.detail = "target=" + report::format_double_short(target) +
                         " diff=" + report::format_double_short(diff) +
                         " tol=" + report::format_double_short(tol) + (pr.exact ? " exact" : "");
            out.write(rec);
        }
    }
    return all_pass;
}

// ---------------------------------------------------------------------------
// analyze
// ---------------------------------------------------------------------------

std::string lemma_claim(const std::string& name) {
    if (name.rfind("support-subset", 0) == 0)
        return "ontic states reachable by a preparation always pass its own test";
    if (name.rfind("orthogonal-disjoint", 0) == 0)
        return "orthogonal preparations share no ontic states";
    if (name.rfind("pvm-cover", 0) == 0)
        return "a complete sharp test responds for every ontic state";
    if (name.rfind("pvm-disjoint", 0) == 0)
        return "sharp outcome supports do not overlap";
    if (name.rfind("preparation-convexity", 0) == 0)
        return "every convex decomposition of a mixed state reproduces its statistics";
    if (name.rfind("measurement-convexity", 0) == 0)
        return "a mixed effect responds as the convex mixture of its parts";
    return "structural support property holds";
}

bool analyze_lemmas(const models::Model& m, const RunConfig& cfg, report::Writer& out) {
    auto suite = analysis::run_lemma_suite(m, cfg.samples, mix_seed(cfg.seed, name_salt(m.name)),
                                           cfg.epsilon);
    for (const auto& c : suite.checks) {
        report::ReportRecord rec;
        rec.check = "lemma/" + c.name;
        rec.model = m.name;
        rec.inputs = "samples=" + std::to_string(cfg.samples);
        rec.estimate = c.result.value;
        rec.standard_error = 0.0;
        rec.verdict = c.result.pass ? "pass" : "fail";
        rec.claim = lemma_claim(c.name);
        rec.detail = c.result.detail;
        out.write(rec);
    }
    return suite.all_pass;
}

void analyze_deficiency(const models::Model& m, const RunConfig& cfg, report::Writer& out) {
    auto rep = analysis::detect_deficiency(m, tilted_state(), cfg.samples,
                                           mix_seed(cfg.seed, name_salt(m.name) ^ 0xDEF),
                                           cfg.epsilon);
    report::ReportRecord rec;
    rec.check = "deficiency";
    rec.model = m.name;
    rec.inputs = "state=tilted samples=" + std::to_string(cfg.samples);
    rec.estimate = rep.support.missing_fraction;
    rec.standard_error = rep.support.confidence / 3.0;
    rec.verdict = rep.deficient ? "deficient" : "not-deficient";
    rec.claim = "some ontic states pass the test yet cannot be prepared that way";
    rec.detail = std::string("relation=") + analysis::to_string(rep.support.relation) +
                 " mu=" + report::format_double_short(rep.support.mu_fraction) +
                 " xi=" + report::format_double_short(rep.support.xi_fraction) +
                 " lost=" + report::format_double_short(rep.support.lost_fraction);
    out.write(rec);
}

void analyze_prep_contextuality(const models::Model& m, const RunConfig& cfg,
                                report::Writer& out) {
    auto rep = analysis::demo_preparation_contextuality(
        m, analysis::standard_prep_pair(), cfg.samples,
        mix_seed(cfg.seed, name_salt(m.name) ^ 0xA0), cfg.epsilon);
    report::ReportRecord rec;
    rec.check = "prep-contextuality";
    rec.model = m.name;
    rec.inputs = "pair=basis-vs-tilted samples=" + std::to_string(cfg.samples);
    rec.estimate = rep.fraction_a;
    rec.standard_error = analysis::fraction_confidence(rep.fraction_a, cfg.samples) / 3.0;
    rec.verdict = rep.contextual ? "contextual" : "non-contextual";
    rec.claim = "the epistemic state remembers which ensemble realized the mixed state";
    rec.detail = "covered_a=" + report::format_double_short(rep.fraction_a) +
                 " covered_b=" + report::format_double_short(rep.fraction_b) +
                 (rep.atoms_differ ? " atoms-differ" : "");
    out.write(rec);
}

void analyze_meas_contextuality(const models::Model& m, const RunConfig& cfg,
                                report::Writer& out) {
    auto rep = analysis::demo_measurement_contextuality(
        m, analysis::standard_meas_pair(), cfg.samples,
        mix_seed(cfg.seed, name_salt(m.name) ^ 0xB0), cfg.epsilon);
    report::ReportRecord rec;
    rec.check = "meas-contextuality";
    rec.model = m.name;
    rec.inputs = "pair=basis-vs-tilted samples=" + std::to_string(cfg.samples);
    rec.estimate = rep.max_pointwise_diff;
    rec.standard_error = 0.0;
    rec.verdict = rep.contextual ? "contextual" : "non-contextual";
    rec.claim = "the indicator remembers which mixing procedure realized the effect";
    rec.detail = "support_a=" + report::format_double_short(rep.fraction_a) +
                 " support_b=" + report::format_double_short(rep.fraction_b);
    out.write(rec);
}

void analyze_update_rule(const models::Model& m, const RunConfig& cfg, report::Writer& out) {
    auto rep = analysis::check_update_rule_violation(
        m, basis_state(2, 0), tilted_state(), cfg.samples,
        mix_seed(cfg.seed, name_salt(m.name) ^ 0xC0), cfg.epsilon);
    report::ReportRecord rec;
    rec.check = "update-rule";
    rec.model = m.name;
    rec.inputs = "prepare=tilted filter=basis0 samples=" + std::to_string(cfg.samples);
    rec.estimate = static_cast<double>(rep.draws);
    rec.standard_error = 0.0;
    rec.verdict = rep.witness_found ? "deficient" : "not-deficient";
    rec.claim = "a measure-and-filter update cannot rebuild the filtered preparation";
    rec.detail = rep.witness_found
                     ? "witness found after " + std::to_string(rep.draws) + " draws"
                     : "no witness in " + std::to_string(rep.draws) + " draws";
    out.write(rec);
}

void analyze_determinism_class(const models::Model& m, const RunConfig& cfg,
                               report::Writer& out) {
    int n = static_cast<int>(std::min<long long>(cfg.samples, 100000));
    device::DeviceDeterminismReport rep;
    if (m.name == "aerts") {
        std::vector<EpistemicState> settings;
        settings.push_back(device::aerts_device_epistemic(bloch_from_state(tilted_state())));
        Rng dir(mix_seed(cfg.seed, 0xD2));
        settings.push_back(device::aerts_device_epistemic(BlochVector(dir.unit_sphere())));
        rep = device::classify_device_determinism(
            device::aerts_joint_indicator(), ambient_sampler(device::aerts_system_space()),
            settings, n, mix_seed(cfg.seed, name_salt(m.name) ^ 0xDC));
    } else {
        IndicatorFunction lifted = device::lift_to_device(m.test_indicator(tilted_state()));
        rep = device::classify_device_determinism(
            lifted, ambient_sampler(m.space), {device::trivial_device_state()}, n,
            mix_seed(cfg.seed, name_salt(m.name) ^ 0xDC));
    }
    report::ReportRecord rec;
    rec.check = "determinism-class";
    rec.model = m.name;
    rec.inputs = "samples=" + std::to_string(n);
    rec.estimate = rep.value;
    rec.standard_error = 0.0;
    rec.verdict = "pass";
    rec.claim = "locates whether outcomes are fixed by the setting, the device state, or not at all";
    rec.detail = std::string("class=") + device::to_string(rep.cls);
    out.write(rec);
}

bool cmd_analyze(const RunConfig& cfg, const std::string& check, report::Writer& out) {
    static const std::vector<std::string> known = {"lemmas",
                                                   "deficiency",
                                                   "prep-contextuality",
                                                   "meas-contextuality",
                                                   "update-rule",
                                                   "determinism-class"};
    std::vector<std::string> selected;
    if (check == "all") {
        selected = known;
    } else if (std::find(known.begin(), known.end(), check) != known.end()) {
        selected = {check};
    } else {
        throw UsageError("unknown check: " + check);
    }

    bool ok = true;
    for (const auto& m : select_models(cfg.model)) {
        for (const auto& c : selected) {
            if (c == "lemmas") ok = analyze_lemmas(m, cfg, out) && ok;
            else if (c == "deficiency") analyze_deficiency(m, cfg, out);
            else if (c == "prep-contextuality") analyze_prep_contextuality(m, cfg, out);
            else if (c == "meas-contextuality") analyze_meas_contextuality(m, cfg, out);
            else if (c == "update-rule") analyze_update_rule(m, cfg, out);
            else if (c == "determinism-class") analyze_determinism_class(m, cfg, out);
        }
    }
    return ok;
}

// ---------------------------------------------------------------------------
// ks-color
// ---------------------------------------------------------------------------

std::string color_string(const coloring::Coloring& c) {
    std::string s;
    s.reserve(c.colors.size());
    for (auto col : c.colors) s += col == coloring::Color::Green ? 'G' : 'R';
    return s;
}

bool cmd_kscolor(const RunConfig& cfg, const std::string& path, bool enumerate_all,
                 double tolerance, report::Writer& out) {
    (void)cfg;
    coloring::RaySet rays = coloring::load_ray_set(path);
    coloring::OrthogonalityGraph g = coloring::build_graph(rays, tolerance);
    std::vector<coloring::Triad> triads = coloring::enumerate_triads(g);
    coloring::SearchResult res = coloring::search_coloring(g, triads, enumerate_all);
    std::vector<int> witness = coloring::contextual_witness(g, triads);

    report::ReportRecord rec;
    rec.check = "ks-color";
    rec.model = "-";
    rec.inputs = path + " tol=" + report::format_double_short(tolerance);
    rec.estimate = static_cast<double>(res.explored_nodes);
    rec.standard_error = 0.0;
    rec.verdict = res.satisfiable ? "SAT" : "UNSAT";
    rec.claim = "one green ray per orthogonal triad is consistent across the whole set";
    rec.detail = "rays=" + std::to_string(rays.size()) +
                 " edges=" + std::to_string(g.edges.size()) +
                 " triads=" + std::to_string(triads.size()) +
                 " shared-vertices=" + std::to_string(witness.size()) +
                 " nodes=" + std::to_string(res.explored_nodes);
    if (res.satisfiable && !enumerate_all)
        rec.detail += " coloring=" + color_string(*res.coloring);
    out.write(rec);

    if (enumerate_all) {
        for (std::size_t i = 0; i < res.solutions.size(); ++i) {
            report::ReportRecord sol;
            sol.check = "ks-color/solution";
            sol.model = "-";
            sol.inputs = path;
            sol.estimate = static_cast<double>(i);
            sol.standard_error = 0.0;
            sol.verdict = "SAT";
            sol.claim = "a complete red/green assignment satisfying all three rules";
            sol.detail = "coloring=" + color_string(res.solutions[i]);
            out.write(sol);
        }
    }
    return true;
}

}  // namespace

int main(int argc, char** argv) {
    RunConfig cfg;

    CLI::App app{"ontics: ontological-model simulation and verification"};
    app.require_subcommand(1);
    app.add_option("--seed", cfg.seed, "base RNG seed")->capture_default_str();
    app.add_option("--samples", cfg.samples, "Monte Carlo / support sample count")
        ->check(CLI::Range(1000LL, std::numeric_limits<long long>::max()))
        ->capture_default_str();
    app.add_option("--epsilon", cfg.epsilon, "support threshold, in (0, 1e-3]")
        ->check(CLI::Validator(
            [](std::string& s) {
                double v = std::stod(s);
                return v > 0.0 && v <= 1e-3 ? std::string{}
                                            : std::string{"epsilon must be in (0, 1e-3]"};
            },
            "EPSILON"))
        ->capture_default_str();
    app.add_option("--format", cfg.format, "output format")
        ->check(CLI::IsMember({"json", "csv", "text"}))
        ->capture_default_str();
    app.add_option("--model", cfg.model, "model name or 'all'")->capture_default_str();

    auto* verify = app.add_subcommand("verify", "check Born-rule reproduction");
    verify->fallthrough();
    std::string verify_model;
    verify->add_option("model", verify_model, "model name or 'all' (overrides --model)");
    int pairs = 100;
    verify->add_option("--pairs", pairs, "random state/test pairs per model")
        ->check(CLI::Range(1, 1000000))
        ->capture_default_str();

    auto* analyze = app.add_subcommand("analyze", "run structural checks");
    analyze->fallthrough();
    std::string analyze_check;
    analyze
        ->add_option("check", analyze_check,
                     "lemmas | deficiency | prep-contextuality | meas-contextuality | "
                     "update-rule | determinism-class | all")
        ->required();

    auto* kscolor = app.add_subcommand("ks-color", "color an orthogonality graph");
    kscolor->fallthrough();
    std::string ray_path;
    kscolor->add_option("file", ray_path, "ray-set file")->required();
    bool enumerate_all = false;
    kscolor->add_flag("--enumerate", enumerate_all, "list every valid coloring");
    double ortho_tol = coloring::kOrthoTolDefault;
    kscolor->add_option("--tolerance", ortho_tol, "orthogonality tolerance, in (0, 0.1]")
        ->check(CLI::Validator(
            [](std::string& s) {
                double v = std::stod(s);
                return v > 0.0 && v <= 0.1 ? std::string{}
                                           : std::string{"tolerance must be in (0, 0.1]"};
            },
            "TOL"))
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        report::Writer out(std::cout, report::parse_format(cfg.format));
        bool ok = true;
        if (verify->parsed()) {
            std::string name = verify_model.empty() ? cfg.model : verify_model;
            ok = cmd_verify(cfg, name, pairs, out);
        } else if (analyze->parsed()) {
            ok = cmd_analyze(cfg, analyze_check, out);
        } else if (kscolor->parsed()) {
            ok = cmd_kscolor(cfg, ray_path, enumerate_all, ortho_tol, out);
        }
        return ok ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
