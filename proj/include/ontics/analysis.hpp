#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ontics/models.hpp"
#include "ontics/ontology.hpp"

namespace ontics::analysis {

// Shared result shape for the support lemmas and fixture checks.
struct CheckResult {
    bool pass = false;
    std::string detail;
    double value = 0.0;      // whatever quantity decided the verdict
    double tolerance = 0.0;  // the bound it was compared against
    std::optional<OnticPoint> witness;
};

// ---------------------------------------------------------------------------
// Support lemmas
// ---------------------------------------------------------------------------

// Every ontic state a preparation can produce must make the corresponding
// test outcome fire: sampling the epistemic state may never leave the
// indicator's support.
inline CheckResult check_support_subset(const EpistemicState& mu, const IndicatorFunction& xi,
                                        int outcome, long long n, std::uint64_t seed,
                                        double eps = kSupportEps) {
    Rng rng(seed);
    OnticPoint pt;
    for (long long i = 0; i < n; ++i) {
        mu.sample_into(pt, rng);
        double v = xi(outcome, pt);
        if (v <= eps)
            return {false, "sampled ontic state outside the indicator support", v, eps, pt};
    }
    return {true, "all sampled ontic states inside the indicator support", 1.0, eps, std::nullopt};
}

// Orthogonal preparations may share no ontic states.
inline CheckResult check_orthogonal_disjoint(const EpistemicState& mu1, const EpistemicState& mu2,
                                             long long n, std::uint64_t seed,
                                             double eps = kSupportEps) {
    Rng rng(seed);
    OnticPoint pt;
    for (long long i = 0; i < n; ++i) {
        mu1.sample_into(pt, rng);
        if (mu2.support_contains(pt, eps))
            return {false, "ontic state shared by orthogonal preparations", 1.0, 0.0, pt};
        mu2.sample_into(pt, rng);
        if (mu1.support_contains(pt, eps))
            return {false, "ontic state shared by orthogonal preparations", 1.0, 0.0, pt};
    }
    return {true, "supports of orthogonal preparations are disjoint", 0.0, 0.0, std::nullopt};
}

// A complete projective measurement must respond somewhere for every ontic
// state: the outcome probabilities sum to one and some outcome support
// contains the state, so the supports jointly cover the space.
inline CheckResult check_pvm_cover(const IndicatorFunction& xi, long long n, std::uint64_t seed,
                                   double eps = kSupportEps) {
    Rng rng(seed);
    PointSampler ambient = ambient_sampler(xi.space());
    OnticPoint pt;
    for (long long i = 0; i < n; ++i) {
        ambient(pt, rng);
        double sum = 0.0;
        bool covered = false;
        for (int k = 0; k < xi.outcomes(); ++k) {
            double v = xi(k, pt);
            sum += v;
            covered = covered || v > eps;
        }
        if (sum < 1.0 - 1e-10 || !covered)
            return {false, "ontic state outside every outcome support", sum, 1.0 - 1e-10, pt};
    }
    return {true, "outcome supports cover the ontic space", 1.0, 1.0 - 1e-10, std::nullopt};
}

// For outcome-deterministic measurements the outcome supports are pairwise
// disjoint: each ontic state answers exactly one way.
inline CheckResult check_pvm_disjoint(const IndicatorFunction& xi, long long n, std::uint64_t seed,
                                      double eps = kSupportEps) {
    if (!xi.deterministic())
        throw std::invalid_argument("check_pvm_disjoint: indicator is not outcome-deterministic");
    Rng rng(seed);
    PointSampler ambient = ambient_sampler(xi.space());
    OnticPoint pt;
    for (long long i = 0; i < n; ++i) {
        ambient(pt, rng);
        int hits = 0;
        for (int k = 0; k < xi.outcomes(); ++k) hits += xi(k, pt) > eps ? 1 : 0;
        if (hits > 1)
            return {false, "ontic state inside two outcome supports", static_cast<double>(hits), 1.0, pt};
    }
    return {true, "outcome supports are pairwise disjoint", 1.0, 1.0, std::nullopt};
}

// The epistemic state built from any convex decomposition of rho must still
// reproduce rho's statistics.
inline CheckResult check_convexity_preparation(const models::Model& model,
                                               const DensityOperator& rho,
                                               const std::vector<double>& weights,
                                               const std::vector<PureState>& states,
                                               int effect_count, const Integrator& integ,
                                               std::uint64_t seed) {
    std::vector<std::pair<double, EpistemicState>> parts;
    for (std::size_t i = 0; i < states.size(); ++i)
        parts.emplace_back(weights.at(i), model.epistemic(states[i]));
    EpistemicState mu = EpistemicState::mixture(std::move(parts));

    Rng rng(seed);
    double worst = 0.0, worst_tol = 0.0;
    for (int j = 0; j < effect_count; ++j) {
        PureState probe = random_state(rng, rho.dim());
        IndicatorFunction xi = model.pvm_indicator(ray_test(probe));
        Integrator sub = integ;
        sub.seed = mix_seed(integ.seed, 0x500 + j);
        PredictResult r = predict(mu, xi, 0, sub);
        double target = born_probability(rho, PovmEffect(probe));
        double diff = std::abs(r.estimate - target);
        double tol = std::max(3.0 * r.standard_error, 1e-9);
        if (diff - tol > worst - worst_tol) {
            worst = diff;
            worst_tol = tol;
        }
        if (diff > tol)
            return {false, "decomposition fails to reproduce the mixed-state statistics", diff, tol,
                    std::nullopt};
    }
    return {true, "decomposition reproduces the mixed-state statistics", worst, worst_tol,
            std::nullopt};
}

// Outcome-wise convex combination of indicator functions.
inline IndicatorFunction convex_combine_indicators(const std::vector<double>& weights,
                                                   const std::vector<IndicatorFunction>& parts) {
    if (parts.empty() || weights.size() != parts.size())
        throw std::invalid_argument("convex_combine_indicators: size mismatch");
    double sum = 0.0;
    for (double w : weights) {
        if (w < -1e-12) throw std::invalid_argument("convex_combine_indicators: negative weight");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw std::invalid_argument("convex_combine_indicators: weights do not sum to 1");
    for (const auto& p : parts)
        if (p.space() != parts.front().space() || p.outcomes() != parts.front().outcomes())
            throw std::invalid_argument("convex_combine_indicators: incompatible indicators");
    auto shared_parts = std::make_shared<std::vector<IndicatorFunction>>(parts);
    auto shared_weights = std::make_shared<std::vector<double>>(weights);
    auto eval = [shared_parts, shared_weights](int k, const OnticPoint& pt) {
        double acc = 0.0;
        for (std::size_t i = 0; i < shared_parts->size(); ++i)
            acc += (*shared_weights)[i] * (*shared_parts)[i](k, pt);
        return acc;
    };
    return IndicatorFunction(parts.front().space(), parts.front().outcomes(), eval, false);
}

// The indicator of a convex combination of effects must equal the matching
// combination of the effects' indicators, ontic state by ontic state.
inline CheckResult check_convexity_measurement(const IndicatorFunction& claim,
                                               const std::vector<double>& weights,
                                               const std::vector<IndicatorFunction>& parts,
                                               long long n, std::uint64_t seed,
                                               double tol = kDeterminismTol) {
    IndicatorFunction combined = convex_combine_indicators(weights, parts);
    Rng rng(seed);
    PointSampler ambient = ambient_sampler(claim.space());
    OnticPoint pt;
    double worst = 0.0;
    for (long long i = 0; i < n; ++i) {
        ambient(pt, rng);
        double diff = std::abs(claim(0, pt) - combined(0, pt));
        worst = std::max(worst, diff);
        if (diff > tol)
            return {false, "indicator differs from the convex combination", diff, tol, pt};
    }
    return {true, "indicator equals the convex combination pointwise", worst, tol, std::nullopt};
}

// ---------------------------------------------------------------------------
// Deficiency
// ---------------------------------------------------------------------------

enum class SupportRelation { Equal, StrictSubset, Disjoint, Overlapping };

inline const char* to_string(SupportRelation r) {
    switch (r) {
        case SupportRelation::Equal: return "equal";
        case SupportRelation::StrictSubset: return "strict-subset";
        case SupportRelation::Disjoint: return "disjoint";
        case SupportRelation::Overlapping: return "overlapping";
    }
    return "?";
}

// How the support of a preparation's epistemic state sits inside the support
// of its own test indicator, measured against the ambient measure.
struct SupportReport {
    SupportRelation relation = SupportRelation::Equal;
    double mu_fraction = 0.0;       // ambient fraction inside the epistemic support
    double xi_fraction = 0.0;       // ambient fraction inside the indicator support
    double missing_fraction = 0.0;  // indicator support not reachable by the preparation
    double lost_fraction = 0.0;     // epistemic support the indicator misses (should be 0)
    double confidence = 0.0;        // 3-sigma radius on missing_fraction
    long long samples = 0;
    bool atoms_inside = true;  // every epistemic atom lies inside the indicator support
};

struct DeficiencyReport {
    SupportReport support;
    bool deficient = false;
};

inline double fraction_confidence(double f, long long n) {
    double binom = 3.0 * std::sqrt(std::max(f * (1.0 - f), 0.0) / static_cast<double>(n));
    return std::max(binom, 3.0 / static_cast<double>(n));  // rule of three near 0
}

// Compares the reachable ontic states with the testable ones for a single
// preparation. A strictly larger indicator support means the model is
// deficient at psi.
inline DeficiencyReport detect_deficiency(const models::Model& model, const PureState& psi,
                                          long long n, std::uint64_t seed,
                                          double eps = kSupportEps) {
    EpistemicState mu = model.epistemic(psi);
    IndicatorFunction xi = model.test_indicator(psi);

    Rng rng(seed);
    PointSampler ambient = ambient_sampler(mu.space());
    OnticPoint pt;
    long long in_mu = 0, in_xi = 0, in_xi_only = 0, in_mu_only = 0, in_both = 0;
    for (long long i = 0; i < n; ++i) {
        ambient(pt, rng);
        bool m = mu.support_contains(pt, eps);
        bool x = xi(0, pt) > eps;
        in_mu += m;
        in_xi += x;
        in_xi_only += x && !m;
        in_mu_only += m && !x;
        in_both += m && x;
    }

    SupportReport s;
    s.samples = n;
    s.mu_fraction = static_cast<double>(in_mu) / n;
    s.xi_fraction = static_cast<double>(in_xi) / n;
    s.missing_fraction = static_cast<double>(in_xi_only) / n;
    s.lost_fraction = static_cast<double>(in_mu_only) / n;
    s.confidence = fraction_confidence(s.missing_fraction, n);

    std::vector<detail::ExpansionTerm> terms;
    if (detail::expand_state(mu, terms)) {
        for (const auto& t : terms) {
            if (!t.open.empty()) continue;  // interval coordinates cover their whole leaf
            if (xi(0, t.point) <= eps) s.atoms_inside = false;
        }
    }

    bool missing = s.missing_fraction > s.confidence;
    bool lost = s.lost_fraction > fraction_confidence(s.lost_fraction, n);
    if (in_both == 0 && in_mu > 0 && in_xi > 0)
        s.relation = SupportRelation::Disjoint;
    else if (missing && lost)
        s.relation = SupportRelation::Overlapping;
    else if (missing)
        s.relation = SupportRelation::StrictSubset;
    else
        s.relation = SupportRelation::Equal;

    return {s, missing};
}

// ---------------------------------------------------------------------------
// Contextuality demonstrations
// ---------------------------------------------------------------------------

// A convex ensemble of pure states, with a label naming the procedure.
struct EnsembleContext {
    std::vector<double> weights;
    std::vector<PureState> states;
    std::string label;
};

inline DensityOperator realized_state(const EnsembleContext& c) {
    return convex_combine(c.weights, c.states);
}

inline PovmEffect realized_effect(const EnsembleContext& c) {
    std::vector<PovmEffect> effects;
    effects.reserve(c.states.size());
    for (const auto& s : c.states) effects.emplace_back(s);
    return convex_combine(c.weights, effects);
}

// Two preparation procedures for the same density operator.
struct PrepContextPair {
    EnsembleContext a, b;
    DensityOperator realized;
};

inline PrepContextPair make_prep_pair(EnsembleContext a, EnsembleContext b) {
    DensityOperator ra = realized_state(a), rb = realized_state(b);
    if ((ra.matrix() - rb.matrix()).cwiseAbs().maxCoeff() > 1e-12)
        throw std::invalid_argument("make_prep_pair: contexts realize different states");
    return {std::move(a), std::move(b), std::move(ra)};
}

// Two mixing procedures for the same POVM effect.
struct MeasContextPair {
    EnsembleContext a, b;
    PovmEffect realized;
};

inline MeasContextPair make_meas_pair(EnsembleContext a, EnsembleContext b) {
    PovmEffect ea = realized_effect(a), eb = realized_effect(b);
    if ((ea.matrix() - eb.matrix()).cwiseAbs().maxCoeff() > 1e-12)
        throw std::invalid_argument("make_meas_pair: contexts realize different effects");
    return {std::move(a), std::move(b), std::move(ea)};
}

// The standard qubit fixture: one ensemble mixes the computational basis,
// the other mixes the pair tilted 22.5 degrees off the z axis. Both realize
// diag(cos^2 pi/8, sin^2 pi/8); the tilted Bloch vectors are 90 degrees
// apart, so their hemisphere union leaves a quarter of the sphere uncovered.
inline EnsembleContext basis_ensemble() {
    double c2 = std::cos(M_PI / 8) * std::cos(M_PI / 8);
    return {{c2, 1.0 - c2}, {basis_state(2, 0), basis_state(2, 1)}, "basis mix"};
}

inline EnsembleContext tilted_ensemble() {
    double c = std::cos(M_PI / 8), s = std::sin(M_PI / 8);
    return {{0.5, 0.5}, {qubit(c, s), qubit(c, -s)}, "tilted mix"};
}

inline PrepContextPair standard_prep_pair() {
    return make_prep_pair(basis_ensemble(), tilted_ensemble());
}

inline MeasContextPair standard_meas_pair() {
    return make_meas_pair(basis_ensemble(), tilted_ensemble());
}

struct ContextualityReport {
    bool contextual = false;
    double fraction_a = 0.0;  // ambient fraction covered by context a
    double fraction_b = 0.0;  // ambient fraction covered by context b
    double max_pointwise_diff = 0.0;
    bool atoms_differ = false;
    std::string detail;
};

inline EpistemicState context_epistemic(const models::Model& model, const EnsembleContext& c) {
    std::vector<std::pair<double, EpistemicState>> parts;
    for (std::size_t i = 0; i < c.states.size(); ++i)
        parts.emplace_back(c.weights[i], model.epistemic(c.states[i]));
    return EpistemicState::mixture(std::move(parts));
}

inline IndicatorFunction context_indicator(const models::Model& model, const EnsembleContext& c) {
    std::vector<IndicatorFunction> parts;
    for (const auto& s : c.states) parts.push_back(model.test_indicator(s));
    return convex_combine_indicators(c.weights, parts);
}

// Does the epistemic state remember which ensemble realized the mixed state?
// Contextual when one context's samples escape the other's support (or the
// finite atom sets differ).
inline ContextualityReport demo_preparation_contextuality(const models::Model& model,
                                                          const PrepContextPair& pair, long long n,
                                                          std::uint64_t seed,
                                                          double eps = kSupportEps) {
    EpistemicState mu_a = context_epistemic(model, pair.a);
    EpistemicState mu_b = context_epistemic(model, pair.b);

    ContextualityReport rep;

    // Ambient covered fractions (meaningful for density-backed supports).
    Rng rng(seed);
    PointSampler ambient = ambient_sampler(mu_a.space());
    OnticPoint pt;
    long long ca = 0, cb = 0;
    for (long long i = 0; i < n; ++i) {
        ambient(pt, rng);
        ca += mu_a.support_contains(pt, eps);
        cb += mu_b.support_contains(pt, eps);
    }
    rep.fraction_a = static_cast<double>(ca) / n;
    rep.fraction_b = static_cast<double>(cb) / n;

    // Fractions that differ beyond the confidence radius already separate
    // the supports.
    double radius = fraction_confidence(rep.fraction_a, n) + fraction_confidence(rep.fraction_b, n);
    rep.contextual = std::abs(rep.fraction_a - rep.fraction_b) > radius;

    // Cross-support test: sample each context, look for escapes. This also
    // catches supports of equal ambient measure and atom-backed states.
    Rng cross(mix_seed(seed, 0xA));
    for (long long i = 0; i < n && !rep.contextual; ++i) {
        mu_a.sample_into(pt, cross);
        if (!mu_b.support_contains(pt, eps)) rep.contextual = true;
        if (rep.contextual) break;
        mu_b.sample_into(pt, cross);
        if (!mu_a.support_contains(pt, eps)) rep.contextual = true;
    }

    // Atom sets, when both states are finitely expandable.
    std::vector<detail::ExpansionTerm> ta, tb;
    if (detail::expand_state(mu_a, ta) && detail::expand_state(mu_b, tb)) {
        auto term_matches = [](const detail::ExpansionTerm& x, const detail::ExpansionTerm& y) {
            if (x.open.size() != y.open.size() ||
                !std::equal(x.open.begin(), x.open.end(), y.open.begin()))
                return false;
            for (int i = 0; i < x.point.size(); ++i) {
                bool open = std::find(x.open.begin(), x.open.end(), i) != x.open.end();
                if (!open && !coordinate_equal(x.point.coords[i], y.point.coords[i])) return false;
            }
            return true;
        };
        auto covered = [&](const std::vector<detail::ExpansionTerm>& xs,
                           const std::vector<detail::ExpansionTerm>& ys) {
            for (const auto& x : xs) {
                bool found = false;
                for (const auto& y : ys) found = found || term_matches(x, y);
                if (!found) return false;
            }
            return true;
        };
        rep.atoms_differ = !(covered(ta, tb) && covered(tb, ta));
        rep.contextual = rep.contextual || rep.atoms_differ;
    }

    rep.detail = rep.contextual ? "epistemic state depends on the preparation context"
                                : "contexts share one epistemic state";
    return rep;
}

// Does the indicator remember which mixing procedure realized the effect?
inline ContextualityReport demo_measurement_contextuality(const models::Model& model,
                                                          const MeasContextPair& pair, long long n,
                                                          std::uint64_t seed,
                                                          double eps = kSupportEps,
                                                          double tol = kDeterminismTol) {
    IndicatorFunction xi_a = context_indicator(model, pair.a);
    IndicatorFunction xi_b = context_indicator(model, pair.b);

    ContextualityReport rep;
    Rng rng(seed);
    PointSampler ambient = ambient_sampler(xi_a.space());
    OnticPoint pt;
    long long ca = 0, cb = 0;
    for (long long i = 0; i < n; ++i) {
        ambient(pt, rng);
        double va = xi_a(0, pt), vb = xi_b(0, pt);
        ca += va > eps;
        cb += vb > eps;
        rep.max_pointwise_diff = std::max(rep.max_pointwise_diff, std::abs(va - vb));
    }
    rep.fraction_a = static_cast<double>(ca) / n;
    rep.fraction_b = static_cast<double>(cb) / n;
    rep.contextual = rep.max_pointwise_diff > tol;
    rep.detail = rep.contextual ? "indicator depends on the measurement context"
                                : "contexts share one indicator";
    return rep;
}

// ---------------------------------------------------------------------------
// State-update failure in deficient models
// ---------------------------------------------------------------------------

struct UpdateRuleReport {
    bool witness_found = false;
    std::optional<OnticPoint> witness;
    long long draws = 0;
};

// Measure-and-filter update: prepare phi, test for psi, keep on success. In a
// deficient model some kept ontic states were never preparable as psi, so
// conditioning the epistemic state on the test cannot give mu(.|psi). The
// witness is a phi-sample that passes the test yet lies outside psi's
// support.
inline UpdateRuleReport check_update_rule_violation(const models::Model& model,
                                                    const PureState& psi, const PureState& phi,
                                                    long long n, std::uint64_t seed,
                                                    double eps = kSupportEps) {
    double ov = overlap(psi, phi);
    if (ov < 1e-10 || ov > 1.0 - 1e-10)
        throw std::invalid_argument(
            "check_update_rule_violation: states must be neither equal nor orthogonal");

    EpistemicState mu_phi = model.epistemic(phi);
    EpistemicState mu_psi = model.epistemic(psi);
    IndicatorFunction xi_psi = model.test_indicator(psi);

    Rng rng(seed);
    OnticPoint pt;
    for (long long i = 0; i < n; ++i) {
        mu_phi.sample_into(pt, rng);
        if (xi_psi(0, pt) > eps && !mu_psi.support_contains(pt, eps))
            return {true, pt, i + 1};
    }
    return {false, std::nullopt, n};
}

// ---------------------------------------------------------------------------
// Whole-model suite
// ---------------------------------------------------------------------------

struct NamedCheck {
    std::string name;
    CheckResult result;
};

struct LemmaSuiteReport {
    std::vector<NamedCheck> checks;
    bool all_pass = true;

    void add(std::string name, CheckResult r) {
        all_pass = all_pass && r.pass;
        checks.push_back({std::move(name), std::move(r)});
    }
};

// Runs the six structural checks on a model with fixed and seeded-random
// fixtures.
inline LemmaSuiteReport run_lemma_suite(const models::Model& model, long long n,
                                        std::uint64_t seed, double eps = kSupportEps) {
    LemmaSuiteReport rep;
    Rng fixture_rng(mix_seed(seed, 0xF1));
    PureState zero = basis_state(2, 0), one = basis_state(2, 1);
    PureState tilted = qubit(std::cos(M_PI / 8), std::sin(M_PI / 8));
    PureState randomA = random_state(fixture_rng, 2);
    PureState randomB = random_state(fixture_rng, 2);

    int idx = 0;
    for (const PureState& psi : {zero, tilted, randomA}) {
        rep.add("support-subset/" + std::to_string(idx),
                check_support_subset(model.epistemic(psi), model.test_indicator(psi), 0, n,
                                     mix_seed(seed, 0x10 + idx), eps));
        ++idx;
    }

    rep.add("orthogonal-disjoint/basis",
            check_orthogonal_disjoint(model.epistemic(zero), model.epistemic(one), n,
                                      mix_seed(seed, 0x20), eps));
    rep.add("orthogonal-disjoint/random",
            check_orthogonal_disjoint(model.epistemic(randomA),
                                      model.epistemic(models::qubit_orthogonal(randomA)), n,
                                      mix_seed(seed, 0x21), eps));

    idx = 0;
    for (const PureState& phi : {tilted, randomB}) {
        IndicatorFunction xi = model.pvm_indicator(ray_test(phi));
        rep.add("pvm-cover/" + std::to_string(idx),
                check_pvm_cover(xi, n, mix_seed(seed, 0x30 + idx), eps));
        if (model.outcome_deterministic)
            rep.add("pvm-disjoint/" + std::to_string(idx),
                    check_pvm_disjoint(xi, n, mix_seed(seed, 0x40 + idx), eps));
        ++idx;
    }

    DensityOperator rho = convex_combine({0.75, 0.25}, std::vector<PureState>{zero, one});
    Integrator integ = Integrator::automatic(n, mix_seed(seed, 0x50));
    rep.add("preparation-convexity/basis",
            check_convexity_preparation(model, rho, {0.75, 0.25}, {zero, one}, 20, integ,
                                        mix_seed(seed, 0x51)));
    rep.add("preparation-convexity/single",
            check_convexity_preparation(model, DensityOperator(randomA), {1.0}, {randomA}, 20,
                                        integ, mix_seed(seed, 0x52)));

    EnsembleContext basis = basis_ensemble(), tilt = tilted_ensemble();
    auto claim_for = [&](const EnsembleContext& c) {
        if (model.effect_indicator) return model.effect_indicator(realized_effect(c));
        return context_indicator(model, c);
    };
    rep.add("measurement-convexity/basis",
            check_convexity_measurement(claim_for(basis), basis.weights,
                                        {model.test_indicator(basis.states[0]),
                                         model.test_indicator(basis.states[1])},
                                        n, mix_seed(seed, 0x60)));
    rep.add("measurement-convexity/tilted",
            check_convexity_measurement(claim_for(tilt), tilt.weights,
                                        {model.test_indicator(tilt.states[0]),
                                         model.test_indicator(tilt.states[1])},
                                        n, mix_seed(seed, 0x61)));
    return rep;
}

}  // namespace ontics::analysis
