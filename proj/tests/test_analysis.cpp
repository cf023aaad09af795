#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>

#include "ontics/analysis.hpp"
#include "ontics/device.hpp"

using namespace ontics;
using namespace ontics::analysis;
using Catch::Approx;

namespace {

std::vector<models::Model> all_models() {
    std::vector<models::Model> out = models::qubit_models();
    out.push_back(device::aerts_coarse_model());
    return out;
}

PureState tilted() { return qubit(std::cos(M_PI / 8), std::sin(M_PI / 8)); }

EpistemicState uniform_sphere_state() {
    return EpistemicState::density(
        OnticSpace::unit_sphere(), [](const OnticPoint&) { return 1.0 / (4.0 * M_PI); },
        [](OnticPoint& p, Rng& r) {
            p.coords.resize(1);
            p.coords[0] = r.unit_sphere();
        });
}

// Two-outcome indicator whose outcomes both fire on the same hemisphere: the
// canonical violation of outcome-support disjointness.
IndicatorFunction duplicated_outcome_indicator() {
    return IndicatorFunction(
        OnticSpace::unit_sphere(), 2,
        [](int, const OnticPoint& p) { return heaviside(p.vec3(0).z); }, true);
}

// Two-outcome indicator leaving a band of the sphere with no response at all.
IndicatorFunction gapped_indicator() {
    return IndicatorFunction(
        OnticSpace::unit_sphere(), 2,
        [](int k, const OnticPoint& p) {
            double z = p.vec3(0).z;
            return k == 0 ? heaviside(z - 0.5) : heaviside(-0.5 - z);
        },
        true);
}

}  // namespace

TEST_CASE("support subset check accepts the models and flags escapes") {
    const auto& ks = models::model_by_name("ks");
    PureState psi = tilted();
    CheckResult ok = check_support_subset(ks.epistemic(psi), ks.test_indicator(psi), 0, 4000, 101);
    REQUIRE(ok.pass);

    // A preparation spread over the whole sphere escapes any hemisphere test.
    CheckResult bad =
        check_support_subset(uniform_sphere_state(), ks.test_indicator(psi), 0, 4000, 103);
    REQUIRE(!bad.pass);
    REQUIRE(bad.witness.has_value());
    REQUIRE(ks.test_indicator(psi)(0, *bad.witness) <= kSupportEps);
}

TEST_CASE("orthogonal preparations must not share ontic states") {
    const auto& ks = models::model_by_name("ks");
    CheckResult ok = check_orthogonal_disjoint(ks.epistemic(basis_state(2, 0)),
                                               ks.epistemic(basis_state(2, 1)), 4000, 107);
    REQUIRE(ok.pass);

    CheckResult bad = check_orthogonal_disjoint(ks.epistemic(tilted()), ks.epistemic(tilted()),
                                                4000, 109);
    REQUIRE(!bad.pass);
    REQUIRE(bad.witness.has_value());
}

TEST_CASE("pvm covering and disjointness catch the broken indicators") {
    const auto& ks = models::model_by_name("ks");
    IndicatorFunction good = ks.pvm_indicator(ray_test(tilted()));
    REQUIRE(check_pvm_cover(good, 4000, 113).pass);
    REQUIRE(check_pvm_disjoint(good, 4000, 127).pass);

    CheckResult gap = check_pvm_cover(gapped_indicator(), 4000, 131);
    REQUIRE(!gap.pass);
    REQUIRE(gap.witness.has_value());
    REQUIRE(std::abs(gap.witness->vec3(0).z) < 0.5 + 1e-12);

    CheckResult dup = check_pvm_disjoint(duplicated_outcome_indicator(), 4000, 137);
    REQUIRE(!dup.pass);
    REQUIRE(dup.witness.has_value());
    REQUIRE(dup.witness->vec3(0).z >= 0.0);

    const auto& bb = models::model_by_name("bb");
    REQUIRE_THROWS_AS(check_pvm_disjoint(bb.pvm_indicator(ray_test(tilted())), 10, 1),
                      std::invalid_argument);
}

TEST_CASE("preparation convexity holds for correct weights and fails for wrong ones") {
    DensityOperator rho =
        convex_combine({0.75, 0.25}, std::vector<PureState>{basis_state(2, 0), basis_state(2, 1)});
    const auto& bb = models::model_by_name("bb");

    Integrator integ = Integrator::automatic(4000, 139);
    CheckResult ok = check_convexity_preparation(bb, rho, {0.75, 0.25},
                                                 {basis_state(2, 0), basis_state(2, 1)}, 20, integ,
                                                 149);
    REQUIRE(ok.pass);

    // Equal weights realize diag(1/2, 1/2) instead; against diag(3/4, 1/4)
    // the discrepancy on a projector probe P is |P00 - P11|/4.
    CheckResult bad = check_convexity_preparation(bb, rho, {0.5, 0.5},
                                                  {basis_state(2, 0), basis_state(2, 1)}, 20, integ,
                                                  151);
    REQUIRE(!bad.pass);

    EpistemicState wrong = EpistemicState::mixture(
        {{0.5, bb.epistemic(basis_state(2, 0))}, {0.5, bb.epistemic(basis_state(2, 1))}});
    PureState probe = tilted();
    double got = predict(wrong, bb.pvm_indicator(ray_test(probe)), 0, Integrator::exact()).estimate;
    double want = born_probability(rho, PovmEffect(probe));
    double p00 = probe.projector()(0, 0).real(), p11 = probe.projector()(1, 1).real();
    REQUIRE(std::abs(got - want) == Approx(std::abs(p00 - p11) / 4.0).margin(1e-12));
}

TEST_CASE("measurement convexity is a pointwise identity on indicators") {
    const auto& ks = models::model_by_name("ks");
    std::vector<IndicatorFunction> parts{ks.test_indicator(basis_state(2, 0)),
                                         ks.test_indicator(tilted())};

    IndicatorFunction combined = convex_combine_indicators({0.3, 0.7}, parts);
    REQUIRE(check_convexity_measurement(combined, {0.3, 0.7}, parts, 2000, 157).pass);

    // A claim mixed with the wrong weights disagrees wherever the parts
    // disagree.
    IndicatorFunction skewed = convex_combine_indicators({0.6, 0.4}, parts);
    CheckResult bad = check_convexity_measurement(skewed, {0.3, 0.7}, parts, 2000, 163);
    REQUIRE(!bad.pass);
    REQUIRE(bad.witness.has_value());

    REQUIRE_THROWS_AS(convex_combine_indicators({0.6, 0.3}, parts), std::invalid_argument);
    REQUIRE_THROWS_AS(convex_combine_indicators({1.5, -0.5}, parts), std::invalid_argument);
    std::vector<IndicatorFunction> mismatched{
        ks.test_indicator(basis_state(2, 0)),
        models::bb_indicator(ray_test(tilted()).as_povm())};
    REQUIRE_THROWS_AS(convex_combine_indicators({0.5, 0.5}, mismatched), std::invalid_argument);
}

TEST_CASE("confidence radii shrink with the sample count and floor near zero") {
    REQUIRE(fraction_confidence(0.5, 40000) < fraction_confidence(0.5, 10000));
    REQUIRE(fraction_confidence(0.5, 40000) ==
            Approx(fraction_confidence(0.5, 10000) / 2.0).epsilon(1e-12));
    REQUIRE(fraction_confidence(0.0, 1000) == Approx(3.0 / 1000).margin(1e-15));
}

TEST_CASE("deficiency detection recovers the known split across models") {
    PureState psi = tilted();
    std::set<std::string> deficient, intact;
    for (const auto& m : all_models()) {
        DeficiencyReport rep = detect_deficiency(m, psi, 10000, 167);
        (rep.deficient ? deficient : intact).insert(m.name);

        // The relation tag must be consistent with the measured fractions.
        const SupportReport& s = rep.support;
        bool missing = s.missing_fraction > s.confidence;
        bool lost = s.lost_fraction > fraction_confidence(s.lost_fraction, s.samples);
        switch (s.relation) {
            case SupportRelation::Equal:
                REQUIRE(!missing);
                break;
            case SupportRelation::StrictSubset:
                REQUIRE(missing);
                REQUIRE(!lost);
                break;
            case SupportRelation::Overlapping:
                REQUIRE(missing);
                REQUIRE(lost);
                break;
            case SupportRelation::Disjoint:
                break;
        }
        REQUIRE(rep.deficient == missing);
        REQUIRE(s.atoms_inside);
        REQUIRE(s.lost_fraction <= fraction_confidence(s.lost_fraction, s.samples));
    }
    REQUIRE(deficient == std::set<std::string>{"aaronson", "aerts", "bb", "bell1", "bell2"});
    REQUIRE(intact == std::set<std::string>{"ks"});

    // Irreducibly indeterministic response functions force deficiency.
    for (const auto& m : all_models())
        if (!m.outcome_deterministic)
            REQUIRE(detect_deficiency(m, psi, 10000, 173).deficient);

    REQUIRE(std::string(to_string(SupportRelation::Equal)) == "equal");
    REQUIRE(std::string(to_string(SupportRelation::StrictSubset)) == "strict-subset");
}

TEST_CASE("the standard context pair realizes one state two ways") {
    PrepContextPair pair = standard_prep_pair();
    double c2 = std::cos(M_PI / 8) * std::cos(M_PI / 8);
    REQUIRE(pair.realized.matrix()(0, 0).real() == Approx(c2).margin(1e-12));
    REQUIRE(pair.realized.matrix()(1, 1).real() == Approx(1.0 - c2).margin(1e-12));
    REQUIRE(std::abs(pair.realized.matrix()(0, 1)) < 1e-12);

    MeasContextPair meas = standard_meas_pair();
    REQUIRE((meas.realized.matrix() - pair.realized.matrix()).cwiseAbs().maxCoeff() < 1e-12);

    EnsembleContext plus = basis_ensemble();
    EnsembleContext other{{0.5, 0.5}, {basis_state(2, 0), basis_state(2, 1)}, "even mix"};
    REQUIRE_THROWS_AS(make_prep_pair(plus, other), std::invalid_argument);
    REQUIRE_THROWS_AS(make_meas_pair(plus, other), std::invalid_argument);

    EnsembleContext bad{{0.7, 0.2}, {basis_state(2, 0), basis_state(2, 1)}, "deficit mix"};
    REQUIRE_THROWS_AS(context_epistemic(models::model_by_name("bb"), bad), std::invalid_argument);
}

TEST_CASE("preparation contextuality separates every model's contexts") {
    // Lune-area oracle: the two tilted Bloch vectors sit at angle alpha, and
    // the union of their closed hemispheres misses a lune of dihedral angle
    // pi - alpha, of spherical area 2(pi - alpha).
    EnsembleContext tilt = tilted_ensemble();
    Vec3 b1 = bloch_from_state(tilt.states[0]).v;
    Vec3 b2 = bloch_from_state(tilt.states[1]).v;
    double alpha = std::acos(std::clamp(b1.dot(b2), -1.0, 1.0));
    double covered_oracle = 1.0 - 2.0 * (M_PI - alpha) / (4.0 * M_PI);
    REQUIRE(covered_oracle == Approx(0.75).margin(1e-12));

    PrepContextPair pair = standard_prep_pair();
    for (const auto& m : all_models()) {
        ContextualityReport rep = demo_preparation_contextuality(m, pair, 4000, 179);
        INFO(m.name);
        REQUIRE(rep.contextual);
        if (m.name == "ks") {
            REQUIRE(rep.fraction_a == Approx(1.0).margin(0.01));
            REQUIRE(rep.fraction_b == Approx(covered_oracle).margin(0.03));
        }
        if (m.name == "bb" || m.name == "aaronson" || m.name == "aerts")
            REQUIRE(rep.atoms_differ);
    }

    // The same ensemble twice is one context, not two.
    PrepContextPair same = make_prep_pair(tilted_ensemble(), tilted_ensemble());
    REQUIRE(!demo_preparation_contextuality(models::model_by_name("bb"), same, 2000, 181).contextual);
    REQUIRE(!demo_preparation_contextuality(models::model_by_name("ks"), same, 2000, 191).contextual);
}

TEST_CASE("measurement contextuality splits the models into the known camps") {
    MeasContextPair pair = standard_meas_pair();
    std::set<std::string> contextual, uncontextual;
    for (const auto& m : all_models()) {
        ContextualityReport rep = demo_measurement_contextuality(m, pair, 4000, 193);
        (rep.contextual ? contextual : uncontextual).insert(m.name);
        if (m.name == "ks") {
            REQUIRE(rep.fraction_a == Approx(1.0).margin(0.01));
            REQUIRE(rep.fraction_b == Approx(0.75).margin(0.03));
        }
    }
    REQUIRE(contextual == std::set<std::string>{"bell1", "bell2", "ks"});
    REQUIRE(uncontextual == std::set<std::string>{"aaronson", "aerts", "bb"});
}

TEST_CASE("the filtering update rule breaks exactly in the deficient models") {
    PureState psi = basis_state(2, 0);
    PureState phi = tilted();

    for (const auto& m : all_models()) {
        UpdateRuleReport rep = check_update_rule_violation(m, psi, phi, 20000, 197);
        INFO(m.name);
        if (m.name == "ks") {
            REQUIRE(!rep.witness_found);
            REQUIRE(rep.draws == 20000);
        } else {
            REQUIRE(rep.witness_found);
            REQUIRE(rep.witness.has_value());
            // Re-verify the witness from first principles.
            EpistemicState mu_psi = m.epistemic(psi);
            IndicatorFunction xi_psi = m.test_indicator(psi);
            REQUIRE(xi_psi(0, *rep.witness) > kSupportEps);
            REQUIRE(!mu_psi.support_contains(*rep.witness));
        }
    }

    const auto& bb = models::model_by_name("bb");
    REQUIRE_THROWS_AS(check_update_rule_violation(bb, psi, psi, 10, 1), std::invalid_argument);
    REQUIRE_THROWS_AS(check_update_rule_violation(bb, psi, basis_state(2, 1), 10, 1),
                      std::invalid_argument);
}

TEST_CASE("the whole lemma suite passes for every model") {
    for (const auto& m : all_models()) {
        LemmaSuiteReport rep = run_lemma_suite(m, 4000, 199);
        INFO(m.name);
        for (const auto& c : rep.checks) {
            INFO(c.name + ": " + c.result.detail);
            REQUIRE(c.result.pass);
        }
        REQUIRE(rep.all_pass);
        // Disjointness checks run only for outcome-deterministic models.
        REQUIRE(rep.checks.size() == (m.outcome_deterministic ? 13u : 11u));
    }
}
