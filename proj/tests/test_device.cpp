#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "ontics/device.hpp"

using namespace ontics;
using namespace ontics::device;
using Catch::Approx;

namespace {

PureState tilted() { return qubit(std::cos(M_PI / 8), std::sin(M_PI / 8)); }

}  // namespace

TEST_CASE("lifting to a trivial device changes no statistics") {
    PureState psi = tilted();
    PureState phi = qubit(0.6, 0.8);
    const auto& bb = models::model_by_name("bb");

    IndicatorFunction joint = lift_to_device(bb.test_indicator(phi));
    REQUIRE(joint.space() == joint_space(bb.space, trivial_device_space()));
    REQUIRE(joint.outcomes() == 2);

    PredictResult lifted = joint_predict(bb.epistemic(psi), trivial_device_state(), joint, 0,
                                         Integrator::automatic(100, 1));
    PredictResult plain =
        predict(bb.epistemic(psi), bb.test_indicator(phi), 0, Integrator::automatic(100, 1));
    REQUIRE(lifted.exact);
    REQUIRE(lifted.estimate == Approx(plain.estimate).margin(1e-12));
    REQUIRE(lifted.estimate == Approx(overlap(phi, psi)).margin(1e-12));
}

TEST_CASE("coarse graining validates its spaces") {
    IndicatorFunction system_only = models::ks_indicator(BlochVector(Vec3{0, 0, 1}));
    REQUIRE_THROWS_AS(coarse_grain(system_only, trivial_device_state()), std::invalid_argument);

    IndicatorFunction joint = aerts_joint_indicator();
    REQUIRE_THROWS_AS(coarse_grain(joint, trivial_device_state()), std::invalid_argument);
    REQUIRE_NOTHROW(coarse_grain(joint, aerts_device_epistemic(BlochVector(Vec3{0, 0, 1}))));
}

TEST_CASE("charge-threshold device answers sharply but averages to a cosine law") {
    // Joint responses are 0/1 everywhere: outcome 0 fires exactly when the
    // charge clears sin^2(theta/2).
    IndicatorFunction joint = aerts_joint_indicator();
    PointSampler ambient = ambient_sampler(aerts_joint_space());
    DeterminismReport det = classify_outcome_determinism(joint, ambient, 2000, 61);
    REQUIRE(det.deterministic);

    Vec3 a{0, 0, 1};
    OnticPoint above{Vec3{0, 0, 1}, a, 0.5};
    OnticPoint below{Vec3{0, 0, -1}, a, 0.5};
    REQUIRE(joint(0, above) == 1.0);
    REQUIRE(joint(0, below) == 0.0);
    // theta = pi/2: threshold sin^2(pi/4) = 1/2, and the boundary fires.
    OnticPoint edge{Vec3{1, 0, 0}, a, 0.5};
    REQUIRE(joint(0, edge) == 1.0);
    REQUIRE(joint(0, OnticPoint{Vec3{1, 0, 0}, a, 0.49}) == 0.0);

    // Averaging the uniform charge leaves cos^2(theta/2) on the system alone.
    IndicatorFunction coarse = aerts_coarse_indicator(BlochVector(a));
    for (int i = 0; i <= 20; ++i) {
        double theta = M_PI * i / 20.0;
        OnticPoint pt{Vec3{std::sin(theta), 0.0, std::cos(theta)}};
        double want = std::cos(theta / 2) * std::cos(theta / 2);
        REQUIRE(coarse(0, pt) == Approx(want).margin(1e-12));
        REQUIRE(coarse(1, pt) == Approx(1.0 - want).margin(1e-12));
    }
}

TEST_CASE("joint prediction reproduces the Born rule for the device model") {
    Rng rng(67);
    for (int i = 0; i < 10; ++i) {
        PureState psi = random_state(rng, 2);
        PureState phi = random_state(rng, 2);
        PredictResult r =
            joint_predict(aerts_system_epistemic(psi),
                          aerts_device_epistemic(bloch_from_state(phi)), aerts_joint_indicator(),
                          0, Integrator::automatic(100, 1));
        REQUIRE(r.exact);
        REQUIRE(r.standard_error == 0.0);
        REQUIRE(r.estimate == Approx(overlap(phi, psi)).margin(1e-12));
    }

    // The packaged coarse model is exact too.
    models::Model coarse = aerts_coarse_model();
    REQUIRE(coarse.name == "aerts");
    REQUIRE(coarse.exact_prediction);
    REQUIRE(!coarse.outcome_deterministic);
    PureState psi = tilted();
    PureState phi = qubit(0.6, 0.8);
    PredictResult r =
        predict(coarse.epistemic(psi), coarse.test_indicator(phi), 0, Integrator::automatic(100, 1));
    REQUIRE(r.exact);
    REQUIRE(r.estimate == Approx(overlap(phi, psi)).margin(1e-12));
}

TEST_CASE("setting subsets pick out the device states of one orientation") {
    Vec3 a{0, 0, 1};
    SettingSubset sub = aerts_setting_subset(BlochVector(a));
    REQUIRE(sub.contains(OnticPoint{a, 0.1}));
    REQUIRE(sub.contains(OnticPoint{a, 0.9}));
    REQUIRE(!sub.contains(OnticPoint{Vec3{1, 0, 0}, 0.5}));
}

TEST_CASE("the determinism trichotomy separates the three device behaviors") {
    PointSampler sphere = ambient_sampler(OnticSpace::unit_sphere());
    PointSampler rays = ambient_sampler(OnticSpace::ray_labels(2));

    // Sharp joint responses that vary across one setting's device states:
    // microdeterministic.
    std::vector<EpistemicState> settings{
        aerts_device_epistemic(BlochVector(Vec3{0, 0, 1})),
        aerts_device_epistemic(bloch_from_state(tilted()))};
    DeviceDeterminismReport aerts =
        classify_device_determinism(aerts_joint_indicator(), sphere, settings, 400, 71);
    REQUIRE(aerts.cls == DeviceClass::Microdeterministic);
    REQUIRE(aerts.device_witness.has_value());
    REQUIRE(aerts.device_witness2.has_value());
    REQUIRE(aerts.value != aerts.value2);

    // Fractional responses anywhere: indeterministic.
    const auto& bb = models::model_by_name("bb");
    DeviceDeterminismReport indet = classify_device_determinism(
        lift_to_device(bb.test_indicator(tilted())), rays, {trivial_device_state()}, 400, 73);
    REQUIRE(indet.cls == DeviceClass::Indeterministic);
    REQUIRE(indet.value > kDeterminismTol);
    REQUIRE(indet.value < 1.0 - kDeterminismTol);

    // Sharp responses that never depend on the device state:
    // macrodeterministic.
    const auto& ks = models::model_by_name("ks");
    DeviceDeterminismReport macro = classify_device_determinism(
        lift_to_device(ks.test_indicator(tilted())), sphere, {trivial_device_state()}, 400, 79);
    REQUIRE(macro.cls == DeviceClass::Macrodeterministic);

    REQUIRE(std::string(to_string(DeviceClass::Macrodeterministic)) == "macrodeterministic");
    REQUIRE(std::string(to_string(DeviceClass::Microdeterministic)) == "microdeterministic");
    REQUIRE(std::string(to_string(DeviceClass::Indeterministic)) == "indeterministic");

    REQUIRE_THROWS_AS(
        classify_device_determinism(models::ks_indicator(BlochVector(Vec3{0, 0, 1})), sphere,
                                    {trivial_device_state()}, 10, 1),
        std::invalid_argument);
}
