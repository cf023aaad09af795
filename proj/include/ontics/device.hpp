#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "ontics/models.hpp"
#include "ontics/ontology.hpp"

namespace ontics::device {

// Joint ontic arena for a system plus its measuring device. Points carry the
// system coordinates first, then the device coordinates.
inline OnticSpace joint_space(const OnticSpace& system, const OnticSpace& dev) {
    return OnticSpace::product({system, dev});
}

// Outcome probability when both the system and the device ontic states are
// integrated out. This is ordinary prediction on the joint space: the device
// formalism changes nothing about how statistics are computed.
inline PredictResult joint_predict(const EpistemicState& system_state,
                                   const EpistemicState& device_state,
                                   const IndicatorFunction& joint_xi, int k,
                                   const Integrator& integ) {
    return predict(EpistemicState::product({system_state, device_state}), joint_xi, k, integ);
}

// Lifts a system-only indicator to a joint indicator over a trivial
// one-point device space (the device adds nothing).
inline OnticSpace trivial_device_space() { return OnticSpace::discrete_labels(1); }

inline EpistemicState trivial_device_state() {
    return EpistemicState::point_mass(trivial_device_space(), OnticPoint{std::int64_t{0}});
}

inline IndicatorFunction lift_to_device(const IndicatorFunction& system_xi) {
    int ns = system_xi.space().leaf_count();
    auto eval = [system_xi, ns](int k, const OnticPoint& pt) {
        OnticPoint sys;
        sys.coords.assign(pt.coords.begin(), pt.coords.begin() + ns);
        return system_xi(k, sys);
    };
    return IndicatorFunction(joint_space(system_xi.space(), trivial_device_space()),
                             system_xi.outcomes(), eval, system_xi.deterministic());
}

// ---------------------------------------------------------------------------
// Coarse-graining
// ---------------------------------------------------------------------------

// Averages a joint indicator over the device's epistemic state, leaving an
// effective indicator on the system space alone. Device states that expand
// into atoms (plus uniform-interval coordinates) are integrated exactly when
// the joint indicator provides the matching marginal; leftover interval
// coordinates fall back to a midpoint rule, and anything else to Monte Carlo
// with the integrator's seed (re-used per evaluation, so the result is still
// a pure function of the point).
inline IndicatorFunction coarse_grain(const IndicatorFunction& joint_xi,
                                      const EpistemicState& device_state,
                                      const Integrator& integ = Integrator::automatic(4096, 1)) {
    if (joint_xi.space().kind() != OnticSpace::Kind::Product ||
        joint_xi.space().components().size() != 2)
        throw std::invalid_argument("coarse_grain: joint indicator must live on system x device");
    const OnticSpace system = joint_xi.space().components()[0];
    if (device_state.space() != joint_xi.space().components()[1])
        throw std::invalid_argument("coarse_grain: device state lives on the wrong space");

    int ns = system.leaf_count();
    int nd = device_state.space().leaf_count();

    std::vector<detail::ExpansionTerm> dev_terms;
    bool expanded = detail::expand_state(device_state, dev_terms);

    auto eval = [joint_xi, device_state, dev_terms, expanded, ns, nd, integ](
                    int k, const OnticPoint& sys_pt) {
        OnticPoint joint;
        joint.coords.resize(ns + nd);
        for (int i = 0; i < ns; ++i) joint.coords[i] = sys_pt.coords[i];

        if (expanded) {
            double acc = 0.0;
            for (const auto& t : dev_terms) {
                for (int i = 0; i < nd; ++i) joint.coords[ns + i] = t.point.coords[i];
                if (t.open.empty()) {
                    acc += t.weight * joint_xi(k, joint);
                    continue;
                }
                boost::container::small_vector<int, 2> shifted;
                for (int s : t.open) shifted.push_back(ns + s);
                const auto& slots = joint_xi.interval_marginal_slots();
                if (joint_xi.interval_marginal() &&
                    std::equal(shifted.begin(), shifted.end(), slots.begin(), slots.end())) {
                    acc += t.weight * clamp_probability(joint_xi.interval_marginal()(k, joint),
                                                        "interval marginal");
                } else {
                    detail::ExpansionTerm scratch{1.0, joint, shifted};
                    acc += t.weight *
                           detail::midpoint_over_open(joint_xi, k, scratch, 0, integ.interval_points);
                }
            }
            return acc;
        }

        Rng rng(mix_seed(integ.seed, static_cast<std::uint64_t>(k)));
        OnticPoint dev;
        double acc = 0.0;
        for (std::int64_t i = 0; i < integ.samples; ++i) {
            device_state.sample_into(dev, rng);
            for (int j = 0; j < nd; ++j) joint.coords[ns + j] = dev.coords[j];
            acc += joint_xi(k, joint);
        }
        return acc / static_cast<double>(integ.samples);
    };

    return IndicatorFunction(system, joint_xi.outcomes(), eval, false);
}

// ---------------------------------------------------------------------------
// Charge-and-threshold device model (aerts)
// ---------------------------------------------------------------------------
//
// The system's ontic state is its Bloch vector. The device carries an
// orientation plus a charge split s drawn uniformly from [0,1]; the outcome
// on the orientation side fires exactly when s exceeds sin^2 of half the
// angle between the system and the orientation.

inline OnticSpace aerts_system_space() { return OnticSpace::unit_sphere(); }

inline OnticSpace aerts_device_space() {
    return OnticSpace::product({OnticSpace::unit_sphere(), OnticSpace::unit_interval()});
}

inline OnticSpace aerts_joint_space() {
    return joint_space(aerts_system_space(), aerts_device_space());
}

inline EpistemicState aerts_system_epistemic(const BlochVector& psi) {
    return EpistemicState::point_mass(aerts_system_space(), OnticPoint{psi.v});
}

inline EpistemicState aerts_system_epistemic(const PureState& psi) {
    return aerts_system_epistemic(bloch_from_state(psi));
}

inline EpistemicState aerts_device_epistemic(const BlochVector& a) {
    return EpistemicState::product(
        {EpistemicState::point_mass(OnticSpace::unit_sphere(), OnticPoint{a.v}),
         EpistemicState::uniform_interval()});
}

// Joint coordinates: (system Bloch vector, device orientation, charge s).
// The measurement setting enters only through the device's epistemic state.
inline IndicatorFunction aerts_joint_indicator() {
    auto eval = [](int k, const OnticPoint& pt) {
        double d = pt.vec3(0).dot(pt.vec3(1));
        double v = heaviside(pt.real(2) + 0.5 * (d - 1.0));
        return k == 0 ? v : 1.0 - v;
    };
    IndicatorFunction xi(aerts_joint_space(), 2, eval, true);
    // Exact charge average: the threshold sin^2(theta/2) leaves 1 - sin^2 =
    // cos^2(theta/2) of the uniform charge above it.
    xi.set_interval_marginal(
        [](int k, const OnticPoint& pt) {
            double c = 0.5 * (1.0 + pt.vec3(0).dot(pt.vec3(1)));
            return k == 0 ? c : 1.0 - c;
        },
        {2});
    return xi;
}

// Effective system-only indicator once the charge is averaged out.
inline IndicatorFunction aerts_coarse_indicator(const BlochVector& a) {
    return coarse_grain(aerts_joint_indicator(), aerts_device_epistemic(a));
}

// The coarse-grained device model packaged like the system models, so the
// analysis drivers can iterate over it too.
inline models::Model aerts_coarse_model() {
    return {"aerts", aerts_system_space(),
            [](const PureState& psi) { return aerts_system_epistemic(psi); },
            [](const Pvm& p) {
                return aerts_coarse_indicator(bloch_from_state(models::projector_ray(p.effect(0))));
            },
            [](const PureState& phi) { return aerts_coarse_indicator(bloch_from_state(phi)); },
            true, false, nullptr};
}

// ---------------------------------------------------------------------------
// Setting subsets and the determinism trichotomy
// ---------------------------------------------------------------------------

// The slice of device ontic states compatible with one setting.
struct SettingSubset {
    std::string label;
    std::function<bool(const OnticPoint&)> contains;  // device-space points
};

inline SettingSubset aerts_setting_subset(const BlochVector& a) {
    Vec3 v = a.v;
    SettingSubset s;
    s.label = "orientation";
    s.contains = [v](const OnticPoint& pt) { return approx_equal(pt.vec3(0), v, 1e-9); };
    return s;
}

enum class DeviceClass { Macrodeterministic, Microdeterministic, Indeterministic };

inline const char* to_string(DeviceClass c) {
    switch (c) {
        case DeviceClass::Macrodeterministic: return "macrodeterministic";
        case DeviceClass::Microdeterministic: return "microdeterministic";
        case DeviceClass::Indeterministic: return "indeterministic";
    }
    return "?";
}

struct DeviceDeterminismReport {
    DeviceClass cls = DeviceClass::Macrodeterministic;
    // Witnesses: a fractional value for indeterminism, or two device states
    // in the same setting subset with different sharp outcomes.
    std::optional<OnticPoint> system_witness;
    std::optional<OnticPoint> device_witness;
    std::optional<OnticPoint> device_witness2;
    int outcome = -1;
    double value = 0.0;
    double value2 = 0.0;
};

// Samples system states and pairs of device states drawn from each setting's
// epistemic state. Any fractional indicator value means indeterministic; a
// sharp indicator that still changes across a setting subset is
// microdeterministic; otherwise the model is macrodeterministic.
inline DeviceDeterminismReport classify_device_determinism(
    const IndicatorFunction& joint_xi, const PointSampler& system_sampler,
    const std::vector<EpistemicState>& setting_states, int n, std::uint64_t seed) {
    if (joint_xi.space().kind() != OnticSpace::Kind::Product ||
        joint_xi.space().components().size() != 2)
        throw std::invalid_argument("classify_device_determinism: indicator must be joint");
    int ns = joint_xi.space().components()[0].leaf_count();
    int nd = joint_xi.space().components()[1].leaf_count();

    Rng rng(seed);
    DeviceDeterminismReport micro;
    bool saw_variation = false;

    OnticPoint sys, dev1, dev2, joint;
    joint.coords.resize(ns + nd);
    for (int i = 0; i < n; ++i) {
        system_sampler(sys, rng);
        for (int j = 0; j < ns; ++j) joint.coords[j] = sys.coords[j];
        for (const auto& setting : setting_states) {
            setting.sample_into(dev1, rng);
            setting.sample_into(dev2, rng);
            for (int k = 0; k < joint_xi.outcomes(); ++k) {
                for (int j = 0; j < nd; ++j) joint.coords[ns + j] = dev1.coords[j];
                double v1 = joint_xi(k, joint);
                if (v1 > kDeterminismTol && v1 < 1.0 - kDeterminismTol)
                    return {DeviceClass::Indeterministic, sys, dev1, std::nullopt, k, v1, 0.0};
                for (int j = 0; j < nd; ++j) joint.coords[ns + j] = dev2.coords[j];
                double v2 = joint_xi(k, joint);
                if (v2 > kDeterminismTol && v2 < 1.0 - kDeterminismTol)
                    return {DeviceClass::Indeterministic, sys, dev2, std::nullopt, k, v2, 0.0};
                if (!saw_variation && std::abs(v1 - v2) > kDeterminismTol) {
                    saw_variation = true;
                    micro = {DeviceClass::Microdeterministic, sys, dev1, dev2, k, v1, v2};
                }
            }
        }
    }
    if (saw_variation) return micro;
    return {};
}

}  // namespace ontics::device
