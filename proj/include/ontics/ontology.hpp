#pragma once

#include <algorithm>
#include <boost/container/small_vector.hpp>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "ontics/quantum.hpp"

namespace ontics {

// Threshold below which a density or indicator value counts as zero when
// deciding support membership.
inline constexpr double kSupportEps = 1e-9;
// Indicator values within this distance of 0 or 1 count as deterministic.
inline constexpr double kDeterminismTol = 1e-10;

// ---------------------------------------------------------------------------
// Ontic state spaces
// ---------------------------------------------------------------------------

// Descriptor for a space of ontic states. Products may nest; points are
// stored flat, one coordinate per leaf in depth-first order.
class OnticSpace {
public:
    enum class Kind { UnitSphere, UnitInterval, RayLabels, DiscreteLabels, Product };

    static OnticSpace unit_sphere() { return OnticSpace(Kind::UnitSphere, 0); }
    static OnticSpace unit_interval() { return OnticSpace(Kind::UnitInterval, 0); }

    static OnticSpace ray_labels(int hilbert_dim) {
        if (hilbert_dim < 2) throw std::invalid_argument("OnticSpace: ray label dimension must be >= 2");
        return OnticSpace(Kind::RayLabels, hilbert_dim);
    }

    static OnticSpace discrete_labels(int count) {
        if (count < 1) throw std::invalid_argument("OnticSpace: discrete label count must be positive");
        return OnticSpace(Kind::DiscreteLabels, count);
    }

    static OnticSpace product(std::vector<OnticSpace> components) {
        if (components.empty()) throw std::invalid_argument("OnticSpace: empty product");
        OnticSpace s(Kind::Product, 0);
        s.components_ = std::move(components);
        return s;
    }

    Kind kind() const { return kind_; }
    int param() const { return param_; }
    const std::vector<OnticSpace>& components() const { return components_; }

    int leaf_count() const {
        if (kind_ != Kind::Product) return 1;
        int n = 0;
        for (const auto& c : components_) n += c.leaf_count();
        return n;
    }

    // Leaf descriptors in depth-first order, matching point coordinates.
    void collect_leaves(std::vector<const OnticSpace*>& out) const {
        if (kind_ != Kind::Product) {
            out.push_back(this);
            return;
        }
        for (const auto& c : components_) c.collect_leaves(out);
    }

    std::vector<const OnticSpace*> leaves() const {
        std::vector<const OnticSpace*> out;
        collect_leaves(out);
        return out;
    }

    bool operator==(const OnticSpace& o) const {
        if (kind_ != o.kind_ || param_ != o.param_) return false;
        if (components_.size() != o.components_.size()) return false;
        for (std::size_t i = 0; i < components_.size(); ++i)
            if (!(components_[i] == o.components_[i])) return false;
        return true;
    }
    bool operator!=(const OnticSpace& o) const { return !(*this == o); }

    // Total mass of the ambient reference measure: surface area for spheres,
    // Lebesgue on [0,1], normalized Haar / counting measure for label leaves.
    double ambient_volume() const {
        switch (kind_) {
            case Kind::UnitSphere: return 4.0 * M_PI;
            case Kind::UnitInterval: return 1.0;
            case Kind::RayLabels: return 1.0;
            case Kind::DiscreteLabels: return 1.0;
            case Kind::Product: {
                double v = 1.0;
                for (const auto& c : components_) v *= c.ambient_volume();
                return v;
            }
        }
        throw std::logic_error("OnticSpace: unknown kind");
    }

private:
    OnticSpace(Kind k, int param) : kind_(k), param_(param) {}

    Kind kind_;
    int param_;  // Hilbert dimension for RayLabels, count for DiscreteLabels
    std::vector<OnticSpace> components_;
};

// One coordinate of an ontic state: a sphere point, an interval value, a ray
// label, or a discrete label index.
using Coordinate = std::variant<Vec3, double, PureState, std::int64_t>;

struct OnticPoint {
    boost::container::small_vector<Coordinate, 4> coords;

    OnticPoint() = default;
    OnticPoint(std::initializer_list<Coordinate> cs) : coords(cs) {}

    int size() const { return static_cast<int>(coords.size()); }

    const Vec3& vec3(int i) const { return std::get<Vec3>(coords.at(i)); }
    double real(int i) const { return std::get<double>(coords.at(i)); }
    const PureState& ray(int i) const { return std::get<PureState>(coords.at(i)); }
    std::int64_t label(int i) const { return std::get<std::int64_t>(coords.at(i)); }
};

inline bool coordinate_equal(const Coordinate& a, const Coordinate& b) {
    if (a.index() != b.index()) return false;
    switch (a.index()) {
        case 0: return approx_equal(std::get<Vec3>(a), std::get<Vec3>(b), 1e-12);
        case 1: return std::abs(std::get<double>(a) - std::get<double>(b)) <= 1e-12;
        case 2: return ray_equal(std::get<PureState>(a), std::get<PureState>(b));
        case 3: return std::get<std::int64_t>(a) == std::get<std::int64_t>(b);
    }
    return false;
}

inline bool point_equal(const OnticPoint& a, const OnticPoint& b) {
    if (a.coords.size() != b.coords.size()) return false;
    for (std::size_t i = 0; i < a.coords.size(); ++i)
        if (!coordinate_equal(a.coords[i], b.coords[i])) return false;
    return true;
}

namespace detail {

inline bool leaf_contains(const OnticSpace& leaf, const Coordinate& c) {
    switch (leaf.kind()) {
        case OnticSpace::Kind::UnitSphere:
            return std::holds_alternative<Vec3>(c) && std::abs(std::get<Vec3>(c).norm() - 1.0) <= 1e-9;
        case OnticSpace::Kind::UnitInterval:
            return std::holds_alternative<double>(c) && std::get<double>(c) >= 0.0 &&
                   std::get<double>(c) <= 1.0;
        case OnticSpace::Kind::RayLabels:
            return std::holds_alternative<PureState>(c) &&
                   std::get<PureState>(c).dim() == leaf.param();
        case OnticSpace::Kind::DiscreteLabels:
            return std::holds_alternative<std::int64_t>(c) && std::get<std::int64_t>(c) >= 0 &&
                   std::get<std::int64_t>(c) < leaf.param();
        default:
            return false;
    }
}

inline Coordinate leaf_ambient_sample(const OnticSpace& leaf, Rng& rng) {
    switch (leaf.kind()) {
        case OnticSpace::Kind::UnitSphere: return rng.unit_sphere();
        case OnticSpace::Kind::UnitInterval: return rng.uniform();
        case OnticSpace::Kind::RayLabels: return random_state(rng, leaf.param());
        case OnticSpace::Kind::DiscreteLabels:
            return static_cast<std::int64_t>(rng.below(leaf.param()));
        default:
            throw std::logic_error("leaf_ambient_sample: not a leaf");
    }
}

}  // namespace detail

inline bool space_contains(const OnticSpace& space, const OnticPoint& pt) {
    auto leaves = space.leaves();
    if (static_cast<int>(leaves.size()) != pt.size()) return false;
    for (std::size_t i = 0; i < leaves.size(); ++i)
        if (!detail::leaf_contains(*leaves[i], pt.coords[i])) return false;
    return true;
}

using PointSampler = std::function<void(OnticPoint&, Rng&)>;

// Uniform sampler for the ambient reference measure of a space.
inline PointSampler ambient_sampler(const OnticSpace& space) {
    auto leaves = std::make_shared<std::vector<OnticSpace>>();
    for (const OnticSpace* l : space.leaves()) leaves->push_back(*l);
    return [leaves](OnticPoint& pt, Rng& rng) {
        pt.coords.resize(leaves->size());
        for (std::size_t i = 0; i < leaves->size(); ++i)
            pt.coords[i] = detail::leaf_ambient_sample((*leaves)[i], rng);
    };
}

// ---------------------------------------------------------------------------
// Operational settings
// ---------------------------------------------------------------------------

// A preparation procedure: the prepared state plus a context label that
// distinguishes operationally equivalent procedures.
struct PreparationSetting {
    DensityOperator state;
    std::string context;
};

// A measurement procedure: the measured POVM plus a context label.
struct MeasurementSetting {
    Povm effects;
    std::string context;
};

// ---------------------------------------------------------------------------
// Epistemic states
// ---------------------------------------------------------------------------

class EpistemicState;

struct PointMassForm {
    OnticPoint atom;
};

struct DensityForm {
    std::function<double(const OnticPoint&)> pdf;  // w.r.t. the ambient measure
    PointSampler sample;
    bool uniform_unit_interval = false;  // marks the standard uniform on [0,1]
};

struct MixtureForm {
    std::vector<std::pair<double, EpistemicState>> components;
};

struct ProductForm {
    std::vector<EpistemicState> factors;
};

// Distribution over an ontic space: a point mass, a density with a sampler,
// a finite mixture, or a product over factor spaces. Point masses stay
// symbolic; they are never approximated by densities.
class EpistemicState {
public:
    using Form = std::variant<PointMassForm, DensityForm, MixtureForm, ProductForm>;

    static EpistemicState point_mass(OnticSpace space, OnticPoint atom) {
        if (!space_contains(space, atom))
            throw std::invalid_argument("EpistemicState: atom not in the given space");
        return EpistemicState(std::move(space), PointMassForm{std::move(atom)});
    }

    static EpistemicState density(OnticSpace space, std::function<double(const OnticPoint&)> pdf,
                                  PointSampler sample) {
        if (!pdf || !sample) throw std::invalid_argument("EpistemicState: null density callbacks");
        return EpistemicState(std::move(space), DensityForm{std::move(pdf), std::move(sample), false});
    }

    static EpistemicState uniform_interval() {
        DensityForm f;
        f.pdf = [](const OnticPoint&) { return 1.0; };
        f.sample = [](OnticPoint& pt, Rng& rng) {
            pt.coords.resize(1);
            pt.coords[0] = rng.uniform();
        };
        f.uniform_unit_interval = true;
        return EpistemicState(OnticSpace::unit_interval(), std::move(f));
    }

    static EpistemicState mixture(std::vector<std::pair<double, EpistemicState>> components) {
        if (components.empty()) throw std::invalid_argument("EpistemicState: empty mixture");
        double total = 0.0;
        for (const auto& [w, c] : components) {
            if (w < -1e-12) throw std::invalid_argument("EpistemicState: negative mixture weight");
            if (c.space() != components.front().second.space())
                throw std::invalid_argument("EpistemicState: mixture components on different spaces");
            total += w;
        }
        if (std::abs(total - 1.0) > 1e-12)
            throw std::invalid_argument("EpistemicState: mixture weights do not sum to 1");
        OnticSpace space = components.front().second.space();
        return EpistemicState(std::move(space), MixtureForm{std::move(components)});
    }

    static EpistemicState product(std::vector<EpistemicState> factors) {
        if (factors.empty()) throw std::invalid_argument("EpistemicState: empty product");
        std::vector<OnticSpace> spaces;
        spaces.reserve(factors.size());
        for (const auto& f : factors) spaces.push_back(f.space());
        return EpistemicState(OnticSpace::product(std::move(spaces)), ProductForm{std::move(factors)});
    }

    const OnticSpace& space() const { return space_; }
    const Form& form() const { return *form_; }

    bool is_point_mass() const { return std::holds_alternative<PointMassForm>(*form_); }

    // Draws one ontic state; resizes pt as needed.
    void sample_into(OnticPoint& pt, Rng& rng) const {
        pt.coords.resize(space_.leaf_count());
        sample_rec(pt, 0, rng);
    }

    // True when the state assigns positive weight (above eps) near pt.
    bool support_contains(const OnticPoint& pt, double eps = kSupportEps) const {
        if (std::holds_alternative<PointMassForm>(*form_))
            return point_equal(std::get<PointMassForm>(*form_).atom, pt);
        if (std::holds_alternative<DensityForm>(*form_))
            return std::get<DensityForm>(*form_).pdf(pt) > eps;
        if (std::holds_alternative<MixtureForm>(*form_)) {
            for (const auto& [w, c] : std::get<MixtureForm>(*form_).components)
                if (w > eps && c.support_contains(pt, eps)) return true;
            return false;
        }
        const auto& factors = std::get<ProductForm>(*form_).factors;
        int offset = 0;
        for (const auto& f : factors) {
            int n = f.space().leaf_count();
            OnticPoint slice;
            slice.coords.assign(pt.coords.begin() + offset, pt.coords.begin() + offset + n);
            if (!f.support_contains(slice, eps)) return false;
            offset += n;
        }
        return true;
    }

private:
    EpistemicState(OnticSpace space, Form form)
        : space_(std::move(space)), form_(std::make_shared<Form>(std::move(form))) {}

    int sample_rec(OnticPoint& pt, int offset, Rng& rng) const {
        if (std::holds_alternative<PointMassForm>(*form_)) {
            const OnticPoint& atom = std::get<PointMassForm>(*form_).atom;
            for (const auto& c : atom.coords) pt.coords[offset++] = c;
            return offset;
        }
        if (std::holds_alternative<DensityForm>(*form_)) {
            int n = space_.leaf_count();
            if (n == 1 && offset == 0 && pt.size() == 1) {
                std::get<DensityForm>(*form_).sample(pt, rng);
                return 1;
            }
            OnticPoint local;
            std::get<DensityForm>(*form_).sample(local, rng);
            if (local.size() != n)
                throw std::runtime_error("EpistemicState: sampler arity mismatch");
            for (const auto& c : local.coords) pt.coords[offset++] = c;
            return offset;
        }
        if (std::holds_alternative<MixtureForm>(*form_)) {
            const auto& comps = std::get<MixtureForm>(*form_).components;
            double u = rng.uniform();
            double acc = 0.0;
            for (const auto& [w, c] : comps) {
                acc += w;
                if (u < acc) return c.sample_rec(pt, offset, rng);
            }
            return comps.back().second.sample_rec(pt, offset, rng);
        }
        for (const auto& f : std::get<ProductForm>(*form_).factors) offset = f.sample_rec(pt, offset, rng);
        return offset;
    }

    OnticSpace space_;
    std::shared_ptr<const Form> form_;  // immutable, shared across copies
};

// ---------------------------------------------------------------------------
// Indicator functions
// ---------------------------------------------------------------------------

// Response function of a measurement: outcome probabilities conditioned on
// the ontic state. Values live in [0,1] and sum to 1 over outcomes.
class IndicatorFunction {
public:
    using Eval = std::function<double(int, const OnticPoint&)>;

    IndicatorFunction(OnticSpace space, int outcomes, Eval eval, bool deterministic)
        : space_(std::move(space)),
          outcomes_(outcomes),
          eval_(std::move(eval)),
          deterministic_(deterministic) {
        if (outcomes_ < 1) throw std::invalid_argument("IndicatorFunction: need at least one outcome");
        if (!eval_) throw std::invalid_argument("IndicatorFunction: null evaluator");
    }

    double operator()(int k, const OnticPoint& pt) const {
        if (k < 0 || k >= outcomes_) throw std::invalid_argument("IndicatorFunction: outcome out of range");
        return clamp_probability(eval_(k, pt), "IndicatorFunction");
    }

    int outcomes() const { return outcomes_; }
    bool deterministic() const { return deterministic_; }
    const OnticSpace& space() const { return space_; }

    // Optional exact average of the indicator over the uniform-interval
    // coordinates listed in `slots`, with all other coordinates read from the
    // given point. Constructors that know the indicator's structure supply
    // this; it is what makes interval-uniform models integrate exactly.
    void set_interval_marginal(Eval m, std::vector<int> slots) {
        interval_marginal_ = std::move(m);
        interval_marginal_slots_ = std::move(slots);
        std::sort(interval_marginal_slots_.begin(), interval_marginal_slots_.end());
    }
    const Eval& interval_marginal() const { return interval_marginal_; }
    const std::vector<int>& interval_marginal_slots() const { return interval_marginal_slots_; }

private:
    OnticSpace space_;
    int outcomes_;
    Eval eval_;
    bool deterministic_;
    Eval interval_marginal_;
    std::vector<int> interval_marginal_slots_;
};

// ---------------------------------------------------------------------------
// Integration and prediction
// ---------------------------------------------------------------------------

// How to evaluate outcome probabilities. Auto picks the exact path when the
// state expands into weighted atoms (plus uniform-interval coordinates the
// indicator can average exactly) and falls back to Monte Carlo otherwise.
struct Integrator {
    enum class Kind { Auto, Exact, MonteCarlo, ProductRule };

    Kind kind = Kind::Auto;
    std::int64_t samples = 1'000'000;
    std::uint64_t seed = 1;
    int interval_points = 4096;  // midpoint-rule resolution for ProductRule

    static Integrator exact() { return {Kind::Exact, 0, 0, 0}; }
    static Integrator monte_carlo(std::int64_t samples, std::uint64_t seed) {
        return {Kind::MonteCarlo, samples, seed, 0};
    }
    static Integrator automatic(std::int64_t samples, std::uint64_t seed) {
        return {Kind::Auto, samples, seed, 0};
    }
    static Integrator product_rule(int interval_points) {
        return {Kind::ProductRule, 0, 0, interval_points};
    }
};

struct PredictResult {
    double estimate = 0.0;
    double standard_error = 0.0;
    bool exact = false;
};

namespace detail {

// A state expanded into finitely many weighted atoms. Slots listed in `open`
// are uniform-interval coordinates left free (their point entries are
// placeholders).
struct ExpansionTerm {
    double weight;
    OnticPoint point;
    boost::container::small_vector<int, 2> open;
};

inline bool expand_rec(const EpistemicState& s, double weight, int offset, ExpansionTerm base,
                       std::vector<ExpansionTerm>& out);

inline bool expand_state(const EpistemicState& s, std::vector<ExpansionTerm>& out) {
    ExpansionTerm base;
    base.weight = 1.0;
    base.point.coords.resize(s.space().leaf_count());
    return expand_rec(s, 1.0, 0, std::move(base), out);
}

inline bool expand_rec(const EpistemicState& s, double weight, int offset, ExpansionTerm base,
                       std::vector<ExpansionTerm>& out) {
    const auto& form = s.form();
    if (std::holds_alternative<PointMassForm>(form)) {
        const OnticPoint& atom = std::get<PointMassForm>(form).atom;
        for (int i = 0; i < atom.size(); ++i) base.point.coords[offset + i] = atom.coords[i];
        base.weight = weight;
        out.push_back(std::move(base));
        return true;
    }
    if (std::holds_alternative<DensityForm>(form)) {
        if (!std::get<DensityForm>(form).uniform_unit_interval) return false;
        base.point.coords[offset] = 0.0;
        base.open.push_back(offset);
        base.weight = weight;
        out.push_back(std::move(base));
        return true;
    }
    if (std::holds_alternative<MixtureForm>(form)) {
        for (const auto& [w, c] : std::get<MixtureForm>(form).components) {
            if (w <= 0.0) continue;
            if (!expand_rec(c, weight * w, offset, base, out)) return false;
        }
        return true;
    }
    // Product: expand factors left to right, crossing partial terms.
    std::vector<ExpansionTerm> partial{std::move(base)};
    partial.front().weight = weight;
    for (const auto& f : std::get<ProductForm>(form).factors) {
        std::vector<ExpansionTerm> next;
        for (const auto& term : partial)
            if (!expand_rec(f, term.weight, offset, term, next)) return false;
        offset += f.space().leaf_count();
        partial = std::move(next);
    }
    for (auto& t : partial) out.push_back(std::move(t));
    return true;
}

inline double midpoint_over_open(const IndicatorFunction& xi, int k, ExpansionTerm& term,
                                 std::size_t slot, int points) {
    if (slot == term.open.size()) return xi(k, term.point);
    double acc = 0.0;
    for (int i = 0; i < points; ++i) {
        term.point.coords[term.open[slot]] = (i + 0.5) / points;
        acc += midpoint_over_open(xi, k, term, slot + 1, points);
    }
    return acc / points;
}

}  // namespace detail

// Outcome probability of the measurement described by xi for a system whose
// ontic state is distributed as mu.
inline PredictResult predict(const EpistemicState& mu, const IndicatorFunction& xi, int k,
                             const Integrator& integ) {
    if (mu.space() != xi.space())
        throw std::invalid_argument("predict: epistemic state and indicator live on different spaces");
    if (k < 0 || k >= xi.outcomes()) throw std::invalid_argument("predict: outcome out of range");

    if (integ.kind != Integrator::Kind::MonteCarlo) {
        std::vector<detail::ExpansionTerm> terms;
        if (detail::expand_state(mu, terms)) {
            // A term is exact when closed, or when its open slots are exactly
            // the ones the indicator's marginal averages over.
            bool exact_ok = true;
            for (const auto& t : terms) {
                if (t.open.empty()) continue;
                exact_ok = exact_ok && xi.interval_marginal() &&
                           std::equal(t.open.begin(), t.open.end(),
                                      xi.interval_marginal_slots().begin(),
                                      xi.interval_marginal_slots().end());
            }
            if (exact_ok) {
                double acc = 0.0;
                for (const auto& t : terms)
                    acc += t.weight *
                           (t.open.empty() ? xi(k, t.point)
                                           : clamp_probability(xi.interval_marginal()(k, t.point),
                                                               "interval marginal"));
                return {clamp_probability(acc, "predict"), 0.0, true};
            }
            if (integ.kind == Integrator::Kind::ProductRule) {
                double acc = 0.0;
                for (auto& t : terms)
                    acc += t.weight * detail::midpoint_over_open(xi, k, t, 0, integ.interval_points);
                return {clamp_probability(acc, "predict"), 0.0, false};
            }
        }
        if (integ.kind == Integrator::Kind::Exact)
            throw std::invalid_argument("predict: state has no exact finite expansion");
        if (integ.kind == Integrator::Kind::ProductRule)
            throw std::invalid_argument("predict: product rule needs an atomic expansion");
    }

    if (integ.samples < 1) throw std::invalid_argument("predict: sample count must be positive");
    Rng rng(integ.seed);
    OnticPoint pt;
    double sum = 0.0, sumsq = 0.0;
    for (std::int64_t i = 0; i < integ.samples; ++i) {
        mu.sample_into(pt, rng);
        double v = xi(k, pt);
        sum += v;
        sumsq += v * v;
    }
    double n = static_cast<double>(integ.samples);
    double mean = sum / n;
    double var = std::max(0.0, sumsq / n - mean * mean);
    double se = integ.samples > 1 ? std::sqrt(var / (n - 1.0)) : std::sqrt(var);
    return {clamp_probability(mean, "predict"), se, false};
}

// ---------------------------------------------------------------------------
// Support, normalization, determinism
// ---------------------------------------------------------------------------

struct Support {
    std::function<bool(const OnticPoint&)> contains;
    PointSampler sample;  // draws points inside the support
};

inline Support support_of(const EpistemicState& mu, double eps = kSupportEps) {
    Support s;
    s.contains = [mu, eps](const OnticPoint& pt) { return mu.support_contains(pt, eps); };
    s.sample = [mu](OnticPoint& pt, Rng& rng) { mu.sample_into(pt, rng); };
    return s;
}

// Support of one outcome's indicator. The sampler draws ambient points and
// rejects until it lands in the support.
inline Support support_of_outcome(const IndicatorFunction& xi, int k, double eps = kSupportEps,
                                  int max_tries = 1'000'000) {
    if (k < 0 || k >= xi.outcomes())
        throw std::invalid_argument("support_of_outcome: outcome out of range");
    Support s;
    s.contains = [xi, k, eps](const OnticPoint& pt) { return xi(k, pt) > eps; };
    PointSampler ambient = ambient_sampler(xi.space());
    s.sample = [xi, k, eps, ambient, max_tries](OnticPoint& pt, Rng& rng) {
        for (int t = 0; t < max_tries; ++t) {
            ambient(pt, rng);
            if (xi(k, pt) > eps) return;
        }
        throw std::runtime_error("support_of_outcome: no in-support point found");
    };
    return s;
}

struct NormalizationReport {
    double estimate = 0.0;
    double standard_error = 0.0;
    bool pass = false;
};

namespace detail {

inline std::pair<double, double> integral_estimate(const EpistemicState& s, std::int64_t samples,
                                                   std::uint64_t seed) {
    const auto& form = s.form();
    if (std::holds_alternative<PointMassForm>(form)) return {1.0, 0.0};
    if (std::holds_alternative<DensityForm>(form)) {
        const auto& d = std::get<DensityForm>(form);
        Rng rng(seed);
        PointSampler ambient = ambient_sampler(s.space());
        double volume = s.space().ambient_volume();
        OnticPoint pt;
        double sum = 0.0, sumsq = 0.0;
        for (std::int64_t i = 0; i < samples; ++i) {
            ambient(pt, rng);
            double v = d.pdf(pt);
            sum += v;
            sumsq += v * v;
        }
        double n = static_cast<double>(samples);
        double mean = sum / n;
        double var = std::max(0.0, sumsq / n - mean * mean);
        return {volume * mean, volume * std::sqrt(var / std::max(1.0, n - 1.0))};
    }
    if (std::holds_alternative<MixtureForm>(form)) {
        const auto& comps = std::get<MixtureForm>(form).components;
        double est = 0.0, var = 0.0;
        for (std::size_t i = 0; i < comps.size(); ++i) {
            auto [e, se] = integral_estimate(comps[i].second, samples, mix_seed(seed, i));
            est += comps[i].first * e;
            var += comps[i].first * comps[i].first * se * se;
        }
        return {est, std::sqrt(var)};
    }
    const auto& factors = std::get<ProductForm>(form).factors;
    double est = 1.0, rel_var = 0.0;
    for (std::size_t i = 0; i < factors.size(); ++i) {
        auto [e, se] = integral_estimate(factors[i], samples, mix_seed(seed, 0x100 + i));
        est *= e;
        if (e != 0.0) rel_var += (se / e) * (se / e);
    }
    return {est, std::abs(est) * std::sqrt(rel_var)};
}

}  // namespace detail

// Checks that the state integrates to 1 against the ambient measure.
inline NormalizationReport verify_normalization(const EpistemicState& mu,
                                                std::int64_t samples = 1'000'000,
                                                std::uint64_t seed = 1) {
    auto [est, se] = detail::integral_estimate(mu, samples, seed);
    NormalizationReport r{est, se, false};
    r.pass = std::abs(est - 1.0) <= std::max(3.0 * se, 1e-3);
    return r;
}

struct DeterminismReport {
    bool deterministic = true;
    std::optional<OnticPoint> witness;
    int witness_outcome = -1;
    double witness_value = 0.0;
};

// Samples ontic states and checks whether every outcome's indicator value is
// within kDeterminismTol of 0 or 1 everywhere.
inline DeterminismReport classify_outcome_determinism(const IndicatorFunction& xi,
                                                      const PointSampler& sampler, int n,
                                                      std::uint64_t seed) {
    Rng rng(seed);
    OnticPoint pt;
    for (int i = 0; i < n; ++i) {
        sampler(pt, rng);
        for (int k = 0; k < xi.outcomes(); ++k) {
            double v = xi(k, pt);
            if (v > kDeterminismTol && v < 1.0 - kDeterminismTol)
                return {false, pt, k, v};
        }
    }
    return {true, std::nullopt, -1, 0.0};
}

}  // namespace ontics
