#pragma once

#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "ontics/ontology.hpp"

namespace ontics::models {

// ---------------------------------------------------------------------------
// Projective-ray model (bb): the ontic state is the quantum state itself.
// ---------------------------------------------------------------------------

inline OnticSpace bb_space(int dim) { return OnticSpace::ray_labels(dim); }

inline EpistemicState bb_epistemic(const PureState& psi) {
    return EpistemicState::point_mass(bb_space(psi.dim()), OnticPoint{psi});
}

inline IndicatorFunction bb_indicator(const Povm& effects) {
    auto shared = std::make_shared<Povm>(effects);
    auto eval = [shared](int k, const OnticPoint& pt) {
        return born_probability(pt.ray(0), shared->effect(k));
    };
    return IndicatorFunction(bb_space(effects.dim()), effects.size(), eval, false);
}

// ---------------------------------------------------------------------------
// Sphere model (ks): qubit ontic states on the unit sphere, cosine-weighted
// epistemic hemispheres, sharp hemisphere indicators.
// ---------------------------------------------------------------------------

inline OnticSpace ks_space() { return OnticSpace::unit_sphere(); }

inline EpistemicState ks_epistemic(const BlochVector& psi) {
    Vec3 n = psi.v;
    auto pdf = [n](const OnticPoint& pt) {
        double d = n.dot(pt.vec3(0));
        return d <= 0.0 ? 0.0 : d / M_PI;
    };
    Vec3 e1 = orthogonal_unit(n);
    Vec3 e2 = n.cross(e1);
    // Inverse CDF of the cosine-weighted polar angle: P(theta <= t) = sin^2 t.
    auto sample = [n, e1, e2](OnticPoint& pt, Rng& rng) {
        double u = rng.uniform();
        double z = std::sqrt(1.0 - u);
        double r = std::sqrt(u);
        double phi = 2.0 * M_PI * rng.uniform();
        pt.coords.resize(1);
        pt.coords[0] = z * n + (r * std::cos(phi)) * e1 + (r * std::sin(phi)) * e2;
    };
    return EpistemicState::density(ks_space(), pdf, sample);
}

inline EpistemicState ks_epistemic(const PureState& psi) {
    return ks_epistemic(bloch_from_state(psi));
}

// Two-outcome hemisphere test: outcome 0 fires on the phi side.
inline IndicatorFunction ks_indicator(const BlochVector& phi) {
    Vec3 a = phi.v;
    auto eval = [a](int k, const OnticPoint& pt) {
        double v = heaviside(a.dot(pt.vec3(0)));
        return k == 0 ? v : 1.0 - v;
    };
    return IndicatorFunction(ks_space(), 2, eval, true);
}

inline IndicatorFunction ks_indicator(const PureState& phi) {
    return ks_indicator(bloch_from_state(phi));
}

// ---------------------------------------------------------------------------
// Ray-and-dial model (bell1): the quantum state plus a uniform dial on [0,1]
// that picks the outcome through cumulative Born weights.
// ---------------------------------------------------------------------------

inline OnticSpace bell1_space(int dim) {
    return OnticSpace::product({OnticSpace::ray_labels(dim), OnticSpace::unit_interval()});
}

inline EpistemicState bell1_epistemic(const PureState& psi) {
    return EpistemicState::product(
        {EpistemicState::point_mass(OnticSpace::ray_labels(psi.dim()), OnticPoint{psi}),
         EpistemicState::uniform_interval()});
}

namespace detail {

inline double projector_expectation(const PureState& chi, const PovmEffect& p) {
    double v = (chi.amplitudes().adjoint() * p.matrix() * chi.amplitudes())(0).real();
    return std::clamp(v, 0.0, 1.0);
}

}  // namespace detail

// Outcome i fires when the dial lands in [x_{i-1}, x_i), where the partition
// boundaries are the cumulative outcome weights of the ontic ray.
inline IndicatorFunction bell1_indicator(const Pvm& pvm) {
    auto shared = std::make_shared<Pvm>(pvm);
    auto eval = [shared](int k, const OnticPoint& pt) {
        const PureState& chi = pt.ray(0);
        double u = pt.real(1);
        double lo = 0.0;
        for (int j = 0; j < k; ++j) lo += detail::projector_expectation(chi, shared->effect(j));
        double hi = lo + detail::projector_expectation(chi, shared->effect(k));
        return heaviside(u - lo) - heaviside(u - hi);
    };
    IndicatorFunction xi(bell1_space(pvm.dim()), pvm.size(), eval, true);
    xi.set_interval_marginal(
        [shared](int k, const OnticPoint& pt) {
            return detail::projector_expectation(pt.ray(0), shared->effect(k));
        },
        {1});
    return xi;
}

// ---------------------------------------------------------------------------
// Twin-sphere model (bell2): a uniformly random hemisphere point paired with
// a marker of the prepared state; measurement tilts its axis by
// (pi/2)(1 - marker . axis) before a sharp hemisphere test.
// ---------------------------------------------------------------------------

inline OnticSpace bell2_space() {
    return OnticSpace::product({OnticSpace::unit_sphere(), OnticSpace::unit_sphere()});
}

inline EpistemicState bell2_epistemic(const BlochVector& p) {
    Vec3 n = p.v;
    auto pdf = [n](const OnticPoint& pt) {
        return heaviside(n.dot(pt.vec3(0))) / (2.0 * M_PI);
    };
    Vec3 e1 = orthogonal_unit(n);
    Vec3 e2 = n.cross(e1);
    auto sample = [n, e1, e2](OnticPoint& pt, Rng& rng) {
        double z = rng.uniform();
        double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        double phi = 2.0 * M_PI * rng.uniform();
        pt.coords.resize(1);
        pt.coords[0] = z * n + (r * std::cos(phi)) * e1 + (r * std::sin(phi)) * e2;
    };
    return EpistemicState::product(
        {EpistemicState::density(OnticSpace::unit_sphere(), pdf, sample),
         EpistemicState::point_mass(OnticSpace::unit_sphere(), OnticPoint{n})});
}

inline EpistemicState bell2_epistemic(const PureState& psi) {
    return bell2_epistemic(bloch_from_state(psi));
}

// Measurement axis after tilting: rotate the marker towards a through
// (pi/2)(1 - marker . a) in their common plane. Collinear markers leave a
// unchanged (the rotation is by 0 or pi).
inline Vec3 bell2_tilted_axis(const Vec3& marker, const Vec3& a) {
    double c = std::clamp(marker.dot(a), -1.0, 1.0);
    double theta = 0.5 * M_PI * (1.0 - c);
    Vec3 w = a - c * marker;
    double wn = w.norm();
    if (wn < 1e-12) return a;
    w = w * (1.0 / wn);
    return std::cos(theta) * marker + std::sin(theta) * w;
}

inline IndicatorFunction bell2_indicator(const BlochVector& a) {
    Vec3 axis = a.v;
    auto eval = [axis](int k, const OnticPoint& pt) {
        Vec3 tilted = bell2_tilted_axis(pt.vec3(1), axis);
        double v = heaviside(tilted.dot(pt.vec3(0)));
        return k == 0 ? v : 1.0 - v;
    };
    return IndicatorFunction(bell2_space(), 2, eval, true);
}

inline IndicatorFunction bell2_indicator(const PureState& phi) {
    return bell2_indicator(bloch_from_state(phi));
}

// ---------------------------------------------------------------------------
// Label-and-ray model (aaronson): a preferred-basis label carried alongside
// the quantum state; outcomes drawn through a stochastic matrix tied to the
// unitary that maps the measurement basis onto the preferred basis.
// ---------------------------------------------------------------------------

// Column-stochastic transition matrix: entry (j, i) is the probability of
// landing on label j given label i.
class StochasticMatrix {
public:
    explicit StochasticMatrix(Eigen::MatrixXd entries) : m_(std::move(entries)) {
        if (m_.rows() < 1 || m_.cols() < 1) throw std::invalid_argument("StochasticMatrix: empty");
        for (int i = 0; i < m_.cols(); ++i) {
            double col = 0.0;
            for (int j = 0; j < m_.rows(); ++j) {
                if (m_(j, i) < -1e-12) throw std::invalid_argument("StochasticMatrix: negative entry");
                m_(j, i) = std::max(0.0, m_(j, i));
                col += m_(j, i);
            }
            if (std::abs(col - 1.0) > 1e-10)
                throw std::invalid_argument("StochasticMatrix: column does not sum to 1");
        }
    }

    double operator()(int j, int i) const { return m_(j, i); }
    int rows() const { return static_cast<int>(m_.rows()); }
    int cols() const { return static_cast<int>(m_.cols()); }
    const Eigen::MatrixXd& matrix() const { return m_; }

private:
    Eigen::MatrixXd m_;
};

using MatrixProvider = std::function<StochasticMatrix(const CMatrix&, const PureState&)>;

inline void require_unitary(const CMatrix& u) {
    if (u.rows() != u.cols()) throw std::invalid_argument("require_unitary: not square");
    CMatrix id = CMatrix::Identity(u.rows(), u.cols());
    if ((u * u.adjoint() - id).cwiseAbs().maxCoeff() > kOperatorTol)
        throw std::invalid_argument("require_unitary: matrix is not unitary");
}

// The product-theory choice: every column is the outcome distribution of the
// evolved state, so the transition ignores the incoming label.
inline StochasticMatrix aaronson_product_matrix(const CMatrix& u, const PureState& phi) {
    require_unitary(u);
    if (u.cols() != phi.dim()) throw std::invalid_argument("aaronson_product_matrix: dimension mismatch");
    CVector evolved = u * phi.amplitudes();
    int n = phi.dim();
    Eigen::MatrixXd s(n, n);
    for (int j = 0; j < n; ++j) {
        double p = std::norm(evolved(j));
        for (int i = 0; i < n; ++i) s(j, i) = p;
    }
    return StochasticMatrix(std::move(s));
}

inline OnticSpace aaronson_space(int dim) {
    return OnticSpace::product({OnticSpace::discrete_labels(dim), OnticSpace::ray_labels(dim)});
}

// Label weighted by the state's overlap with the preferred basis, ray pinned
// to the prepared state.
inline EpistemicState aaronson_epistemic(const PureState& psi) {
    OnticSpace label_space = OnticSpace::discrete_labels(psi.dim());
    OnticSpace ray_space = OnticSpace::ray_labels(psi.dim());
    std::vector<std::pair<double, EpistemicState>> parts;
    for (int i = 0; i < psi.dim(); ++i) {
        double w = std::norm(psi.amplitude(i));
        if (w <= 1e-15) continue;
        parts.emplace_back(w, EpistemicState::product(
                                  {EpistemicState::point_mass(label_space,
                                                              OnticPoint{static_cast<std::int64_t>(i)}),
                                   EpistemicState::point_mass(ray_space, OnticPoint{psi})}));
    }
    return EpistemicState::mixture(std::move(parts));
}

// Unitary mapping the measurement basis onto the preferred basis.
inline CMatrix aaronson_unitary(const std::vector<PureState>& basis) {
    if (basis.size() < 2) throw std::invalid_argument("aaronson_unitary: need a full basis");
    int n = basis.front().dim();
    if (static_cast<int>(basis.size()) != n)
        throw std::invalid_argument("aaronson_unitary: basis size must match dimension");
    CMatrix b(n, n);
    for (int k = 0; k < n; ++k) b.col(k) = basis[k].amplitudes();
    CMatrix u = b.adjoint();
    require_unitary(u);
    return u;
}

inline IndicatorFunction aaronson_indicator(const std::vector<PureState>& basis,
                                            MatrixProvider provider = aaronson_product_matrix) {
    CMatrix u = aaronson_unitary(basis);
    int n = static_cast<int>(basis.size());
    auto eval = [u, provider](int k, const OnticPoint& pt) {
        StochasticMatrix s = provider(u, pt.ray(1));
        return s(k, static_cast<int>(pt.label(0)));
    };
    return IndicatorFunction(aaronson_space(n), n, eval, false);
}

// ---------------------------------------------------------------------------
// Model registry
// ---------------------------------------------------------------------------

// Ray of a rank-one projector effect.
inline PureState projector_ray(const PovmEffect& e) {
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(e.matrix());
    const auto& ev = solver.eigenvalues();
    int top = 0;
    for (int i = 1; i < ev.size(); ++i)
        if (ev(i) > ev(top)) top = i;
    if (std::abs(ev(top) - 1.0) > kOperatorTol || ev.sum() - ev(top) > kOperatorTol)
        throw std::invalid_argument("projector_ray: effect is not a rank-one projector");
    return PureState(solver.eigenvectors().col(top));
}

inline PureState qubit_orthogonal(const PureState& psi) {
    if (psi.dim() != 2) throw std::invalid_argument("qubit_orthogonal: qubit states only");
    CVector v(2);
    v << -std::conj(psi.amplitude(1)), std::conj(psi.amplitude(0));
    return PureState(v);
}

inline std::vector<PureState> pvm_basis(const Pvm& pvm) {
    std::vector<PureState> basis;
    basis.reserve(pvm.size());
    for (int k = 0; k < pvm.size(); ++k) basis.push_back(projector_ray(pvm.effect(k)));
    return basis;
}

// One qubit instance of each model, behind a uniform interface so the
// verification and analysis drivers can iterate over all of them.
struct Model {
    std::string name;
    OnticSpace space;
    std::function<EpistemicState(const PureState&)> epistemic;
    std::function<IndicatorFunction(const Pvm&)> pvm_indicator;
    // Two-outcome test of a single ray; outcome 0 is the ray itself.
    std::function<IndicatorFunction(const PureState&)> test_indicator;
    bool exact_prediction = false;
    bool outcome_deterministic = false;
    // Native response to an arbitrary effect (outcome 0), where the model
    // defines one; null when only ray tests exist.
    std::function<IndicatorFunction(const PovmEffect&)> effect_indicator;
};

inline IndicatorFunction bb_effect_indicator(const PovmEffect& effect) {
    CMatrix rest = CMatrix::Identity(effect.dim(), effect.dim()) - effect.matrix();
    return bb_indicator(Povm({effect, PovmEffect(std::move(rest))}));
}

inline const std::vector<Model>& qubit_models() {
    static const std::vector<Model> models = [] {
        std::vector<Model> m;
        m.push_back({"bb", bb_space(2),
                     [](const PureState& psi) { return bb_epistemic(psi); },
                     [](const Pvm& p) { return bb_indicator(p.as_povm()); },
                     [](const PureState& phi) { return bb_indicator(ray_test(phi).as_povm()); },
                     true, false,
                     [](const PovmEffect& e) { return bb_effect_indicator(e); }});
        m.push_back({"ks", ks_space(),
                     [](const PureState& psi) { return ks_epistemic(psi); },
                     [](const Pvm& p) { return ks_indicator(projector_ray(p.effect(0))); },
                     [](const PureState& phi) { return ks_indicator(phi); },
                     false, true});
        m.push_back({"bell1", bell1_space(2),
                     [](const PureState& psi) { return bell1_epistemic(psi); },
                     [](const Pvm& p) { return bell1_indicator(p); },
                     [](const PureState& phi) { return bell1_indicator(ray_test(phi)); },
                     true, true});
        m.push_back({"bell2", bell2_space(),
                     [](const PureState& psi) { return bell2_epistemic(psi); },
                     [](const Pvm& p) { return bell2_indicator(projector_ray(p.effect(0))); },
                     [](const PureState& phi) { return bell2_indicator(phi); },
                     false, true});
        m.push_back({"aaronson", aaronson_space(2),
                     [](const PureState& psi) { return aaronson_epistemic(psi); },
                     [](const Pvm& p) { return aaronson_indicator(pvm_basis(p)); },
                     [](const PureState& phi) {
                         return aaronson_indicator({phi, qubit_orthogonal(phi)});
                     },
                     true, false});
        return m;
    }();
    return models;
}

inline const Model& model_by_name(const std::string& name) {
    for (const auto& m : qubit_models())
        if (m.name == name) return m;
    throw std::invalid_argument("unknown model: " + name);
}

}  // namespace ontics::models
