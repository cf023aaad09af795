#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <vector>

#include "ontics/geometry.hpp"
#include "ontics/rng.hpp"

namespace ontics {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

// Tolerances used by the validating constructors below.
inline constexpr double kUnitNormTol = 1e-12;
inline constexpr double kOperatorTol = 1e-10;
inline constexpr double kRayEqualTol = 1e-10;
// Probabilities this far outside [0,1] are clamped; anything worse is an error.
inline constexpr double kProbClampWindow = 1e-9;

inline double clamp_probability(double p, const char* what) {
    if (p < -kProbClampWindow || p > 1.0 + kProbClampWindow)
        throw std::invalid_argument(std::string(what) + ": value outside [0,1] beyond tolerance");
    return p < 0.0 ? 0.0 : (p > 1.0 ? 1.0 : p);
}

// Unit vector in Hilbert space. Global phase is not quotiented out; use
// ray_equal to compare up to phase.
class PureState {
public:
    explicit PureState(CVector amplitudes) : amps_(std::move(amplitudes)) {
        if (amps_.size() < 2) throw std::invalid_argument("PureState: dimension must be at least 2");
        if (std::abs(amps_.norm() - 1.0) > kUnitNormTol)
            throw std::invalid_argument("PureState: amplitudes are not normalized");
    }

    int dim() const { return static_cast<int>(amps_.size()); }
    const CVector& amplitudes() const { return amps_; }
    Complex amplitude(int i) const { return amps_(i); }

    CMatrix projector() const { return amps_ * amps_.adjoint(); }

private:
    CVector amps_;
};

inline Complex inner(const PureState& a, const PureState& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("inner: dimension mismatch");
    return a.amplitudes().dot(b.amplitudes());  // Eigen's dot conjugates the left argument
}

inline double overlap(const PureState& a, const PureState& b) { return std::norm(inner(a, b)); }

// Same ray in projective Hilbert space, i.e. equal up to global phase.
inline bool ray_equal(const PureState& a, const PureState& b, double tol = kRayEqualTol) {
    return a.dim() == b.dim() && std::abs(std::abs(inner(a, b)) - 1.0) <= tol;
}

inline PureState basis_state(int dim, int k) {
    CVector v = CVector::Zero(dim);
    v(k) = 1.0;
    return PureState(v);
}

inline PureState qubit(Complex a, Complex b) {
    CVector v(2);
    v << a, b;
    double n = v.norm();
    if (n == 0.0) throw std::invalid_argument("qubit: zero amplitudes");
    return PureState(v / n);
}

// Unit vector on the Bloch sphere; |0> maps to +z.
struct BlochVector {
    Vec3 v;

    explicit BlochVector(const Vec3& u) : v(u) {
        if (std::abs(u.norm() - 1.0) > 1e-9)
            throw std::invalid_argument("BlochVector: not unit length");
    }
};

inline BlochVector bloch_from_state(const PureState& psi) {
    if (psi.dim() != 2) throw std::invalid_argument("bloch_from_state: qubit states only");
    Complex a = psi.amplitude(0), b = psi.amplitude(1);
    Complex c = std::conj(a) * b;
    Vec3 v{2.0 * c.real(), 2.0 * c.imag(), std::norm(a) - std::norm(b)};
    return BlochVector(Vec3{v.x, v.y, v.z}.normalized());
}

inline PureState state_from_bloch(const BlochVector& n) {
    double theta = std::acos(std::clamp(n.v.z, -1.0, 1.0));
    double phi = std::atan2(n.v.y, n.v.x);
    CVector v(2);
    v << Complex(std::cos(theta / 2.0), 0.0),
        std::polar(std::sin(theta / 2.0), phi);
    return PureState(v);
}

namespace detail {

inline void require_hermitian(const CMatrix& m, const char* what) {
    if (m.rows() != m.cols()) throw std::invalid_argument(std::string(what) + ": not square");
    if ((m - m.adjoint()).cwiseAbs().maxCoeff() > kOperatorTol)
        throw std::invalid_argument(std::string(what) + ": not Hermitian");
}

inline Eigen::VectorXd hermitian_eigenvalues(const CMatrix& m) {
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(m, Eigen::EigenvaluesOnly);
    return solver.eigenvalues();
}

}  // namespace detail

// Hermitian, positive semidefinite, unit trace.
class DensityOperator {
public:
    explicit DensityOperator(CMatrix m) : m_(std::move(m)) {
        detail::require_hermitian(m_, "DensityOperator");
        if (std::abs(m_.trace().real() - 1.0) > kOperatorTol || std::abs(m_.trace().imag()) > kOperatorTol)
            throw std::invalid_argument("DensityOperator: trace is not 1");
        if (detail::hermitian_eigenvalues(m_).minCoeff() < -kOperatorTol)
            throw std::invalid_argument("DensityOperator: negative eigenvalue");
    }

    explicit DensityOperator(const PureState& psi) : m_(psi.projector()) {}

    int dim() const { return static_cast<int>(m_.rows()); }
    const CMatrix& matrix() const { return m_; }

private:
    CMatrix m_;
};

// Hermitian with spectrum inside [0, 1].
class PovmEffect {
public:
    explicit PovmEffect(CMatrix m) : m_(std::move(m)) {
        detail::require_hermitian(m_, "PovmEffect");
        Eigen::VectorXd ev = detail::hermitian_eigenvalues(m_);
        if (ev.minCoeff() < -kOperatorTol || ev.maxCoeff() > 1.0 + kOperatorTol)
            throw std::invalid_argument("PovmEffect: eigenvalues outside [0,1]");
    }

    explicit PovmEffect(const PureState& psi) : m_(psi.projector()) {}

    int dim() const { return static_cast<int>(m_.rows()); }
    const CMatrix& matrix() const { return m_; }

private:
    CMatrix m_;
};

// Effects summing to the identity. Outcome order is the element order.
class Povm {
public:
    explicit Povm(std::vector<PovmEffect> effects) : effects_(std::move(effects)) {
        if (effects_.empty()) throw std::invalid_argument("Povm: no effects");
        int d = effects_.front().dim();
        CMatrix sum = CMatrix::Zero(d, d);
        for (const auto& e : effects_) {
            if (e.dim() != d) throw std::invalid_argument("Povm: dimension mismatch");
            sum += e.matrix();
        }
        if ((sum - CMatrix::Identity(d, d)).cwiseAbs().maxCoeff() > kOperatorTol)
            throw std::invalid_argument("Povm: effects do not sum to the identity");
    }

    int dim() const { return effects_.front().dim(); }
    int size() const { return static_cast<int>(effects_.size()); }
    const PovmEffect& effect(int k) const { return effects_.at(k); }
    const std::vector<PovmEffect>& effects() const { return effects_; }

private:
    std::vector<PovmEffect> effects_;
};

// Projective measurement: a POVM of mutually orthogonal projectors.
class Pvm {
public:
    explicit Pvm(std::vector<PovmEffect> projectors) : povm_(std::move(projectors)) {
        for (int i = 0; i < povm_.size(); ++i) {
            const CMatrix& p = povm_.effect(i).matrix();
            if ((p * p - p).cwiseAbs().maxCoeff() > kOperatorTol)
                throw std::invalid_argument("Pvm: element is not a projector");
            for (int j = i + 1; j < povm_.size(); ++j)
                if ((p * povm_.effect(j).matrix()).cwiseAbs().maxCoeff() > kOperatorTol)
                    throw std::invalid_argument("Pvm: projectors are not orthogonal");
        }
    }

    int dim() const { return povm_.dim(); }
    int size() const { return povm_.size(); }
    const PovmEffect& effect(int k) const { return povm_.effect(k); }
    const Povm& as_povm() const { return povm_; }

private:
    Povm povm_;
};

// Two-outcome projective measurement {|phi><phi|, 1 - |phi><phi|}.
inline Pvm ray_test(const PureState& phi) {
    CMatrix p = phi.projector();
    CMatrix id = CMatrix::Identity(phi.dim(), phi.dim());
    return Pvm({PovmEffect(p), PovmEffect(id - p)});
}

inline double born_probability(const DensityOperator& rho, const PovmEffect& effect) {
    if (rho.dim() != effect.dim()) throw std::invalid_argument("born_probability: dimension mismatch");
    return clamp_probability((effect.matrix() * rho.matrix()).trace().real(), "born_probability");
}

inline double born_probability(const PureState& psi, const PovmEffect& effect) {
    if (psi.dim() != effect.dim()) throw std::invalid_argument("born_probability: dimension mismatch");
    double p = (psi.amplitudes().adjoint() * effect.matrix() * psi.amplitudes())(0).real();
    return clamp_probability(p, "born_probability");
}

namespace detail {

inline void check_convex_weights(const std::vector<double>& w, std::size_t n) {
    if (w.size() != n) throw std::invalid_argument("convex_combine: weight count mismatch");
    double sum = 0.0;
    for (double x : w) {
        if (x < -kUnitNormTol) throw std::invalid_argument("convex_combine: negative weight");
        sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-12) throw std::invalid_argument("convex_combine: weights do not sum to 1");
}

}  // namespace detail

inline DensityOperator convex_combine(const std::vector<double>& weights,
                                      const std::vector<DensityOperator>& parts) {
    detail::check_convex_weights(weights, parts.size());
    int d = parts.front().dim();
    CMatrix m = CMatrix::Zero(d, d);
    for (std::size_t i = 0; i < parts.size(); ++i) m += weights[i] * parts[i].matrix();
    return DensityOperator(std::move(m));
}

inline DensityOperator convex_combine(const std::vector<double>& weights,
                                      const std::vector<PureState>& parts) {
    std::vector<DensityOperator> rho;
    rho.reserve(parts.size());
    for (const auto& p : parts) rho.emplace_back(p);
    return convex_combine(weights, rho);
}

inline PovmEffect convex_combine(const std::vector<double>& weights,
                                 const std::vector<PovmEffect>& parts) {
    detail::check_convex_weights(weights, parts.size());
    int d = parts.front().dim();
    CMatrix m = CMatrix::Zero(d, d);
    for (std::size_t i = 0; i < parts.size(); ++i) m += weights[i] * parts[i].matrix();
    return PovmEffect(std::move(m));
}

// Haar-random pure state from normalized complex Gaussian amplitudes.
inline PureState random_state(Rng& rng, int dim) {
    CVector v(dim);
    for (int i = 0; i < dim; ++i) v(i) = Complex(rng.normal(), rng.normal());
    double n = v.norm();
    if (n == 0.0) return basis_state(dim, 0);
    return PureState(v / n);
}

// Haar-random unitary: QR of a complex Ginibre matrix with the phase fix.
inline CMatrix random_unitary(Rng& rng, int dim) {
    CMatrix g(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) g(i, j) = Complex(rng.normal(), rng.normal());
    Eigen::HouseholderQR<CMatrix> qr(g);
    CMatrix q = qr.householderQ();
    CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int i = 0; i < dim; ++i) {
        Complex d = r(i, i);
        q.col(i) *= (d == Complex(0, 0)) ? Complex(1, 0) : d / std::abs(d);
    }
    return q;
}

}  // namespace ontics
