#include "homsim/polarization.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace homsim {

double max_abs_diff(const Mat2& x, const Mat2& y) {
    return std::max({std::abs(x.a00 - y.a00), std::abs(x.a01 - y.a01),
                     std::abs(x.a10 - y.a10), std::abs(x.a11 - y.a11)});
}

PolarizationState::PolarizationState(cd amp_par, cd amp_perp, double basis_theta,
                                     double basis_phi)
    : amp_par_(amp_par), amp_perp_(amp_perp), basis_theta_(basis_theta), basis_phi_(basis_phi) {
    const double n = std::norm(amp_par) + std::norm(amp_perp);
    if (std::abs(n - 1.0) > kMatrixTol)
        throw std::invalid_argument("PolarizationState: amplitudes not normalized (|.|^2 = " +
                                    std::to_string(n) + ")");
}

PolarizationState PolarizationState::normalized(cd amp_par, cd amp_perp, double basis_theta,
                                                double basis_phi) {
    const double n = std::sqrt(std::norm(amp_par) + std::norm(amp_perp));
    if (n == 0.0) throw std::invalid_argument("PolarizationState: zero amplitude vector");
    return PolarizationState(amp_par / n, amp_perp / n, basis_theta, basis_phi);
}

PolarizationState PolarizationState::balanced(double delta, double basis_theta,
                                              double basis_phi) {
    const double r = 1.0 / std::sqrt(2.0);
    return PolarizationState(r, r * std::polar(1.0, delta), basis_theta, basis_phi);
}

cd state_overlap(const PolarizationState& a, const PolarizationState& b) {
    return std::conj(a.amp_par()) * b.amp_par() + std::conj(a.amp_perp()) * b.amp_perp();
}

bool same_state_up_to_phase(const PolarizationState& a, const PolarizationState& b, double tol) {
    return std::abs(std::norm(state_overlap(a, b)) - 1.0) <= tol;
}

DensityMatrix::DensityMatrix(const Mat2& m) : m_(m) {
    if (max_abs_diff(m, m.adjoint()) > kMatrixTol)
        throw std::invalid_argument("DensityMatrix: not Hermitian");
    if (std::abs(m.trace() - cd(1.0)) > kMatrixTol)
        throw std::invalid_argument("DensityMatrix: trace != 1");
    // Eigenvalues of a Hermitian trace-1 matrix: 1/2 +- sqrt(1/4 - det).
    const double d = m.det().real();
    const double disc = std::max(0.25 - d, 0.0);
    if (0.5 - std::sqrt(disc) < -kMatrixTol)
        throw std::invalid_argument("DensityMatrix: negative eigenvalue");
    // Symmetrize away representation round-off.
    m_.a00 = cd(m.a00.real(), 0.0);
    m_.a11 = cd(m.a11.real(), 0.0);
    const cd off = 0.5 * (m.a01 + std::conj(m.a10));
    m_.a01 = off;
    m_.a10 = std::conj(off);
}

DensityMatrix DensityMatrix::pure(const PolarizationState& psi) {
    const cd a = psi.amp_par();
    const cd b = psi.amp_perp();
    return DensityMatrix({std::norm(a), a * std::conj(b), b * std::conj(a), std::norm(b)});
}

DensityMatrix DensityMatrix::maximally_mixed() {
    return DensityMatrix({0.5, 0.0, 0.0, 0.5});
}

double DensityMatrix::min_eigenvalue() const {
    const double d = m_.det().real();
    return 0.5 - std::sqrt(std::max(0.25 - d, 0.0));
}

DensityMatrix DensityMatrix::conjugated_by(const Mat2& unitary) const {
    return DensityMatrix(unitary * m_ * unitary.adjoint());
}

TemporalProfile::TemporalProfile(double tau_c_, double tau_, double omega_)
    : tau_c(tau_c_), tau(tau_), omega(omega_) {
    if (!(tau_c > 0.0)) throw std::invalid_argument("TemporalProfile: tau_c must be > 0");
    if (!(tau >= 0.0)) throw std::invalid_argument("TemporalProfile: tau must be >= 0");
}

void validate_channel(const ChannelModel& channel) {
    if (const auto* d = std::get_if<IdealDepolarizing>(&channel)) {
        if (!(d->p >= 0.0 && d->p <= 1.0))
            throw std::invalid_argument("IdealDepolarizing: p outside [0, 1]");
    } else if (const auto* r = std::get_if<RandomRotation>(&channel)) {
        const double pi = std::acos(-1.0);
        if (!(r->alpha0 >= 0.0 && r->alpha0 <= pi))
            throw std::invalid_argument("RandomRotation: alpha0 outside [0, pi]");
    }
    // TimeEntanglement is validated by its TemporalProfile constructor.
}

DensityMatrix apply_ideal_depolarizing(const DensityMatrix& rho, double p) {
    if (!(p >= 0.0 && p <= 1.0))
        throw std::invalid_argument("apply_ideal_depolarizing: p outside [0, 1]");
    return DensityMatrix((1.0 - p) * rho.mat() + p * Mat2{0.5, 0.0, 0.0, 0.5});
}

double gaussian_overlap(double tau, double tau_c) {
    if (!(tau_c > 0.0)) throw std::invalid_argument("gaussian_overlap: tau_c must be > 0");
    const double x = tau / tau_c;
    return std::exp(-0.25 * x * x);
}

DensityMatrix apply_time_entanglement_channel(const PolarizationState& psi,
                                              const TemporalProfile& profile) {
    const cd a = psi.amp_par();
    const cd b = psi.amp_perp();
    const double overlap = gaussian_overlap(profile.tau, profile.tau_c);
    const cd phase = std::polar(1.0, profile.omega * profile.tau);
    const cd off = a * std::conj(b) * overlap * phase;
    return DensityMatrix({std::norm(a), off, std::conj(off), std::norm(b)});
}

DensityMatrix apply_random_rotation_mixture(const PolarizationState& psi, double alpha0) {
    const DensityMatrix rho = DensityMatrix::pure(psi);
    const Mat2 plus = rotation_unitary(alpha0);
    const Mat2 minus = rotation_unitary(-alpha0);
    const Mat2 mixed = 0.5 * (plus * rho.mat() * plus.adjoint()) +
                       0.5 * (minus * rho.mat() * minus.adjoint());
    return DensityMatrix(mixed);
}

Mat2 rotation_unitary(double alpha) { return {1.0, 0.0, 0.0, std::polar(1.0, alpha)}; }

Mat2 sample_rotation(double alpha0, RngStream& rng) {
    return rotation_unitary(rng.next_bernoulli(0.5) ? alpha0 : -alpha0);
}

PolarizationState rotate_state(const PolarizationState& psi, double alpha) {
    return PolarizationState(psi.amp_par(), psi.amp_perp() * std::polar(1.0, alpha),
                             psi.basis_theta(), psi.basis_phi());
}

double dop(const DensityMatrix& rho) {
    // For a Hermitian trace-1 matrix, 1 - 4 det = (r00 - r11)^2 + 4 |r01|^2.
    // The sum-of-squares form avoids the cancellation that sqrt would amplify
    // near full mixing.
    const Mat2& m = rho.mat();
    const double diag = m.a00.real() - m.a11.real();
    double x = diag * diag + 4.0 * std::norm(m.a01);
    if (x > 1.0) {
        if (x > 1.0 + kMatrixTol)
            throw std::invalid_argument("dop: 1 - 4 det > 1 beyond tolerance");
        x = 1.0;
    }
    return std::sqrt(x);
}

}  // namespace homsim
