#ifndef HOMSIM_POLARIZATION_HPP
#define HOMSIM_POLARIZATION_HPP

#include <complex>
#include <variant>

#include "homsim/rng.hpp"

namespace homsim {

using cd = std::complex<double>;

inline constexpr double kMatrixTol = 1e-12;

struct Mat2 {
    cd a00{}, a01{}, a10{}, a11{};

    Mat2 adjoint() const { return {std::conj(a00), std::conj(a10), std::conj(a01), std::conj(a11)}; }
    cd trace() const { return a00 + a11; }
    cd det() const { return a00 * a11 - a01 * a10; }

    static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }

    friend Mat2 operator*(const Mat2& x, const Mat2& y) {
        return {x.a00 * y.a00 + x.a01 * y.a10, x.a00 * y.a01 + x.a01 * y.a11,
                x.a10 * y.a00 + x.a11 * y.a10, x.a10 * y.a01 + x.a11 * y.a11};
    }
    friend Mat2 operator+(const Mat2& x, const Mat2& y) {
        return {x.a00 + y.a00, x.a01 + y.a01, x.a10 + y.a10, x.a11 + y.a11};
    }
    friend Mat2 operator-(const Mat2& x, const Mat2& y) {
        return {x.a00 - y.a00, x.a01 - y.a01, x.a10 - y.a10, x.a11 - y.a11};
    }
    friend Mat2 operator*(double s, const Mat2& x) {
        return {s * x.a00, s * x.a01, s * x.a10, s * x.a11};
    }
};

// Largest element-wise |difference| between two matrices.
double max_abs_diff(const Mat2& x, const Mat2& y);

// Pure polarization state expressed in the channel eigenbasis {|e1>, |e2>}.
// basis_theta/basis_phi record where that basis sits on the Poincare sphere;
// every operation in this library works componentwise in the eigenbasis, so
// the angles are carried as labels only. The relative phase between the two
// components is arg(amp_perp) - arg(amp_par).
class PolarizationState {
  public:
    // Requires |amp_par|^2 + |amp_perp|^2 = 1 within 1e-12.
    PolarizationState(cd amp_par, cd amp_perp, double basis_theta = 0.0, double basis_phi = 0.0);

    // Normalizes the given amplitudes (rejects the zero vector).
    static PolarizationState normalized(cd amp_par, cd amp_perp, double basis_theta = 0.0,
                                        double basis_phi = 0.0);

    // The balanced superposition (|e1> + e^{i delta}|e2>)/sqrt(2).
    static PolarizationState balanced(double delta, double basis_theta = 0.0,
                                      double basis_phi = 0.0);

    cd amp_par() const { return amp_par_; }
    cd amp_perp() const { return amp_perp_; }
    double basis_theta() const { return basis_theta_; }
    double basis_phi() const { return basis_phi_; }

  private:
    cd amp_par_, amp_perp_;
    double basis_theta_, basis_phi_;
};

// <a|b> in the shared eigenbasis.
cd state_overlap(const PolarizationState& a, const PolarizationState& b);

// Global phase is not observable: states are equal when |<a|b>|^2 = 1.
bool same_state_up_to_phase(const PolarizationState& a, const PolarizationState& b,
                            double tol = 1e-9);

// 2x2 density operator in the channel eigenbasis. Construction enforces
// Hermiticity and unit trace within 1e-12 and eigenvalues >= -1e-12.
class DensityMatrix {
  public:
    explicit DensityMatrix(const Mat2& m);
    static DensityMatrix pure(const PolarizationState& psi);
    static DensityMatrix maximally_mixed();

    const Mat2& mat() const { return m_; }
    double min_eigenvalue() const;
    DensityMatrix conjugated_by(const Mat2& unitary) const;  // U rho U^dagger

  private:
    Mat2 m_;
};

// Gaussian temporal wavepacket parameters. tau_c is the standard deviation
// of the temporal amplitude profile (not a FWHM); tau is the differential
// group delay the channel introduces between its two eigenstates; omega is
// the optical carrier frequency and only enters the off-diagonal phase.
struct TemporalProfile {
    double tau_c;
    double tau;
    double omega = 0.0;

    TemporalProfile(double tau_c_, double tau_, double omega_ = 0.0);
};

struct RotationAxis {
    double theta = 0.0;
    double phi = 0.0;
};

enum class PairingPolicy { Alternating, IndependentFair };

struct IdealDepolarizing {
    double p;  // mixing probability in [0, 1]
};
struct TimeEntanglement {
    TemporalProfile profile;
    RotationAxis axis;
};
struct RandomRotation {
    double alpha0;  // rotation half-angle in [0, pi]
    RotationAxis axis;
    PairingPolicy pairing = PairingPolicy::IndependentFair;
};

using ChannelModel = std::variant<IdealDepolarizing, TimeEntanglement, RandomRotation>;

void validate_channel(const ChannelModel& channel);

// (1-p) rho + p I/2.
DensityMatrix apply_ideal_depolarizing(const DensityMatrix& rho, double p);

// Overlap of two Gaussian amplitude wavepackets offset by tau:
// exp(-(tau/tau_c)^2 / 4). Requires tau_c > 0.
double gaussian_overlap(double tau, double tau_c);

// Polarization-time coupling channel: the eigenstate component is delayed by
// tau, and tracing out time leaves the off-diagonals damped by the wavepacket
// overlap and rotated by the carrier phase. Output in the eigenbasis:
//   diag(|amp_par|^2, |amp_perp|^2),
//   off-diag amp_par * conj(amp_perp) * overlap * e^{+i omega tau}.
DensityMatrix apply_time_entanglement_channel(const PolarizationState& psi,
                                              const TemporalProfile& profile);

// Equal mixture of the two rotations diag(1, e^{+-i alpha0}) applied to psi.
// Off-diagonals get multiplied by cos(alpha0).
DensityMatrix apply_random_rotation_mixture(const PolarizationState& psi, double alpha0);

// diag(1, e^{i alpha}) in the eigenbasis.
Mat2 rotation_unitary(double alpha);

// Draws U(+alpha0) or U(-alpha0) with equal probability.
Mat2 sample_rotation(double alpha0, RngStream& rng);

// Applies diag(1, e^{i alpha}) to a pure state.
PolarizationState rotate_state(const PolarizationState& psi, double alpha);

// Degree of polarization sqrt(1 - 4 det(rho)). Round-off within 1e-12 of the
// [0,1] boundary is clamped; anything larger is rejected as an invalid input.
double dop(const DensityMatrix& rho);

}  // namespace homsim

#endif
