#include "decotunnel/twostate.hpp"

#include <cmath>

namespace decotunnel::twostate {

namespace {
const Complex kI(0.0, 1.0);
}

PartitionTransform partition_transform(const spectral::ModePair& pair) {
    PartitionTransform t;
    t.xi = pair.xi;
    const double norm = 1.0 / std::sqrt(1.0 + pair.xi * pair.xi);
    t.basis_change << norm, norm * pair.xi,
                      norm * pair.xi, -norm;
    return t;
}

TwoStateHamiltonian two_state_hamiltonian(const spectral::ModePair& pair, double xi) {
    TwoStateHamiltonian h;
    h.xi = xi;
    h.e_plus = pair.omega_0 + 0.5 * pair.delta_omega;
    h.e_minus = pair.omega_0 - 0.5 * pair.delta_omega;
    h.h0 = pair.omega_0 * Eigen::Matrix2cd::Identity();
    const double scale = pair.delta_omega / (1.0 + xi * xi);
    h.h1 << 0.5 * (1.0 - xi * xi), xi,
            xi, 0.5 * (xi * xi - 1.0);
    h.h1 *= scale;
    return h;
}

Eigen::Matrix2cd unitary_propagator(const spectral::ModePair& pair, double xi, double t) {
    if (!std::isfinite(t)) throw DomainError("unitary_propagator: t must be finite");
    const double xi2 = xi * xi;
    const Complex omega0 = std::exp(-kI * pair.omega_0 * t);
    const Complex omega = std::exp(-kI * (0.5 * pair.delta_omega * t));
    const Complex off = -2.0 * kI * xi * std::sin(0.5 * pair.delta_omega * t);
    Eigen::Matrix2cd u;
    u << omega + xi2 / omega, off,
         off, xi2 * omega + 1.0 / omega;
    u *= omega0 / (1.0 + xi2);
    return u;
}

PartitionAmplitudes evolve_amplitudes(const PartitionAmplitudes& init,
                                      const spectral::ModePair& pair, double xi, double t) {
    const Eigen::Matrix2cd u = unitary_propagator(pair, xi, t);
    Eigen::Vector2cd v(init.a, init.b);
    v = u * v;
    return {v(0), v(1)};
}

double born_probability(const PartitionAmplitudes& state, Section section) {
    const double pa = std::norm(state.a);
    const double pb = std::norm(state.b);
    const double q1 = pa + pb;
    if (q1 <= 0.0) throw DomainError("born_probability: zero state");
    return (section == Section::A ? pa : pb) / q1;
}

double abl_probability(const PartitionAmplitudes& forward,
                       const std::optional<PartitionAmplitudes>& backward, Section section) {
    if (!backward) return born_probability(forward, section);
    // <phi| P_J |psi> with P_A, P_B the diagonal projectors of the partition basis.
    const double wa = std::norm(std::conj(backward->a) * forward.a);
    const double wb = std::norm(std::conj(backward->b) * forward.b);
    const double q2 = wa + wb;
    if (q2 <= 0.0)
        throw UndefinedSelectionError(
            "abl_probability: pre/post-selection orthogonal in both sections");
    return (section == Section::A ? wa : wb) / q2;
}

}  // namespace decotunnel::twostate
