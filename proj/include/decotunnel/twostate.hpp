#pragma once

#include <complex>
#include <optional>

#include <Eigen/Dense>

#include "decotunnel/errors.hpp"
#include "decotunnel/spectral.hpp"

namespace decotunnel::twostate {

using Complex = std::complex<double>;

// Volume-adjusted amplitudes (A~, B~) of the partition states |A>, |B>.
struct PartitionAmplitudes {
    Complex a{1.0, 0.0};
    Complex b{0.0, 0.0};

    double norm2() const { return std::norm(a) + std::norm(b); }
};

enum class Section { A, B };

// H = H0 + H1 in the partition basis: H0 = E0 I, H1 traceless symmetric with
// off-diagonal (E+ - E-) xi/(1 + xi^2).
struct TwoStateHamiltonian {
    Eigen::Matrix2cd h0;
    Eigen::Matrix2cd h1;
    double xi = 0.0;
    double e_plus = 0.0;
    double e_minus = 0.0;

    Eigen::Matrix2cd full() const { return h0 + h1; }
};

struct PartitionTransform {
    double xi = 0.0;
    // Orthogonal matrix mapping (|+>, |->) coordinates to (|A>, |B>).
    Eigen::Matrix2d basis_change;
};

PartitionTransform partition_transform(const spectral::ModePair& pair);

TwoStateHamiltonian two_state_hamiltonian(const spectral::ModePair& pair, double xi);

// Exact unitary evolution matrix of the pair over time t (time origin t0 = 0).
Eigen::Matrix2cd unitary_propagator(const spectral::ModePair& pair, double xi, double t);

PartitionAmplitudes evolve_amplitudes(const PartitionAmplitudes& init,
                                      const spectral::ModePair& pair, double xi, double t);

// Extent of tunnelling: the ceiling of P_B under unitary evolution alone.
inline double extent_of_tunnelling(double xi) { return std::abs(xi) / (1.0 + xi * xi); }

double born_probability(const PartitionAmplitudes& state, Section section);

// Time-symmetric pre/post-selected probability. With no backward state the
// rule reverts to the Born value exactly.
double abl_probability(const PartitionAmplitudes& forward,
                       const std::optional<PartitionAmplitudes>& backward, Section section);

}  // namespace decotunnel::twostate
