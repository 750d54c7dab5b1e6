#pragma once

#include <complex>

#include <Eigen/Dense>

#include "decotunnel/errors.hpp"

namespace decotunnel::barrier {

using Complex = std::complex<double>;

// Transmission/reflection amplitudes of a delta barrier of dimensionless
// strength s_hat, in the fixed phase convention
//   q = 1/(1 + i s_hat),  r = -i s_hat/(1 + i s_hat).
// Unitarity gives |q|^2 + |r|^2 = 1 and chi = q^2/r^2 real, <= 0.
struct ScatterCoefficients {
    Complex q;
    Complex r;
    double s_hat;
};

// S matrix [[r, q], [q, r]] connecting incoming (A-, B-) to outgoing (A+, B+)
// amplitudes. Symmetric for the symmetric barrier, unitary always.
struct ScatterMatrix {
    Eigen::Matrix2cd entries;
};

// Transfer matrix (1/q) [[1, -r], [r, q^2 - r^2]] mapping (A+, A-) -> (B-, B+)
// across the barrier; |det M| = 1.
struct TransferMatrix {
    Eigen::Matrix2cd entries;
};

ScatterCoefficients delta_scatter(double s_hat);
ScatterMatrix scatter_matrix(const ScatterCoefficients& c);
TransferMatrix transfer_matrix(const ScatterCoefficients& c);

}  // namespace decotunnel::barrier
