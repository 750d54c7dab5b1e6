#include "decotunnel/barrier.hpp"

#include <cmath>

namespace decotunnel::barrier {

ScatterCoefficients delta_scatter(double s_hat) {
    if (!std::isfinite(s_hat) || s_hat < 0.0)
        throw DomainError("delta_scatter: s_hat must be finite and >= 0");
    const Complex denom(1.0, s_hat);
    return {Complex(1.0, 0.0) / denom, Complex(0.0, -s_hat) / denom, s_hat};
}

ScatterMatrix scatter_matrix(const ScatterCoefficients& c) {
    ScatterMatrix s;
    s.entries << c.r, c.q,
                 c.q, c.r;
    return s;
}

TransferMatrix transfer_matrix(const ScatterCoefficients& c) {
    if (std::abs(c.q) == 0.0)
        throw SingularBarrierError("transfer_matrix: opaque barrier (q = 0)");
    TransferMatrix m;
    m.entries << Complex(1.0, 0.0), -c.r,
                 c.r, c.q * c.q - c.r * c.r;
    m.entries /= c.q;
    return m;
}

}  // namespace decotunnel::barrier
