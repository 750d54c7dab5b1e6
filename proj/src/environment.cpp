#include "decotunnel/environment.hpp"

#include <cmath>

namespace decotunnel::environment {

using Complex = std::complex<double>;

namespace {
const Complex kI(0.0, 1.0);
}

EnvCoupling make_coupling(EnvModel model, std::vector<EnvState> states) {
    if (states.empty()) throw DomainError("make_coupling: empty ensemble");
    double sum = 0.0;
    for (const auto& s : states) {
        if (!(s.weight >= 0.0) || !std::isfinite(s.weight))
            throw DomainError("make_coupling: weights must be non-negative and finite");
        if (!std::isfinite(s.omega_l) || !std::isfinite(s.delta_omega_l) ||
            !std::isfinite(s.omega_0l))
            throw DomainError("make_coupling: frequencies must be finite");
        sum += s.weight;
    }
    if (std::abs(sum - 1.0) > 1e-10)
        throw DomainError("make_coupling: weights must sum to 1");
    return {model, std::move(states)};
}

twostate::PartitionAmplitudes zurek_evolution(const spectral::ModePair& pair, double xi,
                                              const EnvState& state, double t) {
    const double delta_omega = pair.delta_omega + state.delta_omega_l;
    const double omega_0 = pair.omega_0 + state.omega_0l;
    const double xi2 = xi * xi;
    const Complex phase = std::exp(-kI * omega_0 * t);
    const Complex half = std::exp(-kI * (0.5 * delta_omega * t));
    twostate::PartitionAmplitudes out;
    out.a = phase / (1.0 + xi2) * (half + xi2 / half);
    out.b = phase / (1.0 + xi2) * (-2.0 * kI * xi * std::sin(0.5 * delta_omega * t));
    return out;
}

twostate::PartitionAmplitudes minimal_exchange_evolution(const spectral::ModePair& pair,
                                                         double xi, double omega_l, double t) {
    const double dw = pair.delta_omega;
    const double c = (1.0 - xi * xi) / (1.0 + xi * xi);
    const double b1 = dw * c + omega_l;
    const double b0_sq = dw * dw + 2.0 * omega_l * dw * c + omega_l * omega_l;
    if (!(b0_sq > 0.0))
        throw DegenerateFrequencyError("minimal_exchange_evolution: b0 = 0");
    const double b0 = std::sqrt(b0_sq);

    const Complex phase = std::exp(-kI * (pair.omega_0 + 0.5 * omega_l) * t);
    const Complex up = std::exp(kI * (0.5 * b0 * t));
    twostate::PartitionAmplitudes out;
    out.a = phase * ((b0 - b1) / (2.0 * b0) * up + (b0 + b1) / (2.0 * b0) / up);
    out.b = phase * (-2.0 * kI * (xi / (1.0 + xi * xi)) * (dw / b0) *
                     std::sin(0.5 * b0 * t));
    return out;
}

twostate::PartitionAmplitudes minimal_exchange_derivative(const spectral::ModePair& pair,
                                                          double xi, double omega_l, double t) {
    const double dw = pair.delta_omega;
    const double c = (1.0 - xi * xi) / (1.0 + xi * xi);
    const double b1 = dw * c + omega_l;
    const double b0_sq = dw * dw + 2.0 * omega_l * dw * c + omega_l * omega_l;
    if (!(b0_sq > 0.0))
        throw DegenerateFrequencyError("minimal_exchange_derivative: b0 = 0");
    const double b0 = std::sqrt(b0_sq);
    const double mean = pair.omega_0 + 0.5 * omega_l;

    const Complex phase = std::exp(-kI * mean * t);
    const double cs = std::cos(0.5 * b0 * t);
    const double sn = std::sin(0.5 * b0 * t);
    const Complex a_env = cs - kI * (b1 / b0) * sn;
    const Complex a_env_dot = -0.5 * b0 * sn - kI * (0.5 * b1) * cs;
    const double s_factor = -2.0 * (xi / (1.0 + xi * xi)) * (dw / b0);
    const Complex b_env = kI * s_factor * sn;
    const Complex b_env_dot = kI * s_factor * (0.5 * b0) * cs;

    twostate::PartitionAmplitudes out;
    out.a = phase * (a_env_dot - kI * mean * a_env);
    out.b = phase * (b_env_dot - kI * mean * b_env);
    return out;
}

double minimal_exchange_residual(const spectral::ModePair& pair, double xi, double omega_l,
                                 double t) {
    const auto psi = minimal_exchange_evolution(pair, xi, omega_l, t);
    const auto dpsi = minimal_exchange_derivative(pair, xi, omega_l, t);
    const double c = (1.0 - xi * xi) / (1.0 + xi * xi);
    const double coupling = pair.delta_omega * xi / (1.0 + xi * xi);
    // H = (omega_0 + ...) I + H1 + omega_l |A><A| written out entrywise
    const double h_aa = pair.omega_0 + 0.5 * pair.delta_omega * c + omega_l;
    const double h_bb = pair.omega_0 - 0.5 * pair.delta_omega * c;
    const Complex ra = kI * dpsi.a - (h_aa * psi.a + coupling * psi.b);
    const Complex rb = kI * dpsi.b - (coupling * psi.a + h_bb * psi.b);
    return std::max(std::abs(ra), std::abs(rb));
}

decoherence::DensityMatrix trace_out(
    const std::vector<std::pair<double, twostate::PartitionAmplitudes>>& joint) {
    if (joint.empty()) throw DomainError("trace_out: empty ensemble");
    double sum = 0.0;
    for (const auto& [w, psi] : joint) {
        if (!(w >= 0.0)) throw DomainError("trace_out: negative weight");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-10) throw DomainError("trace_out: weights must sum to 1");

    decoherence::DensityMatrix rho;
    rho.m = Eigen::Matrix2cd::Zero();
    for (const auto& [w, psi] : joint) {
        Eigen::Vector2cd v(psi.a, psi.b);
        rho.m += w * (v * v.adjoint());
    }
    return rho;
}

decoherence::DensityMatrix evolve_ensemble(const spectral::ModePair& pair, double xi,
                                           const EnvCoupling& coupling, double t) {
    std::vector<std::pair<double, twostate::PartitionAmplitudes>> joint;
    joint.reserve(coupling.states.size());
    for (const auto& s : coupling.states) {
        const auto psi = coupling.model == EnvModel::EnergyDiagonal
                             ? zurek_evolution(pair, xi, s, t)
                             : minimal_exchange_evolution(pair, xi, s.omega_l, t);
        joint.emplace_back(s.weight, psi);
    }
    return trace_out(joint);
}

}  // namespace decotunnel::environment
