#pragma once

#include <utility>
#include <vector>

#include "decotunnel/decoherence.hpp"
#include "decotunnel/spectral.hpp"
#include "decotunnel/twostate.hpp"

namespace decotunnel::environment {

// EnergyDiagonal: the environment shifts the |+>/|-> eigenfrequencies only
// (no energy exchange, extent of tunnelling preserved).
// SectionA: the environment couples to section A exclusively with energy
// E_Al = hbar omega_l (minimal exchange, extent suppressed as omega_l grows).
enum class EnvModel { EnergyDiagonal, SectionA };

struct EnvState {
    double weight = 1.0;
    double omega_l = 0.0;        // SectionA coupling frequency E_Al/hbar
    double delta_omega_l = 0.0;  // EnergyDiagonal splitting shift
    double omega_0l = 0.0;       // EnergyDiagonal mean-frequency shift
};

struct EnvCoupling {
    EnvModel model = EnvModel::EnergyDiagonal;
    std::vector<EnvState> states;
};

EnvCoupling make_coupling(EnvModel model, std::vector<EnvState> states);

// Amplitudes at time t for one environment branch, all particles initially in
// section A. Environmental energy exponents are omitted (they drop out of the
// trace).
twostate::PartitionAmplitudes zurek_evolution(const spectral::ModePair& pair, double xi,
                                              const EnvState& state, double t);

twostate::PartitionAmplitudes minimal_exchange_evolution(const spectral::ModePair& pair,
                                                         double xi, double omega_l, double t);

// Analytic time derivative of the minimal-exchange solution.
twostate::PartitionAmplitudes minimal_exchange_derivative(const spectral::ModePair& pair,
                                                          double xi, double omega_l, double t);

// Max-abs residual of i d/dt psi = (H0 + H1 + omega_l |A><A|) psi at time t.
double minimal_exchange_residual(const spectral::ModePair& pair, double xi, double omega_l,
                                 double t);

// rho_s = sum_l w_l |psi_l><psi_l| over environment branches.
decoherence::DensityMatrix trace_out(
    const std::vector<std::pair<double, twostate::PartitionAmplitudes>>& joint);

// Evolve every branch of the ensemble per the coupling model and trace out.
decoherence::DensityMatrix evolve_ensemble(const spectral::ModePair& pair, double xi,
                                           const EnvCoupling& coupling, double t);

}  // namespace decotunnel::environment
