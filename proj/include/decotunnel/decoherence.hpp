#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "decotunnel/errors.hpp"
#include "decotunnel/spectral.hpp"

namespace decotunnel::decoherence {

using Complex = std::complex<double>;

// n x n complex, Hermitian, positive semidefinite, unit trace.
struct DensityMatrix {
    Eigen::MatrixXcd m;

    int dim() const { return static_cast<int>(m.rows()); }
    double trace_error() const { return std::abs(m.trace() - Complex(1.0, 0.0)); }
    double hermiticity_error() const { return (m - m.adjoint()).cwiseAbs().maxCoeff(); }
    double min_eigenvalue() const;
    bool valid(double trace_tol = 1e-10, double herm_tol = 1e-12, double psd_tol = 1e-10) const;
};

DensityMatrix pure_state(const Eigen::VectorXcd& psi);
DensityMatrix maximally_mixed(int n);
double von_neumann_entropy(const DensityMatrix& rho);
double purity(const DensityMatrix& rho);

// Projective dephasing channel onto an orthonormal basis (columns of `basis`),
// with event strength lambda and characteristic time tau_d (omega_d = 1/tau_d).
struct DecoherenceChannel {
    Eigen::MatrixXcd basis;
    double lambda = 1.0;
    double tau_d = 1.0;
};

DecoherenceChannel make_channel(const Eigen::MatrixXcd& basis, double lambda, double tau_d);

// Kraus set {K_0 = sqrt(1-lambda) I, K_j = sqrt(lambda) |d_j><d_j|}; the
// completeness sum is the identity by construction.
std::vector<Eigen::MatrixXcd> kraus_set(const DecoherenceChannel& channel);

// rho' = sum_j K_j rho K_j^dag. Off-diagonals in the decoherence basis are
// scaled by (1 - lambda); the basis diagonal is untouched.
DensityMatrix apply_kraus(const DensityMatrix& rho, const DecoherenceChannel& channel);

// Full dephasing event (lambda = 1) in the given orthonormal basis.
DensityMatrix decoherence_event(const DensityMatrix& rho, const Eigen::MatrixXcd& basis);

// One RK4 step of d rho/dt = -i [H, rho] + (sum_j L_j rho L_j - rho)/tau_d
// with L_j = |d_j><d_j|. Throws StepSizeError when dt is not small against
// both tau_d and 1/||H||.
DensityMatrix lindblad_step(const DensityMatrix& rho, const Eigen::MatrixXcd& h,
                            const DecoherenceChannel& channel, double dt);

// Pauli master equation generator G_jk = (|U_kj|^2 - delta_jk)/tau_d.
Eigen::MatrixXd pauli_rates(const Eigen::MatrixXcd& u, double tau_d);

// p(t) = exp(G t) p0.
Eigen::VectorXd markov_evolve(const Eigen::VectorXd& p0, const Eigen::MatrixXd& g, double t);

struct RateResult {
    double omega_tilde = 0.0;
    bool out_of_regime = false;
    bool low_s_hat = false;

    std::string flag() const;
};

// Closed-form tunnelling frequency for one mode class under decoherence of
// frequency omega_d. Values outside the stated validity windows are still
// returned but flagged.
RateResult tunnel_rate_formula(spectral::ModeClass mode_class, double eta, double s_hat,
                               double tau_0, double omega_d);

struct HybridOptions {
    bool stochastic = false;  // exponential waiting times instead of fixed spacing
    std::uint64_t seed = 0;
};

struct HybridTrajectory {
    std::vector<double> t;
    std::vector<double> p_a;
    std::vector<double> p_b;
};

// Discrete-event picture: exact unitary evolution between full-dephasing
// events in the channel basis, populations recorded after each event.
HybridTrajectory simulate_hybrid(const spectral::ModePair& pair, double xi,
                                 const DecoherenceChannel& channel, double horizon,
                                 const HybridOptions& options = {});

// Least-squares slope of log(1 - 2 P_B) over the window P_B in [0.05, 0.4];
// returns gamma of the fit P_B = (1 - exp(-2 gamma t))/2.
std::optional<double> try_fit_relaxation_rate(const HybridTrajectory& traj);
double fit_relaxation_rate(const HybridTrajectory& traj);

struct RegimeRow {
    spectral::ModeClass mode_class;
    double eta = 0.0;
    double omega_d = 0.0;
    double omega_tilde_formula = 0.0;
    std::optional<double> omega_tilde_sim;
    std::string flag;
};

// One curve subject of the regime map: a mode class with its eta and local
// scales; simulation runs only when a concrete pair is attached.
struct RegimeSubject {
    spectral::ModeClass mode_class;
    double eta = 0.0;
    double s_hat = 0.0;
    double tau_0 = 0.0;
    std::optional<spectral::ModePair> pair;
};

struct RegimeOptions {
    bool simulate = false;
    bool stochastic_events = false;
    std::uint64_t seed = 0;
    double max_events = 2e6;  // cost guard per grid point
    int threads = 1;
};

// Rows sorted by omega_d within each subject, subjects in input order.
std::vector<RegimeRow> regime_map(const spectral::BoxGeometry& g,
                                  const std::vector<RegimeSubject>& subjects,
                                  const std::vector<double>& omega_d_grid,
                                  const RegimeOptions& options = {});

RegimeSubject subject_from_pair(const spectral::BoxGeometry& g, const spectral::ModePair& pair);
RegimeSubject subject_from_singleton(const spectral::BoxGeometry& g,
                                     const spectral::EigenMode& mode);

}  // namespace decotunnel::decoherence
