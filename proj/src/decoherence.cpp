#include "decotunnel/decoherence.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <functional>
#include <random>
#include <thread>

#include <unsupported/Eigen/MatrixFunctions>

#include "decotunnel/twostate.hpp"

namespace decotunnel::decoherence {

double DensityMatrix::min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (m + m.adjoint()),
                                                       Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

bool DensityMatrix::valid(double trace_tol, double herm_tol, double psd_tol) const {
    return trace_error() < trace_tol && hermiticity_error() < herm_tol &&
           min_eigenvalue() > -psd_tol;
}

DensityMatrix pure_state(const Eigen::VectorXcd& psi) {
    const double n2 = psi.squaredNorm();
    if (n2 <= 0.0) throw DomainError("pure_state: zero vector");
    DensityMatrix rho;
    rho.m = psi * psi.adjoint() / n2;
    return rho;
}

DensityMatrix maximally_mixed(int n) {
    DensityMatrix rho;
    rho.m = Eigen::MatrixXcd::Identity(n, n) / static_cast<double>(n);
    return rho;
}

double von_neumann_entropy(const DensityMatrix& rho) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (rho.m + rho.m.adjoint()),
                                                       Eigen::EigenvaluesOnly);
    double s = 0.0;
    for (int i = 0; i < es.eigenvalues().size(); ++i) {
        const double p = es.eigenvalues()(i);
        if (p > 1e-15) s -= p * std::log(p);
    }
    return s;
}

double purity(const DensityMatrix& rho) { return (rho.m * rho.m).trace().real(); }

DecoherenceChannel make_channel(const Eigen::MatrixXcd& basis, double lambda, double tau_d) {
    if (!(lambda >= 0.0 && lambda <= 1.0))
        throw DomainError("make_channel: lambda must be in [0, 1]");
    if (!(tau_d > 0.0)) throw DomainError("make_channel: tau_d must be positive");
    const double ortho_err =
        (basis.adjoint() * basis - Eigen::MatrixXcd::Identity(basis.cols(), basis.cols()))
            .cwiseAbs()
            .maxCoeff();
    if (ortho_err > 1e-12) throw DomainError("make_channel: basis not orthonormal");
    return {basis, lambda, tau_d};
}

std::vector<Eigen::MatrixXcd> kraus_set(const DecoherenceChannel& channel) {
    if (!(channel.lambda >= 0.0 && channel.lambda <= 1.0))
        throw DomainError("kraus_set: lambda must be in [0, 1]");
    const auto n = channel.basis.cols();
    std::vector<Eigen::MatrixXcd> ops;
    ops.reserve(static_cast<std::size_t>(n) + 1);
    ops.push_back(std::sqrt(1.0 - channel.lambda) *
                  Eigen::MatrixXcd::Identity(channel.basis.rows(), channel.basis.rows()));
    for (Eigen::Index j = 0; j < n; ++j) {
        const Eigen::VectorXcd d = channel.basis.col(j);
        ops.push_back(std::sqrt(channel.lambda) * (d * d.adjoint()));
    }
    return ops;
}

namespace {

// Dephase rho expressed in an orthonormal basis: off-diagonals scaled by
// (1 - lambda), diagonal untouched.
Eigen::MatrixXcd dephase(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& basis,
                         double lambda) {
    Eigen::MatrixXcd in_basis = basis.adjoint() * rho * basis;
    const Eigen::VectorXcd diag = in_basis.diagonal();
    in_basis *= (1.0 - lambda);
    in_basis.diagonal() = diag;
    return basis * in_basis * basis.adjoint();
}

}  // namespace

DensityMatrix apply_kraus(const DensityMatrix& rho, const DecoherenceChannel& channel) {
    if (!(channel.lambda >= 0.0 && channel.lambda <= 1.0))
        throw DomainError("apply_kraus: lambda must be in [0, 1]");
    DensityMatrix out;
    out.m = dephase(rho.m, channel.basis, channel.lambda);
    out.m = 0.5 * (out.m + out.m.adjoint().eval());
    return out;
}

DensityMatrix decoherence_event(const DensityMatrix& rho, const Eigen::MatrixXcd& basis) {
    DensityMatrix out;
    out.m = dephase(rho.m, basis, 1.0);
    out.m = 0.5 * (out.m + out.m.adjoint().eval());
    return out;
}

DensityMatrix lindblad_step(const DensityMatrix& rho, const Eigen::MatrixXcd& h,
                            const DecoherenceChannel& channel, double dt) {
    const double h_norm = h.norm();
    double limit = channel.tau_d;
    if (h_norm > 0.0) limit = std::min(limit, 1.0 / h_norm);
    if (!(dt > 0.0) || dt > 0.5 * limit)
        throw StepSizeError("lindblad_step: dt must be small against tau_d and 1/|H|");

    const Complex i_unit(0.0, 1.0);
    auto rhs = [&](const Eigen::MatrixXcd& r) -> Eigen::MatrixXcd {
        Eigen::MatrixXcd out = -i_unit * (h * r - r * h);
        if (std::isfinite(channel.tau_d))
            out += (dephase(r, channel.basis, 1.0) - r) / channel.tau_d;
        return out;
    };

    const Eigen::MatrixXcd k1 = rhs(rho.m);
    const Eigen::MatrixXcd k2 = rhs(rho.m + 0.5 * dt * k1);
    const Eigen::MatrixXcd k3 = rhs(rho.m + 0.5 * dt * k2);
    const Eigen::MatrixXcd k4 = rhs(rho.m + dt * k3);

    DensityMatrix out;
    out.m = rho.m + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    out.m = 0.5 * (out.m + out.m.adjoint().eval());
    return out;
}

Eigen::MatrixXd pauli_rates(const Eigen::MatrixXcd& u, double tau_d) {
    const auto n = u.rows();
    const double unit_err =
        (u.adjoint() * u - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff();
    if (unit_err > 1e-8) throw DomainError("pauli_rates: U is not unitary");
    if (!(tau_d > 0.0)) throw DomainError("pauli_rates: tau_d must be positive");
    Eigen::MatrixXd g(n, n);
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index k = 0; k < n; ++k)
            g(j, k) = (std::norm(u(k, j)) - (j == k ? 1.0 : 0.0)) / tau_d;
    return g;
}

Eigen::VectorXd markov_evolve(const Eigen::VectorXd& p0, const Eigen::MatrixXd& g, double t) {
    const Eigen::MatrixXd propagator = (g * t).exp();
    return propagator * p0;
}

std::string RateResult::flag() const {
    if (out_of_regime && low_s_hat) return "out_of_regime;low_s_hat";
    if (out_of_regime) return "out_of_regime";
    if (low_s_hat) return "low_s_hat";
    return "";
}

RateResult tunnel_rate_formula(spectral::ModeClass mode_class, double eta, double s_hat,
                               double tau_0, double omega_d) {
    if (!(omega_d > 0.0)) throw DomainError("tunnel_rate_formula: omega_d must be positive");
    if (!(s_hat > 0.0) || !(tau_0 > 0.0))
        throw DomainError("tunnel_rate_formula: s_hat and tau_0 must be positive");

    RateResult r;
    r.low_s_hat = s_hat < 10.0;
    const double tau_d = 1.0 / omega_d;
    const double strong = 1.0 / (s_hat * s_hat * tau_0);

    if (tau_d <= tau_0) {
        // Intensive decoherence: transmission-probability regime, class-blind.
        r.omega_tilde = strong;
        return r;
    }

    using spectral::ModeClass;
    switch (mode_class) {
        case ModeClass::Resonant:
        case ModeClass::NearResonant: {
            const double tau_r = tau_0 * s_hat;  // resonance transmission time
            if (tau_d < tau_r) {
                r.omega_tilde = tau_d / (tau_0 * tau_0 * s_hat * s_hat);
            } else {
                // Infrequent decoherence: saturate at the unitary oscillation
                // frequency; outside the stated Zeno window.
                r.omega_tilde = 1.0 / (tau_0 * s_hat);
                r.out_of_regime = true;
            }
            break;
        }
        case ModeClass::Intermediate: {
            if (eta == 0.0)
                throw DomainError("tunnel_rate_formula: intermediate class requires eta != 0");
            const double abs_eta = std::abs(eta);
            const double omega_switch = abs_eta / (tau_0 * s_hat);
            if (omega_d <= omega_switch)
                r.omega_tilde = omega_d / (eta * eta);
            else
                r.omega_tilde = 1.0 / (tau_0 * tau_0 * s_hat * s_hat * omega_d);
            if (!(abs_eta > 1.0 && abs_eta < s_hat)) r.out_of_regime = true;
            break;
        }
        case ModeClass::NonResonantA:
        case ModeClass::NonResonantB:
            r.omega_tilde = omega_d / (s_hat * s_hat);
            break;
    }
    return r;
}

HybridTrajectory simulate_hybrid(const spectral::ModePair& pair, double xi,
                                 const DecoherenceChannel& channel, double horizon,
                                 const HybridOptions& options) {
    if (!(channel.tau_d > 0.0)) throw DomainError("simulate_hybrid: tau_d must be positive");
    const auto expected_events = static_cast<std::int64_t>(horizon / channel.tau_d);
    if (expected_events < 10)
        throw InsufficientEventsError("simulate_hybrid: fewer than 10 events in horizon");

    std::mt19937_64 rng(options.seed);
    std::exponential_distribution<double> waiting(1.0 / channel.tau_d);

    Eigen::Matrix2cd rho = Eigen::Matrix2cd::Zero();
    rho(0, 0) = 1.0;  // all particles in section A

    HybridTrajectory traj;
    traj.t.push_back(0.0);
    traj.p_a.push_back(1.0);
    traj.p_b.push_back(0.0);

    double t = 0.0;
    while (true) {
        const double wait = options.stochastic ? waiting(rng) : channel.tau_d;
        if (t + wait > horizon) break;
        t += wait;
        const Eigen::Matrix2cd u = twostate::unitary_propagator(pair, xi, wait);
        rho = u * rho * u.adjoint();
        DensityMatrix d;
        d.m = rho;
        rho = decoherence_event(d, channel.basis).m;
        traj.t.push_back(t);
        traj.p_a.push_back(rho(0, 0).real());
        traj.p_b.push_back(rho(1, 1).real());
    }
    if (traj.t.size() < 11)
        throw InsufficientEventsError("simulate_hybrid: fewer than 10 events in horizon");
    return traj;
}

std::optional<double> try_fit_relaxation_rate(const HybridTrajectory& traj) {
    // log(1 - 2 P_B) = -2 gamma t over the window avoiding the early
    // transient and saturation.
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < traj.t.size(); ++i) {
        const double pb = traj.p_b[i];
        if (pb < 0.05 || pb > 0.4) continue;
        const double y = std::log(1.0 - 2.0 * pb);
        sx += traj.t[i];
        sy += y;
        sxx += traj.t[i] * traj.t[i];
        sxy += traj.t[i] * y;
        ++n;
    }
    if (n < 2) return std::nullopt;
    const double denom = static_cast<double>(n) * sxx - sx * sx;
    if (denom == 0.0) return std::nullopt;
    const double slope = (static_cast<double>(n) * sxy - sx * sy) / denom;
    if (!(slope < 0.0)) return std::nullopt;
    return -0.5 * slope;
}

double fit_relaxation_rate(const HybridTrajectory& traj) {
    const auto g = try_fit_relaxation_rate(traj);
    if (!g) throw NumericError("fit_relaxation_rate: too few points in the fit window");
    return *g;
}

RegimeSubject subject_from_pair(const spectral::BoxGeometry& g, const spectral::ModePair& pair) {
    RegimeSubject s;
    s.mode_class = pair.minus.mode_class;
    s.eta = pair.minus.eta;
    s.s_hat = g.s_hat(pair.k0);
    s.tau_0 = g.tau0(pair.k0);
    s.pair = pair;
    return s;
}

RegimeSubject subject_from_singleton(const spectral::BoxGeometry& g,
                                     const spectral::EigenMode& mode) {
    RegimeSubject s;
    s.mode_class = mode.mode_class;
    s.eta = mode.eta;
    s.s_hat = g.s_hat(mode.k);
    s.tau_0 = g.tau0(mode.k);
    return s;
}

namespace {

RegimeRow regime_point(const RegimeSubject& subject, double omega_d,
                       const RegimeOptions& options) {
    RegimeRow row;
    row.mode_class = subject.mode_class;
    row.eta = subject.eta;
    row.omega_d = omega_d;

    RateResult rate =
        tunnel_rate_formula(subject.mode_class, subject.eta, subject.s_hat, subject.tau_0,
                            omega_d);
    // No decoherence schedule can relax the reduced model faster than the
    // pair oscillates; clip at the exact unitary splitting when available.
    if (subject.pair && rate.omega_tilde > subject.pair->delta_omega) {
        rate.omega_tilde = subject.pair->delta_omega;
        rate.out_of_regime = true;
    }
    row.omega_tilde_formula = rate.omega_tilde;
    row.flag = rate.flag();

    if (options.simulate && subject.pair) {
        const auto& pair = *subject.pair;
        const double tau_d = 1.0 / omega_d;
        // The exponential-relaxation picture needs several events per
        // oscillation; skip the fit outside the Markov window.
        if (tau_d * pair.delta_omega < 1.0) {
            const double gamma_expected = std::max(rate.omega_tilde, 1e-300);
            const double horizon = 1.5 / gamma_expected;
            if (horizon / tau_d <= options.max_events && horizon / tau_d >= 10.0) {
                DecoherenceChannel channel{Eigen::Matrix2cd::Identity(), 1.0, tau_d};
                HybridOptions hopts;
                hopts.stochastic = options.stochastic_events;
                hopts.seed = options.seed ^ std::hash<double>{}(omega_d);
                const auto traj = simulate_hybrid(pair, pair.xi, channel, horizon, hopts);
                row.omega_tilde_sim = try_fit_relaxation_rate(traj);
            }
        }
        if (!row.omega_tilde_sim && options.simulate) {
            if (!row.flag.empty()) row.flag += ";";
            row.flag += "sim_skipped";
        }
    }
    return row;
}

}  // namespace

std::vector<RegimeRow> regime_map(const spectral::BoxGeometry& /*g*/,
                                  const std::vector<RegimeSubject>& subjects,
                                  const std::vector<double>& omega_d_grid,
                                  const RegimeOptions& options) {
    std::vector<double> grid = omega_d_grid;
    std::sort(grid.begin(), grid.end());

    struct Task {
        std::size_t subject;
        double omega_d;
    };
    std::vector<Task> tasks;
    for (std::size_t s = 0; s < subjects.size(); ++s)
        for (double w : grid) tasks.push_back({s, w});

    std::vector<RegimeRow> rows(tasks.size());
    const int threads = std::max(1, options.threads);
    if (threads == 1) {
        for (std::size_t i = 0; i < tasks.size(); ++i)
            rows[i] = regime_point(subjects[tasks[i].subject], tasks[i].omega_d, options);
    } else {
        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= tasks.size()) break;
                rows[i] = regime_point(subjects[tasks[i].subject], tasks[i].omega_d, options);
            }
        };
        std::vector<std::thread> pool;
        for (int w = 0; w < threads; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return rows;
}

}  // namespace decotunnel::decoherence
