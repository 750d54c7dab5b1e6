// Acceptance suite: one check per shipped criterion, one PASS/FAIL line each.
// Exit code is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <vector>

#include "decotunnel/barrier.hpp"
#include "decotunnel/csv.hpp"
#include "decotunnel/decoherence.hpp"
#include "decotunnel/environment.hpp"
#include "decotunnel/oracle.hpp"
#include "decotunnel/runner.hpp"
#include "decotunnel/spectral.hpp"
#include "decotunnel/twostate.hpp"

using namespace decotunnel;
using Complex = std::complex<double>;
using Clock = std::chrono::steady_clock;

namespace {

constexpr double kPi = std::numbers::pi;
int failures = 0;

void report(int number, const char* name, bool pass, const std::string& detail) {
    std::printf("[%s] criterion %2d: %s (%s)\n", pass ? "PASS" : "FAIL", number, name,
                detail.c_str());
    if (!pass) ++failures;
}

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

Eigen::Matrix2cd expm_oracle(const Eigen::Matrix2cd& h, double t) {
    const Complex i_unit(0.0, 1.0);
    const double a = 0.5 * (h(0, 0) + h(1, 1)).real();
    const double bx = h(0, 1).real();
    const double by = -h(0, 1).imag();
    const double bz = 0.5 * (h(0, 0) - h(1, 1)).real();
    const double bnorm = std::sqrt(bx * bx + by * by + bz * bz);
    Eigen::Matrix2cd out = std::cos(bnorm * t) * Eigen::Matrix2cd::Identity();
    if (bnorm > 0.0) {
        Eigen::Matrix2cd bs;
        bs << Complex(bz, 0.0), Complex(bx, -by), Complex(bx, by), Complex(-bz, 0.0);
        out -= i_unit * std::sin(bnorm * t) / bnorm * bs;
    }
    return std::exp(-i_unit * a * t) * out;
}

spectral::ModePair synthetic_pair(double omega_0, double delta_omega, double xi) {
    spectral::ModePair p;
    p.omega_0 = omega_0;
    p.delta_omega = delta_omega;
    p.xi = xi;
    return p;
}

void criterion_1_scattering() {
    const auto start = Clock::now();
    double worst = 0.0;
    for (double s : {0.0, 0.5, 1.0, 10.0, 100.0}) {
        const auto c = barrier::delta_scatter(s);
        worst = std::max(worst, std::abs(std::norm(c.q) - 1.0 / (1.0 + s * s)));
    }
    const double asym_rel =
        std::abs(std::norm(barrier::delta_scatter(10.0).q) - 0.01) / 0.01;
    const double elapsed = seconds_since(start);
    std::ostringstream d;
    d << "max ||q|^2 - 1/(1+s^2)| = " << worst << ", s=10 vs 1/s^2 off by "
      << 100.0 * asym_rel << "%, " << elapsed << " s";
    report(1, "scattering exactness", worst < 1e-12 && asym_rel < 0.01 && elapsed < 1.0,
           d.str());
}

void criterion_2_dispersion_asymptotics() {
    const auto start = Clock::now();
    const double strengths[3] = {1e2, 1e3, 1e4};
    double rel[3];
    double worst_anti = 0.0;
    for (int i = 0; i < 3; ++i) {
        spectral::BoxGeometry g(1.0, 1.0, strengths[i]);
        const auto modes = spectral::find_modes(g, 4.0);
        // antisymmetric root exact at pi j / x0
        worst_anti = std::max(worst_anti, std::abs(modes[1].k - kPi));
        const double split_exact = modes[1].k - modes[0].k;
        const double split_formula = kPi / strengths[i];  // from the symmetric-mode expansion
        rel[i] = std::abs(split_formula - split_exact) / split_exact;
    }
    const double slope =
        std::log10(rel[2] / rel[0]) / std::log10(strengths[2] / strengths[0]);
    const double elapsed = seconds_since(start);
    std::ostringstream d;
    d << "slope " << slope << " (target -1 +- 0.1), antisym |k - pi| = " << worst_anti
      << ", " << elapsed << " s";
    report(2, "dispersion vs asymptotics",
           std::abs(slope + 1.0) < 0.1 && worst_anti < 1e-12 && elapsed < 5.0, d.str());
}

void criterion_3_pair_identity() {
    std::mt19937_64 rng(303);
    std::uniform_real_distribution<double> eta_dist(-30.0, 30.0);
    std::uniform_real_distribution<double> ratio_dist(0.3, 3.0);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        spectral::BoxGeometry g(1.0, ratio_dist(rng), 1000.0);
        const double eta = eta_dist(rng);
        const auto p = spectral::near_resonant_params(eta / (2.0 * 1000.0), 1.0, g, 1);
        worst = std::max(worst, std::abs(p.ba_minus * p.ba_plus + g.x_a / g.x_b));
    }
    std::ostringstream d;
    d << "max |(B/A)-(B/A)+ + x_A/x_B| = " << worst;
    report(3, "amplitude-ratio branch product", worst < 1e-6, d.str());
}

void criterion_4_propagator() {
    std::mt19937_64 rng(404);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    double worst_expm = 0.0, worst_comp = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double xi = -4.0 + 8.0 * uni(rng);
        const auto pair = synthetic_pair(10.0 * uni(rng), 3.0 * uni(rng), xi);
        const double t = 40.0 * (uni(rng) - 0.5);
        const Eigen::Matrix2cd u = twostate::unitary_propagator(pair, xi, t);
        const auto h = twostate::two_state_hamiltonian(pair, xi);
        worst_expm = std::max(worst_expm, (u - expm_oracle(h.full(), t)).cwiseAbs().maxCoeff());
        const double t2 = 10.0 * uni(rng);
        const Eigen::Matrix2cd split = twostate::unitary_propagator(pair, xi, t2) *
                                       twostate::unitary_propagator(pair, xi, t);
        const Eigen::Matrix2cd joint = twostate::unitary_propagator(pair, xi, t + t2);
        worst_comp = std::max(worst_comp, (split - joint).cwiseAbs().maxCoeff());
    }
    std::ostringstream d;
    d << "max |U - expm| = " << worst_expm << ", max composition gap = " << worst_comp;
    report(4, "two-state propagator", worst_expm < 1e-9 && worst_comp < 1e-10, d.str());
}

void criterion_5_oracle_fidelity() {
    const auto start = Clock::now();
    const double k0 = kPi;
    spectral::BoxGeometry g(1.0, 1.0, 20.0 * k0);  // s^ = 20 at the pair
    const int n = 4000;
    const double dx = g.span() / (n - 1);
    const auto barrier = oracle::default_barrier(g, n);
    const auto evs = oracle::grid_eigenvalues(g, barrier, n, 2);
    const double dw_grid = evs[1] - evs[0];
    const double period = 2.0 * kPi / dw_grid;
    const auto psi0 = oracle::sharp_partition_state_a(g, k0, n);
    const auto traj =
        oracle::crank_nicolson_evolve(psi0, g, barrier, period / 6000.0, period, {24});
    double max_dev = 0.0;
    for (std::size_t i = 0; i < traj.t.size(); ++i) {
        oracle::GridWavefunction f{traj.frames[i], dx, -g.x_b};
        const auto [pa, pb] = oracle::project_sections(f, g, barrier.width);
        const double predicted = std::pow(std::sin(0.5 * dw_grid * traj.t[i]), 2);
        max_dev = std::max(max_dev, std::abs(pb - predicted));
    }
    const double elapsed = seconds_since(start);
    std::ostringstream d;
    d << "max |P_B(grid) - P_B(two-state)| = " << max_dev << " over one Rabi period, " << elapsed
      << " s at N = 4000";
    report(5, "oracle fidelity (CN vs two-state law)", max_dev <= 0.05 && elapsed < 120.0,
           d.str());
}

void criterion_6_zeno() {
    spectral::BoxGeometry g(1.0, 1.0, 100.0 * kPi);  // s^ = 100 at k0 = pi
    const auto pairs = spectral::pair_modes(spectral::find_modes(g, 4.0), g);
    const auto& pair = pairs.front();
    const double s_hat = g.s_hat(pair.k0);
    const double tau_0 = g.tau0(pair.k0);
    const double tau_r = tau_0 * s_hat;

    // tau_d in [5 tau_0, tau_r/10]
    std::vector<double> taus, gammas;
    const int points = 6;
    for (int i = 0; i < points; ++i) {
        const double tau_d =
            5.0 * tau_0 * std::pow((tau_r / 10.0) / (5.0 * tau_0),
                                   static_cast<double>(i) / (points - 1));
        decoherence::DecoherenceChannel channel{Eigen::Matrix2cd::Identity(), 1.0, tau_d};
        const double gamma_guess =
            0.25 * pair.delta_omega * pair.delta_omega * tau_d;
        const auto traj =
            decoherence::simulate_hybrid(pair, pair.xi, channel, 1.5 / gamma_guess, {});
        taus.push_back(tau_d);
        gammas.push_back(decoherence::fit_relaxation_rate(traj));
    }
    const double slope = std::log(gammas.back() / gammas.front()) /
                         std::log(taus.back() / taus.front());

    double ratio_lo = 1e300, ratio_hi = 0.0;
    for (int i = 0; i < points; ++i) {
        const double formula =
            decoherence::tunnel_rate_formula(spectral::ModeClass::Resonant, 0.0, s_hat,
                                             tau_0, 1.0 / taus[i])
                .omega_tilde;
        const double r = gammas[i] / formula;
        ratio_lo = std::min(ratio_lo, r);
        ratio_hi = std::max(ratio_hi, r);
    }
    const bool slope_ok = std::abs(slope - 1.0) < 0.15;
    const bool band_ok = ratio_lo > 0.5 && ratio_hi < 2.0;
    std::ostringstream d;
    d << "slope " << slope << " (target +1 +- 0.15), gamma/formula in [" << ratio_lo << ", "
      << ratio_hi << "] (target [0.5, 2]); the event chain carries the varsigma^2 = 1/4 "
      << "factor the order-of-magnitude formula absorbs";
    report(6, "Zeno regime", slope_ok && band_ok, d.str());
}

void criterion_7_regime_map_shape() {
    const auto start = Clock::now();
    spectral::BoxGeometry g(1.0, 1.0, 100.0 * kPi);
    const auto pairs = spectral::pair_modes(spectral::find_modes(g, 4.0), g);
    auto resonant = decoherence::subject_from_pair(g, pairs.front());
    const double s_hat = resonant.s_hat;
    const double tau_0 = resonant.tau_0;

    auto intermediate = resonant;
    intermediate.mode_class = spectral::ModeClass::Intermediate;
    intermediate.eta = 10.0;
    intermediate.pair.reset();
    auto nonres = resonant;
    nonres.mode_class = spectral::ModeClass::NonResonantA;
    nonres.eta = s_hat;
    nonres.pair.reset();

    std::vector<double> grid;
    const double lo = 1e-2 / (tau_0 * s_hat), hi = 10.0 / tau_0;
    for (int i = 0; i < 40; ++i) grid.push_back(lo * std::pow(hi / lo, i / 39.0));

    const auto rows = decoherence::regime_map(g, {resonant, intermediate, nonres}, grid, {});
    bool monotone = true;
    for (int i = 1; i < 40; ++i) {
        monotone = monotone &&
                   rows[i].omega_tilde_formula <= rows[i - 1].omega_tilde_formula * (1 + 1e-12);
        monotone = monotone && rows[80 + i].omega_tilde_formula >=
                                   rows[80 + i - 1].omega_tilde_formula * (1 - 1e-12);
    }
    const double common = 1.0 / (s_hat * s_hat * tau_0);
    int nearest = 0;
    for (int i = 1; i < 40; ++i)
        if (std::abs(std::log(grid[i] * tau_0)) < std::abs(std::log(grid[nearest] * tau_0)))
            nearest = i;
    const double res_at = rows[nearest].omega_tilde_formula / common;
    const double non_at = rows[80 + nearest].omega_tilde_formula / common;
    int arg_max = 40;
    for (int i = 40; i < 80; ++i)
        if (rows[i].omega_tilde_formula > rows[arg_max].omega_tilde_formula) arg_max = i;
    const double switch_omega = intermediate.eta / (tau_0 * s_hat);
    const double log_step = std::log(grid[1] / grid[0]);
    const double max_off = std::abs(std::log(rows[arg_max].omega_d / switch_omega));
    const double elapsed = seconds_since(start);

    const bool pass = monotone && res_at > 0.5 && res_at < 2.0 && non_at > 0.5 &&
                      non_at < 2.0 && max_off < 1.5 * log_step && elapsed < 60.0;
    std::ostringstream d;
    d << "monotone " << (monotone ? "yes" : "NO") << ", at omega_d ~ 1/tau0: res "
      << res_at << "x, nonres " << non_at << "x of 1/(s^2 tau0); intermediate max within "
      << max_off / log_step << " grid steps of |eta|/(tau0 s^); " << elapsed << " s";
    report(7, "regime-map shape", pass, d.str());
}

void criterion_8_markov_relaxation() {
    const auto pair = synthetic_pair(1.0, 0.05, 1.0);
    const double tau_d = 4.0;
    const Eigen::Matrix2cd u = twostate::unitary_propagator(pair, 1.0, tau_d);
    const Eigen::MatrixXd gen = decoherence::pauli_rates(u, tau_d);
    const double gamma = -gen(0, 0);  // W/tau_d
    const double t_star = 10.0 / (2.0 * gamma);
    double worst = 0.0;
    for (double t : {0.1 * t_star, 0.5 * t_star, t_star}) {
        const Eigen::VectorXd p = decoherence::markov_evolve(Eigen::Vector2d(1.0, 0.0), gen, t);
        const double closed = 0.5 * (1.0 - std::exp(-2.0 * gamma * t));
        worst = std::max(worst, std::abs(p(1) - closed));
    }
    const Eigen::VectorXd p_star =
        decoherence::markov_evolve(Eigen::Vector2d(1.0, 0.0), gen, t_star);
    const double gap = std::abs(p_star(1) - 0.5);
    std::ostringstream d;
    d << "|P_B - closed form| max " << worst << ", |P_B(t*) - 1/2| = " << gap;
    report(8, "Markov relaxation", worst < 1e-9 && gap < 1e-3, d.str());
}

void criterion_9_cptp_entropy() {
    std::mt19937_64 rng(909);
    std::normal_distribution<double> gauss;
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    double worst_trace = 0.0, worst_eig = 0.0, worst_entropy = 0.0;
    const int dims[3] = {2, 4, 8};
    for (int trial = 0; trial < 500; ++trial) {
        const int n = dims[trial % 3];
        Eigen::MatrixXcd a(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) a(i, j) = Complex(gauss(rng), gauss(rng));
        decoherence::DensityMatrix rho;
        rho.m = a * a.adjoint();
        rho.m /= rho.m.trace().real();
        Eigen::MatrixXcd b(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) b(i, j) = Complex(gauss(rng), gauss(rng));
        const Eigen::MatrixXcd basis = Eigen::HouseholderQR<Eigen::MatrixXcd>(b).householderQ();
        const auto channel = decoherence::make_channel(basis, uni(rng), 1.0);
        const auto out = decoherence::apply_kraus(rho, channel);
        worst_trace = std::max(worst_trace, out.trace_error());
        worst_eig = std::max(worst_eig, -out.min_eigenvalue());
        worst_entropy =
            std::max(worst_entropy, decoherence::von_neumann_entropy(rho) -
                                        decoherence::von_neumann_entropy(out));
    }
    std::ostringstream d;
    d << "trace err " << worst_trace << ", min eig > -" << worst_eig << ", entropy drop <= "
      << worst_entropy;
    report(9, "CPTP + entropy suite",
           worst_trace < 1e-10 && worst_eig < 1e-10 && worst_entropy < 1e-12, d.str());
}

void criterion_10_appb() {
    std::mt19937_64 rng(1010);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    double worst_res = 0.0;
    for (int i = 0; i < 100; ++i) {
        const double xi = -2.5 + 5.0 * uni(rng);
        const double delta_omega = 0.02 + uni(rng);
        const auto pair = synthetic_pair(4.0 * uni(rng), delta_omega, xi);
        const double omega_l = 20.0 * (uni(rng) - 0.5) * delta_omega;
        worst_res = std::max(
            worst_res,
            environment::minimal_exchange_residual(pair, xi, omega_l, 60.0 * uni(rng)));
    }

    // omega_l = 0 reduction to the bare two-state law
    double worst_red = 0.0;
    const auto pair = synthetic_pair(2.0, 0.2, 1.3);
    for (double t : {0.5, 3.0, 17.0}) {
        const auto env = environment::minimal_exchange_evolution(pair, 1.3, 0.0, t);
        const auto ref = twostate::evolve_amplitudes({}, pair, 1.3, t);
        worst_red = std::max({worst_red, std::abs(env.a - ref.a), std::abs(env.b - ref.b)});
    }

    // extent suppression factor at omega_l = 100 delta_omega
    const double delta_omega = 0.05;
    const auto res_pair = synthetic_pair(1.0, delta_omega, 1.0);
    const double omega_l = 100.0 * delta_omega;
    const double b0 = std::sqrt(delta_omega * delta_omega + omega_l * omega_l);
    double max_pb = 0.0;
    for (int i = 0; i <= 4000; ++i) {
        const double t = (2.0 * kPi / b0) * i / 1000.0;
        max_pb = std::max(
            max_pb,
            std::norm(environment::minimal_exchange_evolution(res_pair, 1.0, omega_l, t).b));
    }
    const double suppression = max_pb / 1.0;  // 4 varsigma^2 = 1 at xi = 1
    const double expected = std::pow(delta_omega / omega_l, 2);
    const double supp_rel = std::abs(suppression - expected) / expected;

    std::ostringstream d;
    d << "max residual " << worst_res << ", omega_l = 0 reduction gap " << worst_red
      << ", suppression off by " << 100.0 * supp_rel << "%";
    report(10, "Appendix-B environment solution",
           worst_res < 1e-8 && worst_red < 1e-13 && supp_rel < 0.10, d.str());
}

void criterion_11_abl() {
    std::mt19937_64 rng(1111);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    bool exact = true;
    for (int i = 0; i < 100; ++i) {
        twostate::PartitionAmplitudes psi{{uni(rng), uni(rng)}, {uni(rng), uni(rng)}};
        if (psi.norm2() == 0.0) continue;
        exact = exact && twostate::abl_probability(psi, std::nullopt, twostate::Section::A) ==
                             twostate::born_probability(psi, twostate::Section::A);
        exact = exact && twostate::abl_probability(psi, std::nullopt, twostate::Section::B) ==
                             twostate::born_probability(psi, twostate::Section::B);
    }
    report(11, "ABL reverts to Born without post-selection",
           exact, exact ? "bitwise equal over 100 random states" : "mismatch found");
}

void criterion_12_determinism() {
    namespace fs = std::filesystem;
    const fs::path base = fs::temp_directory_path() / "decotunnel_acceptance";
    fs::remove_all(base);
    fs::create_directories(base);
    const fs::path cfg_path = base / "fig3.json";
    {
        std::ofstream cfg(cfg_path);
        cfg << R"({
          "geometry": {"x_A": 1.0, "x_B": 1.0, "s_tilde": 314.159265},
          "modes": {"k_max": 4.0},
          "decoherence": {
            "omega_d_grid": {"min": 0.05, "max": 20.0, "points": 25, "log": true},
            "events": "stochastic",
            "seed": 42,
            "simulate": true
          }
        })";
    }
    cli::RunOptions opt1, opt2;
    opt1.out_dir = (base / "run1").string();
    opt2.out_dir = (base / "run2").string();
    opt2.threads = 4;
    const int rc1 = cli::run("regime-map", cfg_path.string(), opt1);
    const int rc2 = cli::run("regime-map", cfg_path.string(), opt2);
    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream s;
        s << in.rdbuf();
        return s.str();
    };
    const std::string a = slurp(base / "run1" / "regime.csv");
    const std::string b = slurp(base / "run2" / "regime.csv");
    std::ostringstream d;
    d << "exit codes " << rc1 << "/" << rc2 << ", " << a.size() << " bytes, identical: "
      << (a == b ? "yes" : "NO");
    report(12, "regime-map determinism", rc1 == 0 && rc2 == 0 && !a.empty() && a == b,
           d.str());
}

}  // namespace

int main() {
    std::printf("decotunnel acceptance suite\n");
    criterion_1_scattering();
    criterion_2_dispersion_asymptotics();
    criterion_3_pair_identity();
    criterion_4_propagator();
    criterion_5_oracle_fidelity();
    criterion_6_zeno();
    criterion_7_regime_map_shape();
    criterion_8_markov_relaxation();
    criterion_9_cptp_entropy();
    criterion_10_appb();
    criterion_11_abl();
    criterion_12_determinism();
    std::printf("%d of 12 criteria failed\n", failures);
    return failures;
}
