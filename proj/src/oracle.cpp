#include "decotunnel/oracle.hpp"

#include <algorithm>
#include <random>
#include <cmath>
#include <numbers>

namespace decotunnel::oracle {

namespace {

constexpr double kPi = std::numbers::pi;
const Complex kI(0.0, 1.0);

void check_grid(int n_points) {
    if (n_points < 2000) throw DomainError("grid oracle: N must be >= 2000");
}

void check_barrier(const spectral::BoxGeometry& g, const GridBarrier& b, double dx) {
    if (b.width < 4.0 * dx * (1.0 - 1e-12))
        throw DomainError("GridBarrier: width must span at least 4 grid cells");
    if (std::abs(b.area() - g.s_tilde) > 1e-9 * std::max(1.0, g.s_tilde))
        throw DomainError("GridBarrier: area does not match the geometry's s_tilde");
}

}  // namespace

GridBarrier default_barrier(const spectral::BoxGeometry& g, int n_points) {
    const double dx = g.span() / static_cast<double>(n_points - 1);
    const double width = std::max(4.0 * dx, g.x0() / 200.0);
    return {g.s_tilde / width, width};
}

GridBarrier barrier_with_width(const spectral::BoxGeometry& g, double width) {
    if (!(width > 0.0)) throw DomainError("barrier_with_width: width must be positive");
    return {g.s_tilde / width, width};
}

Eigen::VectorXcd GridHamiltonian::apply(const Eigen::VectorXcd& interior) const {
    const auto m = interior.size();
    Eigen::VectorXcd out(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        Complex v = diag(i) * interior(i);
        if (i > 0) v += offdiag * interior(i - 1);
        if (i + 1 < m) v += offdiag * interior(i + 1);
        out(i) = v;
    }
    return out;
}

GridHamiltonian build_hamiltonian(const spectral::BoxGeometry& g, const GridBarrier& barrier,
                                  int n_points) {
    check_grid(n_points);
    const double dx = g.span() / static_cast<double>(n_points - 1);
    check_barrier(g, barrier, dx);

    GridHamiltonian h;
    h.dx = dx;
    h.x_left = -g.x_b;
    h.n_points = n_points;
    h.offdiag = -0.5 / (dx * dx);
    const int m = n_points - 2;
    h.diag.resize(m);
    const double half_w = 0.5 * barrier.width;
    for (int i = 0; i < m; ++i) {
        const double x = h.x_left + dx * static_cast<double>(i + 1);
        // cell average of the rectangular barrier keeps the total area exact
        const double lo = std::max(x - 0.5 * dx, -half_w);
        const double hi = std::min(x + 0.5 * dx, half_w);
        const double overlap = std::max(0.0, hi - lo);
        h.diag(i) = 1.0 / (dx * dx) + barrier.v0 * overlap / dx;
    }
    return h;
}

namespace {

// Inverse iteration for one eigenvector of the symmetric tridiagonal
// (diagonal `diag`, constant off-diagonal `off`) at a converged eigenvalue.
// Guarded Thomas sweeps on the nearly singular shifted matrix, random start.
Eigen::VectorXd tridiag_eigenvector(const Eigen::VectorXd& diag, double off, double lambda) {
    const auto m = diag.size();
    const double scale = diag.cwiseAbs().maxCoeff() + 2.0 * std::abs(off);
    const double tiny = 1e-14 * scale;

    Eigen::VectorXd denom(m), cp(m);
    denom(0) = diag(0) - lambda;
    if (std::abs(denom(0)) < tiny) denom(0) = tiny;
    cp(0) = off / denom(0);
    for (Eigen::Index i = 1; i < m; ++i) {
        denom(i) = diag(i) - lambda - off * cp(i - 1);
        if (std::abs(denom(i)) < tiny) denom(i) = tiny;
        if (i + 1 < m) cp(i) = off / denom(i);
    }

    std::mt19937_64 rng(0x5eed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    Eigen::VectorXd x(m);
    for (Eigen::Index i = 0; i < m; ++i) x(i) = uni(rng);
    x.normalize();

    Eigen::VectorXd y(m);
    for (int iter = 0; iter < 4; ++iter) {
        y(0) = x(0) / denom(0);
        for (Eigen::Index i = 1; i < m; ++i) y(i) = (x(i) - off * y(i - 1)) / denom(i);
        for (Eigen::Index i = m - 2; i >= 0; --i) y(i) -= cp(i) * y(i + 1);
        x = y.normalized();
    }
    return x;
}

std::vector<GridEigenpair> solve_tridiag(const spectral::BoxGeometry& g,
                                         const GridBarrier& barrier, int n_points, int count,
                                         bool want_vectors) {
    const GridHamiltonian h = build_hamiltonian(g, barrier, n_points);
    const int m = n_points - 2;
    if (count < 1 || count > m) throw DomainError("grid_eigenmodes: bad count");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    Eigen::VectorXd sub = Eigen::VectorXd::Constant(m - 1, h.offdiag);
    es.computeFromTridiagonal(h.diag, sub, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
        throw NumericError("grid_eigenmodes: tridiagonal eigensolver failed");

    std::vector<GridEigenpair> out;
    out.reserve(count);
    for (int j = 0; j < count; ++j) {
        GridEigenpair p;
        p.energy = es.eigenvalues()(j);
        p.k = std::sqrt(std::max(0.0, 2.0 * p.energy));
        if (want_vectors) {
            const Eigen::VectorXd v = tridiag_eigenvector(h.diag, h.offdiag, p.energy);
            // residual check in place of the dense solver's guarantee
            Eigen::VectorXd r = h.diag.cwiseProduct(v) - p.energy * v;
            r.head(m - 1) += h.offdiag * v.tail(m - 1);
            r.tail(m - 1) += h.offdiag * v.head(m - 1);
            if (r.cwiseAbs().maxCoeff() > 1e-6 * std::abs(p.energy))
                throw NumericError("grid_eigenmodes: inverse iteration did not converge");
            p.psi = Eigen::VectorXd::Zero(n_points);
            p.psi.segment(1, m) = v;
            p.psi /= std::sqrt(p.psi.squaredNorm() * h.dx);
        }
        out.push_back(std::move(p));
    }
    return out;
}

}  // namespace

std::vector<GridEigenpair> grid_eigenmodes(const spectral::BoxGeometry& g,
                                           const GridBarrier& barrier, int n_points,
                                           int count) {
    return solve_tridiag(g, barrier, n_points, count, true);
}

std::vector<double> grid_eigenvalues(const spectral::BoxGeometry& g, const GridBarrier& barrier,
                                     int n_points, int count) {
    auto pairs = solve_tridiag(g, barrier, n_points, count, false);
    std::vector<double> evs;
    evs.reserve(pairs.size());
    for (const auto& p : pairs) evs.push_back(p.energy);
    return evs;
}

double section_amplitude_ratio(const GridEigenpair& mode, const spectral::BoxGeometry& g) {
    const double dx = g.span() / static_cast<double>(mode.psi.size() - 1);
    auto sample = [&](double x) {
        const double u = (x + g.x_b) / dx;
        const auto i = static_cast<Eigen::Index>(std::floor(u));
        const double f = u - static_cast<double>(i);
        return mode.psi(i) * (1.0 - f) + mode.psi(i + 1) * f;
    };
    // antinodes nearest the barrier: sin(k(x - x_A)) = -1 at x_A - pi/(2k),
    // sin(k(x + x_B)) = +1 at -x_B + pi/(2k)
    const double quarter = 0.5 * kPi / mode.k;
    if (quarter >= g.x_a || quarter >= g.x_b)
        throw DomainError("section_amplitude_ratio: mode too coarse for both sections");
    const double a_amp = -sample(g.x_a - quarter);
    const double b_amp = sample(-g.x_b + quarter);
    return b_amp / a_amp;
}

GridWavefunction normalized(GridWavefunction psi) {
    const double n = std::sqrt(psi.norm2());
    if (!(n > 0.0)) throw DomainError("normalized: zero wavefunction");
    psi.values /= n;
    return psi;
}

GridWavefunction sharp_partition_state_a(const spectral::BoxGeometry& g, double k0,
                                         int n_points) {
    GridWavefunction psi;
    psi.dx = g.span() / static_cast<double>(n_points - 1);
    psi.x_left = -g.x_b;
    psi.values = Eigen::VectorXcd::Zero(n_points);
    for (int i = 1; i + 1 < n_points; ++i) {
        const double x = psi.x_at(i);
        if (x > 0.0) psi.values(i) = std::sin(k0 * (x - g.x_a));
    }
    return normalized(std::move(psi));
}

double energy_expectation(const GridHamiltonian& h, const GridWavefunction& psi) {
    const Eigen::VectorXcd interior = psi.values.segment(1, psi.values.size() - 2);
    const Complex e = interior.dot(h.apply(interior)) * psi.dx;
    return e.real();
}

CnTrajectory crank_nicolson_evolve(const GridWavefunction& psi0, const spectral::BoxGeometry& g,
                                   const GridBarrier& barrier, double dt, double t_final,
                                   const CnOptions& options) {
    if (!(dt > 0.0) || !(t_final > 0.0))
        throw DomainError("crank_nicolson_evolve: dt and t_final must be positive");
    const int n = static_cast<int>(psi0.values.size());
    const GridHamiltonian h = build_hamiltonian(g, barrier, n);
    const int m = n - 2;

    const double norm0 = psi0.norm2();
    if (std::abs(norm0 - 1.0) > 1e-8)
        throw DomainError("crank_nicolson_evolve: psi0 must be normalised");
    const double energy0 = energy_expectation(h, psi0);

    // (I + i dt H/2) psi' = (I - i dt H/2) psi, solved by the Thomas algorithm.
    // The left-hand matrix is constant; precompute its forward-elimination
    // coefficients once.
    const Complex a = 0.5 * kI * dt * h.offdiag;  // off-diagonal of LHS
    Eigen::VectorXcd b(m);                        // diagonal of LHS
    for (int i = 0; i < m; ++i) b(i) = 1.0 + 0.5 * kI * dt * h.diag(i);

    Eigen::VectorXcd cp(m);  // c'_i of the Thomas sweep
    Eigen::VectorXcd denom(m);
    denom(0) = b(0);
    cp(0) = a / denom(0);
    for (int i = 1; i < m; ++i) {
        denom(i) = b(i) - a * cp(i - 1);
        if (std::abs(denom(i)) == 0.0)
            throw NumericError("crank_nicolson_evolve: tridiagonal solve failure");
        if (i + 1 < m) cp(i) = a / denom(i);
    }

    Eigen::VectorXcd psi = psi0.values.segment(1, m);
    const auto steps = static_cast<std::int64_t>(std::llround(t_final / dt));

    CnTrajectory traj;
    auto record = [&](double t) {
        Eigen::VectorXcd full = Eigen::VectorXcd::Zero(n);
        full.segment(1, m) = psi;
        traj.t.push_back(t);
        traj.frames.push_back(std::move(full));
    };
    record(0.0);

    Eigen::VectorXcd rhs(m), y(m);
    for (std::int64_t step = 1; step <= steps; ++step) {
        // rhs = (I - i dt H/2) psi
        for (int i = 0; i < m; ++i) {
            Complex v = (1.0 - 0.5 * kI * dt * h.diag(i)) * psi(i);
            if (i > 0) v -= a * psi(i - 1);
            if (i + 1 < m) v -= a * psi(i + 1);
            rhs(i) = v;
        }
        y(0) = rhs(0) / denom(0);
        for (int i = 1; i < m; ++i) y(i) = (rhs(i) - a * y(i - 1)) / denom(i);
        psi(m - 1) = y(m - 1);
        for (int i = m - 2; i >= 0; --i) psi(i) = y(i) - cp(i) * psi(i + 1);

        if (step % options.record_stride == 0 || step == steps)
            record(dt * static_cast<double>(step));
    }

    GridWavefunction last;
    last.values = traj.frames.back();
    last.dx = h.dx;
    last.x_left = h.x_left;
    const double norm_drift = std::abs(last.norm2() - norm0);
    if (norm_drift > 1e-8)
        throw NumericError("crank_nicolson_evolve: norm drift exceeds 1e-8");
    const double energy_drift = std::abs(energy_expectation(h, last) - energy0);
    if (energy_drift > 1e-6 * std::abs(energy0))
        throw NumericError("crank_nicolson_evolve: energy drift exceeds 1e-6 relative");
    return traj;
}

std::pair<double, double> project_sections(const GridWavefunction& psi,
                                           const spectral::BoxGeometry& /*g*/,
                                           double barrier_width) {
    const double half_w = 0.5 * barrier_width;
    double pa = 0.0, pb = 0.0;
    for (Eigen::Index i = 0; i < psi.values.size(); ++i) {
        const double w = std::norm(psi.values(i)) * psi.dx;
        const double x = psi.x_at(i);
        if (std::abs(x) <= half_w) {
            pa += 0.5 * w;
            pb += 0.5 * w;
        } else if (x > 0.0) {
            pa += w;
        } else {
            pb += w;
        }
    }
    return {pa, pb};
}

LindbladTrajectory dense_lindblad(const decoherence::DensityMatrix& rho0,
                                  const Eigen::MatrixXcd& h, const Eigen::MatrixXcd& basis,
                                  double tau_d, double dt, double t_final, int record_stride) {
    if (rho0.dim() > 64) throw DomainError("dense_lindblad: n must be <= 64");
    const decoherence::DecoherenceChannel channel = decoherence::make_channel(basis, 1.0, tau_d);

    LindbladTrajectory traj;
    decoherence::DensityMatrix rho = rho0;
    traj.t.push_back(0.0);
    traj.frames.push_back(rho);
    const auto steps = static_cast<std::int64_t>(std::llround(t_final / dt));
    for (std::int64_t step = 1; step <= steps; ++step) {
        rho = decoherence::lindblad_step(rho, h, channel, dt);
        if (step % record_stride == 0 || step == steps) {
            traj.t.push_back(dt * static_cast<double>(step));
            traj.frames.push_back(rho);
        }
    }
    return traj;
}

}  // namespace decotunnel::oracle
