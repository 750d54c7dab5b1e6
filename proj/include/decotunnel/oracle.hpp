#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "decotunnel/decoherence.hpp"
#include "decotunnel/errors.hpp"
#include "decotunnel/spectral.hpp"

namespace decotunnel::oracle {

using Complex = std::complex<double>;

// Complex wavefunction on N uniform points spanning [-x_B, x_A], Dirichlet
// endpoints held at exactly zero.
struct GridWavefunction {
    Eigen::VectorXcd values;
    double dx = 0.0;
    double x_left = 0.0;  // position of values(0)

    double x_at(Eigen::Index i) const { return x_left + dx * static_cast<double>(i); }
    double norm2() const { return values.squaredNorm() * dx; }
};

// Rectangular stand-in for the delta barrier: fixed area v0 * width = s~.
struct GridBarrier {
    double v0 = 0.0;
    double width = 0.0;

    double area() const { return v0 * width; }
};

// Width max(4 dx, x0/200) at matching area.
GridBarrier default_barrier(const spectral::BoxGeometry& g, int n_points);
GridBarrier barrier_with_width(const spectral::BoxGeometry& g, double width);

// Second-order finite-difference Hamiltonian on the interior points, with the
// barrier entered through exact cell averages (total area preserved).
struct GridHamiltonian {
    Eigen::VectorXd diag;  // interior points only
    double offdiag = 0.0;
    double dx = 0.0;
    double x_left = 0.0;
    int n_points = 0;  // full grid including endpoints

    Eigen::VectorXcd apply(const Eigen::VectorXcd& interior) const;
};

GridHamiltonian build_hamiltonian(const spectral::BoxGeometry& g, const GridBarrier& barrier,
                                  int n_points);

struct GridEigenpair {
    double k = 0.0;
    double energy = 0.0;
    Eigen::VectorXd psi;  // full grid, L2-normalised (sum psi^2 dx = 1)
};

// Lowest `count` eigenpairs of the discretised problem, k = sqrt(2E).
std::vector<GridEigenpair> grid_eigenmodes(const spectral::BoxGeometry& g,
                                           const GridBarrier& barrier, int n_points, int count);

// Eigenvalues only (cheap path for convergence studies).
std::vector<double> grid_eigenvalues(const spectral::BoxGeometry& g, const GridBarrier& barrier,
                                     int n_points, int count);

// B/A in the sense of the sectionwise sine parametrisation, read off at the
// antinode nearest the barrier on each side.
double section_amplitude_ratio(const GridEigenpair& mode, const spectral::BoxGeometry& g);

struct CnOptions {
    int record_stride = 1;  // keep every k-th frame
};

struct CnTrajectory {
    std::vector<double> t;
    std::vector<Eigen::VectorXcd> frames;  // full grid
};

// Crank-Nicolson propagation (Cayley form, unconditionally norm-preserving).
// Norm and energy-expectation drift are verified against the contract bounds
// at the end of the run.
CnTrajectory crank_nicolson_evolve(const GridWavefunction& psi0, const spectral::BoxGeometry& g,
                                   const GridBarrier& barrier, double dt, double t_final,
                                   const CnOptions& options = {});

// (P_A, P_B) with barrier-interior cells split evenly between the sections.
std::pair<double, double> project_sections(const GridWavefunction& psi,
                                           const spectral::BoxGeometry& g,
                                           double barrier_width = 0.0);

// Sharp partition state: sin(k0 (x - x_A)) in section A, zero in B, normalised.
GridWavefunction sharp_partition_state_a(const spectral::BoxGeometry& g, double k0,
                                         int n_points);

GridWavefunction normalized(GridWavefunction psi);

double energy_expectation(const GridHamiltonian& h, const GridWavefunction& psi);

struct LindbladTrajectory {
    std::vector<double> t;
    std::vector<decoherence::DensityMatrix> frames;
};

// Dense n-mode Lindblad integration (n <= 64) built on the same stepper as
// the two-state engine.
LindbladTrajectory dense_lindblad(const decoherence::DensityMatrix& rho0,
                                  const Eigen::MatrixXcd& h, const Eigen::MatrixXcd& basis,
                                  double tau_d, double dt, double t_final,
                                  int record_stride = 1);

}  // namespace decotunnel::oracle
