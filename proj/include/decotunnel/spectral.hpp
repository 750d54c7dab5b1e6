#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "decotunnel/errors.hpp"

namespace decotunnel::spectral {

// Natural units hbar = m = 1 throughout: E = k^2/2, u0 = k0.
struct BoxGeometry {
    double x_a;      // length of section A (x > 0 side)
    double x_b;      // length of section B (x < 0 side)
    double s_tilde;  // barrier strength, inverse length

    BoxGeometry(double xa, double xb, double st) : x_a(xa), x_b(xb), s_tilde(st) {
        if (!(xa > 0.0) || !(xb > 0.0) || !(st > 0.0) ||
            !std::isfinite(xa) || !std::isfinite(xb) || !std::isfinite(st))
            throw DomainError("BoxGeometry: x_A, x_B, s_tilde must be positive and finite");
    }

    double x0() const { return 2.0 * x_a * x_b / (x_a + x_b); }
    double span() const { return x_a + x_b; }
    double s_hat(double k) const { return s_tilde / k; }
    // characteristic fly time at wavenumber k (u0 = k)
    double tau0(double k) const { return x0() / k; }
};

enum class ModeClass { Resonant, NearResonant, Intermediate, NonResonantA, NonResonantB };

std::string to_string(ModeClass c);

// Classification bands on |eta|; only the scalings are physical, so the
// concrete cutoffs stay sweep-configurable.
struct ClassThresholds {
    double resonant = 0.3;              // |eta| < resonant
    double near_resonant = 3.0;         // |eta| < near_resonant
    double non_resonant_fraction = 1.0 / 3.0;  // |eta| >= fraction * s_hat
};

// One root of the dispersion equation cot(k x_B) + cot(k x_A) + 2 s~/k = 0,
// decomposed against its double-resonance anchor k0 = pi n/(x_A + x_B):
//   k0 x_A = pi j_A - theta,   k0 x_B = pi j_B + theta,   eta = 2 s^ theta.
// theta is a property of the anchor (shared by both roots of a pair), not of
// the individual root; k = k0 + (root-specific detuning).
struct EigenMode {
    double k = 0.0;
    double energy = 0.0;     // k^2/2
    double amp_ratio = 0.0;  // B/A = -sin(k x_A)/sin(k x_B)
    int j_a = 0;
    int j_b = 0;
    double theta = 0.0;
    double eta = 0.0;
    ModeClass mode_class = ModeClass::Resonant;
    int sigma = 1;           // cos(pi j_A)/cos(pi j_B) = (-1)^(j_A + j_B)
    double residual = 0.0;   // dispersion residual at k (0 for node-at-barrier roots)
    bool at_pole = false;    // exact root at a shared cot pole (psi(0) = 0)
    bool ambiguous = false;  // round(k x_B/pi) disagrees with n - j_A
};

// Closed-form two-state parameters at a resonance anchor (theta, k0):
// both detuning branches, amplitude-ratio branches, and the model splitting.
struct NearResonantParams {
    double delta_k_minus = 0.0;
    double delta_k_plus = 0.0;
    double ba_minus = 0.0;  // (B/A)_-
    double ba_plus = 0.0;   // (B/A)_+
    double f_minus = 0.0;
    double f_plus = 0.0;
    double d = 0.0;          // discriminant, >= 0
    double delta_k = 0.0;    // delta_k_plus - delta_k_minus = sqrt(D)/(2 s^ x_A x_B)
    double delta_omega = 0.0;  // k0 * delta_k
    double xi = 0.0;           // sigma * sqrt(x_A/x_B) * F_+
};

// Coupled plus/minus modes forming one two-state system.
struct ModePair {
    EigenMode minus;  // lower energy
    EigenMode plus;   // higher energy
    double delta_k = 0.0;      // k_+ - k_- from the exact roots
    double delta_omega = 0.0;  // omega_+ - omega_- >= 0 from the exact roots
    double omega_0 = 0.0;      // (E_+ + E_-)/2
    double xi = 0.0;           // volume-adjusted mixing ratio (B~/A~)_+
    double k0 = 0.0;           // anchor wavenumber
    NearResonantParams model;  // closed-form values at the shared anchor
};

// cot(k x_B) + cot(k x_A) + 2 s~/k. Throws PoleError inside the guard band
// |sin(k x)| < 1e-14 of either cotangent.
double dispersion_residual(double k, const BoxGeometry& g);

// All dispersion roots in (0, k_max], strictly increasing. Brackets come from
// the interleaved pole lattice {pi j/x_A} U {pi j/x_B}; coincident poles of
// both sections carry an exact node-at-barrier eigenmode and are emitted as
// roots directly.
std::vector<EigenMode> find_modes(const BoxGeometry& g, double k_max,
                                  const ClassThresholds& thresholds = {});

ModeClass classify_mode(const EigenMode& m, const BoxGeometry& g,
                        const ClassThresholds& thresholds = {});

NearResonantParams near_resonant_params(double theta, double k0, const BoxGeometry& g,
                                        int sigma = 1);

// Greedy pairing of adjacent roots sharing a resonance anchor; non-resonant
// roots stay unpaired and are returned through `singletons` when requested.
std::vector<ModePair> pair_modes(const std::vector<EigenMode>& modes, const BoxGeometry& g,
                                 std::vector<EigenMode>* singletons = nullptr);

// Anchor decomposition of a wavenumber: n = round(k (x_A+x_B)/pi) with
// half-integers rounded down, k0 = pi n/(x_A+x_B).
struct Anchor {
    std::int64_t n = 0;
    double k0 = 0.0;
    int j_a = 0;
    int j_b = 0;
    double theta = 0.0;
    double eta = 0.0;
    int sigma = 1;
    bool ambiguous = false;
};

Anchor anchor_of(double k, const BoxGeometry& g);

}  // namespace decotunnel::spectral
