#include "decotunnel/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <sstream>

namespace decotunnel::spectral {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kPoleGuard = 1e-14;  // |sin(k x)| below this counts as a pole

// Ties at half-integers round toward the smaller integer.
std::int64_t round_half_down(double x) {
    return static_cast<std::int64_t>(std::ceil(x - 0.5));
}

double residual_unchecked(double k, const BoxGeometry& g) {
    return 1.0 / std::tan(k * g.x_b) + 1.0 / std::tan(k * g.x_a) + 2.0 * g.s_tilde / k;
}

double residual_derivative(double k, const BoxGeometry& g) {
    const double sb = std::sin(k * g.x_b);
    const double sa = std::sin(k * g.x_a);
    return -g.x_b / (sb * sb) - g.x_a / (sa * sa) - 2.0 * g.s_tilde / (k * k);
}

struct Pole {
    double k;
    bool from_a;
    bool from_b;
};

// Interleaved cot-pole lattice {pi j/x_A} U {pi j/x_B} up to k_max.
// Coincident poles of both sections are merged and marked.
std::vector<Pole> pole_lattice(const BoxGeometry& g, double k_max) {
    std::vector<Pole> poles;
    auto add = [&](double x, bool is_a) {
        for (std::int64_t j = 1; ; ++j) {
            const double p = kPi * static_cast<double>(j) / x;
            if (p > k_max) break;
            poles.push_back({p, is_a, !is_a});
        }
    };
    add(g.x_a, true);
    add(g.x_b, false);
    std::sort(poles.begin(), poles.end(), [](const Pole& l, const Pole& r) { return l.k < r.k; });

    std::vector<Pole> merged;
    for (const Pole& p : poles) {
        if (!merged.empty() && std::abs(p.k - merged.back().k) < 1e-12 * std::max(1.0, p.k)) {
            merged.back().from_a |= p.from_a;
            merged.back().from_b |= p.from_b;
            merged.back().k = 0.5 * (merged.back().k + p.k);
        } else {
            merged.push_back(p);
        }
    }
    return merged;
}

// Bisection on the strictly decreasing residual, then one Newton polish.
double solve_bracket(double a, double b, const BoxGeometry& g) {
    double fa = residual_unchecked(a, g);
    double fb = residual_unchecked(b, g);
    if (!(fa > 0.0) || !(fb < 0.0)) {
        std::ostringstream msg;
        msg << "find_modes: no sign change in bracket [" << a << ", " << b << "]"
            << " (f(a) = " << fa << ", f(b) = " << fb << ")";
        throw NumericError(msg.str());
    }
    const int max_iter = 200;
    int it = 0;
    while (b - a > 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, b)) {
        if (++it > max_iter) {
            std::ostringstream msg;
            msg << "find_modes: bisection stalled in bracket [" << a << ", " << b << "]";
            throw NumericError(msg.str());
        }
        const double m = 0.5 * (a + b);
        const double fm = residual_unchecked(m, g);
        if (std::abs(fm) < 1e-10) return m;
        if (fm > 0.0) a = m; else b = m;
    }
    double k = 0.5 * (a + b);
    const double fk = residual_unchecked(k, g);
    const double dfk = residual_derivative(k, g);
    if (std::isfinite(fk) && std::isfinite(dfk) && dfk != 0.0) {
        const double polished = k - fk / dfk;
        if (polished > a && polished < b) k = polished;
    }
    return k;
}

}  // namespace

std::string to_string(ModeClass c) {
    switch (c) {
        case ModeClass::Resonant: return "resonant";
        case ModeClass::NearResonant: return "near_resonant";
        case ModeClass::Intermediate: return "intermediate";
        case ModeClass::NonResonantA: return "non_resonant_A";
        case ModeClass::NonResonantB: return "non_resonant_B";
    }
    return "?";
}

double dispersion_residual(double k, const BoxGeometry& g) {
    if (!(k > 0.0) || !std::isfinite(k))
        throw DomainError("dispersion_residual: k must be positive and finite");
    if (std::abs(std::sin(k * g.x_a)) < kPoleGuard || std::abs(std::sin(k * g.x_b)) < kPoleGuard)
        throw PoleError("dispersion_residual: evaluation inside cot pole guard band");
    return residual_unchecked(k, g);
}

Anchor anchor_of(double k, const BoxGeometry& g) {
    Anchor a;
    a.n = round_half_down(k * g.span() / kPi);
    a.k0 = kPi * static_cast<double>(a.n) / g.span();
    a.j_a = static_cast<int>(round_half_down(a.k0 * g.x_a / kPi));
    a.j_b = static_cast<int>(a.n - a.j_a);
    a.theta = kPi * static_cast<double>(a.j_a) - a.k0 * g.x_a;
    a.eta = 2.0 * g.s_hat(a.k0) * a.theta;
    a.sigma = ((a.j_a + a.j_b) % 2 == 0) ? 1 : -1;
    a.ambiguous = round_half_down(k * g.x_b / kPi) != a.j_b;
    return a;
}

ModeClass classify_mode(const EigenMode& m, const BoxGeometry& g,
                        const ClassThresholds& t) {
    const double abs_eta = std::abs(m.eta);
    if (abs_eta < t.resonant) return ModeClass::Resonant;
    if (abs_eta < t.near_resonant) return ModeClass::NearResonant;
    const double s_hat = g.s_hat(m.k);
    if (abs_eta < t.non_resonant_fraction * s_hat) return ModeClass::Intermediate;
    return std::abs(m.amp_ratio) <= 1.0 ? ModeClass::NonResonantA : ModeClass::NonResonantB;
}

NearResonantParams near_resonant_params(double theta, double k0, const BoxGeometry& g,
                                        int sigma) {
    if (!(k0 > 0.0)) throw DomainError("near_resonant_params: k0 must be positive");
    const double s_hat = g.s_hat(k0);
    const double span = g.span();
    const double eta = 2.0 * s_hat * theta;
    const double delta = (g.x_a - g.x_b) / span;

    NearResonantParams p;
    p.d = span * ((eta - 1.0) * (eta - 1.0) * g.x_b + (eta + 1.0) * (eta + 1.0) * g.x_a);
    const double sqrt_d = span * std::sqrt(1.0 + 2.0 * eta * delta + eta * eta);
    const double q_plus = (eta + 1.0) * span;
    const double q_minus = (eta - 1.0) * span;

    const double t = (eta - 1.0) * g.x_b - (eta + 1.0) * g.x_a;
    const double denom = 4.0 * s_hat * g.x_a * g.x_b;
    p.delta_k_minus = (t - sqrt_d) / denom;
    p.delta_k_plus = (t + sqrt_d) / denom;
    p.delta_k = sqrt_d / (2.0 * s_hat * g.x_a * g.x_b);
    p.delta_omega = k0 * p.delta_k;

    // Rationalised branch ratios: the raw F_+ = (q_+ - sqrt(D))/(q_- + sqrt(D))
    // is 0/0 at eta = 0; the eta factor cancels exactly in this form.
    p.f_plus = (g.x_b / g.x_a) * (sqrt_d - q_minus) / (sqrt_d + q_plus);
    p.f_minus = -(sqrt_d + q_plus) / (sqrt_d - q_minus);
    const double sig = static_cast<double>(sigma);
    p.ba_plus = sig * (g.x_a / g.x_b) * p.f_plus;
    p.ba_minus = sig * (g.x_a / g.x_b) * p.f_minus;
    p.xi = sig * std::sqrt(g.x_a / g.x_b) * p.f_plus;
    return p;
}

std::vector<EigenMode> find_modes(const BoxGeometry& g, double k_max,
                                  const ClassThresholds& thresholds) {
    if (!(k_max > kPi / std::max(g.x_a, g.x_b)))
        throw DomainError("find_modes: k_max below the first mode");

    const std::vector<Pole> poles = pole_lattice(g, k_max);
    const double min_x = std::min(g.x_a, g.x_b);

    std::vector<EigenMode> modes;
    auto finish = [&](double k, bool at_pole, double residual) {
        EigenMode m;
        m.k = k;
        m.energy = 0.5 * k * k;
        m.at_pole = at_pole;
        m.residual = residual;
        const Anchor a = anchor_of(k, g);
        m.j_a = a.j_a;
        m.j_b = a.j_b;
        m.theta = a.theta;
        m.eta = a.eta;
        m.sigma = a.sigma;
        m.ambiguous = a.ambiguous;
        if (at_pole) {
            // psi(0) = 0: the ratio follows from derivative continuity,
            // B/A = cos(k x_A)/cos(k x_B) = +-1.
            const std::int64_t ja = round_half_down(k * g.x_a / kPi);
            const std::int64_t jb = round_half_down(k * g.x_b / kPi);
            m.amp_ratio = ((ja - jb) % 2 == 0) ? 1.0 : -1.0;
        } else {
            m.amp_ratio = -std::sin(k * g.x_a) / std::sin(k * g.x_b);
        }
        m.mode_class = classify_mode(m, g, thresholds);
        modes.push_back(m);
    };

    double left = 0.0;
    for (std::size_t i = 0; i <= poles.size(); ++i) {
        const double right = (i < poles.size()) ? poles[i].k : k_max;
        const double gap = right - left;
        if (gap > 0.0) {
            const double guard = std::max({gap * 1e-12, right * 4e-16, 2.0 * kPoleGuard / min_x});
            double a = left + guard;
            double b = right - guard;
            if (i == poles.size()) b = k_max;  // final partial interval
            if (b > a) {
                bool has_root = true;
                if (i == poles.size()) has_root = residual_unchecked(b, g) < 0.0;
                if (has_root) {
                    const double k = solve_bracket(a, b, g);
                    finish(k, false, residual_unchecked(k, g));
                }
            }
        }
        if (i < poles.size()) {
            if (poles[i].from_a && poles[i].from_b) finish(poles[i].k, true, 0.0);
            left = poles[i].k;
        }
    }

    std::sort(modes.begin(), modes.end(),
              [](const EigenMode& l, const EigenMode& r) { return l.k < r.k; });
    return modes;
}

std::vector<ModePair> pair_modes(const std::vector<EigenMode>& modes, const BoxGeometry& g,
                                 std::vector<EigenMode>* singletons) {
    auto pairable = [](const EigenMode& m) {
        return m.mode_class == ModeClass::Resonant || m.mode_class == ModeClass::NearResonant ||
               m.mode_class == ModeClass::Intermediate;
    };

    std::vector<ModePair> pairs;
    if (singletons) singletons->clear();
    std::size_t i = 0;
    while (i < modes.size()) {
        if (i + 1 < modes.size() && pairable(modes[i]) && pairable(modes[i + 1]) &&
            modes[i].j_a == modes[i + 1].j_a && modes[i].j_b == modes[i + 1].j_b) {
            ModePair p;
            p.minus = modes[i];
            p.plus = modes[i + 1];
            p.delta_k = p.plus.k - p.minus.k;
            p.delta_omega = p.plus.energy - p.minus.energy;
            p.omega_0 = 0.5 * (p.plus.energy + p.minus.energy);
            const Anchor a = anchor_of(p.minus.k, g);
            p.k0 = a.k0;
            p.model = near_resonant_params(a.theta, a.k0, g, a.sigma);
            p.xi = p.model.xi;
            pairs.push_back(p);
            i += 2;
        } else {
            if (singletons) singletons->push_back(modes[i]);
            ++i;
        }
    }
    return pairs;
}

}  // namespace decotunnel::spectral
