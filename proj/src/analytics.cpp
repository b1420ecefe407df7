#include "matchflow/analytics.hpp"

#include <cmath>
#include <iterator>
#include <span>
#include <string>

namespace matchflow {

namespace {

void require_positive(double c, const char* what) {
    if (!(c > 0.0) || !std::isfinite(c)) {
        throw std::invalid_argument(std::string(what) + ": c must be positive and finite");
    }
}

double fixed_point_map(double c, double x) { return c * std::exp(-c * std::exp(-x)); }

double fixed_point_gap(double c, double x) { return x - fixed_point_map(c, x); }

// Assumes gap(lo) < 0 <= gap(hi).
double bisect_gap(double c, double lo, double hi) {
    for (int i = 0; i < 200 && hi - lo > 0.0; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) {
            break;
        }
        if (fixed_point_gap(c, mid) < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return std::fabs(fixed_point_gap(c, lo)) <= std::fabs(fixed_point_gap(c, hi)) ? lo : hi;
}

constexpr double kScanStep = 1e-3;

// First grid point at or after `from` where the gap turns nonnegative.
double scan_for_sign_change(double c, double from) {
    double x = from;
    while (fixed_point_gap(c, x) < 0.0) {
        x += kScanStep;
    }
    return x;
}

// log(1 + e^{-c tau} (e^{c s} - 1)), the building block of the weighted
// closed form.
double log_weighted_term(double c, double tau, double s) {
    return std::log1p(std::exp(-c * tau) * std::expm1(c * s));
}

double weighted_closed_form(double c, std::span<const double> g, std::size_t r, double tau) {
    double before = 0.0;
    for (std::size_t k = 0; k + 1 < r; ++k) {
        before += g[k];
    }
    const double through = before + g[r - 1];
    return g[r - 1] -
           (log_weighted_term(c, tau, through) - log_weighted_term(c, tau, before)) / c;
}

}  // namespace

// Coefficients of 1 - log(2 - e^{-c})/c = sum_k a_k c^{k+1}.
constexpr double kGreedySeries[] = {
    1.0,
    -1.0,
    13.0 / 12.0,
    -5.0 / 4.0,
    541.0 / 360.0,
    -223.0 / 120.0,
    47293.0 / 20160.0,
    -36389.0 / 12096.0,
    7087261.0 / 1814400.0,
    -3098411.0 / 604800.0,
    1622632573.0 / 239500800.0,
    -20579903.0 / 2280960.0,
    526858348381.0 / 43589145600.0,
    -3547114323481.0 / 217945728000.0,
    17714091613681.0 / 804722688000.0,
    -20845704635221.0 / 697426329600.0,
    130370767029135901.0 / 3201186852864000.0,
    -8485049281345477.0 / 152437469184000.0,
};
constexpr double kGreedySeriesCutoff = 0.05;

double oblivious_fraction(double c) {
    require_positive(c, "oblivious_fraction");
    return -std::expm1(std::expm1(-c));
}

double greedy_fraction(double c) {
    require_positive(c, "greedy_fraction");
    if (c < kGreedySeriesCutoff) {
        // Taylor series about 0; the closed form loses digits to cancellation here.
        double sum = 0.0;
        for (auto k = std::size(kGreedySeries); k-- > 0;) {
            sum = sum * c + kGreedySeries[k];
        }
        return sum * c;
    }
    return (c - std::log1p(-std::expm1(-c))) / c;
}

GammaPair gamma_fixed_point(double c) {
    require_positive(c, "gamma_fixed_point");
    GammaPair out;
    out.c = c;

    double x = 0.0;
    bool converged = false;
    for (std::size_t i = 0; i < kGammaIterationCap; ++i) {
        const double next = fixed_point_map(c, x);
        if (std::fabs(next - x) < kGammaTolerance / 16 || next <= x) {
            x = std::max(x, next);
            converged = std::fabs(fixed_point_gap(c, x)) < kGammaTolerance;
            break;
        }
        x = next;
    }
    if (!converged) {
        // The iterates approach the smallest root from below, so x is a valid
        // left bracket.
        const double lo = std::min(x, std::max(0.0, x - kScanStep));
        const double hi = scan_for_sign_change(c, lo);
        x = bisect_gap(c, std::max(lo, hi - kScanStep), hi);
        out.used_bisection = true;
    }

    // Smallest-root certificate over [0, x - 1e-6].
    const double limit = x - 1e-6;
    for (double probe = kScanStep; probe < limit; probe += kScanStep) {
        if (fixed_point_gap(c, probe) >= 0.0) {
            x = bisect_gap(c, probe - kScanStep, probe);
            out.used_bisection = true;
            break;
        }
    }

    out.gamma_lower = x;
    out.gamma_upper = c * std::exp(-x);
    out.residual = std::fabs(fixed_point_gap(c, x));
    if (!(out.residual < kGammaTolerance)) {
        throw NumericalError("gamma_fixed_point: no convergence at c = " + std::to_string(c) +
                             " (residual " + std::to_string(out.residual) + ")");
    }
    return out;
}

double max_matching_bound(double c) {
    require_positive(c, "max_matching_bound");
    const GammaPair g = gamma_fixed_point(c);
    return 2.0 - (g.gamma_upper + g.gamma_lower + g.gamma_upper * g.gamma_lower) / c;
}

double ratio_lower_bound(RatioAlgorithm algo, double c) {
    require_positive(c, "ratio_lower_bound");
    // Both bounds share the denominator 2c - (gamma^* + gamma_* + gamma^* gamma_*);
    // dividing through by c gives fraction / bound.
    const double numerator =
        algo == RatioAlgorithm::oblivious ? oblivious_fraction(c) : greedy_fraction(c);
    return numerator / max_matching_bound(c);
}

RatioMinimum minimize_greedy_ratio(double lo, double hi) {
    if (!(lo > 0.0) || !(hi > lo) || !std::isfinite(hi)) {
        throw std::invalid_argument("minimize_greedy_ratio: need 0 < lo < hi");
    }
    const auto f = [](double c) { return ratio_lower_bound(RatioAlgorithm::greedy, c); };
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    constexpr double kTolerance = 1e-8;

    double a = lo;
    double b = hi;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1);
    double f2 = f(x2);
    while (b - a > kTolerance) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
    }
    RatioMinimum out;
    out.c_star = 0.5 * (a + b);
    out.value = f(out.c_star);

    const double margin = 1e-6 * (hi - lo) + 10 * kTolerance;
    if (out.c_star - lo < margin || hi - out.c_star < margin || out.value > f(lo) ||
        out.value > f(hi)) {
        throw NumericalError("minimize_greedy_ratio: no interior minimum in [" +
                             std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
    return out;
}

double weighted_fraction(double c, const RankProfile& profile, std::size_t r, double tau) {
    require_positive(c, "weighted_fraction");
    if (r < 1 || r > profile.num_ranks()) {
        throw std::invalid_argument("weighted_fraction: rank " + std::to_string(r) +
                                    " outside 1.." + std::to_string(profile.num_ranks()));
    }
    if (!(tau >= 0.0 && tau <= 1.0)) {
        throw std::invalid_argument("weighted_fraction: tau must lie in [0, 1]");
    }
    return weighted_closed_form(c, profile.proportions(), r, tau);
}

PredictionPoint predict(double c) {
    PredictionPoint pt;
    pt.c = c;
    pt.oblivious_frac = oblivious_fraction(c);
    pt.greedy_frac = greedy_fraction(c);
    pt.max_match_bound = max_matching_bound(c);
    pt.ratio_oblivious_lb = pt.oblivious_frac / pt.max_match_bound;
    pt.ratio_greedy_lb = pt.greedy_frac / pt.max_match_bound;
    return pt;
}

void VectorField::evaluate(double c, const std::vector<double>& z, std::vector<double>& dz) const {
    dz.resize(z.size());
    switch (kind_) {
        case Kind::oblivious:
            dz[0] = -std::expm1(-c) * (1.0 - z[0]);
            break;
        case Kind::greedy:
            dz[0] = -std::expm1(-c * (1.0 - z[0]));
            break;
        case Kind::weighted: {
            // Rank r fills only when every better rank offers no free neighbor.
            double better_free = 0.0;
            for (std::size_t r = 0; r < g_.size(); ++r) {
                const double own_free = g_[r] - z[r];
                dz[r] = -std::expm1(-c * own_free) * std::exp(-c * better_free);
                better_free += own_free;
            }
            break;
        }
    }
}

OdeTrajectory ode_solve(const VectorField& field, double c, std::size_t steps) {
    require_positive(c, "ode_solve");
    if (steps < kMinOdeSteps) {
        throw std::invalid_argument("ode_solve: steps must be at least " +
                                    std::to_string(kMinOdeSteps));
    }
    const std::size_t dim = field.dimension();
    const double h = 1.0 / static_cast<double>(steps);

    OdeTrajectory traj;
    traj.tau_grid.reserve(steps + 1);
    traj.values.reserve(steps + 1);

    std::vector<double> z(dim, 0.0);
    std::vector<double> k1, k2, k3, k4, tmp(dim);
    traj.tau_grid.push_back(0.0);
    traj.values.push_back(z);
    for (std::size_t i = 0; i < steps; ++i) {
        field.evaluate(c, z, k1);
        for (std::size_t d = 0; d < dim; ++d) tmp[d] = z[d] + 0.5 * h * k1[d];
        field.evaluate(c, tmp, k2);
        for (std::size_t d = 0; d < dim; ++d) tmp[d] = z[d] + 0.5 * h * k2[d];
        field.evaluate(c, tmp, k3);
        for (std::size_t d = 0; d < dim; ++d) tmp[d] = z[d] + h * k3[d];
        field.evaluate(c, tmp, k4);
        for (std::size_t d = 0; d < dim; ++d) {
            z[d] += h / 6.0 * (k1[d] + 2.0 * k2[d] + 2.0 * k3[d] + k4[d]);
        }
        // Indexing from the step count keeps the last node exactly at 1.
        traj.tau_grid.push_back(i + 1 == steps ? 1.0 : static_cast<double>(i + 1) * h);
        traj.values.push_back(z);
    }
    return traj;
}

std::vector<double> closed_form_state(const VectorField& field, double c, double tau) {
    require_positive(c, "closed_form_state");
    switch (field.kind()) {
        case VectorField::Kind::oblivious:
            return {-std::expm1(std::expm1(-c) * tau)};
        case VectorField::Kind::greedy:
            return {1.0 - log_weighted_term(c, tau, 1.0) / c};
        case VectorField::Kind::weighted: {
            const auto& g = field.proportions();
            std::vector<double> z(g.size());
            for (std::size_t r = 1; r <= g.size(); ++r) {
                z[r - 1] = weighted_closed_form(c, g, r, tau);
            }
            return z;
        }
    }
    return {};
}

}  // namespace matchflow
