#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "matchflow/rank_profile.hpp"

namespace matchflow {

/// Raised when a numerical routine cannot meet its convergence contract.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Limiting matched fractions at p = c/n. All reject c <= 0.

/// 1 - exp(exp(-c) - 1).
double oblivious_fraction(double c);

/// 1 - log(2 - exp(-c)) / c.
double greedy_fraction(double c);

/// Smallest root gamma_lower of x = c exp(-c e^{-x}) and its partner
/// gamma_upper = c e^{-gamma_lower}.
struct GammaPair {
    double c = 0.0;
    double gamma_lower = 0.0;
    double gamma_upper = 0.0;
    double residual = 0.0;
    /// True when plain iteration stalled and bisection finished the job.
    bool used_bisection = false;
};

inline constexpr double kGammaTolerance = 1e-12;
inline constexpr std::size_t kGammaIterationCap = 100000;

/// Iterates x <- c exp(-c e^{-x}) from 0, which climbs monotonically to the
/// smallest fixed point. If the iteration cap is hit (the map is tangent at
/// the root near c = e) the last iterate brackets the root from below and
/// bisection finishes. A sign scan over [0, root) then certifies there is no
/// smaller root. Throws NumericalError if neither route converges.
GammaPair gamma_fixed_point(double c);

/// Asymptotic upper bound on mu*/n: 2 - (gamma^* + gamma_* + gamma^* gamma_*)/c.
double max_matching_bound(double c);

enum class RatioAlgorithm { oblivious, greedy };

/// Lower bound on E[mu_A]/E[mu*] at p = c/n.
double ratio_lower_bound(RatioAlgorithm algo, double c);

struct RatioMinimum {
    double c_star = 0.0;
    double value = 0.0;
};

/// Golden-section minimisation of ratio_lower_bound(greedy, .) on [lo, hi].
/// Throws std::invalid_argument unless 0 < lo < hi, and NumericalError if the
/// minimum sits on the interval boundary.
RatioMinimum minimize_greedy_ratio(double lo = 0.5, double hi = 5.0);

/// Matched fraction of rank-r bins (1-based) after a fraction tau of the
/// arrivals, for vertex-weighted greedy.
double weighted_fraction(double c, const RankProfile& profile, std::size_t r, double tau);

struct PredictionPoint {
    double c = 0.0;
    double oblivious_frac = 0.0;
    double greedy_frac = 0.0;
    double max_match_bound = 0.0;
    double ratio_oblivious_lb = 0.0;
    double ratio_greedy_lb = 0.0;
};

PredictionPoint predict(double c);

// ODE cross-checks.

class VectorField {
public:
    enum class Kind { oblivious, greedy, weighted };

    static VectorField oblivious() { return VectorField(Kind::oblivious, {}); }
    static VectorField greedy() { return VectorField(Kind::greedy, {}); }
    static VectorField weighted(const RankProfile& profile) {
        return VectorField(Kind::weighted, profile.proportions());
    }

    Kind kind() const { return kind_; }
    std::size_t dimension() const { return kind_ == Kind::weighted ? g_.size() : 1; }
    const std::vector<double>& proportions() const { return g_; }

    /// dz/dtau at state z for mean degree c. The fields are autonomous.
    void evaluate(double c, const std::vector<double>& z, std::vector<double>& dz) const;

private:
    VectorField(Kind kind, std::vector<double> g) : kind_(kind), g_(std::move(g)) {}

    Kind kind_;
    std::vector<double> g_;
};

struct OdeTrajectory {
    std::vector<double> tau_grid;
    std::vector<std::vector<double>> values;
};

inline constexpr std::size_t kMinOdeSteps = 100;

/// Classical RK4 on a uniform grid over [0, 1] from z(0) = 0.
/// Throws std::invalid_argument for steps < kMinOdeSteps or c <= 0.
OdeTrajectory ode_solve(const VectorField& field, double c, std::size_t steps);

/// Closed-form solution of `field` at tau.
std::vector<double> closed_form_state(const VectorField& field, double c, double tau);

}  // namespace matchflow
