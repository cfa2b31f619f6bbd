#pragma once

// Quadrature oracle for the normal density and the movement probability.
// Integrates the density directly; shares no code with the erf-based path.

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>

namespace oracle {

inline double density(double u, double mu, double sigma) {
    const double z = (u - mu) / sigma;
    return std::exp(-0.5 * z * z) / (std::sqrt(2.0 * std::numbers::pi) * sigma);
}

inline double integrate_density(double a, double b, double mu, double sigma) {
    using boost::math::quadrature::gauss_kronrod;
    const auto f = [&](double u) { return density(u, mu, sigma); };
    return gauss_kronrod<double, 31>::integrate(f, a, b, 15, 1e-11);
}

/// Mass between t and the mean, over half of the total mass (itself integrated).
inline double transition_probability(double t, double mu, double sigma) {
    // Mass beyond 40 sigma is below double resolution.
    const double total = integrate_density(mu - 40 * sigma, mu + 40 * sigma, mu, sigma);
    const double num = t <= mu ? integrate_density(t, mu, mu, sigma) : integrate_density(mu, t, mu, sigma);
    return num / (0.5 * total);
}

}  // namespace oracle
