#pragma once

#include <complex>
#include <functional>
#include <vector>

namespace nearfield::quadrature {

struct Rule
{
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Gauss-Legendre rule on [-1, 1] (Golub-Welsch).
Rule gauss_legendre(int n);

/// Gauss-Legendre rule mapped onto [a, b].
Rule gauss_legendre(int n, double a, double b);

/// Gauss-Hermite rule for the standard normal weight exp(-x^2/2)/sqrt(2 pi);
/// the weights sum to one.
Rule gauss_hermite_normal(int n);

struct AdaptiveResult
{
    std::complex<double> value;
    double error_estimate;
    bool converged;
};

/// Adaptive Gauss-Kronrod (7/15) integration of a complex integrand. Stops
/// once the summed error estimate is below max(abs_tol, rel_tol * |I|).
AdaptiveResult integrate_adaptive(const std::function<std::complex<double>(double)>& f, double a, double b,
                                  double rel_tol = 1e-6, double abs_tol = 0.0, int max_intervals = 2000);

} // namespace nearfield::quadrature
