#ifndef FADETAIL_QUADRATURE_HPP
#define FADETAIL_QUADRATURE_HPP

#include <functional>
#include <stdexcept>
#include <vector>

namespace fadetail::quad {

struct Result {
    double value = 0.0;
    double abs_error = 0.0;
    bool converged = true;
    long evaluations = 0;
};

/// Thrown when an integral cannot be resolved to the requested tolerance.
/// Carries the partial result and its error estimate.
class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& what, double partial, double error_estimate)
        : std::runtime_error(what), partial_result(partial), error_estimate(error_estimate) {}
    double partial_result;
    double error_estimate;
};

/// Globally adaptive Gauss-Kronrod (G7/K15) on [a, b]: always bisects the
/// subinterval with the largest error estimate until the summed estimate is
/// below max(abs_tol, rel_tol * |integral|) or max_intervals is reached.
/// Integrable endpoint singularities (log, x^(p-1) with p > 0) are fine.
Result integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol = 1e-15, double rel_tol = 1e-12,
                 int max_intervals = 2000);

/// Gauss-Legendre nodes/weights on (-1, 1), ascending nodes.
const std::vector<std::pair<double, double>>& gauss_legendre(int n);

/// Gauss-Hermite nodes/weights for integrals of exp(-x^2) f(x) over R.
const std::vector<std::pair<double, double>>& gauss_hermite(int n);

}  // namespace fadetail::quad

#endif
