// Gauss-Legendre node tables and 1-D adaptive quadrature with an embedded pair.
#pragma once

#include <complex>
#include <functional>
#include <vector>

namespace qsc {

// n-point Gauss-Legendre nodes/weights on [-1, 1]; computed once and cached.
const std::vector<double>& gl_nodes(int n);
const std::vector<double>& gl_weights(int n);

struct QuadResult {
    std::complex<double> value{0.0, 0.0};
    double error = 0.0;  // accumulated error estimate
    long evals = 0;
};

// Adaptive bisection to absolute tolerance; error estimated from an embedded
// 8/16-point Gauss pair on each interval. Throws ConvergenceError if the
// tolerance cannot be met within the depth cap.
QuadResult integrate(const std::function<std::complex<double>(double)>& f, double a,
                     double b, double abs_tol, int max_depth = 48);

// Fixed composite Gauss-Legendre rule: `panels` equal panels of `points` nodes.
std::complex<double> composite_gl(const std::function<std::complex<double>(double)>& f,
                                  double a, double b, int points, int panels);

}  // namespace qsc
