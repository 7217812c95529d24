#include "qsc/quadrature.hpp"

#include "qsc/errors.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace qsc {

namespace {

struct Rule {
    std::vector<double> nodes, weights;
};

// Legendre P_n and P_n' by the three-term recurrence.
static void legendre(int n, double x, double& p, double& dp) {
    double p0 = 1.0, p1 = x;
    if (n == 0) {
        p = 1.0;
        dp = 0.0;
        return;
    }
    for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    p = p1;
    dp = n * (x * p1 - p0) / (x * x - 1.0);
}

// Newton iteration from the Chebyshev initial guesses.
static Rule make_rule(int n) {
    Rule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double p = 0.0, dp = 1.0;
        for (int it = 0; it < 100; ++it) {
            legendre(n, x, p, dp);
            double dx = -p / dp;
            x += dx;
            if (std::abs(dx) < 1e-15) break;
        }
        legendre(n, x, p, dp);
        r.nodes[n - 1 - i] = x;  // ascending order
        r.weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return r;
}

static const Rule& rule(int n) {
    if (n < 1) throw std::invalid_argument("gl rule: need n >= 1");
    static std::map<int, Rule> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, make_rule(n)).first;
    return it->second;
}

using Fn = std::function<std::complex<double>(double)>;

static std::complex<double> gl_apply(const Fn& f, double a, double b, int n,
                                     long& evals) {
    const Rule& r = rule(n);
    double c = 0.5 * (a + b), h = 0.5 * (b - a);
    std::complex<double> acc{0.0, 0.0};
    for (int i = 0; i < n; ++i) acc += r.weights[i] * f(c + h * r.nodes[i]);
    evals += n;
    return h * acc;
}

static void adapt(const Fn& f, double a, double b, double tol, int depth,
                  int max_depth, QuadResult& out) {
    std::complex<double> coarse = gl_apply(f, a, b, 8, out.evals);
    std::complex<double> fine = gl_apply(f, a, b, 16, out.evals);
    double err = std::abs(fine - coarse);
    if (err <= tol || depth >= max_depth) {
        if (err > tol)
            throw ConvergenceError("integrate: depth cap hit with error estimate " +
                                       std::to_string(err),
                                   err);
        out.value += fine;
        out.error += err;
        return;
    }
    double m = 0.5 * (a + b);
    adapt(f, a, m, 0.5 * tol, depth + 1, max_depth, out);
    adapt(f, m, b, 0.5 * tol, depth + 1, max_depth, out);
}

}  // namespace

const std::vector<double>& gl_nodes(int n) { return rule(n).nodes; }
const std::vector<double>& gl_weights(int n) { return rule(n).weights; }

QuadResult integrate(const Fn& f, double a, double b, double abs_tol, int max_depth) {
    if (!(abs_tol > 0.0)) throw std::invalid_argument("integrate: need abs_tol > 0");
    QuadResult out;
    if (a == b) return out;
    adapt(f, a, b, abs_tol, 0, max_depth, out);
    return out;
}

std::complex<double> composite_gl(const Fn& f, double a, double b, int points,
                                  int panels) {
    if (panels < 1) throw std::invalid_argument("composite_gl: need panels >= 1");
    std::complex<double> acc{0.0, 0.0};
    long evals = 0;
    double h = (b - a) / panels;
    for (int k = 0; k < panels; ++k)
        acc += gl_apply(f, a + k * h, a + (k + 1) * h, points, evals);
    return acc;
}

}  // namespace qsc
