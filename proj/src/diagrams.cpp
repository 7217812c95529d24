#include "qsc/diagrams.hpp"

#include "qsc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <stdexcept>

#include "qsc/quadrature.hpp"

namespace qsc {

namespace {

Matrix kron_id(const Matrix& vs, int d) {
    int n = static_cast<int>(vs.rows());
    Matrix out = Matrix::Zero(n * d, n * d);
    Matrix id = Matrix::Identity(d, d);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (vs(i, j) != Complex(0.0)) out.block(i * d, j * d, d, d) = vs(i, j) * id;
    return out;
}

void check_diagram(const Diagram& d, const char* what) {
    std::vector<int> seen(d.n, 0);
    for (const auto& blk : d.blocks) {
        if (blk.empty()) throw std::invalid_argument(std::string(what) + ": empty block");
        for (int v : blk) {
            if (v < 0 || v >= d.n)
                throw std::invalid_argument(std::string(what) + ": vertex out of range");
            if (seen[v]++)
                throw std::invalid_argument(std::string(what) + ": repeated vertex");
        }
        if (!std::is_sorted(blk.begin(), blk.end()))
            throw std::invalid_argument(std::string(what) + ": block not ascending");
    }
    for (int v = 0; v < d.n; ++v)
        if (!seen[v])
            throw std::invalid_argument(std::string(what) + ": vertex missing from blocks");
}

}  // namespace

std::vector<Diagram> enumerate_vacuum_diagrams(int n) {
    if (n < 1 || n > 10)
        throw std::invalid_argument("enumerate_vacuum_diagrams: need 1 <= n <= 10");
    std::vector<Diagram> out;
    std::vector<int> label(n, 0);
    // restricted-growth strings: label[0] = 0, label[k] <= 1 + max(label[0..k-1])
    auto emit = [&]() {
        Diagram d;
        d.n = n;
        int groups = *std::max_element(label.begin(), label.end()) + 1;
        d.blocks.assign(groups, {});
        for (int v = 0; v < n; ++v) d.blocks[label[v]].push_back(v);
        out.push_back(std::move(d));
    };
    // iterate in lexicographic order
    std::vector<int> maxseen(n, 0);  // max label among positions < k
    int k = 1;
    if (n == 1) {
        emit();
        return out;
    }
    label.assign(n, 0);
    while (true) {
        if (k == n) {
            emit();
            --k;
            while (k >= 1 && label[k] == maxseen[k] + 1) --k;
            if (k < 1) break;
            ++label[k];
            ++k;
        } else {
            maxseen[k] = std::max(maxseen[k - 1], label[k - 1]);
            label[k] = 0;
            ++k;
        }
    }
    return out;
}

std::uint64_t bell_number(int n) {
    if (n < 0 || n > 20) throw std::invalid_argument("bell_number: need 0 <= n <= 20");
    // Bell triangle
    std::vector<std::uint64_t> row{1};
    for (int i = 1; i <= n; ++i) {
        std::vector<std::uint64_t> next(i + 1);
        next[0] = row.back();
        for (int j = 1; j <= i; ++j) next[j] = next[j - 1] + row[j - 1];
        row = std::move(next);
    }
    return row[0];
}

std::uint64_t count_pairings_emission_absorption(int n2) {
    if (n2 < 0 || n2 > 15)
        throw std::invalid_argument("count_pairings_emission_absorption: need 0 <= n2 <= 15");
    std::uint64_t out = 1;
    for (int k = 2 * n2 - 1; k > 1; k -= 2) out *= static_cast<std::uint64_t>(k);
    return out;
}

bool is_time_consecutive(const Diagram& d) {
    check_diagram(d, "is_time_consecutive");
    for (const auto& blk : d.blocks)
        if (blk.back() - blk.front() + 1 != static_cast<int>(blk.size())) return false;
    return true;
}

Matrix chain_block_value(const BlockMatrix& e, const Gauge& gauge, int m) {
    if (m < 1) throw std::invalid_argument("chain_block_value: need m >= 1");
    if (e.channels() != gauge.channels())
        throw std::invalid_argument("chain_block_value: gauge channel count mismatch");
    Matrix ve = promote(gauge.v(), e.dim()).flat() * e.flat();
    Matrix r = e.flat();
    for (int k = 2; k <= m; ++k) r = r * ve;
    Complex phase = std::pow(Complex(0.0, -1.0), m);
    return phase * r.block(0, 0, e.dim(), e.dim());
}

Matrix resummed_vacuum_block(const BlockMatrix& e, const Gauge& gauge, int* terms) {
    if (e.channels() != gauge.channels())
        throw std::invalid_argument("resummed_vacuum_block: gauge channel count mismatch");
    const int d = e.dim();
    Matrix ve_chan = kron_id(gauge.v_sub(), d) * e.channel_flat();
    double r = op_norm(ve_chan);
    if (!(r < 1.0))
        throw NonContractiveError(
            "resummed_vacuum_block: channel norm of V E is " + std::to_string(r) +
                " >= 1",
            r);
    Matrix ve = promote(gauge.v(), d).flat() * e.flat();
    Matrix chain = e.flat();  // E (V E)^{m-1}, starting at m = 1
    Matrix box = Matrix::Zero(d, d);
    Complex phase(0.0, -1.0);  // (-i)^m
    // geometric tail: ||E||^2 ||V|| r^{m-1} / (1 - r) after m terms
    double e_norm = e.op_norm(), v_norm = gauge.v_norm();
    double tail = e_norm * e_norm * v_norm / (1.0 - r);
    for (int m = 1; m <= 2000; ++m) {
        box += phase * chain.block(0, 0, d, d);
        if (terms) *terms = m;
        if (m >= 2) tail *= r;
        double scale = std::max(1.0, op_norm(box));
        chain = chain * ve;
        // once the whole chain matrix vanishes, every later term is zero
        if (chain.isZero(0.0)) return box;
        if (m >= 2 && tail <= 1e-16 * scale) return box;
        phase *= Complex(0.0, -1.0);
    }
    throw ConvergenceError("resummed_vacuum_block: chain series did not settle", r);
}

DiagramValue tc_limit_value(const Diagram& d, const BlockMatrix& e, const Gauge& gauge,
                            double t) {
    check_diagram(d, "tc_limit_value");
    DiagramValue out;
    out.op = Matrix::Zero(e.dim(), e.dim());
    if (!is_time_consecutive(d)) return out;  // vanishing limit
    // blocks of a time-consecutive diagram are intervals; order by first vertex
    std::vector<const std::vector<int>*> order;
    for (const auto& blk : d.blocks) order.push_back(&blk);
    std::sort(order.begin(), order.end(),
              [](const auto* a, const auto* b) { return a->front() < b->front(); });
    Matrix op = Matrix::Identity(e.dim(), e.dim());
    // latest block leftmost
    for (auto it = order.rbegin(); it != order.rend(); ++it)
        op = op * chain_block_value(e, gauge, static_cast<int>((*it)->size()));
    // reduced simplex volume at effective order b
    int b = static_cast<int>(d.blocks.size());
    double vol = std::pow(t, b);
    for (int k = 2; k <= b; ++k) vol /= k;
    out.op = op;
    out.weight = vol;
    return out;
}

SeriesSum vacuum_series_sum(const BlockMatrix& e, const Gauge& gauge, double t,
                            int order) {
    if (order < 0) throw std::invalid_argument("vacuum_series_sum: need order >= 0");
    SeriesSum out;
    out.box = resummed_vacuum_block(e, gauge, &out.chain_terms);
    out.contraction = op_norm(kron_id(gauge.v_sub(), e.dim()) * e.channel_flat());
    const int d = e.dim();
    Matrix tbox = t * out.box;
    Matrix term = Matrix::Identity(d, d);
    Matrix sum = term;
    for (int b = 1; b <= order; ++b) {
        term = term * tbox / static_cast<double>(b);
        sum += term;
    }
    out.value = sum;
    double x = op_norm(tbox);
    double head = std::pow(x, order + 1);
    for (int k = 2; k <= order + 1; ++k) head /= k;
    out.tail_bound = head * std::exp(x);
    return out;
}

// ----- pre-limit evaluation -----

namespace {

// per-vertex (row, col) block indices for one channel assignment of one block
struct VertexFactor {
    int row = 0, col = 0;
};

// sum over channel assignments of the time-ordered product of E-blocks
Matrix operator_factor(const Diagram& d, const BlockMatrix& e) {
    const int n = d.n, nch = e.channels(), dim = e.dim();
    std::vector<VertexFactor> vf(n);
    Matrix acc = Matrix::Zero(dim, dim);
    // enumerate label tuples per block (m - 1 labels each) recursively
    std::vector<std::vector<int>> labels(d.blocks.size());
    for (size_t b = 0; b < d.blocks.size(); ++b)
        labels[b].assign(d.blocks[b].size() >= 2 ? d.blocks[b].size() - 1 : 0, 1);

    auto fill_block = [&](size_t b) {
        const auto& blk = d.blocks[b];
        const auto& lab = labels[b];
        int m = static_cast<int>(blk.size());
        if (m == 1) {
            vf[blk[0]] = {0, 0};
            return;
        }
        vf[blk[0]] = {lab[0], 0};
        for (int k = 1; k < m - 1; ++k) vf[blk[k]] = {lab[k], lab[k - 1]};
        vf[blk[m - 1]] = {0, lab[m - 2]};
    };

    std::function<void(size_t)> walk = [&](size_t b) {
        if (b == d.blocks.size()) {
            Matrix prod = Matrix::Identity(dim, dim);
            for (int v = n - 1; v >= 0; --v) prod = prod * e.block(vf[v].row, vf[v].col);
            acc += prod;
            return;
        }
        if (labels[b].empty()) {
            fill_block(b);
            walk(b + 1);
            return;
        }
        std::vector<int>& lab = labels[b];
        std::fill(lab.begin(), lab.end(), 1);
        while (true) {
            fill_block(b);
            walk(b + 1);
            // increment mixed-radix tuple over {1..N}
            size_t pos = 0;
            while (pos < lab.size() && lab[pos] == nch) {
                lab[pos] = 1;
                ++pos;
            }
            if (pos == lab.size()) break;
            ++lab[pos];
        }
    };
    walk(0);
    return std::pow(Complex(0.0, -1.0), n) * acc;
}

// links (a, b), a < b, between consecutive members of each block
std::vector<std::pair<int, int>> diagram_links(const Diagram& d) {
    std::vector<std::pair<int, int>> links;
    for (const auto& blk : d.blocks)
        for (size_t k = 0; k + 1 < blk.size(); ++k)
            links.emplace_back(blk[k], blk[k + 1]);
    return links;
}

struct NestedGL {
    int n = 0;
    double t = 0.0, lambda = 0.0;
    const CorrelationFamily* fam = nullptr;
    std::vector<std::vector<int>> links_by_lower;  // upper endpoints, per level
    int points = 16, panels = 1;
    std::vector<double> u;
    Complex result{0.0, 0.0};
    long evals = 0;

    void run() {
        u.assign(n, 0.0);
        descend(n - 1, t, Complex(1.0, 0.0));
    }

    void descend(int level, double upper, Complex weight) {
        const auto& nodes = gl_nodes(points);
        const auto& weights = gl_weights(points);
        double h = upper / panels;
        for (int p = 0; p < panels; ++p) {
            double mid = (p + 0.5) * h, half = 0.5 * h;
            for (int q = 0; q < points; ++q) {
                double x = mid + half * nodes[q];
                u[level] = x;
                Complex w = weight * (half * weights[q]);
                for (int up : links_by_lower[level])
                    w *= fam->scalar(u[up] - x, lambda);
                if (level == 0) {
                    result += w;
                    ++evals;
                } else {
                    descend(level - 1, x, w);
                }
            }
        }
    }
};

double radical_inverse(std::uint64_t idx, int base) {
    double inv = 1.0 / base, f = inv, out = 0.0;
    while (idx > 0) {
        out += f * static_cast<double>(idx % base);
        idx /= base;
        f *= inv;
    }
    return out;
}

}  // namespace

PrelimitValue prelimit_diagram_value(const Diagram& d, const BlockMatrix& e,
                                     const CorrelationFamily& fam, double lambda,
                                     double t, const QuadraturePlan& plan) {
    check_diagram(d, "prelimit_diagram_value");
    if (d.n < 1 || d.n > 6)
        throw std::invalid_argument("prelimit_diagram_value: need 1 <= n <= 6");
    if (!(lambda > 0.0) || !(t > 0.0))
        throw std::invalid_argument("prelimit_diagram_value: need lambda > 0 and t > 0");
    if (e.channels() != fam.channels)
        throw std::invalid_argument("prelimit_diagram_value: family channel mismatch");
    // the family type is channel-diagonal with one shared scalar by
    // construction, which is what lets the channel sums factor out

    PrelimitValue out;
    Matrix op = operator_factor(d, e);
    double opn = op_norm(op);
    if (opn == 0.0) {
        out.value = Matrix::Zero(e.dim(), e.dim());
        return out;
    }
    auto links = diagram_links(d);

    if (d.n <= 4) {
        NestedGL g;
        g.n = d.n;
        g.t = t;
        g.lambda = lambda;
        g.fam = &fam;
        g.points = plan.gl_points;
        g.panels = plan.panels_by_dim[d.n - 1];
        g.links_by_lower.assign(d.n, {});
        for (auto [a, b] : links) g.links_by_lower[a].push_back(b);
        g.run();
        out.value = g.result * op;
        out.evals = g.evals;
        return out;
    }

    // randomized quasi Monte Carlo for dimensions 5 and 6
    static const int bases[6] = {2, 3, 5, 7, 11, 13};
    std::mt19937_64 rng(plan.seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<Complex> shots;
    double volume = std::pow(t, d.n);
    for (int k = 2; k <= d.n; ++k) volume /= k;
    std::vector<double> x(d.n), shift(d.n);
    for (int s = 0; s < plan.qmc_shifts; ++s) {
        for (int j = 0; j < d.n; ++j) shift[j] = unif(rng);
        Complex acc{0.0, 0.0};
        for (long idx = 0; idx < plan.qmc_points; ++idx) {
            for (int j = 0; j < d.n; ++j) {
                double v = radical_inverse(static_cast<std::uint64_t>(idx) + 1,
                                           bases[j]) + shift[j];
                x[j] = t * (v - std::floor(v));
            }
            std::sort(x.begin(), x.end());
            Complex f{1.0, 0.0};
            for (auto [a, b] : links) f *= fam.scalar(x[b] - x[a], lambda);
            acc += f;
        }
        shots.push_back(volume * acc / static_cast<double>(plan.qmc_points));
        out.evals += plan.qmc_points;
    }
    Complex mean{0.0, 0.0};
    for (Complex v : shots) mean += v;
    mean /= static_cast<double>(shots.size());
    double var = 0.0;
    for (Complex v : shots) var += std::norm(v - mean);
    if (shots.size() > 1) var /= static_cast<double>(shots.size() - 1);
    out.value = mean * op;
    out.std_error = std::sqrt(var / static_cast<double>(shots.size())) * opn;
    return out;
}

double pule_bound(double e_max, double v_max, double t, int n2) {
    if (n2 < 0) throw std::invalid_argument("pule_bound: need n2 >= 0");
    double out = std::pow(e_max, 2 * n2) * std::pow(v_max * std::max(t, 1.0), n2);
    for (int k = 2; k <= n2; ++k) out /= k;
    return out;
}

double xi_bound(double a_exp, double b_exp) {
    if (!(a_exp < 1.0))
        throw NonContractiveError("xi_bound: need a < 1", a_exp);
    return std::exp(a_exp * b_exp / (1.0 - a_exp));
}

}  // namespace qsc
