// Vacuum-expectation series machinery: set-partition diagrams, their vanishing
// limits, chain resummation, pre-limit values by simplex quadrature, and the
// classical growth/domination bounds.
#pragma once

#include "qsc/block_matrix.hpp"
#include "qsc/noise.hpp"

#include <cstdint>
#include <vector>

namespace qsc {

// A partition of the vertex set {0, ..., n-1}; vertex k sits at the k-th
// smallest time. Blocks hold ascending vertex ids and are ordered by minimum.
struct Diagram {
    int n = 0;
    std::vector<std::vector<int>> blocks;
};

// All set partitions of n vertices in canonical (restricted-growth) order.
// Guarded to n <= 10.
std::vector<Diagram> enumerate_vacuum_diagrams(int n);

// Number of set partitions of an n-element set.
std::uint64_t bell_number(int n);

// Number of perfect pairings of n2 emission and n2 absorption vertices:
// (2 n2)! / (2^{n2} n2!).
std::uint64_t count_pairings_emission_absorption(int n2);

// True when every block occupies consecutive vertex positions.
bool is_time_consecutive(const Diagram& d);

// Limit factor of one size-m block: (-i)^m [E (V E)^{m-1}]_{00} as a dxd matrix.
Matrix chain_block_value(const BlockMatrix& e, const Gauge& gauge, int m);

// Sum of chain_block_value over all m >= 1 (geometric in the channel sector);
// requires the channel norm of V E to be < 1. Reports the number of chain
// terms actually summed through `terms` when non-null.
Matrix resummed_vacuum_block(const BlockMatrix& e, const Gauge& gauge,
                             int* terms = nullptr);

// Limit value of one diagram: zero unless time-consecutive; otherwise the
// ordered product of block chain factors (latest block leftmost) with the
// reduced simplex volume t^b/b! as weight.
struct DiagramValue {
    Matrix op;
    Complex weight{0.0, 0.0};
    Matrix total() const { return weight * op; }
};
DiagramValue tc_limit_value(const Diagram& d, const BlockMatrix& e, const Gauge& gauge,
                            double t);

// Limit series summed by effective order (block count) up to `order`,
// including the order-0 identity; converges to the exponential of t times the
// resummed block.
struct SeriesSum {
    Matrix value;        // partial sum
    Matrix box;          // resummed single-block value
    double tail_bound = 0.0;   // ||t box||^{order+1}/(order+1)! * e^{||t box||}
    double contraction = 0.0;  // channel norm of V E
    int chain_terms = 0;       // chains summed inside the box
};
SeriesSum vacuum_series_sum(const BlockMatrix& e, const Gauge& gauge, double t,
                            int order);

// Quadrature controls for pre-limit values.
struct QuadraturePlan {
    int gl_points = 16;
    // composite panels per nesting level, chosen by total dimension 1..4
    int panels_by_dim[4] = {10, 8, 5, 3};
    long qmc_points = 1 << 20;  // per shift, dimensions 5-6
    int qmc_shifts = 8;
    std::uint64_t seed = 0;
};

// Pre-limit value of one diagram at correlation time lambda: the operator
// factor (channel sums of E-blocks in time order) times the simplex integral
// of the product of correlation factors along each block's consecutive links.
// Requires a channel-diagonal family; guarded to n <= 6.
struct PrelimitValue {
    Matrix value;
    double std_error = 0.0;  // quadrature standard error (QMC dimensions only)
    long evals = 0;
};
PrelimitValue prelimit_diagram_value(const Diagram& d, const BlockMatrix& e,
                                     const CorrelationFamily& fam, double lambda,
                                     double t, const QuadraturePlan& plan = {});

// Growth bound for the pairing sector: e_max^{2 n2} (v_max max(t,1))^{n2} / n2!.
double pule_bound(double e_max, double v_max, double t, int n2);

// Dominating series bound exp(a b / (1 - a)) with a = channel norm of V E and
// b = e_max * max(t, 1); requires a < 1.
double xi_bound(double a_exp, double b_exp);

}  // namespace qsc
