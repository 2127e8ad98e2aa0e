#include "nearfield/quadrature.hpp"

#include "nearfield/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

namespace nearfield::quadrature {

namespace {

// Golub-Welsch: nodes are the eigenvalues of the Jacobi matrix, weights come
// from the first eigenvector components.
Rule golub_welsch(const Eigen::VectorXd& off_diagonal, double mu0)
{
    const auto n = off_diagonal.size() + 1;
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
        jacobi(i, i + 1) = off_diagonal(i);
        jacobi(i + 1, i) = off_diagonal(i);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
    Rule rule;
    rule.nodes.resize(static_cast<std::size_t>(n));
    rule.weights.resize(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        const double v0 = solver.eigenvectors()(0, i);
        rule.nodes[static_cast<std::size_t>(i)] = solver.eigenvalues()(i);
        rule.weights[static_cast<std::size_t>(i)] = mu0 * v0 * v0;
    }
    return rule;
}

// Enforces exact mirror symmetry of a symmetric rule.
void symmetrize(Rule& rule)
{
    const std::size_t n = rule.nodes.size();
    for (std::size_t i = 0; i < n / 2; ++i) {
        const std::size_t k = n - 1 - i;
        const double x = 0.5 * (rule.nodes[k] - rule.nodes[i]);
        const double w = 0.5 * (rule.weights[k] + rule.weights[i]);
        rule.nodes[i] = -x;
        rule.nodes[k] = x;
        rule.weights[i] = w;
        rule.weights[k] = w;
    }
    if (n % 2 == 1) {
        rule.nodes[n / 2] = 0.0;
    }
}

} // namespace

Rule gauss_legendre(int n)
{
    detail::require(n >= 1, "Gauss-Legendre rule needs at least one node");
    if (n == 1) {
        return Rule{{0.0}, {2.0}};
    }
    Eigen::VectorXd beta(n - 1);
    for (int k = 1; k < n; ++k) {
        beta(k - 1) = k / std::sqrt(4.0 * k * k - 1.0);
    }
    Rule rule = golub_welsch(beta, 2.0);
    symmetrize(rule);
    return rule;
}

Rule gauss_legendre(int n, double a, double b)
{
    Rule rule = gauss_legendre(n);
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        rule.nodes[i] = mid + half * rule.nodes[i];
        rule.weights[i] *= half;
    }
    return rule;
}

Rule gauss_hermite_normal(int n)
{
    detail::require(n >= 1, "Gauss-Hermite rule needs at least one node");
    if (n == 1) {
        return Rule{{0.0}, {1.0}};
    }
    // Probabilists' Hermite polynomials: recurrence coefficient sqrt(k).
    Eigen::VectorXd beta(n - 1);
    for (int k = 1; k < n; ++k) {
        beta(k - 1) = std::sqrt(static_cast<double>(k));
    }
    Rule rule = golub_welsch(beta, 1.0);
    symmetrize(rule);
    const double total = std::accumulate(rule.weights.begin(), rule.weights.end(), 0.0);
    for (double& w : rule.weights) {
        w /= total;
    }
    return rule;
}

} // namespace nearfield::quadrature

#include <queue>

namespace nearfield::quadrature {

namespace {

constexpr std::array<double, 8> kronrod_nodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851, 0.864864423359769072789712788640926,
    0.741531185599394439863864773280788, 0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kronrod_weights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204, 0.104790010322250183839876322541518,
    0.140653259715525918745189590510238, 0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for the odd-indexed Kronrod nodes (the 7-point rule).
constexpr std::array<double, 4> gauss_weights = {0.129484966168869693270611432679082,
                                                 0.279705391489276667901467771423780,
                                                 0.381830050505118944950369775488975,
                                                 0.417959183673469387755102040816327};

struct Segment
{
    double a;
    double b;
    std::complex<double> value;
    double error;
    bool operator<(const Segment& other) const { return error < other.error; }
};

Segment kronrod_segment(const std::function<std::complex<double>(double)>& f, double a, double b)
{
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    const std::complex<double> centre = f(mid);
    std::complex<double> kronrod = kronrod_weights[7] * centre;
    std::complex<double> gauss = gauss_weights[3] * centre;
    for (std::size_t i = 0; i < 7; ++i) {
        const double dx = half * kronrod_nodes[i];
        const std::complex<double> sum = f(mid - dx) + f(mid + dx);
        kronrod += kronrod_weights[i] * sum;
        if (i % 2 == 1) {
            gauss += gauss_weights[i / 2] * sum;
        }
    }
    return {a, b, kronrod * half, std::abs((kronrod - gauss) * half)};
}

} // namespace

AdaptiveResult integrate_adaptive(const std::function<std::complex<double>(double)>& f, double a, double b,
                                  double rel_tol, double abs_tol, int max_intervals)
{
    std::priority_queue<Segment> heap;
    heap.push(kronrod_segment(f, a, b));
    std::complex<double> total = heap.top().value;
    double error = heap.top().error;
    int intervals = 1;
    while (error > std::max(abs_tol, rel_tol * std::abs(total)) && intervals < max_intervals) {
        const Segment worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        const Segment left = kronrod_segment(f, worst.a, mid);
        const Segment right = kronrod_segment(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++intervals;
    }
    // Re-sum to shed the drift of the running updates.
    total = {};
    error = 0.0;
    while (!heap.empty()) {
        total += heap.top().value;
        error += heap.top().error;
        heap.pop();
    }
    return {total, error, error <= std::max(abs_tol, rel_tol * std::abs(total))};
}

} // namespace nearfield::quadrature
