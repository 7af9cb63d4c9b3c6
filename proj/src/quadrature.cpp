#include "agingmimo/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

namespace agingmimo {

namespace {

// Kronrod-15 abscissae on [0, 1] side (symmetric) and weights; the embedded
// Gauss-7 rule reuses the odd-indexed nodes.
constexpr double kx[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.000000000000000};
constexpr double kw[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
constexpr double gw[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

struct Segment {
    double a, b;
    cxd value;
    double error;
    bool operator<(const Segment& o) const { return error < o.error; }
};

Segment eval_segment(const std::function<cxd(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    cxd fv[15];
    for (int i = 0; i < 7; ++i) {
        fv[i] = f(c - h * kx[i]);
        fv[14 - i] = f(c + h * kx[i]);
    }
    fv[7] = f(c);
    cxd kron{0.0, 0.0};
    for (int i = 0; i < 7; ++i) kron += kw[i] * (fv[i] + fv[14 - i]);
    kron += kw[7] * fv[7];
    kron *= h;
    cxd gauss{0.0, 0.0};
    for (int i = 0; i < 3; ++i) gauss += gw[i] * (fv[2 * i + 1] + fv[13 - 2 * i]);
    gauss += gw[3] * fv[7];
    gauss *= h;
    return {a, b, kron, std::abs(kron - gauss)};
}

}  // namespace

QuadratureResult integrate(const std::function<cxd(double)>& f, double a, double b,
                           double abs_tol, int max_evals) {
    QuadratureResult out;
    std::priority_queue<Segment> queue;
    Segment first = eval_segment(f, a, b);
    out.evaluations = 15;
    cxd total = first.value;
    double total_err = first.error;
    queue.push(first);
    while (total_err > abs_tol && out.evaluations + 30 <= max_evals) {
        Segment worst = queue.top();
        queue.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        Segment left = eval_segment(f, worst.a, mid);
        Segment right = eval_segment(f, mid, worst.b);
        out.evaluations += 30;
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        queue.push(left);
        queue.push(right);
    }
    out.value = total;
    out.error_estimate = total_err;
    out.converged = total_err <= abs_tol;
    return out;
}

}  // namespace agingmimo
