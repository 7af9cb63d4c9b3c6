#include "agingmimo/detequiv.hpp"

#include <cmath>
#include <stdexcept>

#include "agingmimo/combining.hpp"
#include "agingmimo/linalg.hpp"

namespace agingmimo {

namespace {

struct Contracted {
    std::vector<MatC> signal;  // gain^2 * A_k(est_cov_k), all users in order
    MatC theta;                // sum_k gain^2 * A_k(err_cov_k)
    int n_rx = 0;
};

Contracted contract_users(const std::vector<DetEquivUser>& users) {
    if (users.empty()) throw std::invalid_argument("detequiv: no users");
    const Eigen::Index n_tx = users[0].beamformer.size();
    if (n_tx < 1 || users[0].est_cov.rows() % n_tx != 0)
        throw std::invalid_argument("detequiv: inconsistent dimensions");
    const int n_rx = static_cast<int>(users[0].est_cov.rows() / n_tx);

    Contracted c;
    c.n_rx = n_rx;
    c.theta = MatC::Zero(n_rx, n_rx);
    c.signal.reserve(users.size());
    for (const DetEquivUser& u : users) {
        const MatC shape =
            u.tx_shape.size() ? u.tx_shape : MatC(u.beamformer * u.beamformer.adjoint());
        const MatC cx = u.data_power * shape;
        const double g2 = u.gain * u.gain;
        c.signal.push_back(hermitize(g2 * apply_A(u.est_cov, cx, n_rx)));
        c.theta += g2 * apply_A(u.err_cov, cx, n_rx);
    }
    c.theta = hermitize(c.theta);
    return c;
}

}  // namespace

FixedPointResult fixed_point(const std::vector<DetEquivUser>& users, double noise_var,
                             double tol, int max_iter) {
    const Contracted c = contract_users(users);
    const int n_rx = c.n_rx;
    const int n_int = static_cast<int>(users.size()) - 1;
    const MatC base = c.theta + noise_var * MatC::Identity(n_rx, n_rx);

    FixedPointResult r;
    r.omega = VecR::Constant(n_int, 1.0 / noise_var);

    auto resolvent = [&](const VecR& omega) {
        MatC m = base;
        for (int k = 0; k < n_int; ++k) m += c.signal[k + 1] / (1.0 + omega[k]);
        return solve_hpsd(hermitize(m), MatC::Identity(n_rx, n_rx));
    };

    for (int it = 1; it <= max_iter; ++it) {
        r.t = resolvent(r.omega);
        VecR next(n_int);
        for (int k = 0; k < n_int; ++k)
            next[k] = frob_inner(c.signal[k + 1], r.t.adjoint()).real();
        const double scale = std::max(1.0, next.size() ? next.cwiseAbs().maxCoeff() : 1.0);
        const double delta =
            next.size() ? (next - r.omega).cwiseAbs().maxCoeff() / scale : 0.0;
        r.delta_history.push_back(delta);
        r.omega = next;
        r.iterations = it;
        if (delta <= tol) {
            r.converged = true;
            break;
        }
    }
    r.t = resolvent(r.omega);
    return r;
}

SeDeterministic se_deterministic(const std::vector<DetEquivUser>& users, double noise_var,
                                 const FixedPointResult& fp, const MatC* fluctuation_cov) {
    (void)noise_var;
    const Contracted c = contract_users(users);
    const int n_int = static_cast<int>(users.size()) - 1;
    if (fp.omega.size() != n_int)
        throw std::invalid_argument("se_deterministic: fixed point/user count mismatch");
    const MatC& t = fp.t;

    auto trace_prod = [](const MatC& a, const MatC& b) {
        return (a.array() * b.transpose().array()).sum().real();  // tr(a b)
    };

    const double mean = trace_prod(c.signal[0], t);

    // Derivative system for the interferer loads.
    MatR jm = MatR::Zero(n_int, n_int);
    VecR v(n_int);
    for (int a = 0; a < n_int; ++a) {
        const MatC bat = c.signal[a + 1] * t;
        v[a] = trace_prod(bat, c.signal[0] * t);
        for (int b = 0; b < n_int; ++b) {
            const double d = 1.0 + fp.omega[b];
            jm(a, b) = trace_prod(bat, c.signal[b + 1] * t) / (d * d);
        }
    }
    VecR omega_prime(n_int);
    if (n_int > 0)
        omega_prime = (MatR::Identity(n_int, n_int) - jm).partialPivLu().solve(v);

    MatC inner = c.signal[0];
    for (int k = 0; k < n_int; ++k) {
        const double d = 1.0 + fp.omega[k];
        inner += (omega_prime[k] / (d * d)) * c.signal[k + 1];
    }
    const MatC t_prime = t * inner * t;

    MatC bv = c.signal[0];
    if (fluctuation_cov) {
        const DetEquivUser& tgt = users[0];
        const MatC shape = tgt.tx_shape.size()
                               ? tgt.tx_shape
                               : MatC(tgt.beamformer * tgt.beamformer.adjoint());
        const MatC cx = tgt.data_power * shape;
        bv = hermitize((tgt.gain * tgt.gain) * apply_A(*fluctuation_cov, cx, c.n_rx));
    }
    // Circularly-symmetric quadratic forms carry no doubling factor here;
    // Monte-Carlo ground truth pins the coefficient at one.
    const double variance = trace_prod(bv, t_prime);

    SeDeterministic out;
    out.mean_sinr = mean;
    out.variance = variance;
    out.omega_prime = omega_prime;
    const double one_plus = 1.0 + mean;
    out.se = std::log2(one_plus) - variance / (2.0 * std::log(2.0) * one_plus * one_plus);
    return out;
}

MatC g_operator(const MatC& c, const MatC& t) {
    const Eigen::Index n_rx = t.rows();
    if (t.cols() != n_rx || c.rows() != c.cols() || c.rows() % n_rx != 0)
        throw std::invalid_argument("g_operator: shape mismatch");
    const Eigen::Index n_tx = c.rows() / n_rx;
    MatC out(n_tx, n_tx);
    for (Eigen::Index q = 0; q < n_tx; ++q)
        for (Eigen::Index qp = 0; qp < n_tx; ++qp)
            out(q, qp) = frob_inner(c.block(q * n_rx, qp * n_rx, n_rx, n_rx), t);
    return out;
}

VecC optimal_beamformer(const MatC& g) {
    const MatC target = hermitize(g).conjugate();
    Eigen::SelfAdjointEigenSolver<MatC> eig(target);
    VecC w = eig.eigenvectors().col(target.rows() - 1);
    // Deterministic phase: rotate the largest-modulus entry onto the positive
    // real axis.
    Eigen::Index imax = 0;
    w.cwiseAbs().maxCoeff(&imax);
    const cxd pivot = w[imax];
    if (std::abs(pivot) > 0.0) w *= std::conj(pivot) / std::abs(pivot);
    w.normalize();
    return w;
}

}  // namespace agingmimo
