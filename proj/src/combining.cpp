#include "agingmimo/combining.hpp"

#include <stdexcept>

#include "agingmimo/linalg.hpp"

namespace agingmimo {

MatR commutation(int rows, int cols) {
    MatR k = MatR::Zero(static_cast<Eigen::Index>(rows) * cols,
                        static_cast<Eigen::Index>(rows) * cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j)
            k(static_cast<Eigen::Index>(i) * cols + j,
              static_cast<Eigen::Index>(j) * rows + i) = 1.0;
    return k;
}

MatC apply_A(const MatC& d, const MatC& cx, int n_rx) {
    const Eigen::Index n_tx = cx.rows();
    if (cx.cols() != n_tx || d.rows() != n_tx * n_rx || d.cols() != d.rows())
        throw std::invalid_argument("apply_A: shape mismatch");
    MatC out = MatC::Zero(n_rx, n_rx);
    for (Eigen::Index q = 0; q < n_tx; ++q)
        for (Eigen::Index qp = 0; qp < n_tx; ++qp) {
            const cxd c = cx(q, qp);
            if (c == cxd(0.0, 0.0)) continue;
            out += c * d.block(q * n_rx, qp * n_rx, n_rx, n_rx);
        }
    return out;
}

CombinerResult mmse_combine(const std::vector<UserSignal>& users, double noise_var) {
    if (users.empty()) throw std::invalid_argument("mmse_combine: no users");
    const Eigen::Index n_tx = users[0].beamformer.size();
    if (n_tx < 1 || users[0].channel_est.size() % n_tx != 0)
        throw std::invalid_argument("mmse_combine: inconsistent target dimensions");
    const Eigen::Index n_rx = users[0].channel_est.size() / n_tx;

    MatC f = noise_var * MatC::Identity(n_rx, n_rx);
    for (const UserSignal& u : users) {
        const MatC cx = u.data_power * (u.beamformer * u.beamformer.adjoint());
        const MatC second = u.error_cov + u.channel_est * u.channel_est.adjoint();
        f += (u.gain * u.gain) * apply_A(second, cx, static_cast<int>(n_rx));
    }
    f = hermitize(f);

    const UserSignal& target = users[0];
    const VecC u =
        unvec(target.channel_est, static_cast<int>(n_rx), static_cast<int>(n_tx)) *
        target.beamformer;
    const double c = target.gain * std::sqrt(target.data_power);

    CombinerResult r;
    r.rx_cov = f;
    r.effective = u;
    r.combiner = c * solve_hpsd(f, u);
    const MatC f1 = hermitize(f - (c * c) * (u * u.adjoint()));
    const VecC x = solve_hpsd(f1, u);
    r.sinr = (c * c) * u.dot(x).real();
    return r;
}

}  // namespace agingmimo
