// SPDX-License-Identifier: Apache-2.0
//
// isacsim - deterministic link-level simulator for sensing-assisted distributed MIMO
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "isacsim/comm.hpp"

#include <algorithm>
#include <cmath>

namespace isacsim {

namespace {

// Smallest acceptable reciprocal condition number of the ZF Gram matrix.
// Grams worse than about 1e12 switch to the diagonal-loading solve; beyond
// that point the plain inverse is dominated by rounding noise.
constexpr double kZfRcondMin = 1e-12;

// log2 det of a Hermitian positive-definite matrix via its Cholesky factor.
double log2_det_llt(const Eigen::MatrixXcd& a, const char* what) {
    // Symmetrize first: the covariances are Hermitian up to rounding.
    const Eigen::MatrixXcd h = 0.5 * (a + a.adjoint());
    Eigen::LLT<Eigen::MatrixXcd> llt(h);
    if (llt.info() != Eigen::Success)
        throw NumericError(std::string(what) + ": Cholesky failed, matrix not positive definite");
    const auto& l = llt.matrixLLT();
    double acc = 0.0;
    for (Eigen::Index i = 0; i < l.rows(); ++i)
        acc += std::log2(l(i, i).real());
    const double r = 2.0 * acc;
    if (!std::isfinite(r))
        throw NumericError(std::string(what) + ": non-finite log-determinant");
    return r;
}

} // namespace

BeamformerSet zf_weights(const NetworkChannel& h_est) {
    const Eigen::MatrixXcd& h = h_est.stacked;
    const Eigen::Index rows = h.rows();
    if (rows > h.cols())
        throw std::domain_error("zf_weights: more user antennas than network transmit antennas");

    Eigen::MatrixXcd gram = h * h.adjoint();
    gram = 0.5 * (gram + gram.adjoint());

    BeamformerSet bf;
    bf.n_ues = h_est.n_ues;
    bf.n_ue_ant = h_est.n_ue_ant;

    Eigen::LLT<Eigen::MatrixXcd> llt(gram);
    bool deficient = llt.info() != Eigen::Success;
    if (!deficient) {
        // The factorization can run to completion on a numerically singular
        // Gram matrix and hand back an inverse dominated by noise. Catch that
        // with a condition estimate before it inflates the weights.
        deficient = !(llt.rcond() > kZfRcondMin);
    }
    if (deficient) {
        // Ill-conditioned estimate: load the diagonal and retry rather than
        // fail the slot.
        const double load = 1e-9 * gram.trace().real() / static_cast<double>(rows);
        gram += load * Eigen::MatrixXcd::Identity(rows, rows);
        llt.compute(gram);
        if (llt.info() != Eigen::Success)
            throw NumericError("zf_weights: Gram matrix not invertible even with loading");
        bf.regularized = true;
    }
    bf.full = h.adjoint() * llt.solve(Eigen::MatrixXcd::Identity(rows, rows));
    return bf;
}

Eigen::MatrixXcd signal_covariance(const Eigen::MatrixXcd& h_u, const Eigen::MatrixXcd& w_u,
                                   double p_u) {
    const double n2 = w_u.squaredNorm();
    if (!(n2 > 0.0))
        throw std::domain_error("signal_covariance: zero-norm beamformer");
    const Eigen::MatrixXcd e = h_u * w_u;
    return (p_u / n2) * (e * e.adjoint());
}

Eigen::MatrixXcd interference_covariance(const Eigen::MatrixXcd& h_u, const BeamformerSet& bf,
                                         int u, const std::vector<double>& powers,
                                         double noise_power) {
    const Eigen::Index n = h_u.rows();
    Eigen::MatrixXcd r =
        noise_power * Eigen::MatrixXcd::Identity(n, n);
    for (int v = 0; v < bf.n_ues; ++v) {
        if (v == u)
            continue;
        const Eigen::MatrixXcd w_v = bf.user_block(v);
        const double n2 = w_v.squaredNorm();
        if (!(n2 > 0.0))
            throw std::domain_error("interference_covariance: zero-norm beamformer");
        const Eigen::MatrixXcd e = h_u * w_v;
        r.noalias() += (powers[static_cast<std::size_t>(v)] / n2) * (e * e.adjoint());
    }
    return r;
}

double user_throughput(const Eigen::MatrixXcd& r_s, const Eigen::MatrixXcd& r_i) {
    const double t = log2_det_llt(r_s + r_i, "user_throughput(signal+interference)") -
                     log2_det_llt(r_i, "user_throughput(interference)");
    // Determinant monotonicity makes this nonnegative; clamp the rounding.
    return t < 0.0 ? 0.0 : t;
}

SlotThroughput slot_throughput(const NetworkChannel& h_true, const BeamformerSet& bf, double p_m,
                               int n_aps, double noise_power) {
    const int ues = h_true.n_ues;
    const int na = h_true.n_ue_ant;
    const double p_u = static_cast<double>(n_aps) * p_m;

    // One network-wide product gives every (user, beam) block at once.
    const Eigen::MatrixXcd e = h_true.stacked * bf.full;

    std::vector<double> w_norm2(static_cast<std::size_t>(ues));
    for (int v = 0; v < ues; ++v) {
        w_norm2[static_cast<std::size_t>(v)] = bf.user_block(v).squaredNorm();
        if (!(w_norm2[static_cast<std::size_t>(v)] > 0.0))
            throw std::domain_error("slot_throughput: zero-norm beamformer");
    }

    SlotThroughput st;
    st.per_user.resize(static_cast<std::size_t>(ues));
    for (int u = 0; u < ues; ++u) {
        const Eigen::Index r0 = static_cast<Eigen::Index>(u) * na;
        Eigen::MatrixXcd r_i = noise_power * Eigen::MatrixXcd::Identity(na, na);
        Eigen::MatrixXcd r_s;
        for (int v = 0; v < ues; ++v) {
            const Eigen::MatrixXcd blk = e.block(r0, static_cast<Eigen::Index>(v) * na, na, na);
            const Eigen::MatrixXcd cov =
                (p_u / w_norm2[static_cast<std::size_t>(v)]) * (blk * blk.adjoint());
            if (v == u)
                r_s = cov;
            else
                r_i += cov;
        }
        const double t = user_throughput(r_s, r_i);
        st.per_user[static_cast<std::size_t>(u)] = t;
        st.total += t;
    }
    return st;
}

double channel_correlation(const NetworkChannel& h_true, const NetworkChannel& h_est,
                           bool use_real_part, int* skipped) {
    if (h_true.stacked.rows() != h_est.stacked.rows() ||
        h_true.stacked.cols() != h_est.stacked.cols())
        throw std::domain_error("channel_correlation: shape mismatch");
    double acc = 0.0;
    int used = 0, skip = 0;
    for (int u = 0; u < h_true.n_ues; ++u) {
        const Eigen::MatrixXcd hu = h_true.user_row(u);
        const Eigen::MatrixXcd eu = h_est.user_row(u);
        const double nh = hu.norm();
        const double ne = eu.norm();
        if (!(nh > 0.0) || !(ne > 0.0)) {
            ++skip;
            continue;
        }
        const std::complex<double> tr = (hu * eu.adjoint()).trace();
        // Cauchy-Schwarz bounds the ratio by 1; clamp away FP overshoot.
        const double r = (use_real_part ? tr.real() : std::abs(tr)) / (nh * ne);
        acc += std::min(r, 1.0);
        ++used;
    }
    if (skipped)
        *skipped = skip;
    return used > 0 ? acc / used : 0.0;
}

double log2_det_eig(const Eigen::MatrixXcd& a) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (a + a.adjoint()));
    double acc = 0.0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
        acc += std::log2(es.eigenvalues()(i));
    return acc;
}

} // namespace isacsim
