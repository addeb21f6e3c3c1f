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

// Downlink evaluation: zero-forcing beamforming on an estimated network
// channel, per-user signal/interference covariances against the true channel,
// and the log-det throughput metric. All matrices follow the stacked layout
// of NetworkChannel.

#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

#include "isacsim/channel.hpp"

namespace isacsim {

// Raised by numeric failures that indicate an unusable instance rather than
// a caller error (maps to a distinct process exit status).
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Zero-forcing weights W = H^H (H H^H)^{-1} for the whole network. Column
// block u (n_ue_ant columns) serves user u.
struct BeamformerSet {
    Eigen::MatrixXcd full;
    int n_ues = 0;
    int n_ue_ant = 0;
    bool regularized = false; // diagonal loading was needed

    Eigen::Block<const Eigen::MatrixXcd> user_block(int u) const {
        return full.block(0, static_cast<Eigen::Index>(u) * n_ue_ant, full.rows(), n_ue_ant);
    }
};

struct SlotThroughput {
    std::vector<double> per_user; // bits/s/Hz
    double total = 0.0;
};

// Inverts the estimated channel. Requires row >= column dimension sense:
// U*N_u <= M*N_t. A Gram matrix that fails Cholesky gets diagonal loading
// 1e-9 * trace / dim and the result is flagged.
BeamformerSet zf_weights(const NetworkChannel& h_est);

// R_S = p_u * (h_u w_u)(h_u w_u)^H / ||w_u||_F^2.
Eigen::MatrixXcd signal_covariance(const Eigen::MatrixXcd& h_u, const Eigen::MatrixXcd& w_u,
                                   double p_u);

// R_I = sum_{u' != u} p_{u'} (h_u w_{u'})(h_u w_{u'})^H / ||w_{u'}||_F^2
//       + noise_power * I.
Eigen::MatrixXcd interference_covariance(const Eigen::MatrixXcd& h_u, const BeamformerSet& bf,
                                         int u, const std::vector<double>& powers,
                                         double noise_power);

// log2 det(R_S + R_I) - log2 det(R_I), computed via Cholesky factors.
// Throws NumericError when a factorization fails or the result is not finite.
double user_throughput(const Eigen::MatrixXcd& r_s, const Eigen::MatrixXcd& r_i);

// Per-user throughput of one slot: the estimate fixes the weights, the true
// channel decides what actually arrives. Every user gets p_u = n_aps * p_m.
SlotThroughput slot_throughput(const NetworkChannel& h_true, const BeamformerSet& bf, double p_m,
                               int n_aps, double noise_power);

// Mean over users of |trace(h_u hest_u^H)| / (||h_u||_F ||hest_u||_F).
// Equals 1 iff every estimated block is a nonzero complex multiple of the
// true one. Zero-norm blocks are skipped (their count is reported through
// skipped, when given). With use_real_part the real part of the trace
// replaces its magnitude (diagnostic variant, may go negative).
double channel_correlation(const NetworkChannel& h_true, const NetworkChannel& h_est,
                           bool use_real_part = false, int* skipped = nullptr);

// Test oracle helper: log2 det via eigenvalues of a Hermitian PD matrix.
double log2_det_eig(const Eigen::MatrixXcd& a);

} // namespace isacsim
