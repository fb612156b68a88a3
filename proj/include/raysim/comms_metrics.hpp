// SPDX-License-Identifier: Apache-2.0
//
// raysim: ray antenna array simulator for OFDM sensing and communication
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

#ifndef raysim_comms_metrics_H
#define raysim_comms_metrics_H

#include "raysim/signal_model.hpp"

#include <functional>
#include <string>

namespace raysim
{

// Monte-Carlo uplink rate estimate. The rate is in bits/s/Hz and already
// accounts for the cyclic-prefix overhead through the 1/(B T_s) prefactor.
struct RateReport
{
    arma::mat per_subcarrier_snr; // N_sc x M_sym, averaged over trials
    double rate = 0.0;            // mean over trials, bits/s/Hz
    double std_error = 0.0;       // standard error of the mean
    std::size_t trials = 0;
    std::string config_fingerprint;
};

// Chain-domain channel of cell (p, q):
//   h_pq = S sum_l alpha_l e^{j 2 pi f_l T_cp} r(theta_l)
//          e^{-j 2 pi p df tau_l} e^{j 2 pi f_l q T_s}.
arma::cx_vec equivalent_channel(const std::vector<PathParams>& paths,
                                const ArrayFrontEnd& fe, const SelectionMatrix& sel,
                                const OfdmConfig& ofdm, std::size_t p, std::size_t q);

// Spectral efficiency of one drawn scenario with a fixed selection:
// (1/(B T_s)) (1/M_sym) sum_pq log2(1 + ||h_pq||^2 P_t / ((M/N_sc) sigma^2)).
// When snr_out is non-null it receives the per-cell SNR grid.
double scenario_rate(const std::vector<PathParams>& paths, const ArrayFrontEnd& fe,
                     const SelectionMatrix& sel, const OfdmConfig& ofdm,
                     arma::mat* snr_out = nullptr);

// Monte-Carlo expectation of scenario_rate over path draws. The sampler maps
// a trial index to a scenario; the same selection is used for every trial.
RateReport expected_rate(const std::function<std::vector<PathParams>(std::size_t)>& sampler,
                         const ArrayFrontEnd& fe, const SelectionMatrix& sel,
                         const OfdmConfig& ofdm, std::size_t trials);

} // namespace raysim

#endif
