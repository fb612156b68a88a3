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

#include "raysim/comms_metrics.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace raysim
{

namespace
{
    constexpr double two_pi = 2.0 * 3.14159265358979323846;
} // namespace

arma::cx_vec equivalent_channel(const std::vector<PathParams>& paths,
                                const ArrayFrontEnd& fe, const SelectionMatrix& sel,
                                const OfdmConfig& ofdm, std::size_t p, std::size_t q)
{
    arma::cx_vec h(sel.num_selected(), arma::fill::zeros);
    const double ts = ofdm.total_symbol_s();
    for (const PathParams& path : paths)
    {
        const std::complex<double> phase =
            path.cp_rotated_gain(ofdm.cp_duration_s) *
            std::polar(1.0, -two_pi * static_cast<double>(p) * ofdm.subcarrier_spacing_hz *
                                path.delay_s) *
            std::polar(1.0, two_pi * path.doppler_hz * static_cast<double>(q) * ts);
        h += phase * fe.port_response(path.aoa_rad, sel);
    }
    return h;
}

double scenario_rate(const std::vector<PathParams>& paths, const ArrayFrontEnd& fe,
                     const SelectionMatrix& sel, const OfdmConfig& ofdm,
                     arma::mat* snr_out)
{
    const std::size_t n_sc = ofdm.num_subcarriers;
    const std::size_t m_sym = ofdm.num_symbols;
    const double noise =
        static_cast<double>(fe.elements_per_port()) * ofdm.noise_var_w /
        static_cast<double>(n_sc);
    const double ts = ofdm.total_symbol_s();

    if (snr_out)
        snr_out->set_size(n_sc, m_sym);

    // ||h_pq||^2 = sum_{l,m} g_l g_m* h_l^H h_m e^{j(...p...)} e^{j(...q...)}
    // separates over paths; precompute the per-path vectors once.
    const std::size_t n_paths = paths.size();
    std::vector<arma::cx_vec> port(n_paths);
    std::vector<std::complex<double>> gain(n_paths);
    for (std::size_t l = 0; l < n_paths; ++l)
    {
        port[l] = fe.port_response(paths[l].aoa_rad, sel);
        gain[l] = paths[l].cp_rotated_gain(ofdm.cp_duration_s);
    }

    double acc = 0.0;
    arma::cx_vec h(sel.num_selected());
    for (std::size_t q = 0; q < m_sym; ++q)
    {
        std::vector<std::complex<double>> sym_phase(n_paths);
        for (std::size_t l = 0; l < n_paths; ++l)
            sym_phase[l] = gain[l] * std::polar(1.0, two_pi * paths[l].doppler_hz *
                                                         static_cast<double>(q) * ts);
        for (std::size_t p = 0; p < n_sc; ++p)
        {
            h.zeros();
            for (std::size_t l = 0; l < n_paths; ++l)
                h += sym_phase[l] *
                     std::polar(1.0, -two_pi * static_cast<double>(p) *
                                         ofdm.subcarrier_spacing_hz * paths[l].delay_s) *
                     port[l];
            const double snr =
                std::real(arma::cdot(h, h)) * ofdm.tx_power_w / noise;
            if (snr_out)
                (*snr_out)(p, q) = snr;
            acc += std::log2(1.0 + snr);
        }
    }
    return acc / static_cast<double>(m_sym) / (ofdm.bandwidth_hz() * ts);
}

RateReport expected_rate(const std::function<std::vector<PathParams>(std::size_t)>& sampler,
                         const ArrayFrontEnd& fe, const SelectionMatrix& sel,
                         const OfdmConfig& ofdm, std::size_t trials)
{
    if (trials < 1)
        throw std::invalid_argument("expected_rate: need at least one trial");

    RateReport report;
    report.trials = trials;
    report.per_subcarrier_snr.zeros(ofdm.num_subcarriers, ofdm.num_symbols);

    double sum = 0.0;
    double sum_sq = 0.0;
    arma::mat snr;
    for (std::size_t t = 0; t < trials; ++t)
    {
        const double r = scenario_rate(sampler(t), fe, sel, ofdm, &snr);
        sum += r;
        sum_sq += r * r;
        report.per_subcarrier_snr += snr;
    }
    report.per_subcarrier_snr /= static_cast<double>(trials);
    report.rate = sum / static_cast<double>(trials);
    if (trials > 1)
    {
        const double var =
            (sum_sq - sum * sum / static_cast<double>(trials)) / static_cast<double>(trials - 1);
        report.std_error = std::sqrt(std::max(var, 0.0) / static_cast<double>(trials));
    }

    std::ostringstream fp;
    fp << (fe.kind() == ArrayFrontEnd::Kind::raa ? "raa" : "ula") << "-M"
       << fe.elements_per_port() << "-Nsc" << ofdm.num_subcarriers << "-Msym"
       << ofdm.num_symbols << "-chains" << sel.num_selected();
    report.config_fingerprint = fp.str();
    return report;
}

} // namespace raysim
