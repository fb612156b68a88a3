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

#include "raysim/signal_model.hpp"
#include "raysim/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

namespace raysim
{

namespace
{
    constexpr double pi = 3.14159265358979323846;
    constexpr double two_pi = 2.0 * pi;
} // namespace

void OfdmConfig::validate() const
{
    if (carrier_hz <= 0.0 || subcarrier_spacing_hz <= 0.0)
        throw std::invalid_argument("OfdmConfig: carrier and subcarrier spacing must be positive");
    if (num_subcarriers == 0 || num_symbols == 0)
        throw std::invalid_argument("OfdmConfig: grid dimensions must be positive");
    if (cp_duration_s <= 0.0)
        throw std::invalid_argument("OfdmConfig: CP duration must be positive");
    if (tx_power_w <= 0.0 || noise_var_w < 0.0)
        throw std::invalid_argument("OfdmConfig: bad power settings");
    if (num_rf_chains == 0)
        throw std::invalid_argument("OfdmConfig: need at least one RF chain");
}

std::complex<double> PathParams::cp_rotated_gain(double cp_duration_s) const
{
    return gain * std::polar(1.0, two_pi * doppler_hz * cp_duration_s);
}

SymbolGrid SymbolGrid::qpsk(std::size_t n_sc, std::size_t m_sym, double tx_power,
                            std::uint64_t seed)
{
    SymbolGrid g;
    g.data.set_size(n_sc, m_sym);
    auto stream = make_stream(seed, 0x71b3u);
    std::uniform_int_distribution<int> bits(0, 3);
    const double amp = std::sqrt(0.5 * tx_power);
    for (std::size_t q = 0; q < m_sym; ++q)
        for (std::size_t p = 0; p < n_sc; ++p)
        {
            const int b = bits(stream);
            g.data(p, q) = {amp * (b & 1 ? -1.0 : 1.0), amp * (b & 2 ? -1.0 : 1.0)};
        }
    return g;
}

SymbolGrid SymbolGrid::constant(std::size_t n_sc, std::size_t m_sym, double tx_power)
{
    SymbolGrid g;
    g.data.set_size(n_sc, m_sym);
    g.data.fill(std::complex<double>(std::sqrt(tx_power), 0.0));
    return g;
}

void SelectionMatrix::validate() const
{
    if (ports.empty())
        throw std::invalid_argument("SelectionMatrix: no ports selected");
    std::set<arma::uword> seen;
    for (arma::uword p : ports)
    {
        if (p >= num_total_ports)
            throw std::invalid_argument("SelectionMatrix: port index out of range");
        if (!seen.insert(p).second)
            throw std::invalid_argument("SelectionMatrix: duplicate port index");
    }
}

arma::cx_vec SelectionMatrix::apply(const arma::cx_vec& full) const
{
    if (full.n_elem != num_total_ports)
        throw std::invalid_argument("SelectionMatrix: vector length mismatch");
    arma::cx_vec out(ports.size());
    for (std::size_t i = 0; i < ports.size(); ++i)
        out(i) = full(ports[i]);
    return out;
}

ArrayFrontEnd ArrayFrontEnd::make_raa(RaaConfig cfg)
{
    cfg.validate();
    ArrayFrontEnd fe;
    fe.kind_ = Kind::raa;
    fe.raa_ = std::move(cfg);
    return fe;
}

ArrayFrontEnd ArrayFrontEnd::make_ula(UlaConfig cfg)
{
    cfg.validate();
    ArrayFrontEnd fe;
    fe.kind_ = Kind::ula_hbf;
    fe.ula_ = std::move(cfg);
    fe.codebook_ = dft_codebook(fe.ula_);
    return fe;
}

std::size_t ArrayFrontEnd::num_ports() const
{
    return kind_ == Kind::raa ? raa_.num_sulas() : ula_.codebook_size;
}

std::size_t ArrayFrontEnd::elements_per_port() const
{
    return kind_ == Kind::raa ? raa_.elements_per_sula : ula_.num_elements;
}

arma::cx_vec ArrayFrontEnd::port_response(double theta) const
{
    if (kind_ == Kind::raa)
        return raa_response_vector(theta, raa_);

    const arma::cx_vec a =
        std::sqrt(element_gain(theta, ula_.element_pattern)) * ula_response_vector(theta, ula_);
    return codebook_.t() * a;
}

arma::cx_vec ArrayFrontEnd::port_response(double theta, const SelectionMatrix& sel) const
{
    arma::cx_vec out(sel.ports.size());
    if (kind_ == Kind::raa)
    {
        for (std::size_t i = 0; i < sel.ports.size(); ++i)
            out(i) = sula_response(theta, raa_.orientations(sel.ports[i]), raa_);
        return out;
    }
    const arma::cx_vec a =
        std::sqrt(element_gain(theta, ula_.element_pattern)) * ula_response_vector(theta, ula_);
    for (std::size_t i = 0; i < sel.ports.size(); ++i)
        out(i) = arma::cdot(codebook_.col(sel.ports[i]), a);
    return out;
}

double ArrayFrontEnd::port_angle(std::size_t port) const
{
    return kind_ == Kind::raa ? raa_.orientations(port) : ula_.codeword_angles(port);
}

const RaaConfig& ArrayFrontEnd::raa() const
{
    if (kind_ != Kind::raa)
        throw std::logic_error("ArrayFrontEnd: not a ray array");
    return raa_;
}

const UlaConfig& ArrayFrontEnd::ula() const
{
    if (kind_ != Kind::ula_hbf)
        throw std::logic_error("ArrayFrontEnd: not a ULA");
    return ula_;
}

std::vector<PathParams> make_swarm_scenario(double centroid_rad, std::size_t count,
                                            double spacing_rad, double delay_mean_s,
                                            double delay_var_s2, double doppler_mean_hz,
                                            double doppler_var_hz2, double delay_max_s,
                                            std::uint64_t seed)
{
    if (count < 1)
        throw std::invalid_argument("make_swarm_scenario: need at least one path");
    if (delay_mean_s <= 0.0 || delay_mean_s >= delay_max_s)
        throw std::invalid_argument("make_swarm_scenario: delay mean must lie in (0, delay_max)");
    if (delay_var_s2 < 0.0 || doppler_var_hz2 < 0.0)
        throw std::invalid_argument("make_swarm_scenario: variances must be nonnegative");

    auto stream = make_stream(seed, 0x5ce0u);
    std::normal_distribution<double> unit_normal(0.0, 1.0);
    std::uniform_real_distribution<double> phase(0.0, two_pi);
    const double delay_std = std::sqrt(delay_var_s2);
    const double doppler_std = std::sqrt(doppler_var_hz2);

    std::vector<PathParams> paths(count);
    for (std::size_t k = 0; k < count; ++k)
    {
        PathParams& p = paths[k];
        p.aoa_rad = centroid_rad +
                    (static_cast<double>(k) - 0.5 * static_cast<double>(count - 1)) * spacing_rad;
        if (std::abs(p.aoa_rad) >= 0.5 * pi)
            throw std::invalid_argument("make_swarm_scenario: AoA span leaves (-pi/2, pi/2)");

        if (delay_std == 0.0)
        {
            p.delay_s = delay_mean_s;
        }
        else
        {
            // redraw instead of truncating, keeping the in-range shape Gaussian
            int guard = 0;
            do
            {
                p.delay_s = delay_mean_s + delay_std * unit_normal(stream);
                if (++guard > 10000)
                    throw std::invalid_argument(
                        "make_swarm_scenario: delay distribution barely overlaps (0, delay_max)");
            } while (p.delay_s <= 0.0 || p.delay_s >= delay_max_s);
        }

        p.doppler_hz =
            doppler_std == 0.0 ? doppler_mean_hz : doppler_mean_hz + doppler_std * unit_normal(stream);
        p.gain = std::polar(1.0, phase(stream));
        p.is_los = (k == 0);
    }
    return paths;
}

SignalTensor synthesize_tensor(const std::vector<PathParams>& paths,
                               const ArrayFrontEnd& fe, const OfdmConfig& ofdm,
                               const SelectionMatrix& sel, const SymbolGrid& grid,
                               std::optional<std::uint64_t> noise_seed)
{
    ofdm.validate();
    sel.validate();
    if (sel.num_total_ports != fe.num_ports())
        throw std::invalid_argument("synthesize_tensor: selection does not match front-end");
    if (grid.data.n_rows != ofdm.num_subcarriers || grid.data.n_cols != ofdm.num_symbols)
        throw std::invalid_argument("synthesize_tensor: symbol grid dimension mismatch");
    for (const PathParams& p : paths)
        if (p.delay_s >= ofdm.cp_duration_s)
            throw std::invalid_argument("synthesize_tensor: path delay exceeds the CP");

    const std::size_t n_rf = sel.num_selected();
    const std::size_t n_sc = ofdm.num_subcarriers;
    const std::size_t m_sym = ofdm.num_symbols;
    const double ts = ofdm.total_symbol_s();

    SignalTensor y;
    y.kind = SignalTensor::Kind::raw;
    y.samples.zeros(n_rf, n_sc, m_sym);

    for (const PathParams& path : paths)
    {
        const arma::cx_vec h = fe.port_response(path.aoa_rad, sel);
        const std::complex<double> gbar = path.cp_rotated_gain(ofdm.cp_duration_s);

        arma::cx_vec delay_phase(n_sc);
        for (std::size_t p = 0; p < n_sc; ++p)
            delay_phase(p) = std::polar(
                1.0, -two_pi * static_cast<double>(p) * ofdm.subcarrier_spacing_hz * path.delay_s);

        for (std::size_t q = 0; q < m_sym; ++q)
        {
            const std::complex<double> doppler =
                std::polar(1.0, two_pi * path.doppler_hz * static_cast<double>(q) * ts);
            const arma::cx_rowvec row =
                (gbar * doppler) * (delay_phase % grid.data.col(q)).st();
            y.samples.slice(q) += h * row;
        }
    }

    if (noise_seed)
    {
        const double var =
            static_cast<double>(fe.elements_per_port()) * ofdm.noise_var_w /
            static_cast<double>(n_sc);
        const double comp_std = std::sqrt(0.5 * var);
        for (std::size_t q = 0; q < m_sym; ++q)
            for (std::size_t p = 0; p < n_sc; ++p)
            {
                auto stream = make_stream(*noise_seed, p, q);
                std::normal_distribution<double> nd(0.0, comp_std);
                for (std::size_t c = 0; c < n_rf; ++c)
                {
                    const double re = nd(stream);
                    const double im = nd(stream);
                    y.samples(c, p, q) += std::complex<double>(re, im);
                }
            }
    }
    return y;
}

SignalTensor synthesize_time_domain_oracle(const std::vector<PathParams>& paths,
                                           const ArrayFrontEnd& fe,
                                           const OfdmConfig& ofdm,
                                           const SelectionMatrix& sel,
                                           const SymbolGrid& grid)
{
    ofdm.validate();
    sel.validate();
    if (ofdm.num_subcarriers > 64 || ofdm.num_symbols > 8)
        throw std::invalid_argument("time-domain oracle: capped at N_sc <= 64, M_sym <= 8");
    for (const PathParams& p : paths)
        if (p.delay_s >= ofdm.cp_duration_s)
            throw std::invalid_argument("time-domain oracle: path delay exceeds the CP");

    const std::size_t n_rf = sel.num_selected();
    const std::size_t n_sc = ofdm.num_subcarriers;
    const std::size_t m_sym = ofdm.num_symbols;
    const double t_sym = ofdm.symbol_duration_s();
    const double ts = ofdm.total_symbol_s();
    const double tcp = ofdm.cp_duration_s;
    const double dt = t_sym / static_cast<double>(n_sc);

    // Continuous-time transmit waveform: one active symbol window per instant.
    auto tx_waveform = [&](double t) -> std::complex<double> {
        const double qf = std::floor(t / ts);
        if (qf < 0.0 || qf >= static_cast<double>(m_sym))
            return {0.0, 0.0};
        const auto q = static_cast<std::size_t>(qf);
        const double u = t - qf * ts - tcp;
        std::complex<double> acc{0.0, 0.0};
        for (std::size_t p = 0; p < n_sc; ++p)
            acc += grid.data(p, q) *
                   std::polar(1.0, two_pi * static_cast<double>(p) * ofdm.subcarrier_spacing_hz * u);
        return acc;
    };

    SignalTensor y;
    y.kind = SignalTensor::Kind::raw;
    y.samples.zeros(n_rf, n_sc, m_sym);

    std::vector<arma::cx_vec> port_gain(paths.size());
    for (std::size_t l = 0; l < paths.size(); ++l)
        port_gain[l] = fe.port_response(paths[l].aoa_rad, sel);

    arma::cx_mat block(n_sc, n_rf);
    for (std::size_t q = 0; q < m_sym; ++q)
    {
        block.zeros();
        const double t_block = static_cast<double>(q) * ts + tcp;
        for (std::size_t l = 0; l < paths.size(); ++l)
        {
            const std::complex<double> rot =
                paths[l].gain * std::polar(1.0, two_pi * paths[l].doppler_hz * t_block);
            for (std::size_t i = 0; i < n_sc; ++i)
            {
                const std::complex<double> x =
                    tx_waveform(t_block + static_cast<double>(i) * dt - paths[l].delay_s);
                block.row(i) += (rot * x) * port_gain[l].st();
            }
        }
        const arma::cx_mat spec = arma::fft(block) / static_cast<double>(n_sc);
        y.samples.slice(q) = spec.st();
    }
    return y;
}

SelectionMatrix select_rays_energy(const arma::cx_cube& full_port_probe,
                                   std::size_t num_select, const ArrayFrontEnd& fe)
{
    const std::size_t nports = full_port_probe.n_rows;
    if (nports != fe.num_ports())
        throw std::invalid_argument("select_rays_energy: probe does not cover every port");
    if (num_select == 0 || num_select > nports)
        throw std::invalid_argument("select_rays_energy: bad selection count");

    arma::vec energy(nports, arma::fill::zeros);
    for (std::size_t q = 0; q < full_port_probe.n_slices; ++q)
        energy += arma::sum(arma::square(arma::abs(full_port_probe.slice(q))), 1);

    std::vector<arma::uword> order(nports);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](arma::uword a, arma::uword b) {
        if (energy(a) != energy(b))
            return energy(a) > energy(b);
        const double aa = std::abs(fe.port_angle(a));
        const double ab = std::abs(fe.port_angle(b));
        if (aa != ab)
            return aa < ab;
        return a < b;
    });

    SelectionMatrix sel;
    sel.num_total_ports = nports;
    sel.ports.assign(order.begin(), order.begin() + static_cast<long>(num_select));
    sel.validate();
    return sel;
}

SelectionMatrix probe_and_select(const std::vector<PathParams>& paths,
                                 const ArrayFrontEnd& fe, const OfdmConfig& ofdm,
                                 std::uint64_t seed, std::size_t* sweep_count)
{
    const std::size_t nports = fe.num_ports();
    if (ofdm.num_rf_chains > nports)
        throw std::invalid_argument("probe_and_select: more RF chains than ports");

    SelectionMatrix all;
    all.num_total_ports = nports;
    all.ports.resize(nports);
    std::iota(all.ports.begin(), all.ports.end(), 0);

    OfdmConfig probe_cfg = ofdm;
    probe_cfg.num_symbols = 1;
    const SymbolGrid probe_grid =
        SymbolGrid::qpsk(probe_cfg.num_subcarriers, 1, probe_cfg.tx_power_w, mix_seed(seed, 0xbeefu));
    const SignalTensor probe =
        synthesize_tensor(paths, fe, probe_cfg, all, probe_grid, mix_seed(seed, 0xfeedu));

    if (sweep_count)
        *sweep_count = (nports + ofdm.num_rf_chains - 1) / ofdm.num_rf_chains;
    return select_rays_energy(probe.samples, ofdm.num_rf_chains, fe);
}

SignalTensor data_removal(const SignalTensor& raw, const SymbolGrid& grid)
{
    if (raw.kind != SignalTensor::Kind::raw)
        throw std::invalid_argument("data_removal: tensor already data-removed");
    if (grid.data.n_rows != raw.num_subcarriers() || grid.data.n_cols != raw.num_symbols())
        throw std::invalid_argument("data_removal: grid dimension mismatch");
    if (arma::abs(grid.data).min() <= 0.0)
        throw std::invalid_argument("data_removal: zero data symbol");

    SignalTensor out;
    out.kind = SignalTensor::Kind::data_removed;
    out.samples.set_size(raw.samples.n_rows, raw.samples.n_cols, raw.samples.n_slices);
    for (std::size_t q = 0; q < raw.num_symbols(); ++q)
        for (std::size_t p = 0; p < raw.num_subcarriers(); ++p)
            out.samples.slice(q).col(p) = raw.samples.slice(q).col(p) / grid.data(p, q);
    return out;
}

} // namespace raysim
