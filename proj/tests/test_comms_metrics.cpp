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

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

using namespace raysim;

namespace
{
constexpr double pi = 3.14159265358979323846;
constexpr double deg = pi / 180.0;

OfdmConfig small_ofdm()
{
    OfdmConfig o;
    o.carrier_hz = 39e9;
    o.subcarrier_spacing_hz = 120e3;
    o.num_subcarriers = 16;
    o.num_symbols = 4;
    o.cp_duration_s = 0.67e-6;
    o.tx_power_w = 1.0;
    o.noise_var_w = 0.01;
    o.num_rf_chains = 4;
    return o;
}

ArrayFrontEnd fe16()
{
    return ArrayFrontEnd::make_raa(RaaConfig::design(
        16, 0.5 * pi, speed_of_light / 39e9, ElementPattern::raa_directional()));
}

SelectionMatrix pick(const ArrayFrontEnd& fe, std::initializer_list<arma::uword> ports)
{
    SelectionMatrix sel;
    sel.num_total_ports = fe.num_ports();
    sel.ports = ports;
    sel.validate();
    return sel;
}
} // namespace

TEST_CASE("equivalent channel basics")
{
    const ArrayFrontEnd fe = fe16();
    const OfdmConfig ofdm = small_ofdm();
    const std::size_t c = (fe.num_ports() - 1) / 2;
    const SelectionMatrix sel = pick(fe, {c - 1, c, c + 1, c + 2});

    PathParams path;
    path.gain = std::polar(1.0, 0.3);
    path.aoa_rad = 1.5 * deg;
    path.delay_s = 0.2e-6;
    path.doppler_hz = 140.0;

    // cell (0, 0) is the CP-rotated gain times the selected response
    const arma::cx_vec h00 = equivalent_channel({path}, fe, sel, ofdm, 0, 0);
    const arma::cx_vec want =
        path.cp_rotated_gain(ofdm.cp_duration_s) * fe.port_response(path.aoa_rad, sel);
    CHECK(arma::abs(h00 - want).max() < 1e-12 * arma::abs(want).max());

    // unimodular phase factors keep the norm constant over the grid
    const double n0 = arma::norm(h00);
    for (std::size_t p : {3ul, 9ul})
        for (std::size_t q : {1ul, 3ul})
            CHECK(arma::norm(equivalent_channel({path}, fe, sel, ofdm, p, q)) ==
                  Catch::Approx(n0).epsilon(1e-12));

    // additivity over paths
    PathParams other = path;
    other.aoa_rad = -2.0 * deg;
    other.delay_s = 0.5e-6;
    other.gain = std::polar(1.0, -1.1);
    const arma::cx_vec h_both = equivalent_channel({path, other}, fe, sel, ofdm, 5, 2);
    const arma::cx_vec h_a = equivalent_channel({path}, fe, sel, ofdm, 5, 2);
    const arma::cx_vec h_b = equivalent_channel({other}, fe, sel, ofdm, 5, 2);
    CHECK(arma::abs(h_both - h_a - h_b).max() < 1e-12 * arma::abs(h_both).max());
}

TEST_CASE("scenario rate closed form for one deterministic path")
{
    const ArrayFrontEnd fe = fe16();
    const OfdmConfig ofdm = small_ofdm();
    const std::size_t c = (fe.num_ports() - 1) / 2;
    const SelectionMatrix sel = pick(fe, {c, c + 1, c + 2, c + 3});

    PathParams path;
    path.aoa_rad = 0.5 * deg;
    path.delay_s = 0.3e-6;
    path.doppler_hz = 200.0;

    arma::mat snr;
    const double rate = scenario_rate({path}, fe, sel, ofdm, &snr);

    // single path: every cell has the same SNR, so the sum collapses
    const double h2 = std::pow(arma::norm(fe.port_response(path.aoa_rad, sel)), 2.0);
    const double noise = 16.0 * ofdm.noise_var_w / 16.0;
    const double cell_snr = h2 * ofdm.tx_power_w / noise;
    CHECK(snr.min() == Catch::Approx(cell_snr).epsilon(1e-10));
    CHECK(snr.max() == Catch::Approx(cell_snr).epsilon(1e-10));
    const double want = 16.0 * std::log2(1.0 + cell_snr) /
                        (ofdm.bandwidth_hz() * ofdm.total_symbol_s());
    CHECK(rate == Catch::Approx(want).epsilon(1e-12));

    // zero-gain paths carry no information
    PathParams dead = path;
    dead.gain = 0.0;
    CHECK(scenario_rate({dead}, fe, sel, ofdm) == 0.0);
}

TEST_CASE("scaling the path gains scales the SNR quadratically")
{
    const ArrayFrontEnd fe = fe16();
    const OfdmConfig ofdm = small_ofdm();
    const std::size_t c = (fe.num_ports() - 1) / 2;
    const SelectionMatrix sel = pick(fe, {c - 2, c, c + 2, c + 4});

    auto paths = make_swarm_scenario(1.0 * deg, 3, 1.0 * deg, 0.3e-6, 1e-15, 300.0,
                                     1e4, ofdm.cp_duration_s, 5);
    arma::mat snr1;
    scenario_rate(paths, fe, sel, ofdm, &snr1);
    for (auto& p : paths)
        p.gain *= std::complex<double>(0.0, 3.0); // |c|^2 = 9
    arma::mat snr2;
    scenario_rate(paths, fe, sel, ofdm, &snr2);
    CHECK(arma::abs(snr2 - 9.0 * snr1).max() < 1e-9 * snr2.max());
}

TEST_CASE("expected rate: mean, stderr shrinkage, fingerprint")
{
    const ArrayFrontEnd fe = fe16();
    const OfdmConfig ofdm = small_ofdm();
    const std::size_t c = (fe.num_ports() - 1) / 2;
    const SelectionMatrix sel = pick(fe, {c - 1, c, c + 1, c + 2});

    auto sampler = [&](std::size_t trial) {
        return make_swarm_scenario(0.0, 3, 1.0 * deg, 0.3e-6, 2.5e-15, 300.0, 3.6e5,
                                   ofdm.cp_duration_s, 1000 + trial);
    };

    const RateReport r10 = expected_rate(sampler, fe, sel, ofdm, 10);
    const RateReport r40 = expected_rate(sampler, fe, sel, ofdm, 40);
    const RateReport r160 = expected_rate(sampler, fe, sel, ofdm, 160);

    CHECK(r40.rate > 0.0);
    CHECK(r10.std_error > 0.0);
    // 4x the trials should halve the standard error, within 30%
    CHECK(r10.std_error / r40.std_error == Catch::Approx(2.0).epsilon(0.30));
    CHECK(r40.std_error / r160.std_error == Catch::Approx(2.0).epsilon(0.30));

    CHECK(r40.per_subcarrier_snr.n_rows == 16);
    CHECK(r40.per_subcarrier_snr.n_cols == 4);
    CHECK(!r40.config_fingerprint.empty());

    CHECK_THROWS_AS(expected_rate(sampler, fe, sel, ofdm, 0), std::invalid_argument);
}

TEST_CASE("directional ray array outrates the isotropic-element ULA")
{
    const double lambda = speed_of_light / 39e9;
    const OfdmConfig ofdm = small_ofdm();
    const ArrayFrontEnd raa = fe16();
    const ArrayFrontEnd ula = ArrayFrontEnd::make_ula(
        UlaConfig::with_dft_codebook(16, lambda, ElementPattern::matched_isotropic()));

    auto sampler = [&](std::size_t trial) {
        return make_swarm_scenario(20.0 * deg, 3, 1.0 * deg, 0.3e-6, 2.5e-15, 300.0,
                                   3.6e5, ofdm.cp_duration_s, 500 + trial);
    };

    const SelectionMatrix sel_raa = probe_and_select(sampler(0), raa, ofdm, 1);
    const SelectionMatrix sel_ula = probe_and_select(sampler(0), ula, ofdm, 1);
    const RateReport r_raa = expected_rate(sampler, raa, sel_raa, ofdm, 20);
    const RateReport r_ula = expected_rate(sampler, ula, sel_ula, ofdm, 20);
    CHECK(r_raa.rate > r_ula.rate);
}
