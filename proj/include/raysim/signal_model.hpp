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

#ifndef raysim_signal_model_H
#define raysim_signal_model_H

#include "raysim/array_model.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace raysim
{

// OFDM numerology and link-level constants.
struct OfdmConfig
{
    double carrier_hz = 39e9;      // f_c
    std::size_t num_subcarriers = 512; // N_sc
    std::size_t num_symbols = 2048;    // M_sym per processing interval
    double subcarrier_spacing_hz = 120e3; // delta_f
    double cp_duration_s = 0.67e-6;       // T_cp
    double tx_power_w = 1.0;              // P_t
    double noise_var_w = 0.01;            // sigma^2 per element-sample
    std::size_t num_rf_chains = 8;        // N_RF

    double symbol_duration_s() const { return 1.0 / subcarrier_spacing_hz; } // T
    double total_symbol_s() const { return symbol_duration_s() + cp_duration_s; } // T_s
    double bandwidth_hz() const
    {
        return static_cast<double>(num_subcarriers) * subcarrier_spacing_hz;
    }
    double wavelength_m() const { return speed_of_light / carrier_hz; }

    void validate() const;
};

// One propagation path: complex gain, angle of arrival, delay, Doppler.
struct PathParams
{
    std::complex<double> gain{1.0, 0.0}; // alpha
    double aoa_rad = 0.0;                // theta
    double delay_s = 0.0;                // tau, must stay below T_cp
    double doppler_hz = 0.0;             // f_D
    bool is_los = false;

    // Gain including the constant Doppler rotation accumulated over the CP.
    std::complex<double> cp_rotated_gain(double cp_duration_s) const;
};

// Transmitted data symbols, one per (subcarrier, symbol) cell.
struct SymbolGrid
{
    arma::cx_mat data; // N_sc x M_sym

    // QPSK with |d|^2 = tx_power exactly, drawn from a seeded stream.
    static SymbolGrid qpsk(std::size_t n_sc, std::size_t m_sym, double tx_power,
                           std::uint64_t seed);

    // Constant grid (every cell sqrt(tx_power)); handy for tests.
    static SymbolGrid constant(std::size_t n_sc, std::size_t m_sym, double tx_power);
};

// Port selection: which of the N array output ports feed the RF chains.
struct SelectionMatrix
{
    std::vector<arma::uword> ports; // distinct indices into the port set
    std::size_t num_total_ports = 0;

    std::size_t num_selected() const { return ports.size(); }
    void validate() const;

    // Rows of the selected ports extracted from a full port vector.
    arma::cx_vec apply(const arma::cx_vec& full) const;
};

// Receive front-end abstraction: either the ray array (ports = rays) or the
// codebook-combined ULA (ports = codewords). Both expose one complex response
// per selectable port so the downstream OFDM chain is identical.
class ArrayFrontEnd
{
  public:
    enum class Kind
    {
        raa,
        ula_hbf
    };

    static ArrayFrontEnd make_raa(RaaConfig cfg);
    static ArrayFrontEnd make_ula(UlaConfig cfg);

    Kind kind() const { return kind_; }
    std::size_t num_ports() const;
    std::size_t elements_per_port() const; // M, sets the combined noise power

    // Full port response vector at angle theta.
    arma::cx_vec port_response(double theta) const;

    // Response restricted to the selected ports (cheaper for dense grids).
    arma::cx_vec port_response(double theta, const SelectionMatrix& sel) const;

    // Pointing angle of a port (ray orientation / codeword angle), used for
    // deterministic tie-breaking in energy selection.
    double port_angle(std::size_t port) const;

    const RaaConfig& raa() const;
    const UlaConfig& ula() const;

  private:
    Kind kind_ = Kind::raa;
    RaaConfig raa_{};
    UlaConfig ula_{};
    arma::cx_mat codebook_; // cached DFT codebook for the ULA front-end
};

// Received OFDM sample cube, N_RF x N_sc x M_sym.
struct SignalTensor
{
    enum class Kind
    {
        raw,         // data symbols still modulated onto the cells
        data_removed // divided by the symbol grid
    };

    arma::cx_cube samples; // (chain, subcarrier, symbol)
    Kind kind = Kind::raw;

    std::size_t num_chains() const { return samples.n_rows; }
    std::size_t num_subcarriers() const { return samples.n_cols; }
    std::size_t num_symbols() const { return samples.n_slices; }
};

// Draws a swarm of equally spaced angles around a centroid with Gaussian
// delay and Doppler moments. Delays are redrawn until they land inside
// (0, delay_max); gains are unit-magnitude with uniform random phase.
// Throws std::invalid_argument when the angle span leaves (-pi/2, pi/2) or
// the delay mean does not fit below delay_max.
std::vector<PathParams> make_swarm_scenario(double centroid_rad, std::size_t count,
                                            double spacing_rad, double delay_mean_s,
                                            double delay_var_s2, double doppler_mean_hz,
                                            double doppler_var_hz2, double delay_max_s,
                                            std::uint64_t seed);

// Synthesizes the received cube directly in the subcarrier domain:
//   Y[:,p,q] = sum_l alpha_l e^{j 2 pi f_l T_cp} (S r(theta_l)) d_pq
//              e^{-j 2 pi p df tau_l} e^{j 2 pi f_l q T_s} + S Z_pq,
// with CSCG noise of per-component variance M sigma^2 / N_sc. Noise is
// omitted when noise_seed is empty. Per-(p,q) noise streams are derived from
// the seed, so the result does not depend on evaluation order.
SignalTensor synthesize_tensor(const std::vector<PathParams>& paths,
                               const ArrayFrontEnd& fe, const OfdmConfig& ofdm,
                               const SelectionMatrix& sel, const SymbolGrid& grid,
                               std::optional<std::uint64_t> noise_seed);

// Independent reference chain: builds the continuous-time transmit waveform
// (IFFT expression with cyclic prefix), delays it per path, samples at
// N_sc/T, strips the prefix, and applies a forward DFT per symbol with 1/N_sc
// scaling. Doppler is held constant within each symbol at the symbol start.
// Quadratic in N_sc, so sizes are capped (N_sc <= 64, M_sym <= 8). Noiseless.
SignalTensor synthesize_time_domain_oracle(const std::vector<PathParams>& paths,
                                           const ArrayFrontEnd& fe,
                                           const OfdmConfig& ofdm,
                                           const SelectionMatrix& sel,
                                           const SymbolGrid& grid);

// Picks the num_select ports with the largest sample energy from a probe cube
// covering every port. Ties go to the smaller |port angle|, then the smaller
// index.
SelectionMatrix select_rays_energy(const arma::cx_cube& full_port_probe,
                                   std::size_t num_select,
                                   const ArrayFrontEnd& fe);

// Convenience: synthesizes a one-symbol all-port probe of the given scenario
// and applies energy selection. The number of sequential sweeps a physical
// switch would need, ceil(N / N_RF), is reported through sweep_count.
SelectionMatrix probe_and_select(const std::vector<PathParams>& paths,
                                 const ArrayFrontEnd& fe, const OfdmConfig& ofdm,
                                 std::uint64_t seed, std::size_t* sweep_count = nullptr);

// Divides every cell by its data symbol. Throws when a symbol is zero.
SignalTensor data_removal(const SignalTensor& raw, const SymbolGrid& grid);

} // namespace raysim

#endif
