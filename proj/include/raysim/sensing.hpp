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

#ifndef raysim_sensing_H
#define raysim_sensing_H

#include "raysim/signal_model.hpp"

#include <cstddef>
#include <vector>

namespace raysim
{

// Signal/noise subspace split of the chain-domain sample covariance.
struct SubspaceDecomposition
{
    arma::cx_mat signal_basis; // N_RF x (L+1), orthonormal columns
    arma::cx_mat noise_basis;  // N_RF x (N_RF - L - 1), orthonormal columns
    arma::vec eigenvalues;     // descending
};

struct MusicSpectrum
{
    arma::vec theta; // rad, ascending uniform grid
    arma::vec power; // pseudo-spectrum values, positive
};

// Per-target delay-Doppler magnitude map with its grid metadata.
struct DelayDopplerMap
{
    arma::mat power;      // (pad_p * N_sc) x (pad_q * M_sym), squared magnitudes
    std::size_t pad_p = 1;
    std::size_t pad_q = 1;
};

// Matched (angle, delay, Doppler) triples plus diagnostics.
struct EstimationResult
{
    std::vector<double> aoas_rad;
    std::vector<double> delays_s;
    std::vector<double> dopplers_hz;
    MusicSpectrum spectrum;
    std::vector<DelayDopplerMap> dd_maps; // one per detected target
    std::size_t detected_count = 0;
};

// Tuning knobs for the estimation pipeline.
struct PipelineParams
{
    double grid_step_rad = 0.0;      // 0 -> derived from the array size
    double grid_limit_rad = 0.0;     // 0 -> 89.9 degrees
    double min_separation_rad = 0.0; // 0 -> gamma/4 of the front-end
    double peak_floor = 1e3;         // peak must exceed floor * median(power)
    std::size_t pad_p = 8;
    std::size_t pad_q = 8;
    bool keep_spectrum = false;      // retain the spectrum in the result
    bool keep_dd_maps = false;       // retain the per-target maps
};

// Stacks the data-removed cube into an N_RF x (N_sc * M_sym) snapshot matrix.
// Column index is p + q * N_sc (cells of one symbol stay contiguous).
arma::cx_mat reshape_snapshots(const SignalTensor& y);

// Inverse of reshape_snapshots; restores the cube layout.
SignalTensor unshape_snapshots(const arma::cx_mat& snapshots, std::size_t n_sc,
                               std::size_t m_sym);

// Sample covariance (1/(N_sc M_sym)) Y Y^H followed by a Hermitian
// eigendecomposition, splitting the source_count dominant eigenvectors from
// the noise subspace. Throws when source_count >= N_RF.
SubspaceDecomposition covariance_evd(const arma::cx_mat& snapshots,
                                     std::size_t source_count);

// MUSIC pseudo-spectrum over the given angle grid. The steering vector
// h_s(theta) = S r(theta) is normalized to unit power per angle so the
// spectrum stays scale-free; the quadratic form is floored at 1e-18.
MusicSpectrum music_spectrum(const SubspaceDecomposition& dec, const ArrayFrontEnd& fe,
                             const SelectionMatrix& sel, const arma::vec& theta_grid);

// Picks at most max_count spectrum peaks: strict local maxima above
// peak_floor * median(power), refined by three-point parabolic interpolation
// of the inverse spectrum (locally quadratic at a subspace null), tallest
// first, greedily honoring min_separation. A flat spectrum yields no peaks.
std::vector<double> find_peaks(const MusicSpectrum& spectrum, std::size_t max_count,
                               double min_separation, double peak_floor = 1e3);

// Unit-norm zero-forcing combiner for target k: the matched steering vector
// projected onto the orthogonal complement of the other targets' steering
// vectors. Throws std::runtime_error when those vectors are numerically
// dependent (condition number above 1e12).
arma::cx_vec zf_vector(std::size_t target_index, const std::vector<double>& aoas_rad,
                       const ArrayFrontEnd& fe, const SelectionMatrix& sel);

// Applies a combiner across the chain dimension: out(p, q) = h^H y[:,p,q].
arma::cx_mat spatial_filter(const SignalTensor& y, const arma::cx_vec& h);

// Zero-padded 2D periodogram: unnormalized inverse DFT along the subcarrier
// axis, unnormalized forward DFT along the symbol axis. A unit-amplitude
// on-grid bi-exponential peaks at (N_sc * M_sym)^2 in squared magnitude, and
// at pad 1 total output energy equals N_sc * M_sym times input energy.
DelayDopplerMap periodogram_2d(const arma::cx_mat& yk, std::size_t pad_p,
                               std::size_t pad_q);

// Converts a padded-grid peak index into delay and Doppler. Doppler indices
// above half the padded grid wrap to negative frequencies.
std::pair<double, double> map_peak_to_params(std::size_t p_idx, std::size_t q_idx,
                                             std::size_t pad_p, std::size_t pad_q,
                                             const OfdmConfig& ofdm);

// Full estimation chain: reshape, covariance and subspace split, MUSIC over
// the grid, peak picking, then per detected target zero-forcing, spatial
// filtering, 2D periodogram and peak mapping. Triples are matched
// positionally (each angle keeps the delay/Doppler of its own filtered map).
EstimationResult run_pipeline(const SignalTensor& y, const ArrayFrontEnd& fe,
                              const SelectionMatrix& sel, const OfdmConfig& ofdm,
                              std::size_t source_count, const PipelineParams& params);

// Same chain with the codebook-combined ULA front-end.
EstimationResult ula_hbf_pipeline(const SignalTensor& y, const ArrayFrontEnd& ula_fe,
                                  const SelectionMatrix& sel, const OfdmConfig& ofdm,
                                  std::size_t source_count, const PipelineParams& params);

// Default angle grid for a front-end: 0.02 degree steps for M = 128, scaled
// inversely with the array resolution for other sizes, over +-grid_limit.
arma::vec default_theta_grid(const ArrayFrontEnd& fe, const PipelineParams& params);

// Default minimum peak separation: a quarter of the ray-array resolution.
double default_min_separation(const ArrayFrontEnd& fe);

} // namespace raysim

#endif
