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

#include "raysim/sensing.hpp"
#include "raysim/beam_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace raysim
{

namespace
{
    constexpr double pi = 3.14159265358979323846;
} // namespace

arma::cx_mat reshape_snapshots(const SignalTensor& y)
{
    if (y.kind != SignalTensor::Kind::data_removed)
        throw std::invalid_argument("reshape_snapshots: tensor must be data-removed");
    const std::size_t n_rf = y.num_chains();
    const std::size_t n_sc = y.num_subcarriers();
    const std::size_t m_sym = y.num_symbols();
    arma::cx_mat out(n_rf, n_sc * m_sym);
    for (std::size_t q = 0; q < m_sym; ++q)
        out.cols(q * n_sc, (q + 1) * n_sc - 1) = y.samples.slice(q);
    return out;
}

SignalTensor unshape_snapshots(const arma::cx_mat& snapshots, std::size_t n_sc,
                               std::size_t m_sym)
{
    if (snapshots.n_cols != n_sc * m_sym)
        throw std::invalid_argument("unshape_snapshots: column count mismatch");
    SignalTensor y;
    y.kind = SignalTensor::Kind::data_removed;
    y.samples.set_size(snapshots.n_rows, n_sc, m_sym);
    for (std::size_t q = 0; q < m_sym; ++q)
        y.samples.slice(q) = snapshots.cols(q * n_sc, (q + 1) * n_sc - 1);
    return y;
}

SubspaceDecomposition covariance_evd(const arma::cx_mat& snapshots,
                                     std::size_t source_count)
{
    const std::size_t n_rf = snapshots.n_rows;
    if (source_count >= n_rf)
        throw std::invalid_argument("covariance_evd: no noise subspace left "
                                    "(source count must be below the chain count)");
    if (snapshots.n_cols < n_rf)
        throw std::invalid_argument("covariance_evd: fewer snapshots than chains");

    const arma::cx_mat cov =
        snapshots * snapshots.t() / static_cast<double>(snapshots.n_cols);

    arma::vec eigval;
    arma::cx_mat eigvec;
    if (!arma::eig_sym(eigval, eigvec, cov))
        throw std::runtime_error("covariance_evd: eigendecomposition failed");

    // arma returns ascending order
    SubspaceDecomposition dec;
    dec.eigenvalues = arma::reverse(eigval);
    dec.signal_basis = arma::fliplr(eigvec.tail_cols(source_count));
    dec.noise_basis = eigvec.head_cols(n_rf - source_count);
    return dec;
}

MusicSpectrum music_spectrum(const SubspaceDecomposition& dec, const ArrayFrontEnd& fe,
                             const SelectionMatrix& sel, const arma::vec& theta_grid)
{
    MusicSpectrum sp;
    sp.theta = theta_grid;
    sp.power.set_size(theta_grid.n_elem);
    const arma::cx_mat& en = dec.noise_basis;
    for (arma::uword i = 0; i < theta_grid.n_elem; ++i)
    {
        arma::cx_vec h = fe.port_response(theta_grid(i), sel);
        const double norm = arma::norm(h);
        if (norm > 0.0)
            h /= norm;
        const arma::cx_vec proj = en.t() * h;
        const double denom = std::max(std::real(arma::cdot(proj, proj)), 1e-18);
        sp.power(i) = 1.0 / denom;
    }
    return sp;
}

std::vector<double> find_peaks(const MusicSpectrum& spectrum, std::size_t max_count,
                               double min_separation, double peak_floor)
{
    const arma::vec& p = spectrum.power;
    std::vector<double> out;
    if (p.n_elem < 3 || max_count == 0)
        return out;

    const double floor_level = peak_floor * arma::median(p);

    std::vector<arma::uword> maxima;
    for (arma::uword i = 1; i + 1 < p.n_elem; ++i)
        if (p(i) > p(i - 1) && p(i) > p(i + 1) && p(i) >= floor_level)
            maxima.push_back(i);
    std::sort(maxima.begin(), maxima.end(),
              [&p](arma::uword a, arma::uword b) { return p(a) > p(b); });

    const double step = spectrum.theta(1) - spectrum.theta(0);
    for (arma::uword i : maxima)
    {
        // The inverse spectrum is locally quadratic at a subspace null; fit
        // the vertex of that parabola.
        const double y0 = 1.0 / p(i - 1);
        const double y1 = 1.0 / p(i);
        const double y2 = 1.0 / p(i + 1);
        const double curv = y0 - 2.0 * y1 + y2;
        double delta = curv > 0.0 ? 0.5 * (y0 - y2) / curv : 0.0;
        delta = std::clamp(delta, -0.5, 0.5);
        const double theta = spectrum.theta(i) + delta * step;

        bool clear = true;
        for (double seen : out)
            if (std::abs(theta - seen) < min_separation)
            {
                clear = false;
                break;
            }
        if (!clear)
            continue;
        out.push_back(theta);
        if (out.size() == max_count)
            break;
    }
    std::sort(out.begin(), out.end());
    return out;
}

arma::cx_vec zf_vector(std::size_t target_index, const std::vector<double>& aoas_rad,
                       const ArrayFrontEnd& fe, const SelectionMatrix& sel)
{
    if (target_index >= aoas_rad.size())
        throw std::invalid_argument("zf_vector: target index out of range");

    const arma::cx_vec h_target = fe.port_response(aoas_rad[target_index], sel);
    const std::size_t n_rf = h_target.n_elem;
    const std::size_t others = aoas_rad.size() - 1;

    if (others == 0)
        return h_target / arma::norm(h_target);

    arma::cx_mat interferers(n_rf, others);
    std::size_t col = 0;
    for (std::size_t l = 0; l < aoas_rad.size(); ++l)
        if (l != target_index)
            interferers.col(col++) = fe.port_response(aoas_rad[l], sel);

    const arma::cx_mat gram = interferers.t() * interferers;
    if (arma::cond(gram) > 1e12)
        throw std::runtime_error("zf_vector: interferer steering vectors are numerically "
                                 "dependent; estimates too closely spaced");

    const arma::cx_vec projected =
        h_target - interferers * arma::solve(gram, interferers.t() * h_target);
    const double norm = arma::norm(projected);
    if (norm < 1e-300)
        throw std::runtime_error("zf_vector: target vector lies in the interferer span");
    return projected / norm;
}

arma::cx_mat spatial_filter(const SignalTensor& y, const arma::cx_vec& h)
{
    if (h.n_elem != y.num_chains())
        throw std::invalid_argument("spatial_filter: combiner length mismatch");
    arma::cx_mat out(y.num_subcarriers(), y.num_symbols());
    for (std::size_t q = 0; q < y.num_symbols(); ++q)
        out.col(q) = (h.t() * y.samples.slice(q)).st();
    return out;
}

DelayDopplerMap periodogram_2d(const arma::cx_mat& yk, std::size_t pad_p,
                               std::size_t pad_q)
{
    if (pad_p < 1 || pad_q < 1)
        throw std::invalid_argument("periodogram_2d: pads must be >= 1");
    const std::size_t np = yk.n_rows * pad_p;
    const std::size_t nq = yk.n_cols * pad_q;

    // Unnormalized sums both ways: undo arma's 1/N on the inverse transform.
    arma::cx_mat stage1 = arma::ifft(yk, np) * static_cast<double>(np);
    arma::cx_mat stage2 = arma::fft(stage1.st(), nq).st();

    DelayDopplerMap map;
    map.pad_p = pad_p;
    map.pad_q = pad_q;
    map.power = arma::square(arma::abs(stage2));
    return map;
}

std::pair<double, double> map_peak_to_params(std::size_t p_idx, std::size_t q_idx,
                                             std::size_t pad_p, std::size_t pad_q,
                                             const OfdmConfig& ofdm)
{
    const double np = static_cast<double>(pad_p * ofdm.num_subcarriers);
    const double nq = static_cast<double>(pad_q * ofdm.num_symbols);
    if (static_cast<double>(p_idx) >= np || static_cast<double>(q_idx) >= nq)
        throw std::invalid_argument("map_peak_to_params: index outside the padded grid");

    const double tau = static_cast<double>(p_idx) / (np * ofdm.subcarrier_spacing_hz);

    // wrap the upper half of the Doppler axis to negative frequencies
    double qs = static_cast<double>(q_idx);
    if (qs > 0.5 * nq)
        qs -= nq;
    const double doppler = qs / (nq * ofdm.total_symbol_s());
    return {tau, doppler};
}

arma::vec default_theta_grid(const ArrayFrontEnd& fe, const PipelineParams& params)
{
    const double limit =
        params.grid_limit_rad > 0.0 ? params.grid_limit_rad : 89.9 * pi / 180.0;
    double step = params.grid_step_rad;
    if (step <= 0.0)
    {
        // 0.02 deg for M = 128; keep roughly ten samples per mainlobe otherwise
        const double ref = gamma_raa(128) / gamma_raa(fe.elements_per_port());
        step = 0.02 * pi / 180.0 / ref;
    }
    const auto count = static_cast<std::size_t>(std::floor(2.0 * limit / step)) + 1;
    arma::vec grid(count);
    for (std::size_t i = 0; i < count; ++i)
        grid(i) = -limit + static_cast<double>(i) * step;
    return grid;
}

double default_min_separation(const ArrayFrontEnd& fe)
{
    return gamma_raa(fe.elements_per_port()) / 4.0;
}

EstimationResult run_pipeline(const SignalTensor& y, const ArrayFrontEnd& fe,
                              const SelectionMatrix& sel, const OfdmConfig& ofdm,
                              std::size_t source_count, const PipelineParams& params)
{
    EstimationResult res;

    const arma::cx_mat snapshots = reshape_snapshots(y);
    const SubspaceDecomposition dec = covariance_evd(snapshots, source_count);

    const arma::vec grid = default_theta_grid(fe, params);
    MusicSpectrum spectrum = music_spectrum(dec, fe, sel, grid);

    const double min_sep = params.min_separation_rad > 0.0 ? params.min_separation_rad
                                                           : default_min_separation(fe);
    res.aoas_rad = find_peaks(spectrum, source_count, min_sep, params.peak_floor);
    res.detected_count = res.aoas_rad.size();

    for (std::size_t k = 0; k < res.aoas_rad.size(); ++k)
    {
        const arma::cx_vec h_zf = zf_vector(k, res.aoas_rad, fe, sel);
        const arma::cx_mat filtered = spatial_filter(y, h_zf);
        DelayDopplerMap map = periodogram_2d(filtered, params.pad_p, params.pad_q);

        arma::uword p_idx = 0;
        arma::uword q_idx = 0;
        map.power.max(p_idx, q_idx);
        const auto [tau, doppler] =
            map_peak_to_params(p_idx, q_idx, params.pad_p, params.pad_q, ofdm);
        res.delays_s.push_back(tau);
        res.dopplers_hz.push_back(doppler);
        if (params.keep_dd_maps)
            res.dd_maps.push_back(std::move(map));
    }

    if (params.keep_spectrum)
        res.spectrum = std::move(spectrum);
    return res;
}

EstimationResult ula_hbf_pipeline(const SignalTensor& y, const ArrayFrontEnd& ula_fe,
                                  const SelectionMatrix& sel, const OfdmConfig& ofdm,
                                  std::size_t source_count, const PipelineParams& params)
{
    if (ula_fe.kind() != ArrayFrontEnd::Kind::ula_hbf)
        throw std::invalid_argument("ula_hbf_pipeline: front-end is not a codebook ULA");
    return run_pipeline(y, ula_fe, sel, ofdm, source_count, params);
}

} // namespace raysim
