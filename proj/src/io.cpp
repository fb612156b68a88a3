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

#include "raysim/io.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace raysim
{

namespace
{
    constexpr char magic[4] = {'R', 'S', 'T', 'N'};
    constexpr std::uint32_t format_version = 1;
    constexpr double rad2deg = 57.29577951308232;

    template <typename T>
    void put(std::ofstream& os, T v)
    {
        os.write(reinterpret_cast<const char*>(&v), sizeof(v));
    }

    template <typename T>
    T get(std::ifstream& is)
    {
        T v{};
        is.read(reinterpret_cast<char*>(&v), sizeof(v));
        if (!is)
            throw std::runtime_error("tensor file truncated");
        return v;
    }
} // namespace

void write_tensor(const std::string& path, const SignalTensor& tensor)
{
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw std::runtime_error("cannot open for writing: " + path);
    os.write(magic, 4);
    put<std::uint32_t>(os, format_version);
    put<std::uint8_t>(os, tensor.kind == SignalTensor::Kind::raw ? 0 : 1);
    put<std::uint64_t>(os, tensor.num_chains());
    put<std::uint64_t>(os, tensor.num_subcarriers());
    put<std::uint64_t>(os, tensor.num_symbols());
    // cube memory order already matches chain-fastest layout
    for (const auto& v : tensor.samples)
    {
        put<double>(os, v.real());
        put<double>(os, v.imag());
    }
    if (!os)
        throw std::runtime_error("write failed: " + path);
}

SignalTensor read_tensor(const std::string& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw std::runtime_error("cannot open: " + path);
    char head[4];
    is.read(head, 4);
    if (!is || std::string(head, 4) != std::string(magic, 4))
        throw std::runtime_error("not a tensor file: " + path);
    if (get<std::uint32_t>(is) != format_version)
        throw std::runtime_error("unsupported tensor file version: " + path);
    const auto kind = get<std::uint8_t>(is);
    const auto n_rf = get<std::uint64_t>(is);
    const auto n_sc = get<std::uint64_t>(is);
    const auto m_sym = get<std::uint64_t>(is);

    SignalTensor t;
    t.kind = kind == 0 ? SignalTensor::Kind::raw : SignalTensor::Kind::data_removed;
    t.samples.set_size(n_rf, n_sc, m_sym);
    for (auto& v : t.samples)
    {
        const double re = get<double>(is);
        const double im = get<double>(is);
        v = {re, im};
    }
    return t;
}

std::string csv_num(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

void write_scenario_csv(const std::string& path, const std::vector<PathParams>& paths)
{
    std::ofstream os(path);
    if (!os)
        throw std::runtime_error("cannot open for writing: " + path);
    os << "alpha_re,alpha_im,aoa_deg,delay_s,doppler_hz\n";
    for (const PathParams& p : paths)
        os << csv_num(p.gain.real()) << ',' << csv_num(p.gain.imag()) << ','
           << csv_num(p.aoa_rad * rad2deg) << ',' << csv_num(p.delay_s) << ','
           << csv_num(p.doppler_hz) << '\n';
}

void write_spectrum_csv(const std::string& path, const MusicSpectrum& spectrum)
{
    std::ofstream os(path);
    if (!os)
        throw std::runtime_error("cannot open for writing: " + path);
    os << "theta_deg,power\n";
    for (arma::uword i = 0; i < spectrum.theta.n_elem; ++i)
        os << csv_num(spectrum.theta(i) * rad2deg) << ',' << csv_num(spectrum.power(i))
           << '\n';
}

void write_dd_map_csv(const std::string& path, const DelayDopplerMap& map,
                      const OfdmConfig& ofdm)
{
    std::ofstream os(path);
    if (!os)
        throw std::runtime_error("cannot open for writing: " + path);
    os << "delay_s,doppler_hz,power_db\n";
    for (arma::uword pi = 0; pi < map.power.n_rows; ++pi)
        for (arma::uword qi = 0; qi < map.power.n_cols; ++qi)
        {
            const auto [tau, fd] =
                map_peak_to_params(pi, qi, map.pad_p, map.pad_q, ofdm);
            const double db = 10.0 * std::log10(std::max(map.power(pi, qi), 1e-300));
            os << csv_num(tau) << ',' << csv_num(fd) << ',' << csv_num(db) << '\n';
        }
}

void write_estimates_csv(const std::string& path, const EstimationResult& result)
{
    std::ofstream os(path);
    if (!os)
        throw std::runtime_error("cannot open for writing: " + path);
    os << "target_id,aoa_deg,delay_s,doppler_hz\n";
    for (std::size_t k = 0; k < result.detected_count; ++k)
        os << k << ',' << csv_num(result.aoas_rad[k] * rad2deg) << ','
           << csv_num(result.delays_s[k]) << ',' << csv_num(result.dopplers_hz[k]) << '\n';
}

} // namespace raysim
