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

#include "raysim/array_model.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <stdexcept>
#include <string>

namespace raysim
{

namespace
{
    constexpr double pi = 3.14159265358979323846;

    double wrap_pi(double theta)
    {
        double t = std::remainder(theta, 2.0 * pi);
        if (t <= -pi)
            t += 2.0 * pi;
        return t;
    }
} // namespace

ElementPattern ElementPattern::threegpp(double peak_gain_db, double beamwidth_3db)
{
    if (beamwidth_3db <= 0.0)
        throw std::invalid_argument("ElementPattern: beamwidth_3db must be positive");
    ElementPattern p;
    p.kind = Kind::threegpp;
    p.peak_gain_db = peak_gain_db;
    p.beamwidth_3db = beamwidth_3db;
    return p;
}

ElementPattern ElementPattern::isotropic(double gain_db)
{
    ElementPattern p;
    p.kind = Kind::isotropic;
    p.peak_gain_db = gain_db;
    p.beamwidth_3db = 0.0;
    return p;
}

ElementPattern ElementPattern::raa_directional()
{
    return threegpp(5.1335, 0.3 * pi);
}

ElementPattern ElementPattern::ula_wide()
{
    return threegpp(0.0, pi);
}

ElementPattern ElementPattern::matched_isotropic()
{
    return isotropic(-2.816);
}

double element_gain(double theta, const ElementPattern& pattern)
{
    if (pattern.kind == ElementPattern::Kind::isotropic)
        return std::pow(10.0, pattern.peak_gain_db / 10.0);

    const double t = wrap_pi(theta);
    const double ratio = t / pattern.beamwidth_3db;
    const double att_db = std::min(12.0 * ratio * ratio, pattern.front_to_back_db);
    return std::pow(10.0, (pattern.peak_gain_db - att_db) / 10.0);
}

double total_power_gain(const ElementPattern& pattern)
{
    if (pattern.kind == ElementPattern::Kind::isotropic)
        return 2.0 * pi * std::pow(10.0, pattern.peak_gain_db / 10.0);

    auto f = [&pattern](double t) { return element_gain(t, pattern); };
    double error = 0.0;
    double value = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        f, -pi, pi, 12, 1e-12, &error);
    return value;
}

std::complex<double> dirichlet_kernel(double x, std::size_t m)
{
    if (m < 1)
        throw std::invalid_argument("dirichlet_kernel: M must be >= 1");

    const double den = std::sin(0.5 * pi * x);
    if (std::abs(den) < 1e-12)
        return {1.0, 0.0}; // removable singularity at x in {0, +-2}

    const double md = static_cast<double>(m);
    const double ratio = std::sin(0.5 * pi * md * x) / (md * den);
    return std::polar(1.0, 0.5 * pi * (md - 1.0) * x) * ratio;
}

double min_base_offset(std::size_t m, double wavelength)
{
    if (m < 2)
        throw std::invalid_argument("min_base_offset: M must be >= 2");
    if (wavelength <= 0.0)
        throw std::invalid_argument("min_base_offset: wavelength must be positive");
    return wavelength / (4.0 * std::sin(0.5 * std::asin(2.0 / static_cast<double>(m))));
}

std::pair<std::size_t, arma::vec> design_orientations(std::size_t m, double eta_max)
{
    if (m < 2)
        throw std::invalid_argument("design_orientations: M must be >= 2");
    if (eta_max <= 0.0 || eta_max > 0.5 * pi + 1e-12)
        throw std::invalid_argument("design_orientations: eta_max must be in (0, pi/2]");

    const double step = std::asin(2.0 / static_cast<double>(m));
    const std::size_t raw = 2 * static_cast<std::size_t>(std::floor(eta_max / step + 1.0));
    std::size_t n = (raw % 2 == 0) ? raw - 1 : raw;

    const auto half = static_cast<long long>((n - 1) / 2);
    arma::vec eta(n);
    for (long long k = -half; k <= half; ++k)
        eta(static_cast<arma::uword>(k + half)) = static_cast<double>(k) * step;
    return {n, eta};
}

RaaConfig RaaConfig::design(std::size_t m, double eta_max, double wavelength,
                            const ElementPattern& pattern, double base_offset)
{
    RaaConfig cfg;
    cfg.elements_per_sula = m;
    cfg.eta_max = eta_max;
    cfg.wavelength = wavelength;
    cfg.element_pattern = pattern;
    cfg.orientations = design_orientations(m, eta_max).second;
    cfg.base_offset = base_offset > 0.0 ? base_offset : min_base_offset(m, wavelength);
    cfg.validate();
    return cfg;
}

void RaaConfig::validate() const
{
    if (elements_per_sula < 2)
        throw std::invalid_argument("RaaConfig: M must be >= 2");
    if (wavelength <= 0.0)
        throw std::invalid_argument("RaaConfig: wavelength must be positive");

    const std::size_t n = orientations.n_elem;
    if (n == 0 || n % 2 == 0)
        throw std::invalid_argument("RaaConfig: number of rays must be odd and positive");

    const std::size_t c = (n - 1) / 2;
    if (std::abs(orientations(c)) > 1e-15)
        throw std::invalid_argument("RaaConfig: center orientation must be zero");
    for (std::size_t i = 0; i + 1 < n; ++i)
        if (orientations(i) >= orientations(i + 1))
            throw std::invalid_argument("RaaConfig: orientations must be strictly increasing");
    for (std::size_t i = 0; i < n; ++i)
    {
        if (std::abs(orientations(i) + orientations(n - 1 - i)) > 1e-12)
            throw std::invalid_argument("RaaConfig: orientations must be symmetric about zero");
        if (std::abs(orientations(i)) > eta_max + 1e-12)
            throw std::invalid_argument("RaaConfig: orientation exceeds eta_max");
    }

    const double dmin = min_base_offset(elements_per_sula, wavelength);
    if (base_offset < dmin - 1e-9 * dmin)
        throw std::invalid_argument("RaaConfig: base offset D violates the half-wavelength "
                                    "spacing bound D >= lambda/(4 sin(0.5 asin(2/M)))");
}

UlaConfig UlaConfig::with_dft_codebook(std::size_t m, double wavelength,
                                       const ElementPattern& pattern)
{
    if (m < 2)
        throw std::invalid_argument("UlaConfig: M must be >= 2");
    UlaConfig cfg;
    cfg.num_elements = m;
    cfg.element_spacing = 0.5 * wavelength;
    cfg.codebook_size = m;
    cfg.codeword_angles.set_size(m);
    for (std::size_t n = 1; n <= m; ++n)
    {
        const double s = -1.0 + 2.0 * static_cast<double>(n - 1) / static_cast<double>(m);
        cfg.codeword_angles(n - 1) = std::asin(s);
    }
    cfg.element_pattern = pattern;
    cfg.validate();
    return cfg;
}

void UlaConfig::validate() const
{
    if (num_elements < 2)
        throw std::invalid_argument("UlaConfig: M must be >= 2");
    if (codebook_size == 0 || codeword_angles.n_elem != codebook_size)
        throw std::invalid_argument("UlaConfig: codebook size mismatch");
    for (std::size_t i = 0; i + 1 < codebook_size; ++i)
        if (codeword_angles(i) >= codeword_angles(i + 1))
            throw std::invalid_argument("UlaConfig: codeword angles must be strictly increasing");
}

std::complex<double> sula_ref_response(double zeta, const RaaConfig& cfg)
{
    const double phase = 2.0 * pi / cfg.wavelength * cfg.base_offset * std::sin(zeta);
    return std::polar(std::sqrt(element_gain(zeta, cfg.element_pattern)), phase);
}

std::complex<double> sula_response(double theta, double eta, const RaaConfig& cfg)
{
    const double zeta = theta - eta;
    return static_cast<double>(cfg.elements_per_sula) * sula_ref_response(zeta, cfg) *
           dirichlet_kernel(std::sin(zeta), cfg.elements_per_sula);
}

arma::cx_vec raa_response_vector(double theta, const RaaConfig& cfg)
{
    const std::size_t n = cfg.num_sulas();
    arma::cx_vec r(n);
    for (std::size_t i = 0; i < n; ++i)
        r(i) = sula_response(theta, cfg.orientations(i), cfg);
    return r;
}

arma::cx_vec ula_response_vector(double theta, const UlaConfig& cfg)
{
    const double s = std::sin(theta);
    arma::cx_vec a(cfg.num_elements);
    for (std::size_t m = 0; m < cfg.num_elements; ++m)
        a(m) = std::polar(1.0, pi * static_cast<double>(m) * s);
    return a;
}

arma::cx_mat dft_codebook(const UlaConfig& cfg)
{
    arma::cx_mat book(cfg.num_elements, cfg.codebook_size);
    for (std::size_t n = 0; n < cfg.codebook_size; ++n)
        book.col(n) = ula_response_vector(cfg.codeword_angles(n), cfg);
    return book;
}

} // namespace raysim
