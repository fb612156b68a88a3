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

#ifndef raysim_array_model_H
#define raysim_array_model_H

#include <armadillo>
#include <complex>
#include <cstddef>
#include <utility>

namespace raysim
{

constexpr double speed_of_light = 299792458.0; // m/s

// Radiation pattern of a single antenna element.
//
// The directional kind follows the standard parabolic-in-dB model
//   G_dB(theta) = G0_dB - min{ 12 (theta/theta_3dB)^2, A_max },
// with a fixed front-to-back attenuation A_max of 30 dB. The isotropic
// kind has constant gain G0 in every direction.
struct ElementPattern
{
    enum class Kind
    {
        threegpp, // parabolic-in-dB directional model
        isotropic
    };

    Kind kind = Kind::threegpp;
    double peak_gain_db = 0.0;      // G0 in dB
    double beamwidth_3db = 0.0;     // theta_3dB in rad (unused for isotropic)
    double front_to_back_db = 30.0; // A_max in dB

    static ElementPattern threegpp(double peak_gain_db, double beamwidth_3db);
    static ElementPattern isotropic(double gain_db);

    // Element pattern presets used throughout: a directional element for the
    // ray array (5.1335 dB peak, 0.3*pi beamwidth), a wide element covering
    // the whole half-space for the reference ULA (0 dB peak, pi beamwidth),
    // and an isotropic element at -2.816 dB. All three have the same total
    // power gain to within 0.2%, which keeps array comparisons fair.
    static ElementPattern raa_directional();
    static ElementPattern ula_wide();
    static ElementPattern matched_isotropic();
};

// Linear power gain of an element at angle theta (rad). Total function:
// theta is wrapped into (-pi, pi] so the 30 dB floor applies beyond the
// clamp angle in every direction.
double element_gain(double theta, const ElementPattern& pattern);

// Integral of element_gain over (-pi, pi], evaluated by adaptive
// Gauss-Kronrod quadrature (absolute tolerance well below 1e-9).
double total_power_gain(const ElementPattern& pattern);

// Normalized array factor H_M(x) = e^{j pi (M-1) x / 2} sin(pi M x / 2) / (M sin(pi x / 2)).
// The removable singularities at x in {0, +-2} evaluate to exactly 1.
std::complex<double> dirichlet_kernel(double x, std::size_t m);

// Smallest distance from the array origin to the first element of each ray
// such that elements of adjacent rays stay at least half a wavelength apart:
// D_min = lambda / (4 sin(0.5 asin(2/M))). Requires M >= 2.
double min_base_offset(std::size_t m, double wavelength);

// Ray orientations eta_n = n * asin(2/M), n = -(N-1)/2 ... (N-1)/2, chosen so
// that each ray's first pattern null falls on its neighbours' peaks. The
// count 2*floor(eta_max/asin(2/M) + 1) is always even; it is reduced by one
// so the set stays odd and symmetric about zero within [-eta_max, eta_max].
// Returns (N, orientations). Requires M >= 2 and 0 < eta_max <= pi/2.
std::pair<std::size_t, arma::vec> design_orientations(std::size_t m, double eta_max);

// Ray antenna array: N directly-combined uniform linear sub-arrays (rays)
// of M half-wavelength-spaced elements each, fanned at orientations eta_n.
struct RaaConfig
{
    std::size_t elements_per_sula = 0; // M
    arma::vec orientations;            // eta_n, ascending, symmetric, odd count
    double base_offset = 0.0;          // D in meters
    double wavelength = 0.0;           // lambda in meters
    double eta_max = 0.0;              // orientation bound in rad
    ElementPattern element_pattern;

    std::size_t num_sulas() const { return orientations.n_elem; }

    // Builds the designed geometry. base_offset <= 0 selects min_base_offset.
    static RaaConfig design(std::size_t m, double eta_max, double wavelength,
                            const ElementPattern& pattern, double base_offset = 0.0);

    // Throws std::invalid_argument if any geometric invariant is violated.
    void validate() const;
};

// Conventional M-element half-wavelength ULA with a DFT codebook,
// sin(phi_n) = -1 + 2(n-1)/M for n = 1..N'.
struct UlaConfig
{
    std::size_t num_elements = 0;   // M
    double element_spacing = 0.0;   // meters (lambda/2)
    std::size_t codebook_size = 0;  // N'
    arma::vec codeword_angles;      // phi_n in rad, ascending
    ElementPattern element_pattern;

    static UlaConfig with_dft_codebook(std::size_t m, double wavelength,
                                       const ElementPattern& pattern);

    void validate() const;
};

// Response of the first (reference) element of a ray at offset angle zeta
// from its orientation: b(zeta) = e^{j 2 pi D sin(zeta) / lambda} sqrt(G(zeta)).
std::complex<double> sula_ref_response(double zeta, const RaaConfig& cfg);

// Combined response of one ray oriented at eta for a plane wave from theta:
// M * b(theta - eta) * H_M(sin(theta - eta)).
std::complex<double> sula_response(double theta, double eta, const RaaConfig& cfg);

// Responses of all N rays, ordered by ascending orientation index.
arma::cx_vec raa_response_vector(double theta, const RaaConfig& cfg);

// Plain steering vector of the ULA, [e^{j pi (m-1) sin(theta)}], unit-modulus.
arma::cx_vec ula_response_vector(double theta, const UlaConfig& cfg);

// DFT codebook matrix, column n = steering vector at codeword angle phi_n.
// Columns are mutually orthogonal with squared norm M.
arma::cx_mat dft_codebook(const UlaConfig& cfg);

} // namespace raysim

#endif
