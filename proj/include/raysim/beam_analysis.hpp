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

#ifndef raysim_beam_analysis_H
#define raysim_beam_analysis_H

#include "raysim/array_model.hpp"

#include <functional>
#include <vector>

namespace raysim
{

// One sample of a beam pattern |G(theta, theta_prime)|.
struct BeamPatternSample
{
    double theta = 0.0;       // observation direction, rad
    double theta_prime = 0.0; // desired direction, rad
    double magnitude = 0.0;   // linear
};

// Null-to-null mainlobe geometry around a desired direction.
struct ResolutionReport
{
    double theta_prime = 0.0;   // desired direction, rad
    double left_null = 0.0;     // theta_2 < theta_prime
    double right_null = 0.0;    // theta_1 > theta_prime
    double mainlobe_width = 0.0; // theta_1 - theta_2
    double resolution = 0.0;     // half mainlobe width
    bool valid = false;          // false when a bracketing null does not exist
};

// Beam magnitude of the ray array steered at theta_prime (the ray oriented
// there), observed at theta: M sqrt(G(theta-theta')) |H_M(sin(theta-theta'))|.
double raa_beam_pattern(double theta, double theta_prime, const RaaConfig& cfg);

// Beam magnitude of the ULA with matched (conjugate) beamforming towards
// theta_prime: M sqrt(G_ULA(theta)) |H_M(sin theta - sin theta')|.
double ula_beam_pattern(double theta, double theta_prime, const UlaConfig& cfg);

// Locates the first pattern nulls either side of theta_prime by scanning for
// a sign change of `signed_kernel` (a real function whose zeros coincide with
// the pattern nulls) and bisecting the bracket to 1e-9 rad. The located nulls
// are verified against `pattern`, which must drop below 1e-9 of its peak.
// When no null exists on one side inside (-pi/2, pi/2], the report has
// valid == false.
ResolutionReport resolution_numeric(const std::function<double(double)>& pattern,
                                    const std::function<double(double)>& signed_kernel,
                                    double theta_prime, double scan_step);

// Convenience overloads building the signed kernels for the two front-ends.
ResolutionReport resolution_numeric_raa(double theta_prime, const RaaConfig& cfg);
ResolutionReport resolution_numeric_ula(double theta_prime, const UlaConfig& cfg);

// Closed-form angular resolution of the ray array: asin(2/M), independent of
// the desired direction. Requires M >= 2.
double gamma_raa(std::size_t m);

// Closed-form angular resolution of the ULA at desired direction theta_prime:
// 0.5 asin(sin theta' + 2/M) - 0.5 asin(sin theta' - 2/M).
// Throws std::domain_error unless -1 + 2/M <= sin(theta') <= 1 - 2/M.
double gamma_ula(std::size_t m, double theta_prime);

// gamma_ula - gamma_raa at one grid point.
struct ResolutionMargin
{
    double theta_prime = 0.0;
    double margin = 0.0; // gamma_ula(theta') - gamma_raa, >= 0
};

struct DominanceReport
{
    bool holds = false; // margin >= 0 everywhere, zero only at theta' = 0
    std::vector<ResolutionMargin> margins;
};

// Evaluates the resolution gap on a grid of desired directions inside the
// valid domain and checks that it is nonnegative with equality only at zero.
DominanceReport resolution_dominance_check(std::size_t m, const arma::vec& theta_grid);

// Finite-difference convexity check of gamma_ula as a function of
// x = sin(theta') on an interior grid: second difference positive everywhere,
// first derivative vanishing only at x = 0.
bool appendix_convexity_check(std::size_t m, const arma::vec& x_grid,
                              double step = 1e-5);

} // namespace raysim

#endif
