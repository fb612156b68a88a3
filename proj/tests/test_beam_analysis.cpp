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

#include "raysim/beam_analysis.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

using namespace raysim;

namespace
{
constexpr double pi = 3.14159265358979323846;
constexpr double deg = pi / 180.0;

RaaConfig raa8()
{
    return RaaConfig::design(8, 0.5 * pi, 0.01, ElementPattern::raa_directional());
}
UlaConfig ula8()
{
    return UlaConfig::with_dft_codebook(8, 0.01, ElementPattern::ula_wide());
}
} // namespace

TEST_CASE("ray-array beam pattern values")
{
    const RaaConfig cfg = raa8();
    const double g0 = element_gain(0.0, cfg.element_pattern);
    CHECK(raa_beam_pattern(0.2, 0.2, cfg) == Catch::Approx(8.0 * std::sqrt(g0)));

    const double null = 0.2 + std::asin(0.25);
    CHECK(raa_beam_pattern(null, 0.2, cfg) < 1e-12);

    // consistency with the single-ray response steered at theta_prime
    CHECK(raa_beam_pattern(0.05, 0.0, cfg) ==
          Catch::Approx(std::abs(sula_response(0.05, 0.0, cfg))).epsilon(1e-12));
}

TEST_CASE("ULA beam pattern values and inner-product reference")
{
    const UlaConfig cfg = ula8();
    const double tp = 0.25;
    CHECK(ula_beam_pattern(tp, tp, cfg) ==
          Catch::Approx(8.0 * std::sqrt(element_gain(tp, cfg.element_pattern))));

    const double null = std::asin(std::sin(tp) + 0.25);
    CHECK(ula_beam_pattern(null, tp, cfg) < 1e-12);

    // |a(theta')^H a(theta)| sqrt(G(theta)) recomputed directly
    const double theta = 0.1;
    const arma::cx_vec a_tp = ula_response_vector(0.0, cfg);
    const arma::cx_vec a_th = ula_response_vector(theta, cfg);
    const double want =
        std::abs(arma::cdot(a_tp, a_th)) * std::sqrt(element_gain(theta, cfg.element_pattern));
    CHECK(ula_beam_pattern(theta, 0.0, cfg) == Catch::Approx(want).epsilon(1e-12));
}

TEST_CASE("both patterns peak at the desired direction with full array gain")
{
    const RaaConfig raa = raa8();
    const UlaConfig ula = ula8();
    for (double tp : {-0.9, -0.3, 0.0, 0.4, 1.0})
    {
        const double raa_peak = raa_beam_pattern(tp, tp, raa);
        const double ula_peak = ula_beam_pattern(tp, tp, ula);
        double ula_max = 0.0;
        double ula_argmax = 0.0;
        for (double t = -1.5; t <= 1.5; t += 0.003)
        {
            // the ray-array pattern is exactly maximal at the match
            CHECK(raa_beam_pattern(t, tp, raa) <= raa_peak * (1.0 + 1e-12));
            const double u = ula_beam_pattern(t, tp, ula);
            if (u > ula_max)
            {
                ula_max = u;
                ula_argmax = t;
            }
        }
        // the ULA kernel is maximal at the match; the slowly varying element
        // gain may drag the global maximum slightly inside the mainlobe
        const double sin_tp = std::sin(tp);
        const double lobe =
            std::abs(sin_tp) <= 0.75 ? gamma_ula(8, tp) : 0.5; // near-endfire lobes widen
        CHECK(std::abs(ula_argmax - tp) <= lobe);
        CHECK(ula_peak >= 0.99 * ula_max);
        // directional elements with matched total power beat the wide ones
        CHECK(raa_peak > ula_beam_pattern(0.0, 0.0, ula));
    }
}

TEST_CASE("numeric resolution of the ray array is direction-independent")
{
    const RaaConfig cfg = raa8();
    const double want = std::asin(0.25);
    for (double tp_deg : {-75.0, -45.0, -15.0, 0.0, 15.0, 30.0, 60.0, 75.0})
    {
        const ResolutionReport rep = resolution_numeric_raa(tp_deg * deg, cfg);
        REQUIRE(rep.valid);
        CHECK(rep.resolution == Catch::Approx(want).margin(1e-9));
        CHECK(rep.left_null < rep.theta_prime);
        CHECK(rep.right_null > rep.theta_prime);
        CHECK(rep.mainlobe_width == Catch::Approx(2.0 * rep.resolution).margin(1e-12));
    }
}

TEST_CASE("numeric ULA resolution matches the closed form")
{
    const UlaConfig cfg = ula8();
    // stay inside the |sin(theta')| <= 1 - 2/M domain where both nulls exist
    for (double s = -0.74; s <= 0.74; s += 0.074)
    {
        const double tp = std::asin(s);
        const ResolutionReport rep = resolution_numeric_ula(tp, cfg);
        REQUIRE(rep.valid);
        CHECK(rep.resolution == Catch::Approx(gamma_ula(8, tp)).margin(1e-8));
    }
    // boresight equality with the ray array
    const ResolutionReport rep0 = resolution_numeric_ula(0.0, cfg);
    REQUIRE(rep0.valid);
    CHECK(rep0.resolution == Catch::Approx(std::asin(0.25)).margin(1e-9));
}

TEST_CASE("numeric search reports failure outside the ULA null domain")
{
    const UlaConfig cfg = ula8();
    // sin(theta') > 1 - 2/M: no null on the right side
    const double tp = std::asin(1.0 - 0.25 / 2.0);
    const ResolutionReport rep = resolution_numeric_ula(tp, cfg);
    CHECK_FALSE(rep.valid);
}

TEST_CASE("closed-form resolutions")
{
    CHECK(gamma_raa(2) == Catch::Approx(0.5 * pi).epsilon(1e-14));
    CHECK(gamma_raa(128) == Catch::Approx(std::asin(1.0 / 64.0)).epsilon(1e-14));
    CHECK(gamma_raa(10000) == Catch::Approx(2.0 / 10000.0).epsilon(1e-6));

    CHECK(gamma_ula(8, 0.0) == Catch::Approx(gamma_raa(8)).epsilon(1e-14));
    const double edge = std::asin(1.0 - 2.0 / 16.0);
    CHECK(gamma_ula(16, edge) ==
          Catch::Approx(0.25 * pi - 0.5 * std::asin(1.0 - 4.0 / 16.0)).epsilon(1e-12));
    CHECK(gamma_ula(16, edge) == Catch::Approx(0.3613671239067078).epsilon(1e-12));
    CHECK(gamma_ula(16, edge) >= 0.35);
    CHECK(gamma_ula(128, pi / 3.0) > gamma_raa(128));

    CHECK_THROWS_AS(gamma_ula(8, 0.5 * pi), std::domain_error);
    CHECK_THROWS_AS(gamma_raa(1), std::invalid_argument);
}

TEST_CASE("resolution dominance on a grid")
{
    for (std::size_t m : {8u, 128u})
    {
        const double dom = std::asin(1.0 - 2.0 / static_cast<double>(m));
        std::vector<double> pts;
        for (double t = -dom; t <= dom; t += 0.5 * deg)
            pts.push_back(t);
        pts.push_back(0.0);
        const DominanceReport rep = resolution_dominance_check(m, arma::vec(pts));
        CHECK(rep.holds);
        for (const ResolutionMargin& mg : rep.margins)
        {
            CHECK(mg.margin >= -1e-12);
            if (std::abs(mg.theta_prime) < 1e-12)
                CHECK(std::abs(mg.margin) < 1e-12);
        }
    }

    // even symmetry of the margin
    CHECK(gamma_ula(8, 0.4) == Catch::Approx(gamma_ula(8, -0.4)).epsilon(1e-14));
}

TEST_CASE("convexity of the ULA resolution in sine space")
{
    arma::vec grid = arma::linspace(-0.6, 0.6, 41);
    CHECK(appendix_convexity_check(16, grid));

    // derivative values: zero at the origin, odd symmetry elsewhere
    auto f = [](double x) {
        return 0.5 * std::asin(x + 0.125) - 0.5 * std::asin(x - 0.125);
    };
    const double h = 1e-5;
    CHECK(std::abs((f(h) - f(-h)) / (2.0 * h)) < 1e-8);
    const double dplus = (f(0.5 + h) - f(0.5 - h)) / (2.0 * h);
    const double dminus = (f(-0.5 + h) - f(-0.5 - h)) / (2.0 * h);
    CHECK(dplus == Catch::Approx(-dminus).epsilon(1e-9));
    CHECK((f(0.5 + h) - 2.0 * f(0.5) + f(0.5 - h)) / (h * h) > 0.0);
}
