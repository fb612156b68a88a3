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

#include <cmath>
#include <stdexcept>
#include <string>

namespace raysim
{

namespace
{
    constexpr double pi = 3.14159265358979323846;
    constexpr double theta_limit = 0.5 * pi;

    // Bisect a bracketed sign change of f down to |hi - lo| < tol.
    double bisect(const std::function<double(double)>& f, double lo, double hi, double tol)
    {
        double flo = f(lo);
        for (int it = 0; it < 200 && hi - lo > tol; ++it)
        {
            const double mid = 0.5 * (lo + hi);
            const double fm = f(mid);
            if ((flo <= 0.0) == (fm <= 0.0))
            {
                lo = mid;
                flo = fm;
            }
            else
            {
                hi = mid;
            }
        }
        return 0.5 * (lo + hi);
    }

    // First zero of the signed kernel on one side of theta_prime.
    // dir is +1 (right null) or -1 (left null). Returns false if the scan
    // leaves (-pi/2, pi/2] without a sign change.
    bool first_null(const std::function<double(double)>& kernel, double theta_prime,
                    int dir, double scan_step, double& null_out)
    {
        const double start = theta_prime + dir * 1e-7;
        double prev = start;
        double fprev = kernel(prev);
        for (double t = start;; t += dir * scan_step)
        {
            double cur = t + dir * scan_step;
            if (cur > theta_limit || cur < -theta_limit)
            {
                cur = dir > 0 ? theta_limit : -theta_limit;
                if ((cur - prev) * dir <= 0.0)
                    return false;
            }
            const double fcur = kernel(cur);
            if ((fprev <= 0.0) != (fcur <= 0.0))
            {
                // tight enough that the pattern magnitude at the located null
                // stays below 1e-9 of the peak even for large arrays
                null_out = dir > 0 ? bisect(kernel, prev, cur, 1e-12)
                                   : bisect(kernel, cur, prev, 1e-12);
                return true;
            }
            if (cur >= theta_limit || cur <= -theta_limit)
                return false;
            prev = cur;
            fprev = fcur;
        }
    }
} // namespace

double raa_beam_pattern(double theta, double theta_prime, const RaaConfig& cfg)
{
    const double zeta = theta - theta_prime;
    const double md = static_cast<double>(cfg.elements_per_sula);
    return md * std::sqrt(element_gain(zeta, cfg.element_pattern)) *
           std::abs(dirichlet_kernel(std::sin(zeta), cfg.elements_per_sula));
}

double ula_beam_pattern(double theta, double theta_prime, const UlaConfig& cfg)
{
    const double md = static_cast<double>(cfg.num_elements);
    return md * std::sqrt(element_gain(theta, cfg.element_pattern)) *
           std::abs(dirichlet_kernel(std::sin(theta) - std::sin(theta_prime),
                                     cfg.num_elements));
}

ResolutionReport resolution_numeric(const std::function<double(double)>& pattern,
                                    const std::function<double(double)>& signed_kernel,
                                    double theta_prime, double scan_step)
{
    ResolutionReport rep;
    rep.theta_prime = theta_prime;

    double right = 0.0;
    double left = 0.0;
    if (!first_null(signed_kernel, theta_prime, +1, scan_step, right) ||
        !first_null(signed_kernel, theta_prime, -1, scan_step, left))
        return rep; // valid == false: no bracketing null on one side

    const double peak = pattern(theta_prime);
    if (pattern(right) > 1e-9 * peak || pattern(left) > 1e-9 * peak)
        return rep;

    rep.left_null = left;
    rep.right_null = right;
    rep.mainlobe_width = right - left;
    rep.resolution = 0.5 * rep.mainlobe_width;
    rep.valid = true;
    return rep;
}

ResolutionReport resolution_numeric_raa(double theta_prime, const RaaConfig& cfg)
{
    const double md = static_cast<double>(cfg.elements_per_sula);
    auto pattern = [&cfg, theta_prime](double t) { return raa_beam_pattern(t, theta_prime, cfg); };
    auto kernel = [md, theta_prime](double t) {
        return std::sin(0.5 * pi * md * std::sin(t - theta_prime));
    };
    return resolution_numeric(pattern, kernel, theta_prime, gamma_raa(cfg.elements_per_sula) / 8.0);
}

ResolutionReport resolution_numeric_ula(double theta_prime, const UlaConfig& cfg)
{
    const double md = static_cast<double>(cfg.num_elements);
    auto pattern = [&cfg, theta_prime](double t) { return ula_beam_pattern(t, theta_prime, cfg); };
    auto kernel = [md, theta_prime](double t) {
        return std::sin(0.5 * pi * md * (std::sin(t) - std::sin(theta_prime)));
    };
    return resolution_numeric(pattern, kernel, theta_prime, gamma_raa(cfg.num_elements) / 8.0);
}

double gamma_raa(std::size_t m)
{
    if (m < 2)
        throw std::invalid_argument("gamma_raa: M must be >= 2");
    return std::asin(2.0 / static_cast<double>(m));
}

double gamma_ula(std::size_t m, double theta_prime)
{
    if (m < 2)
        throw std::invalid_argument("gamma_ula: M must be >= 2");
    const double inv = 2.0 / static_cast<double>(m);
    const double s = std::sin(theta_prime);
    if (s < -1.0 + inv - 1e-12 || s > 1.0 - inv + 1e-12)
        throw std::domain_error("gamma_ula: sin(theta') must lie in [" +
                                std::to_string(-1.0 + inv) + ", " +
                                std::to_string(1.0 - inv) + "]");
    const double lo = std::max(s - inv, -1.0);
    const double hi = std::min(s + inv, 1.0);
    return 0.5 * std::asin(hi) - 0.5 * std::asin(lo);
}

DominanceReport resolution_dominance_check(std::size_t m, const arma::vec& theta_grid)
{
    DominanceReport rep;
    rep.holds = true;
    const double base = gamma_raa(m);
    rep.margins.reserve(theta_grid.n_elem);
    for (arma::uword i = 0; i < theta_grid.n_elem; ++i)
    {
        const double tp = theta_grid(i);
        const double margin = gamma_ula(m, tp) - base;
        rep.margins.push_back({tp, margin});
        if (margin < -1e-12)
            rep.holds = false;
        if (std::abs(tp) > 1e-12 && margin <= 1e-12)
            rep.holds = false; // equality allowed only at boresight
        if (std::abs(tp) <= 1e-12 && std::abs(margin) > 1e-12)
            rep.holds = false;
    }
    return rep;
}

bool appendix_convexity_check(std::size_t m, const arma::vec& x_grid, double step)
{
    auto f = [m](double x) {
        const double inv = 2.0 / static_cast<double>(m);
        return 0.5 * std::asin(x + inv) - 0.5 * std::asin(x - inv);
    };
    for (arma::uword i = 0; i < x_grid.n_elem; ++i)
    {
        const double x = x_grid(i);
        const double fp = (f(x + step) - f(x - step)) / (2.0 * step);
        const double fpp = (f(x + step) - 2.0 * f(x) + f(x - step)) / (step * step);
        if (fpp <= 0.0)
            return false;
        if (std::abs(x) <= 1e-12)
        {
            if (std::abs(fp) > 1e-8)
                return false;
        }
        else if (fp * x <= 0.0) // derivative sign must match sign of x
        {
            return false;
        }
    }
    return true;
}

} // namespace raysim
