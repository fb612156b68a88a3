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

#include "raysim/harness.hpp"
#include "raysim/beam_analysis.hpp"
#include "raysim/io.hpp"
#include "raysim/rng.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace raysim
{

const char* const version_string = "raysim 0.1.0";

namespace
{
    constexpr double pi = 3.14159265358979323846;
    constexpr double deg2rad = pi / 180.0;
    constexpr double rad2deg = 180.0 / pi;

    [[noreturn]] void config_error(const std::string& origin, std::size_t line,
                                   const std::string& what)
    {
        std::ostringstream os;
        os << origin << ":" << line << ": " << what;
        throw std::invalid_argument(os.str());
    }

    std::string trim(const std::string& s)
    {
        const auto b = s.find_first_not_of(" \t\r\n");
        if (b == std::string::npos)
            return {};
        const auto e = s.find_last_not_of(" \t\r\n");
        return s.substr(b, e - b + 1);
    }

    double parse_double(const std::string& origin, std::size_t line, const std::string& v)
    {
        try
        {
            std::size_t pos = 0;
            const double d = std::stod(v, &pos);
            if (pos != v.size())
                config_error(origin, line, "trailing characters in number '" + v + "'");
            return d;
        }
        catch (const std::invalid_argument&)
        {
            config_error(origin, line, "expected a number, got '" + v + "'");
        }
        catch (const std::out_of_range&)
        {
            config_error(origin, line, "number out of range: '" + v + "'");
        }
    }

    std::uint64_t parse_uint(const std::string& origin, std::size_t line,
                             const std::string& v)
    {
        const double d = parse_double(origin, line, v);
        if (d < 0.0 || d != std::floor(d) || d > 1e18)
            config_error(origin, line, "expected a nonnegative integer, got '" + v + "'");
        return static_cast<std::uint64_t>(d);
    }

    std::vector<double> parse_list(const std::string& origin, std::size_t line,
                                   const std::string& v)
    {
        std::vector<double> out;
        std::stringstream ss(v);
        std::string item;
        while (std::getline(ss, item, ','))
        {
            item = trim(item);
            if (!item.empty())
                out.push_back(parse_double(origin, line, item));
        }
        if (out.empty())
            config_error(origin, line, "expected a comma-separated list");
        return out;
    }

    std::uint64_t fnv1a(const std::string& text)
    {
        std::uint64_t h = 1469598103934665603ULL;
        for (unsigned char c : text)
        {
            h ^= c;
            h *= 1099511628211ULL;
        }
        return h;
    }

    // Exhaustive minimum-total-squared-error assignment of estimates to
    // truths. Sizes stay small (swarms of at most a few targets).
    struct Assignment
    {
        double total_sq = 0.0;
        std::vector<int> truth_for_est; // index into truth, per estimate
    };

    void search_assignment(const std::vector<double>& truth, const std::vector<double>& est,
                           std::size_t depth, std::vector<bool>& used, double partial,
                           std::vector<int>& current, Assignment& best)
    {
        if (partial >= best.total_sq)
            return;
        if (depth == est.size())
        {
            best.total_sq = partial;
            best.truth_for_est = current;
            return;
        }
        for (std::size_t t = 0; t < truth.size(); ++t)
        {
            if (used[t])
                continue;
            const double e = est[depth] - truth[t];
            used[t] = true;
            current[depth] = static_cast<int>(t);
            search_assignment(truth, est, depth + 1, used, partial + e * e, current, best);
            used[t] = false;
        }
    }

    Assignment optimal_assignment(const std::vector<double>& truth,
                                  const std::vector<double>& est)
    {
        if (truth.size() > 10)
            throw std::invalid_argument("aoa_rmse: exhaustive matching capped at 10 targets");
        Assignment best;
        best.total_sq = std::numeric_limits<double>::infinity();
        std::vector<bool> used(truth.size(), false);
        std::vector<int> current(est.size(), -1);
        search_assignment(truth, est, 0, used, 0.0, current, best);
        return best;
    }

    void parallel_for(std::size_t count, std::size_t threads,
                      const std::function<void(std::size_t)>& body)
    {
        if (threads == 0)
            threads = std::max<std::size_t>(1, std::thread::hardware_concurrency());
        threads = std::min(threads, count);
        if (threads <= 1)
        {
            for (std::size_t i = 0; i < count; ++i)
                body(i);
            return;
        }
        std::atomic<std::size_t> next{0};
        std::exception_ptr error;
        std::mutex error_mutex;
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (std::size_t w = 0; w < threads; ++w)
            pool.emplace_back([&]() {
                for (;;)
                {
                    const std::size_t i = next.fetch_add(1);
                    if (i >= count)
                        return;
                    try
                    {
                        body(i);
                    }
                    catch (...)
                    {
                        std::lock_guard<std::mutex> lock(error_mutex);
                        if (!error)
                            error = std::current_exception();
                        return;
                    }
                }
            });
        for (auto& t : pool)
            t.join();
        if (error)
            std::rethrow_exception(error);
    }
} // namespace

void ExperimentConfig::validate() const
{
    if (array.m < 2)
        throw std::invalid_argument("config: array.M must be >= 2");
    if (array.eta_max_rad <= 0.0 || array.eta_max_rad > 0.5 * pi + 1e-12)
        throw std::invalid_argument("config: array.eta_max must be in (0, 90] degrees");

    const auto [n_design, etas] = design_orientations(array.m, array.eta_max_rad);
    (void)etas;
    if (array.n && *array.n != n_design)
        throw std::invalid_argument("config: array.N = " + std::to_string(*array.n) +
                                    " does not match the designed ray count " +
                                    std::to_string(n_design));

    make_ofdm().validate();
    if (ofdm.n_rf > n_design)
        throw std::invalid_argument("config: N_RF exceeds the number of rays");
    if (ofdm.n_rf > array.m)
        throw std::invalid_argument("config: N_RF exceeds the ULA codebook size");
    if (ofdm.bandwidth)
    {
        const double expect = static_cast<double>(ofdm.n_sc) * ofdm.delta_f;
        if (std::abs(*ofdm.bandwidth - expect) > 1e-6 * expect)
            throw std::invalid_argument("config: B must equal N_sc * delta_f");
    }

    if (scenario.swarm_size < 1)
        throw std::invalid_argument("config: swarm_size must be >= 1");
    const double half_span =
        0.5 * static_cast<double>(scenario.swarm_size - 1) * scenario.spacing_rad;
    for (double c : scenario.centroids_rad)
        if (std::abs(c) + half_span >= 0.5 * pi)
            throw std::invalid_argument("config: swarm leaves (-90, 90) degrees at centroid " +
                                        std::to_string(c * rad2deg));
    if (scenario.delay_mean_s <= 0.0 || scenario.delay_mean_s >= ofdm.t_cp)
        throw std::invalid_argument("config: delay_mean must lie in (0, T_cp)");

    if (effective_source_count() >= ofdm.n_rf)
        throw std::invalid_argument("config: source count must be below N_RF");
    if (pipeline.pad_p < 1 || pipeline.pad_q < 1)
        throw std::invalid_argument("config: pads must be >= 1");
    if (montecarlo.trials < 1 || montecarlo.rate_trials < 1)
        throw std::invalid_argument("config: trial counts must be >= 1");
}

OfdmConfig ExperimentConfig::make_ofdm() const
{
    OfdmConfig o;
    o.carrier_hz = ofdm.f_c;
    o.subcarrier_spacing_hz = ofdm.delta_f;
    o.num_subcarriers = ofdm.n_sc;
    o.num_symbols = ofdm.m_sym;
    o.cp_duration_s = ofdm.t_cp;
    o.num_rf_chains = ofdm.n_rf;
    o.tx_power_w = ofdm.tx_power;
    o.noise_var_w = ofdm.tx_power / std::pow(10.0, ofdm.pt_over_sigma2_db / 10.0);
    return o;
}

ArrayFrontEnd ExperimentConfig::make_raa_front_end() const
{
    const double lambda = speed_of_light / ofdm.f_c;
    return ArrayFrontEnd::make_raa(RaaConfig::design(array.m, array.eta_max_rad, lambda,
                                                     array.raa_pattern, array.base_offset_m));
}

ArrayFrontEnd ExperimentConfig::make_ula_front_end() const
{
    const double lambda = speed_of_light / ofdm.f_c;
    return ArrayFrontEnd::make_ula(
        UlaConfig::with_dft_codebook(array.m, lambda, array.ula_pattern));
}

ArrayFrontEnd ExperimentConfig::make_ula_isotropic_front_end() const
{
    const double lambda = speed_of_light / ofdm.f_c;
    return ArrayFrontEnd::make_ula(
        UlaConfig::with_dft_codebook(array.m, lambda, array.iso_pattern));
}

PipelineParams ExperimentConfig::make_pipeline_params() const
{
    PipelineParams p;
    p.grid_step_rad = pipeline.grid_step_rad;
    p.grid_limit_rad = pipeline.grid_limit_rad;
    p.min_separation_rad = pipeline.min_separation_rad;
    p.pad_p = pipeline.pad_p;
    p.pad_q = pipeline.pad_q;
    p.peak_floor = pipeline.peak_floor;
    return p;
}

std::size_t ExperimentConfig::effective_source_count() const
{
    return pipeline.source_count > 0 ? pipeline.source_count : scenario.swarm_size;
}

std::string ExperimentConfig::canonical_text() const
{
    std::ostringstream os;
    os << "[array]\n"
       << "M=" << array.m << "\n";
    if (array.n)
        os << "N=" << *array.n << "\n";
    os << "eta_max_deg=" << csv_num(array.eta_max_rad * rad2deg) << "\n"
       << "base_offset=" << csv_num(array.base_offset_m) << "\n"
       << "element=" << (array.raa_pattern.kind == ElementPattern::Kind::threegpp
                             ? "threegpp"
                             : "isotropic")
       << "\n"
       << "peak_gain_db=" << csv_num(array.raa_pattern.peak_gain_db) << "\n"
       << "beamwidth_3db_deg=" << csv_num(array.raa_pattern.beamwidth_3db * rad2deg) << "\n"
       << "ula_peak_gain_db=" << csv_num(array.ula_pattern.peak_gain_db) << "\n"
       << "ula_beamwidth_3db_deg=" << csv_num(array.ula_pattern.beamwidth_3db * rad2deg)
       << "\n"
       << "iso_gain_db=" << csv_num(array.iso_pattern.peak_gain_db) << "\n"
       << "[ofdm]\n"
       << "f_c=" << csv_num(ofdm.f_c) << "\n"
       << "delta_f=" << csv_num(ofdm.delta_f) << "\n"
       << "N_sc=" << ofdm.n_sc << "\n"
       << "M_sym=" << ofdm.m_sym << "\n"
       << "T_cp=" << csv_num(ofdm.t_cp) << "\n"
       << "N_RF=" << ofdm.n_rf << "\n"
       << "tx_power=" << csv_num(ofdm.tx_power) << "\n"
       << "Pt_over_sigma2_db=" << csv_num(ofdm.pt_over_sigma2_db) << "\n"
       << "[scenario]\n"
       << "swarm_size=" << scenario.swarm_size << "\n"
       << "spacing_deg=" << csv_num(scenario.spacing_rad * rad2deg) << "\n"
       << "centroids_deg=";
    for (std::size_t i = 0; i < scenario.centroids_rad.size(); ++i)
        os << (i ? "," : "") << csv_num(scenario.centroids_rad[i] * rad2deg);
    os << "\n"
       << "delay_mean=" << csv_num(scenario.delay_mean_s) << "\n"
       << "delay_var=" << csv_num(scenario.delay_var_s2) << "\n"
       << "doppler_mean=" << csv_num(scenario.doppler_mean_hz) << "\n"
       << "doppler_var=" << csv_num(scenario.doppler_var_hz2) << "\n"
       << "[pipeline]\n"
       << "grid_step_deg=" << csv_num(pipeline.grid_step_rad * rad2deg) << "\n"
       << "grid_limit_deg=" << csv_num(pipeline.grid_limit_rad * rad2deg) << "\n"
       << "min_separation_deg=" << csv_num(pipeline.min_separation_rad * rad2deg) << "\n"
       << "pad_p=" << pipeline.pad_p << "\n"
       << "pad_q=" << pipeline.pad_q << "\n"
       << "source_count=" << pipeline.source_count << "\n"
       << "peak_floor=" << csv_num(pipeline.peak_floor) << "\n"
       << "[montecarlo]\n"
       << "trials=" << montecarlo.trials << "\n"
       << "rate_trials=" << montecarlo.rate_trials << "\n"
       << "seed=" << montecarlo.seed << "\n"
       << "threads=" << montecarlo.threads << "\n"
       << "[output]\n"
       << "dir=" << output.dir << "\n";
    return os.str();
}

std::uint64_t ExperimentConfig::hash() const
{
    return fnv1a(canonical_text());
}

ExperimentConfig parse_config_text(const std::string& text, const std::string& origin)
{
    ExperimentConfig cfg;
    std::istringstream is(text);
    std::string line;
    std::string section;
    std::size_t lineno = 0;

    while (std::getline(is, line))
    {
        ++lineno;
        const std::string s = trim(line);
        if (s.empty() || s[0] == '#' || s[0] == ';')
            continue;
        if (s.front() == '[')
        {
            if (s.back() != ']')
                config_error(origin, lineno, "unterminated section header");
            section = trim(s.substr(1, s.size() - 2));
            if (section != "array" && section != "ofdm" && section != "scenario" &&
                section != "pipeline" && section != "montecarlo" && section != "output")
                config_error(origin, lineno, "unknown section [" + section + "]");
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos)
            config_error(origin, lineno, "expected key = value");
        const std::string key = trim(s.substr(0, eq));
        const std::string val = trim(s.substr(eq + 1));
        if (section.empty())
            config_error(origin, lineno, "key '" + key + "' outside any section");
        if (val.empty())
            config_error(origin, lineno, "empty value for '" + key + "'");

        if (section == "array")
        {
            if (key == "M")
                cfg.array.m = parse_uint(origin, lineno, val);
            else if (key == "N")
                cfg.array.n = parse_uint(origin, lineno, val);
            else if (key == "eta_max_deg")
                cfg.array.eta_max_rad = parse_double(origin, lineno, val) * deg2rad;
            else if (key == "base_offset")
                cfg.array.base_offset_m = parse_double(origin, lineno, val);
            else if (key == "element")
            {
                if (val == "threegpp")
                    cfg.array.raa_pattern.kind = ElementPattern::Kind::threegpp;
                else if (val == "isotropic")
                    cfg.array.raa_pattern.kind = ElementPattern::Kind::isotropic;
                else
                    config_error(origin, lineno, "element must be threegpp or isotropic");
            }
            else if (key == "peak_gain_db")
                cfg.array.raa_pattern.peak_gain_db = parse_double(origin, lineno, val);
            else if (key == "beamwidth_3db_deg")
                cfg.array.raa_pattern.beamwidth_3db =
                    parse_double(origin, lineno, val) * deg2rad;
            else if (key == "ula_peak_gain_db")
                cfg.array.ula_pattern.peak_gain_db = parse_double(origin, lineno, val);
            else if (key == "ula_beamwidth_3db_deg")
                cfg.array.ula_pattern.beamwidth_3db =
                    parse_double(origin, lineno, val) * deg2rad;
            else if (key == "iso_gain_db")
                cfg.array.iso_pattern.peak_gain_db = parse_double(origin, lineno, val);
            else
                config_error(origin, lineno, "unknown key '" + key + "' in [array]");
        }
        else if (section == "ofdm")
        {
            if (key == "f_c")
                cfg.ofdm.f_c = parse_double(origin, lineno, val);
            else if (key == "B")
                cfg.ofdm.bandwidth = parse_double(origin, lineno, val);
            else if (key == "N_sc")
                cfg.ofdm.n_sc = parse_uint(origin, lineno, val);
            else if (key == "M_sym")
                cfg.ofdm.m_sym = parse_uint(origin, lineno, val);
            else if (key == "delta_f")
                cfg.ofdm.delta_f = parse_double(origin, lineno, val);
            else if (key == "T_cp")
                cfg.ofdm.t_cp = parse_double(origin, lineno, val);
            else if (key == "N_RF")
                cfg.ofdm.n_rf = parse_uint(origin, lineno, val);
            else if (key == "tx_power")
                cfg.ofdm.tx_power = parse_double(origin, lineno, val);
            else if (key == "Pt_over_sigma2_db")
                cfg.ofdm.pt_over_sigma2_db = parse_double(origin, lineno, val);
            else
                config_error(origin, lineno, "unknown key '" + key + "' in [ofdm]");
        }
        else if (section == "scenario")
        {
            if (key == "swarm_size")
                cfg.scenario.swarm_size = parse_uint(origin, lineno, val);
            else if (key == "spacing_deg")
                cfg.scenario.spacing_rad = parse_double(origin, lineno, val) * deg2rad;
            else if (key == "centroids_deg")
            {
                cfg.scenario.centroids_rad.clear();
                for (double c : parse_list(origin, lineno, val))
                    cfg.scenario.centroids_rad.push_back(c * deg2rad);
            }
            else if (key == "delay_mean")
                cfg.scenario.delay_mean_s = parse_double(origin, lineno, val);
            else if (key == "delay_var")
                cfg.scenario.delay_var_s2 = parse_double(origin, lineno, val);
            else if (key == "doppler_mean")
                cfg.scenario.doppler_mean_hz = parse_double(origin, lineno, val);
            else if (key == "doppler_var")
                cfg.scenario.doppler_var_hz2 = parse_double(origin, lineno, val);
            else
                config_error(origin, lineno, "unknown key '" + key + "' in [scenario]");
        }
        else if (section == "pipeline")
        {
            if (key == "grid_step_deg")
                cfg.pipeline.grid_step_rad = parse_double(origin, lineno, val) * deg2rad;
            else if (key == "grid_limit_deg")
                cfg.pipeline.grid_limit_rad = parse_double(origin, lineno, val) * deg2rad;
            else if (key == "min_separation_deg")
                cfg.pipeline.min_separation_rad =
                    parse_double(origin, lineno, val) * deg2rad;
            else if (key == "pad_p")
                cfg.pipeline.pad_p = parse_uint(origin, lineno, val);
            else if (key == "pad_q")
                cfg.pipeline.pad_q = parse_uint(origin, lineno, val);
            else if (key == "source_count")
                cfg.pipeline.source_count = parse_uint(origin, lineno, val);
            else if (key == "peak_floor")
                cfg.pipeline.peak_floor = parse_double(origin, lineno, val);
            else
                config_error(origin, lineno, "unknown key '" + key + "' in [pipeline]");
        }
        else if (section == "montecarlo")
        {
            if (key == "trials")
                cfg.montecarlo.trials = parse_uint(origin, lineno, val);
            else if (key == "rate_trials")
                cfg.montecarlo.rate_trials = parse_uint(origin, lineno, val);
            else if (key == "seed")
                cfg.montecarlo.seed = parse_uint(origin, lineno, val);
            else if (key == "threads")
                cfg.montecarlo.threads = parse_uint(origin, lineno, val);
            else
                config_error(origin, lineno, "unknown key '" + key + "' in [montecarlo]");
        }
        else // output
        {
            if (key == "dir")
                cfg.output.dir = val;
            else
                config_error(origin, lineno, "unknown key '" + key + "' in [output]");
        }
    }

    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::string& path)
{
    std::ifstream is(path);
    if (!is)
        throw std::invalid_argument("cannot open config file: " + path);
    std::ostringstream buf;
    buf << is.rdbuf();
    return parse_config_text(buf.str(), path);
}

ExperimentConfig preset_config(const std::string& name)
{
    ExperimentConfig cfg;
    if (name == "fullscale")
    {
        cfg.validate();
        return cfg;
    }
    if (name == "desk")
    {
        cfg.ofdm.n_sc = 64;
        cfg.ofdm.m_sym = 32;
        // Shorter interval: widen the delay/Doppler spreads so paths still
        // decorrelate across the processing block.
        cfg.scenario.delay_var_s2 = 2.5e-15;
        cfg.scenario.doppler_var_hz2 = 3.6e5;
        cfg.montecarlo.trials = 20;
        cfg.validate();
        return cfg;
    }
    throw std::invalid_argument("unknown preset '" + name + "' (use fullscale or desk)");
}

std::optional<double> aoa_rmse(const std::vector<double>& truth_rad,
                               const std::vector<double>& estimated_rad)
{
    if (estimated_rad.empty())
        return std::nullopt;
    if (estimated_rad.size() > truth_rad.size())
        throw std::invalid_argument("aoa_rmse: more estimates than truths");
    const Assignment best = optimal_assignment(truth_rad, estimated_rad);
    return std::sqrt(best.total_sq / static_cast<double>(estimated_rad.size()));
}

double average_missing_shots(
    const std::vector<std::pair<std::vector<double>, std::vector<double>>>& runs)
{
    if (runs.empty())
        throw std::invalid_argument("average_missing_shots: no runs");
    double acc = 0.0;
    for (const auto& [truth, est] : runs)
    {
        if (est.size() > truth.size())
            throw std::invalid_argument("average_missing_shots: more estimates than truths");
        acc += static_cast<double>(truth.size() - est.size());
    }
    return acc / static_cast<double>(runs.size());
}

namespace
{
    // Pooled RMSE over every matched pair of a centroid's trials.
    double pooled_rmse(const std::vector<TrialRecord>& trials, double centroid,
                       bool use_raa)
    {
        double sq = 0.0;
        std::size_t n = 0;
        for (const TrialRecord& rec : trials)
        {
            if (rec.centroid_rad != centroid)
                continue;
            const auto& est = use_raa ? rec.est_raa_rad : rec.est_ula_rad;
            if (est.empty())
                continue;
            const Assignment a = optimal_assignment(rec.truth_rad, est);
            sq += a.total_sq;
            n += est.size();
        }
        return n == 0 ? std::numeric_limits<double>::quiet_NaN()
                      : std::sqrt(sq / static_cast<double>(n));
    }

    void write_summary_csv(const std::string& path,
                           const std::vector<CentroidSummary>& rows)
    {
        std::ofstream os(path);
        if (!os)
            throw std::runtime_error("cannot open for writing: " + path);
        os << "centroid_deg,rmse_raa_deg,rmse_ula_deg,eps_raa,eps_ula,rate_raa,rate_ula\n";
        for (const CentroidSummary& r : rows)
            os << csv_num(r.centroid_rad * rad2deg) << ','
               << csv_num(r.rmse_raa_rad * rad2deg) << ','
               << csv_num(r.rmse_ula_rad * rad2deg) << ',' << csv_num(r.eps_raa) << ','
               << csv_num(r.eps_ula) << ',' << csv_num(r.rate_raa) << ','
               << csv_num(r.rate_ula) << '\n';
    }

    void write_trials_csv(const std::string& path, const std::vector<TrialRecord>& trials,
                          std::size_t swarm_size)
    {
        std::ofstream os(path);
        if (!os)
            throw std::runtime_error("cannot open for writing: " + path);
        os << "trial,centroid_deg";
        for (std::size_t k = 0; k < swarm_size; ++k)
            os << ",truth_deg_" << k;
        for (std::size_t k = 0; k < swarm_size; ++k)
            os << ",est_raa_deg_" << k;
        for (std::size_t k = 0; k < swarm_size; ++k)
            os << ",est_ula_deg_" << k;
        os << ",rmse_raa_deg,rmse_ula_deg,missing_raa,missing_ula\n";

        auto aligned = [](const std::vector<double>& truth,
                          const std::vector<double>& est) {
            std::vector<double> cols(truth.size(),
                                     std::numeric_limits<double>::quiet_NaN());
            if (!est.empty())
            {
                const Assignment a = optimal_assignment(truth, est);
                for (std::size_t i = 0; i < est.size(); ++i)
                    cols[static_cast<std::size_t>(a.truth_for_est[i])] = est[i];
            }
            return cols;
        };

        for (const TrialRecord& rec : trials)
        {
            os << rec.trial << ',' << csv_num(rec.centroid_rad * rad2deg);
            for (double t : rec.truth_rad)
                os << ',' << csv_num(t * rad2deg);
            for (double v : aligned(rec.truth_rad, rec.est_raa_rad))
                os << ',' << csv_num(v * rad2deg);
            for (double v : aligned(rec.truth_rad, rec.est_ula_rad))
                os << ',' << csv_num(v * rad2deg);
            os << ',' << (rec.rmse_raa_rad ? csv_num(*rec.rmse_raa_rad * rad2deg) : "nan")
               << ',' << (rec.rmse_ula_rad ? csv_num(*rec.rmse_ula_rad * rad2deg) : "nan")
               << ',' << rec.missing_raa << ',' << rec.missing_ula << '\n';
        }
    }
} // namespace

RunManifest run_montecarlo(const ExperimentConfig& cfg)
{
    cfg.validate();
    const auto t_start = std::chrono::steady_clock::now();

    const OfdmConfig ofdm = cfg.make_ofdm();
    const ArrayFrontEnd raa_fe = cfg.make_raa_front_end();
    const ArrayFrontEnd ula_fe = cfg.make_ula_front_end();
    const ArrayFrontEnd ula_iso_fe = cfg.make_ula_isotropic_front_end();
    const PipelineParams params = cfg.make_pipeline_params();
    const std::size_t sources = cfg.effective_source_count();
    const std::uint64_t seed = cfg.montecarlo.seed;

    const auto& centroids = cfg.scenario.centroids_rad;
    const std::size_t q_trials = cfg.montecarlo.trials;
    const std::size_t total = centroids.size() * q_trials;

    auto draw_scenario = [&](double centroid, std::uint64_t scenario_seed) {
        return make_swarm_scenario(centroid, cfg.scenario.swarm_size,
                                   cfg.scenario.spacing_rad, cfg.scenario.delay_mean_s,
                                   cfg.scenario.delay_var_s2, cfg.scenario.doppler_mean_hz,
                                   cfg.scenario.doppler_var_hz2, ofdm.cp_duration_s,
                                   scenario_seed);
    };

    std::vector<TrialRecord> records(total);
    parallel_for(total, cfg.montecarlo.threads, [&](std::size_t idx) {
        const std::size_t ci = idx / q_trials;
        const std::size_t t = idx % q_trials;
        const double centroid = centroids[ci];
        const std::uint64_t trial_seed = mix_seed(seed, ci + 1, t + 1);

        TrialRecord rec;
        rec.trial = t;
        rec.centroid_rad = centroid;

        const std::vector<PathParams> paths = draw_scenario(centroid, trial_seed);
        for (const PathParams& p : paths)
            rec.truth_rad.push_back(p.aoa_rad);

        auto run_arch = [&](const ArrayFrontEnd& fe, std::uint64_t arch_tag,
                            std::vector<double>& est_out, bool& failed) {
            try
            {
                const SelectionMatrix sel =
                    probe_and_select(paths, fe, ofdm, mix_seed(trial_seed, arch_tag));
                const SymbolGrid grid =
                    SymbolGrid::qpsk(ofdm.num_subcarriers, ofdm.num_symbols,
                                     ofdm.tx_power_w, mix_seed(trial_seed, arch_tag, 1));
                const SignalTensor raw = synthesize_tensor(
                    paths, fe, ofdm, sel, grid, mix_seed(trial_seed, arch_tag, 2));
                const SignalTensor removed = data_removal(raw, grid);
                const EstimationResult est =
                    run_pipeline(removed, fe, sel, ofdm, sources, params);
                est_out = est.aoas_rad;
            }
            catch (const std::exception& e)
            {
                failed = true;
                rec.failure_note += e.what();
                rec.failure_note += "; ";
            }
        };

        run_arch(raa_fe, 101, rec.est_raa_rad, rec.failed_raa);
        run_arch(ula_fe, 202, rec.est_ula_rad, rec.failed_ula);

        rec.rmse_raa_rad = aoa_rmse(rec.truth_rad, rec.est_raa_rad);
        rec.rmse_ula_rad = aoa_rmse(rec.truth_rad, rec.est_ula_rad);
        rec.missing_raa = rec.truth_rad.size() - rec.est_raa_rad.size();
        rec.missing_ula = rec.truth_rad.size() - rec.est_ula_rad.size();
        records[idx] = std::move(rec);
    });

    RunManifest manifest;
    manifest.config_hash = cfg.hash();
    manifest.seed = seed;
    manifest.version = version_string;
    manifest.trials = std::move(records);

    for (const TrialRecord& rec : manifest.trials)
        if (rec.failed_raa || rec.failed_ula)
            ++manifest.failed_trials;

    // Per-centroid summaries: sensing metrics from the trial records, rates
    // from dedicated Monte-Carlo draws with a per-centroid fixed selection.
    for (std::size_t ci = 0; ci < centroids.size(); ++ci)
    {
        const double centroid = centroids[ci];
        CentroidSummary sum;
        sum.centroid_rad = centroid;
        sum.rmse_raa_rad = pooled_rmse(manifest.trials, centroid, true);
        sum.rmse_ula_rad = pooled_rmse(manifest.trials, centroid, false);

        double miss_raa = 0.0;
        double miss_ula = 0.0;
        for (const TrialRecord& rec : manifest.trials)
            if (rec.centroid_rad == centroid)
            {
                miss_raa += static_cast<double>(rec.missing_raa);
                miss_ula += static_cast<double>(rec.missing_ula);
            }
        sum.eps_raa = miss_raa / static_cast<double>(q_trials);
        sum.eps_ula = miss_ula / static_cast<double>(q_trials);

        auto rate_for = [&](const ArrayFrontEnd& fe, std::uint64_t tag, double& rate,
                            double& stderr_out) {
            const std::uint64_t rate_seed = mix_seed(seed, 0xca7e, ci + 1);
            const std::vector<PathParams> nominal =
                draw_scenario(centroid, mix_seed(rate_seed, tag));
            const SelectionMatrix sel =
                probe_and_select(nominal, fe, ofdm, mix_seed(rate_seed, tag, 7));
            auto sampler = [&, rate_seed, tag](std::size_t trial) {
                return draw_scenario(centroid, mix_seed(rate_seed, tag, 100 + trial));
            };
            const RateReport rep =
                expected_rate(sampler, fe, sel, ofdm, cfg.montecarlo.rate_trials);
            rate = rep.rate;
            stderr_out = rep.std_error;
        };
        rate_for(raa_fe, 1, sum.rate_raa, sum.rate_raa_stderr);
        rate_for(ula_iso_fe, 2, sum.rate_ula, sum.rate_ula_stderr);

        manifest.summaries.push_back(sum);
    }

    namespace fs = std::filesystem;
    fs::create_directories(cfg.output.dir);
    const std::string summary_path = cfg.output.dir + "/summary.csv";
    const std::string trials_path = cfg.output.dir + "/trials.csv";
    const std::string manifest_path = cfg.output.dir + "/manifest.txt";

    write_summary_csv(summary_path, manifest.summaries);
    write_trials_csv(trials_path, manifest.trials, cfg.scenario.swarm_size);
    manifest.files = {summary_path, trials_path, manifest_path};

    manifest.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();

    {
        std::ofstream os(manifest_path);
        if (!os)
            throw std::runtime_error("cannot open for writing: " + manifest_path);
        char hash_hex[32];
        std::snprintf(hash_hex, sizeof(hash_hex), "%016llx",
                      static_cast<unsigned long long>(manifest.config_hash));
        os << "version: " << manifest.version << "\n"
           << "config_hash: " << hash_hex << "\n"
           << "seed: " << manifest.seed << "\n"
           << "trials_per_centroid: " << q_trials << "\n"
           << "centroids: " << centroids.size() << "\n"
           << "failed_trials: " << manifest.failed_trials << "\n"
           << "probe_sweeps_raa: "
           << (raa_fe.num_ports() + ofdm.num_rf_chains - 1) / ofdm.num_rf_chains << "\n"
           << "probe_sweeps_ula: "
           << (ula_fe.num_ports() + ofdm.num_rf_chains - 1) / ofdm.num_rf_chains << "\n"
           << "wall_seconds: " << csv_num(manifest.wall_seconds) << "\n";
        for (const std::string& f : manifest.files)
            os << "file: " << f << "\n";
    }

    return manifest;
}

} // namespace raysim
