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
#include "raysim/comms_metrics.hpp"
#include "raysim/harness.hpp"
#include "raysim/io.hpp"
#include "raysim/rng.hpp"
#include "raysim/sensing.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace
{

constexpr double pi = 3.14159265358979323846;
constexpr double deg2rad = pi / 180.0;
constexpr double rad2deg = 180.0 / pi;

using namespace raysim;

ExperimentConfig resolve_config(const std::string& config_path, const std::string& preset,
                                std::uint64_t seed, bool seed_set,
                                const std::string& out_dir)
{
    ExperimentConfig cfg =
        config_path.empty() ? preset_config(preset.empty() ? "fullscale" : preset)
                            : load_config(config_path);
    if (seed_set)
        cfg.montecarlo.seed = seed;
    if (!out_dir.empty())
        cfg.output.dir = out_dir;
    cfg.validate();
    return cfg;
}

int cmd_beampattern(const std::string& arch, std::size_t m,
                    const std::vector<double>& theta_primes_deg, double step_deg,
                    const std::string& out)
{
    std::ofstream os(out);
    if (!os)
        throw std::runtime_error("cannot open for writing: " + out);
    os << "theta_deg,theta_prime_deg,magnitude_db\n";

    const double lambda = 0.01; // beam patterns do not depend on the absolute scale
    RaaConfig raa;
    UlaConfig ula;
    if (arch == "raa")
        raa = RaaConfig::design(m, 0.5 * pi, lambda, ElementPattern::raa_directional());
    else
        ula = UlaConfig::with_dft_codebook(m, lambda, ElementPattern::ula_wide());

    for (double tp_deg : theta_primes_deg)
    {
        const double tp = tp_deg * deg2rad;
        for (double t_deg = -89.9; t_deg <= 89.9 + 1e-9; t_deg += step_deg)
        {
            const double t = t_deg * deg2rad;
            const double mag = arch == "raa" ? raa_beam_pattern(t, tp, raa)
                                             : ula_beam_pattern(t, tp, ula);
            os << csv_num(t_deg) << ',' << csv_num(tp_deg) << ','
               << csv_num(20.0 * std::log10(std::max(mag, 1e-300))) << '\n';
        }
    }
    std::cout << "wrote " << out << "\n";
    return 0;
}

int cmd_resolution(std::size_t m, double step_deg, const std::string& out)
{
    std::ofstream os(out);
    if (!os)
        throw std::runtime_error("cannot open for writing: " + out);
    os << "theta_prime_deg,gamma_raa_rad,gamma_ula_rad,gamma_raa_numeric_rad,"
          "gamma_ula_numeric_rad\n";

    const double lambda = 0.01;
    const RaaConfig raa =
        RaaConfig::design(m, 0.5 * pi, lambda, ElementPattern::raa_directional());
    const UlaConfig ula =
        UlaConfig::with_dft_codebook(m, lambda, ElementPattern::ula_wide());

    const double inv = 2.0 / static_cast<double>(m);
    const double domain = std::asin(1.0 - inv);
    for (double tp_deg = -std::floor(domain * rad2deg); tp_deg <= domain * rad2deg;
         tp_deg += step_deg)
    {
        const double tp = tp_deg * deg2rad;
        const ResolutionReport rep_raa = resolution_numeric_raa(tp, raa);
        const ResolutionReport rep_ula = resolution_numeric_ula(tp, ula);
        os << csv_num(tp_deg) << ',' << csv_num(gamma_raa(m)) << ','
           << csv_num(gamma_ula(m, tp)) << ','
           << (rep_raa.valid ? csv_num(rep_raa.resolution) : "nan") << ','
           << (rep_ula.valid ? csv_num(rep_ula.resolution) : "nan") << '\n';
    }
    std::cout << "wrote " << out << "\n";
    return 0;
}

struct TensorMeta
{
    std::string arch;
    std::vector<arma::uword> ports;
    std::size_t sources = 0;
};

void write_meta(const std::string& path, const TensorMeta& meta)
{
    std::ofstream os(path);
    if (!os)
        throw std::runtime_error("cannot open for writing: " + path);
    os << "arch: " << meta.arch << "\n";
    os << "sources: " << meta.sources << "\n";
    os << "ports:";
    for (arma::uword p : meta.ports)
        os << ' ' << p;
    os << "\n";
}

TensorMeta read_meta(const std::string& path)
{
    std::ifstream is(path);
    if (!is)
        throw std::runtime_error("cannot open: " + path);
    TensorMeta meta;
    std::string line;
    while (std::getline(is, line))
    {
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        if (key == "arch:")
            ls >> meta.arch;
        else if (key == "sources:")
            ls >> meta.sources;
        else if (key == "ports:")
        {
            arma::uword p;
            while (ls >> p)
                meta.ports.push_back(p);
        }
    }
    if (meta.arch.empty() || meta.ports.empty())
        throw std::runtime_error("incomplete tensor meta file: " + path);
    return meta;
}

int cmd_simulate(const ExperimentConfig& cfg, const std::string& arch,
                 double centroid_deg, const std::string& out)
{
    const OfdmConfig ofdm = cfg.make_ofdm();
    const ArrayFrontEnd fe =
        arch == "raa" ? cfg.make_raa_front_end() : cfg.make_ula_front_end();
    const std::uint64_t seed = cfg.montecarlo.seed;

    const auto paths = make_swarm_scenario(
        centroid_deg * deg2rad, cfg.scenario.swarm_size, cfg.scenario.spacing_rad,
        cfg.scenario.delay_mean_s, cfg.scenario.delay_var_s2, cfg.scenario.doppler_mean_hz,
        cfg.scenario.doppler_var_hz2, ofdm.cp_duration_s, seed);

    const SelectionMatrix sel = probe_and_select(paths, fe, ofdm, mix_seed(seed, 11));
    const SymbolGrid grid = SymbolGrid::qpsk(ofdm.num_subcarriers, ofdm.num_symbols,
                                             ofdm.tx_power_w, mix_seed(seed, 12));
    const SignalTensor raw =
        synthesize_tensor(paths, fe, ofdm, sel, grid, mix_seed(seed, 13));
    const SignalTensor removed = data_removal(raw, grid);

    write_tensor(out, removed);
    TensorMeta meta;
    meta.arch = arch;
    meta.ports = sel.ports;
    meta.sources = cfg.effective_source_count();
    write_meta(out + ".meta", meta);
    write_scenario_csv(out + ".scenario.csv", paths);
    std::cout << "wrote " << out << ", " << out << ".meta, " << out << ".scenario.csv\n";
    return 0;
}

int cmd_sense(const ExperimentConfig& cfg, const std::string& arch, double centroid_deg,
              const std::string& tensor_path, const std::string& out_prefix)
{
    const OfdmConfig base_ofdm = cfg.make_ofdm();
    OfdmConfig ofdm = base_ofdm;
    PipelineParams params = cfg.make_pipeline_params();
    params.keep_spectrum = true;
    params.keep_dd_maps = true;

    SignalTensor removed;
    SelectionMatrix sel;
    std::string arch_used = arch;
    std::size_t sources = cfg.effective_source_count();

    if (!tensor_path.empty())
    {
        removed = read_tensor(tensor_path);
        const TensorMeta meta = read_meta(tensor_path + ".meta");
        arch_used = meta.arch;
        sources = meta.sources;
        ofdm.num_subcarriers = removed.num_subcarriers();
        ofdm.num_symbols = removed.num_symbols();
        sel.ports = meta.ports;
    }
    const ArrayFrontEnd fe =
        arch_used == "raa" ? cfg.make_raa_front_end() : cfg.make_ula_front_end();
    sel.num_total_ports = fe.num_ports();

    if (tensor_path.empty())
    {
        const std::uint64_t seed = cfg.montecarlo.seed;
        const auto paths = make_swarm_scenario(
            centroid_deg * deg2rad, cfg.scenario.swarm_size, cfg.scenario.spacing_rad,
            cfg.scenario.delay_mean_s, cfg.scenario.delay_var_s2,
            cfg.scenario.doppler_mean_hz, cfg.scenario.doppler_var_hz2, ofdm.cp_duration_s, seed);
        sel = probe_and_select(paths, fe, ofdm, mix_seed(seed, 11));
        const SymbolGrid grid = SymbolGrid::qpsk(ofdm.num_subcarriers, ofdm.num_symbols,
                                                 ofdm.tx_power_w, mix_seed(seed, 12));
        const SignalTensor raw =
            synthesize_tensor(paths, fe, ofdm, sel, grid, mix_seed(seed, 13));
        removed = data_removal(raw, grid);
        write_scenario_csv(out_prefix + ".scenario.csv", paths);
    }

    const EstimationResult result = run_pipeline(removed, fe, sel, ofdm, sources, params);
    write_estimates_csv(out_prefix + ".estimates.csv", result);
    write_spectrum_csv(out_prefix + ".spectrum.csv", result.spectrum);
    for (std::size_t k = 0; k < result.dd_maps.size(); ++k)
        write_dd_map_csv(out_prefix + ".ddmap" + std::to_string(k) + ".csv",
                         result.dd_maps[k], ofdm);

    std::cout << "detected " << result.detected_count << " target(s)\n";
    for (std::size_t k = 0; k < result.detected_count; ++k)
        std::cout << "  aoa " << result.aoas_rad[k] * rad2deg << " deg, delay "
                  << result.delays_s[k] << " s, doppler " << result.dopplers_hz[k]
                  << " Hz\n";
    std::cout << "wrote " << out_prefix << ".estimates.csv and diagnostics\n";
    return 0;
}

int cmd_rate(const ExperimentConfig& cfg, const std::string& out)
{
    const OfdmConfig ofdm = cfg.make_ofdm();
    const ArrayFrontEnd raa_fe = cfg.make_raa_front_end();
    const ArrayFrontEnd ula_dir_fe = cfg.make_ula_front_end();
    const ArrayFrontEnd ula_iso_fe = cfg.make_ula_isotropic_front_end();
    const std::uint64_t seed = cfg.montecarlo.seed;

    std::ofstream os(out);
    if (!os)
        throw std::runtime_error("cannot open for writing: " + out);
    os << "centroid_deg,rate_raa,rate_raa_stderr,rate_ula_directional,"
          "rate_ula_directional_stderr,rate_ula_isotropic,rate_ula_isotropic_stderr\n";

    for (std::size_t ci = 0; ci < cfg.scenario.centroids_rad.size(); ++ci)
    {
        const double centroid = cfg.scenario.centroids_rad[ci];
        auto sample = [&](std::uint64_t tag, std::size_t trial) {
            return make_swarm_scenario(centroid, cfg.scenario.swarm_size,
                                       cfg.scenario.spacing_rad, cfg.scenario.delay_mean_s,
                                       cfg.scenario.delay_var_s2,
                                       cfg.scenario.doppler_mean_hz,
                                       cfg.scenario.doppler_var_hz2, ofdm.cp_duration_s,
                                       mix_seed(seed, 0xca7e, mix_seed(ci + 1, tag, trial)));
        };
        auto run = [&](const ArrayFrontEnd& fe, std::uint64_t tag) {
            const SelectionMatrix sel =
                probe_and_select(sample(tag, 0), fe, ofdm, mix_seed(seed, tag, ci));
            auto sampler = [&, tag](std::size_t t) { return sample(tag, 100 + t); };
            return expected_rate(sampler, fe, sel, ofdm, cfg.montecarlo.rate_trials);
        };
        const RateReport r_raa = run(raa_fe, 1);
        const RateReport r_dir = run(ula_dir_fe, 2);
        const RateReport r_iso = run(ula_iso_fe, 3);
        os << csv_num(centroid * rad2deg) << ',' << csv_num(r_raa.rate) << ','
           << csv_num(r_raa.std_error) << ',' << csv_num(r_dir.rate) << ','
           << csv_num(r_dir.std_error) << ',' << csv_num(r_iso.rate) << ','
           << csv_num(r_iso.std_error) << '\n';
    }
    std::cout << "wrote " << out << "\n";
    return 0;
}

int cmd_oracle_check(const ExperimentConfig& cfg)
{
    int failures = 0;
    auto report = [&failures](const std::string& name, bool ok, double err) {
        std::cout << (ok ? "[PASS] " : "[FAIL] ") << name << " (max rel err " << err
                  << ")\n";
        if (!ok)
            ++failures;
    };

    // Element-level reference: ray responses summed phasor by phasor.
    {
        const double lambda = cfg.make_ofdm().wavelength_m();
        const RaaConfig raa =
            RaaConfig::design(8, 0.5 * pi, lambda, ElementPattern::raa_directional());
        double worst = 0.0;
        for (double theta : {-1.1, -0.4, 0.0, 0.2, 0.7, 1.3})
        {
            const arma::cx_vec fast = raa_response_vector(theta, raa);
            for (std::size_t n = 0; n < raa.num_sulas(); ++n)
            {
                std::complex<double> acc{0.0, 0.0};
                const double zeta = theta - raa.orientations(n);
                for (std::size_t mi = 0; mi < raa.elements_per_sula; ++mi)
                    acc += std::polar(1.0, pi * static_cast<double>(mi) * std::sin(zeta));
                acc *= sula_ref_response(zeta, raa);
                worst = std::max(worst, std::abs(fast(n) - acc) /
                                            std::max(std::abs(acc), 1e-30));
            }
        }
        report("element-level ray response", worst < 1e-11, worst);
    }

    // Subcarrier-domain synthesis against the sampled time-domain chain.
    {
        OfdmConfig ofdm = cfg.make_ofdm();
        ofdm.num_subcarriers = 16;
        ofdm.num_symbols = 2;
        const ArrayFrontEnd fe = ArrayFrontEnd::make_raa(RaaConfig::design(
            4, 0.5 * pi, ofdm.wavelength_m(), ElementPattern::raa_directional()));
        double worst = 0.0;
        for (std::uint64_t seed : {1u, 2u, 3u})
        {
            const auto paths = make_swarm_scenario(0.15, 2, 0.05, 0.2e-6, 1e-14, 250.0,
                                                   1e4, ofdm.cp_duration_s, seed);
            const SelectionMatrix sel = probe_and_select(paths, fe, ofdm, seed);
            const SymbolGrid grid = SymbolGrid::qpsk(ofdm.num_subcarriers,
                                                     ofdm.num_symbols, ofdm.tx_power_w, seed);
            const SignalTensor fast =
                synthesize_tensor(paths, fe, ofdm, sel, grid, std::nullopt);
            const SignalTensor slow =
                synthesize_time_domain_oracle(paths, fe, ofdm, sel, grid);
            const double scale = arma::abs(fast.samples).max();
            const double err =
                arma::abs(fast.samples - slow.samples).max() / std::max(scale, 1e-30);
            worst = std::max(worst, err);
        }
        report("time-domain OFDM chain", worst < 1e-9, worst);
    }

    return failures == 0 ? 0 : 3;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"ray antenna array ISAC simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::string preset;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string out;
    std::string arch = "raa";
    std::size_t m = 128;
    double centroid_deg = 0.0;
    double step_deg = 0.02;
    std::vector<double> theta_primes{0.0};
    std::string tensor_path;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "experiment config file (INI)");
        sub->add_option("--preset", preset, "named preset: fullscale or desk");
        sub->add_option("--seed", seed, "master seed")->each([&seed_set](const std::string&) {
            seed_set = true;
        });
    };

    CLI::App* beam = app.add_subcommand("beampattern", "emit beam pattern CSV");
    beam->add_option("--array", arch, "raa or ula")->check(CLI::IsMember({"raa", "ula"}));
    beam->add_option("--M", m, "elements per ray / ULA elements");
    beam->add_option("--theta-prime", theta_primes, "desired directions in degrees");
    beam->add_option("--step-deg", step_deg, "observation grid step");
    beam->add_option("--out", out, "output CSV")->required();

    CLI::App* res = app.add_subcommand("resolution", "emit angular resolution CSV");
    res->add_option("--M", m, "elements per ray / ULA elements");
    res->add_option("--step-deg", step_deg, "desired-direction grid step")
        ->default_val(1.0);
    res->add_option("--out", out, "output CSV")->required();

    CLI::App* sim = app.add_subcommand("simulate", "synthesize a received tensor");
    add_common(sim);
    sim->add_option("--array", arch, "raa or ula")->check(CLI::IsMember({"raa", "ula"}));
    sim->add_option("--centroid-deg", centroid_deg, "swarm centroid");
    sim->add_option("--out", out, "output tensor file")->required();

    CLI::App* sense = app.add_subcommand("sense", "run the estimation pipeline");
    add_common(sense);
    sense->add_option("--array", arch, "raa or ula")->check(CLI::IsMember({"raa", "ula"}));
    sense->add_option("--centroid-deg", centroid_deg, "swarm centroid (fresh scenario)");
    sense->add_option("--tensor", tensor_path, "stored tensor to process instead");
    sense->add_option("--out", out, "output prefix")->required();

    CLI::App* rate = app.add_subcommand("rate", "estimate uplink rates");
    add_common(rate);
    rate->add_option("--out", out, "output CSV")->required();

    CLI::App* mc = app.add_subcommand("montecarlo", "run the full campaign");
    add_common(mc);
    mc->add_option("--out", out, "output directory (overrides config)");

    CLI::App* oracle = app.add_subcommand("oracle-check", "cross-validate the signal chains");
    add_common(oracle);

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e)
    {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try
    {
        if (beam->parsed())
            return cmd_beampattern(arch, m, theta_primes, step_deg, out);
        if (res->parsed())
            return cmd_resolution(m, step_deg, out);

        ExperimentConfig cfg = resolve_config(config_path, preset, seed, seed_set,
                                              mc->parsed() ? out : std::string());
        if (sim->parsed())
            return cmd_simulate(cfg, arch, centroid_deg, out);
        if (sense->parsed())
            return cmd_sense(cfg, arch, centroid_deg, tensor_path, out);
        if (rate->parsed())
            return cmd_rate(cfg, out);
        if (oracle->parsed())
            return cmd_oracle_check(cfg);
        if (mc->parsed())
        {
            const RunManifest manifest = run_montecarlo(cfg);
            std::cout << "campaign finished in " << manifest.wall_seconds << " s, "
                      << manifest.failed_trials << " failed trial(s)\n";
            for (const std::string& f : manifest.files)
                std::cout << "wrote " << f << "\n";
            return 0;
        }
    }
    catch (const std::invalid_argument& e)
    {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }
    catch (const std::exception& e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
