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

#ifndef raysim_harness_H
#define raysim_harness_H

#include "raysim/comms_metrics.hpp"
#include "raysim/sensing.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace raysim
{

extern const char* const version_string;

// Experiment description, loadable from an INI-style text file. Defaults
// reproduce the full-scale reference setup (39 GHz, 512 x 2048 grid,
// M = 128, N = 201, 8 chains, 20 dB transmit-power-to-noise ratio).
struct ExperimentConfig
{
    struct Array
    {
        std::size_t m = 128;               // elements per ray / ULA elements
        std::optional<std::size_t> n;      // expected ray count (validated)
        double eta_max_rad = 1.5707963267948966;
        double base_offset_m = 0.0;        // 0 -> minimum spacing bound
        ElementPattern raa_pattern = ElementPattern::raa_directional();
        ElementPattern ula_pattern = ElementPattern::ula_wide();
        ElementPattern iso_pattern = ElementPattern::matched_isotropic();
    } array;

    struct Ofdm
    {
        double f_c = 39e9;
        double delta_f = 120e3;
        std::size_t n_sc = 512;
        std::size_t m_sym = 2048;
        double t_cp = 0.67e-6;
        std::size_t n_rf = 8;
        double tx_power = 1.0;
        double pt_over_sigma2_db = 20.0;
        std::optional<double> bandwidth; // consistency check only
    } ofdm;

    struct Scenario
    {
        std::size_t swarm_size = 5;
        double spacing_rad = 0.5 * 0.017453292519943295;
        std::vector<double> centroids_rad = {0.0, 0.3490658503988659,
                                             0.6981317007977318, 1.0471975511965976};
        double delay_mean_s = 0.3e-6;
        double delay_var_s2 = 4e-16;
        double doppler_mean_hz = 300.0;
        double doppler_var_hz2 = 6400.0;
    } scenario;

    struct Pipeline
    {
        double grid_step_rad = 0.0;      // 0 -> default for the array size
        double grid_limit_rad = 0.0;     // 0 -> 89.9 deg
        double min_separation_rad = 0.0; // 0 -> gamma/4
        std::size_t pad_p = 8;
        std::size_t pad_q = 8;
        std::size_t source_count = 0;    // 0 -> swarm_size
        double peak_floor = 1e3;
    } pipeline;

    struct MonteCarlo
    {
        std::size_t trials = 20;
        std::size_t rate_trials = 40;
        std::uint64_t seed = 1;
        std::size_t threads = 0; // 0 -> hardware concurrency
    } montecarlo;

    struct Output
    {
        std::string dir = "out";
    } output;

    void validate() const;

    // Derived builders.
    OfdmConfig make_ofdm() const;
    ArrayFrontEnd make_raa_front_end() const;
    ArrayFrontEnd make_ula_front_end() const;           // wide directional elements
    ArrayFrontEnd make_ula_isotropic_front_end() const; // rate baseline
    PipelineParams make_pipeline_params() const;
    std::size_t effective_source_count() const;

    // Canonical text form; hashing it fingerprints the experiment.
    std::string canonical_text() const;
    std::uint64_t hash() const;
};

// Parses an INI-style config file. Unknown sections or keys and malformed
// values are rejected with the offending line number. An empty file yields
// the full-scale defaults.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text, const std::string& origin);

// Named presets: "fullscale" (defaults above) and "desk" (64 x 32 grid,
// wider delay/Doppler spreads so the shorter processing interval still
// decorrelates the paths, 20 trials).
ExperimentConfig preset_config(const std::string& name);

// Root-mean-square angular error under the optimal one-to-one assignment of
// estimates to truths (exhaustive over assignments; cardinalities <= 8).
// Empty estimate set -> nullopt. Requires card(est) <= card(truth).
std::optional<double> aoa_rmse(const std::vector<double>& truth_rad,
                               const std::vector<double>& estimated_rad);

// Mean detection deficit over runs: (1/Q) sum (card(truth) - card(est)).
double average_missing_shots(
    const std::vector<std::pair<std::vector<double>, std::vector<double>>>& runs);

// Per-trial record of one Monte-Carlo campaign cell.
struct TrialRecord
{
    std::size_t trial = 0;
    double centroid_rad = 0.0;
    std::vector<double> truth_rad;
    std::vector<double> est_raa_rad;
    std::vector<double> est_ula_rad;
    std::optional<double> rmse_raa_rad;
    std::optional<double> rmse_ula_rad;
    std::size_t missing_raa = 0;
    std::size_t missing_ula = 0;
    bool failed_raa = false; // pipeline threw; recorded, not fatal
    bool failed_ula = false;
    std::string failure_note;
};

struct CentroidSummary
{
    double centroid_rad = 0.0;
    double rmse_raa_rad = 0.0; // pooled over all matched pairs of the centroid
    double rmse_ula_rad = 0.0;
    double eps_raa = 0.0;
    double eps_ula = 0.0;
    double rate_raa = 0.0;
    double rate_raa_stderr = 0.0;
    double rate_ula = 0.0; // isotropic-element baseline
    double rate_ula_stderr = 0.0;
};

struct RunManifest
{
    std::uint64_t config_hash = 0;
    std::uint64_t seed = 0;
    std::string version;
    std::vector<std::string> files;
    double wall_seconds = 0.0;
    std::size_t failed_trials = 0;
    std::vector<TrialRecord> trials;
    std::vector<CentroidSummary> summaries;
};

// Runs the full campaign: per centroid and trial draws a swarm, synthesizes
// the received tensor, selects ports by probe energy, runs both estimation
// pipelines, and estimates uplink rates; writes summary.csv, trials.csv and
// manifest.txt into cfg.output.dir. Deterministic for a fixed (config, seed).
RunManifest run_montecarlo(const ExperimentConfig& cfg);

} // namespace raysim

#endif
