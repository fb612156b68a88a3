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
#include "raysim/io.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace raysim;

namespace
{
constexpr double pi = 3.14159265358979323846;
constexpr double deg = pi / 180.0;

std::string slurp(const std::string& path)
{
    std::ifstream is(path, std::ios::binary);
    REQUIRE(is);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

// Brute-force reference for the optimal assignment, fully independent of the
// library implementation: tries every permutation of truth indices.
double rmse_reference(std::vector<double> truth, const std::vector<double>& est)
{
    std::vector<std::size_t> idx(truth.size());
    for (std::size_t i = 0; i < idx.size(); ++i)
        idx[i] = i;
    double best = 1e300;
    std::sort(idx.begin(), idx.end());
    do
    {
        double acc = 0.0;
        for (std::size_t i = 0; i < est.size(); ++i)
        {
            const double e = est[i] - truth[idx[i]];
            acc += e * e;
        }
        best = std::min(best, acc);
    } while (std::next_permutation(idx.begin(), idx.end()));
    return std::sqrt(best / static_cast<double>(est.size()));
}
} // namespace

TEST_CASE("defaults reproduce the full-scale reference settings")
{
    const ExperimentConfig cfg = parse_config_text("", "empty");
    CHECK(cfg.ofdm.f_c == 39e9);
    CHECK(cfg.ofdm.delta_f == 120e3);
    CHECK(cfg.ofdm.n_sc == 512);
    CHECK(cfg.ofdm.m_sym == 2048);
    CHECK(cfg.ofdm.n_rf == 8);
    CHECK(cfg.array.m == 128);
    CHECK(design_orientations(cfg.array.m, cfg.array.eta_max_rad).first == 201);

    const ExperimentConfig preset = preset_config("fullscale");
    CHECK(preset.canonical_text() == cfg.canonical_text());

    const OfdmConfig ofdm = cfg.make_ofdm();
    CHECK(ofdm.bandwidth_hz() == Catch::Approx(61.44e6));
    CHECK(ofdm.symbol_duration_s() == Catch::Approx(1.0 / 120e3));
    CHECK(ofdm.total_symbol_s() == Catch::Approx(1.0 / 120e3 + 0.67e-6));
    CHECK(ofdm.noise_var_w == Catch::Approx(0.01));

    const ExperimentConfig desk = preset_config("desk");
    CHECK(desk.ofdm.n_sc == 64);
    CHECK(desk.ofdm.m_sym == 32);
    CHECK(desk.montecarlo.trials == 20);
    CHECK_THROWS_AS(preset_config("nope"), std::invalid_argument);
}

TEST_CASE("config parsing: values, line numbers, rejection of unknowns")
{
    const std::string good = R"(
# comment
[array]
M = 16
[ofdm]
N_sc = 64
M_sym = 32
N_RF = 4
Pt_over_sigma2_db = 15
B = 7.68e6
[scenario]
swarm_size = 3
centroids_deg = 0, 30, 60
[montecarlo]
trials = 2
seed = 9
)";
    const ExperimentConfig cfg = parse_config_text(good, "good");
    CHECK(cfg.array.m == 16);
    CHECK(cfg.ofdm.n_sc == 64);
    CHECK(cfg.ofdm.n_rf == 4);
    CHECK(cfg.scenario.swarm_size == 3);
    CHECK(cfg.scenario.centroids_rad.size() == 3);
    CHECK(cfg.scenario.centroids_rad[1] == Catch::Approx(30.0 * deg));
    CHECK(cfg.montecarlo.seed == 9);
    CHECK(cfg.make_ofdm().noise_var_w == Catch::Approx(std::pow(10.0, -1.5)));

    // unknown key with its line number
    try
    {
        parse_config_text("[array]\nM = 16\nbogus = 1\n", "f");
        FAIL("expected a parse error");
    }
    catch (const std::invalid_argument& e)
    {
        CHECK(std::string(e.what()).find("f:3") != std::string::npos);
        CHECK(std::string(e.what()).find("bogus") != std::string::npos);
    }

    CHECK_THROWS_AS(parse_config_text("[nope]\n", "f"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config_text("[array]\nM 16\n", "f"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config_text("[array]\nM = twelve\n", "f"),
                    std::invalid_argument);
    CHECK_THROWS_AS(parse_config_text("M = 16\n", "f"), std::invalid_argument);
}

TEST_CASE("config validation catches inconsistent settings")
{
    // more RF chains than rays
    CHECK_THROWS_AS(parse_config_text("[ofdm]\nN_RF = 300\n", "f"),
                    std::invalid_argument);
    // declared ray count must match the designed one
    CHECK_THROWS_AS(parse_config_text("[array]\nN = 200\n", "f"), std::invalid_argument);
    CHECK_NOTHROW(parse_config_text("[array]\nN = 201\n", "f"));
    // bandwidth inconsistent with N_sc * delta_f
    CHECK_THROWS_AS(parse_config_text("[ofdm]\nB = 1e6\n", "f"), std::invalid_argument);
    // swarm leaving the valid angular domain
    CHECK_THROWS_AS(
        parse_config_text("[scenario]\ncentroids_deg = 89\nswarm_size = 5\n", "f"),
        std::invalid_argument);
    // source count must stay below the chain count
    CHECK_THROWS_AS(parse_config_text("[pipeline]\nsource_count = 8\n", "f"),
                    std::invalid_argument);
}

TEST_CASE("config hash tracks content")
{
    const ExperimentConfig a = parse_config_text("", "a");
    ExperimentConfig b = a;
    CHECK(a.hash() == b.hash());
    b.montecarlo.seed = 2;
    CHECK(a.hash() != b.hash());
}

TEST_CASE("angular RMSE under optimal matching")
{
    CHECK(aoa_rmse({0.1, 0.7, -0.3}, {0.7, -0.3, 0.1}) ==
          Catch::Approx(0.0).margin(1e-15));

    // crosswise pairing beats the identity pairing
    const double r = *aoa_rmse({0.0, 1.0 * deg}, {1.1 * deg, -0.1 * deg});
    CHECK(r == Catch::Approx(0.1 * deg).epsilon(1e-12));

    // partial estimates: best subset assignment, checked against brute force
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int rep = 0; rep < 50; ++rep)
    {
        std::vector<double> truth(5);
        std::vector<double> est(4);
        for (auto& t : truth)
            t = u(gen);
        for (auto& e : est)
            e = u(gen);
        CHECK(*aoa_rmse(truth, est) ==
              Catch::Approx(rmse_reference(truth, est)).epsilon(1e-12));
    }

    // permutation invariance in both arguments and global sign flip
    std::vector<double> truth = {0.3, -0.2, 0.9, 0.05};
    std::vector<double> est = {0.31, 0.88, -0.18};
    const double base = *aoa_rmse(truth, est);
    std::reverse(truth.begin(), truth.end());
    std::swap(est[0], est[2]);
    CHECK(*aoa_rmse(truth, est) == Catch::Approx(base).epsilon(1e-12));
    for (auto& t : truth)
        t = -t;
    for (auto& e : est)
        e = -e;
    CHECK(*aoa_rmse(truth, est) == Catch::Approx(base).epsilon(1e-12));

    CHECK_FALSE(aoa_rmse({0.1, 0.2}, {}).has_value());
    CHECK_THROWS_AS(aoa_rmse({0.1}, {0.1, 0.2}), std::invalid_argument);
}

TEST_CASE("average missing shots")
{
    using Run = std::pair<std::vector<double>, std::vector<double>>;
    const std::vector<Run> perfect = {{{1.0, 2.0}, {1.0, 2.0}},
                                      {{0.5, 0.7}, {0.51, 0.73}}};
    CHECK(average_missing_shots(perfect) == 0.0);

    const std::vector<Run> deficits = {{{1.0, 2.0}, {1.0}}, {{1.0, 2.0}, {0.9, 2.1}}};
    CHECK(average_missing_shots(deficits) == Catch::Approx(0.5));

    // order independence and the swarm-size bound
    std::vector<Run> reordered = {deficits[1], deficits[0]};
    CHECK(average_missing_shots(reordered) == Catch::Approx(0.5));
    const std::vector<Run> worst = {{{1.0, 2.0, 3.0}, {}}};
    CHECK(average_missing_shots(worst) <= 3.0);

    CHECK_THROWS_AS(average_missing_shots({{{1.0}, {1.0, 2.0}}}), std::invalid_argument);
    CHECK_THROWS_AS(average_missing_shots({}), std::invalid_argument);
}

TEST_CASE("tensor file round trip")
{
    SignalTensor t;
    t.kind = SignalTensor::Kind::data_removed;
    t.samples.set_size(3, 4, 2);
    std::mt19937_64 gen(77);
    std::normal_distribution<double> nd(0.0, 1.0);
    for (auto& v : t.samples)
        v = {nd(gen), nd(gen)};

    const std::string path =
        (std::filesystem::temp_directory_path() / "raysim_io_test.tensor").string();
    write_tensor(path, t);
    const SignalTensor back = read_tensor(path);
    CHECK(back.kind == t.kind);
    REQUIRE(back.samples.n_rows == 3);
    REQUIRE(back.samples.n_cols == 4);
    REQUIRE(back.samples.n_slices == 2);
    CHECK(arma::abs(back.samples - t.samples).max() == 0.0);
    std::filesystem::remove(path);

    CHECK_THROWS(read_tensor("/nonexistent/raysim.tensor"));
}

TEST_CASE("montecarlo campaign: degenerate run, outputs, determinism")
{
    ExperimentConfig cfg = preset_config("desk");
    cfg.array.m = 16;
    cfg.array.n.reset();
    cfg.ofdm.n_sc = 32;
    cfg.ofdm.m_sym = 16;
    cfg.ofdm.n_rf = 6;
    cfg.scenario.swarm_size = 2;
    cfg.scenario.spacing_rad = 2.0 * deg;
    cfg.scenario.centroids_rad = {0.0};
    cfg.pipeline.source_count = 2;
    cfg.montecarlo.trials = 1;
    cfg.montecarlo.rate_trials = 3;
    cfg.montecarlo.seed = 4;
    cfg.montecarlo.threads = 1;

    const auto dir = std::filesystem::temp_directory_path() / "raysim_mc_test";
    std::filesystem::remove_all(dir);
    cfg.output.dir = dir.string();
    cfg.validate();

    const RunManifest manifest = run_montecarlo(cfg);
    CHECK(manifest.failed_trials == 0);
    REQUIRE(manifest.summaries.size() == 1);
    REQUIRE(manifest.trials.size() == 1);
    for (const std::string& f : manifest.files)
        CHECK(std::filesystem::exists(f));

    // a perfect single trial: both targets found, zero deficit
    CHECK(manifest.summaries[0].eps_raa == 0.0);
    CHECK(manifest.trials[0].rmse_raa_rad.has_value());
    CHECK(manifest.summaries[0].rmse_raa_rad ==
          Catch::Approx(*manifest.trials[0].rmse_raa_rad).epsilon(1e-12));
    CHECK(manifest.summaries[0].rate_raa > 0.0);

    // byte-identical rerun
    const std::string first = slurp((dir / "summary.csv").string());
    const std::string first_trials = slurp((dir / "trials.csv").string());
    run_montecarlo(cfg);
    CHECK(slurp((dir / "summary.csv").string()) == first);
    CHECK(slurp((dir / "trials.csv").string()) == first_trials);

    // parallel execution produces the same bytes as the serial run
    cfg.montecarlo.threads = 4;
    run_montecarlo(cfg);
    CHECK(slurp((dir / "summary.csv").string()) == first);
    CHECK(slurp((dir / "trials.csv").string()) == first_trials);

    std::filesystem::remove_all(dir);
}
