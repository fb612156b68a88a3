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

#ifndef raysim_io_H
#define raysim_io_H

#include "raysim/sensing.hpp"
#include "raysim/signal_model.hpp"

#include <string>
#include <vector>

namespace raysim
{

// Flat binary tensor file: magic "RSTN", u32 version, u8 kind, three u64
// dimensions (chains, subcarriers, symbols), then little-endian float64
// pairs (re, im) with the chain index fastest, then subcarrier, then symbol.
void write_tensor(const std::string& path, const SignalTensor& tensor);
SignalTensor read_tensor(const std::string& path);

// Number formatting shared by all CSV writers (shortest round-trippable-ish
// form, stable across runs).
std::string csv_num(double v);

void write_scenario_csv(const std::string& path, const std::vector<PathParams>& paths);
void write_spectrum_csv(const std::string& path, const MusicSpectrum& spectrum);
void write_dd_map_csv(const std::string& path, const DelayDopplerMap& map,
                      const OfdmConfig& ofdm);
void write_estimates_csv(const std::string& path, const EstimationResult& result);

} // namespace raysim

#endif
