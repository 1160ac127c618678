// Copyright 2026 The nhnqs Authors - All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nhnqs/ansatz.hpp"
#include "nhnqs/sampling.hpp"
#include "nhnqs/series.hpp"
#include "nhnqs/spin_model.hpp"
#include "nhnqs/vmc.hpp"

namespace nhnqs {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kOutDirEnv = "NHNQS_OUT_DIR";

// Flat experiment configuration. Defaults follow the simulation tables:
// Adam, seed 111, 1024 samples, 1000 steps, lr 1e-2, 34 hidden units,
// one layer, alpha 0.1, log-probability offset 1e-15, xi = eta / 10, J = 1.
struct RunConfig {
  Architecture architecture = Architecture::kRnn;
  int n = 10;
  double eta = 1.6;
  std::optional<double> xi;  // unset: xi = eta / 10
  double j = 1.0;
  Boundary boundary = Boundary::kPeriodic;
  std::uint64_t seed = 111;
  int samples = 1024;
  int steps = 1000;
  double learning_rate = 1e-2;
  std::string optimizer = "adam";
  int hidden = 34;
  int layers = 1;
  double alpha = 0.1;
  double log_offset = 1e-15;
  RnnCell cell = RnnCell::kVanilla;
  bool phase_head = false;
  std::optional<bool> pt_symmetric;  // unset: on for open chains
  std::string target = "min-re";
  Regularizer regularizer = Regularizer::kImagMean;
  std::string sampler = "auto";
  int burn_in = 100;
  int thinning = 1;
  double clip_norm = 10.0;
  int eval_batches = 4;
  int jobs = 1;

  double resolved_xi() const { return xi ? *xi : eta / 10.0; }
  ModelParams model() const;
  AnsatzConfig ansatz() const;
  SamplerConfig sampler_config() const;
  TrainConfig train_config() const;

  // Every key in canonical order, values as text.
  std::vector<std::pair<std::string, std::string>> entries() const;
  void set(const std::string& key, const std::string& value);
  void validate() const;

  bool operator==(const RunConfig&) const = default;
};

std::vector<std::string> config_keys();

// key = value lines; '#' starts a comment.
RunConfig parse_config(std::istream& is, RunConfig base = {});
RunConfig load_config(const std::string& path, RunConfig base = {});
std::string config_text(const RunConfig& c);

// Lowercase hex SHA-1 of "blob <size>\0<data>", as git hashes file contents.
std::string git_blob_hash(const std::string& data);

// Header written at the top of every output file. `inputs` are extra
// strings (checkpoint contents, grids) folded into the input hash.
struct Metadata {
  std::string command;
  RunConfig config;
  std::map<std::string, std::string> extra;  // command-specific settings
  std::string input_hash;
};

Metadata make_metadata(const std::string& command, const RunConfig& config,
                       std::map<std::string, std::string> extra = {}, const std::vector<std::string>& inputs = {});
void write_metadata(std::ostream& os, const Metadata& m);
// Reads the leading '#' block written by write_metadata.
Metadata read_metadata(std::istream& is);

}  // namespace nhnqs
