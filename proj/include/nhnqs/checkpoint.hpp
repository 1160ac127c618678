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
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <string>

#include "nhnqs/ansatz.hpp"
#include "nhnqs/spin_model.hpp"

namespace nhnqs {

// Shortest decimal text that parses back to the same double.
std::string format_double(double v);
double parse_double(const std::string& s);

struct Checkpoint {
  ModelParams model;
  std::uint64_t seed = 0;
  std::int64_t step = 0;
  std::unique_ptr<Ansatz> ansatz;
};

// Header {architecture, N, eta, xi, J, boundary, seed, step} and the
// architecture hyperparameters, then one block per parameter array:
//   array <name> <rows> <cols>
//   <re> <im>            (rows * cols lines, row-major)
void write_checkpoint(std::ostream& os, const Ansatz& ansatz, const ModelParams& model, std::uint64_t seed,
                      std::int64_t step);
Checkpoint read_checkpoint(std::istream& is);

void save_checkpoint(const std::filesystem::path& path, const Ansatz& ansatz, const ModelParams& model,
                     std::uint64_t seed, std::int64_t step);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace nhnqs
