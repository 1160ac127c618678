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

#include "nhnqs/run_config.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include <openssl/sha.h>

#include "nhnqs/checkpoint.hpp"
#include "nhnqs/errors.hpp"

namespace nhnqs {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

int to_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long r = std::stol(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return static_cast<int>(r);
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected an integer, got '" + v + "'");
  }
}

double to_real(const std::string& key, const std::string& v) {
  try {
    return parse_double(v);
  } catch (const ConfigError&) {
    throw ConfigError(key + ": expected a number, got '" + v + "'");
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "on") return true;
  if (v == "false" || v == "0" || v == "off") return false;
  throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

std::string from_bool(bool b) { return b ? "true" : "false"; }

struct Field {
  const char* key;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&)> set;
};

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      {"architecture", [](const RunConfig& c) { return to_string(c.architecture); },
       [](RunConfig& c, const std::string& v) { c.architecture = parse_architecture(v); }},
      {"n", [](const RunConfig& c) { return std::to_string(c.n); },
       [](RunConfig& c, const std::string& v) { c.n = to_int("n", v); }},
      {"eta", [](const RunConfig& c) { return format_double(c.eta); },
       [](RunConfig& c, const std::string& v) { c.eta = to_real("eta", v); }},
      {"xi", [](const RunConfig& c) { return c.xi ? format_double(*c.xi) : std::string("auto"); },
       [](RunConfig& c, const std::string& v) {
         if (v == "auto") {
           c.xi.reset();
         } else {
           c.xi = to_real("xi", v);
         }
       }},
      {"j", [](const RunConfig& c) { return format_double(c.j); },
       [](RunConfig& c, const std::string& v) { c.j = to_real("j", v); }},
      {"boundary", [](const RunConfig& c) { return to_string(c.boundary); },
       [](RunConfig& c, const std::string& v) { c.boundary = parse_boundary(v); }},
      {"seed", [](const RunConfig& c) { return std::to_string(c.seed); },
       [](RunConfig& c, const std::string& v) {
         try {
           std::size_t pos = 0;
           c.seed = std::stoull(v, &pos);
           if (pos != v.size()) throw std::invalid_argument(v);
         } catch (const std::exception&) {
           throw ConfigError("seed: expected an unsigned integer, got '" + v + "'");
         }
       }},
      {"samples", [](const RunConfig& c) { return std::to_string(c.samples); },
       [](RunConfig& c, const std::string& v) { c.samples = to_int("samples", v); }},
      {"steps", [](const RunConfig& c) { return std::to_string(c.steps); },
       [](RunConfig& c, const std::string& v) { c.steps = to_int("steps", v); }},
      {"learning_rate", [](const RunConfig& c) { return format_double(c.learning_rate); },
       [](RunConfig& c, const std::string& v) { c.learning_rate = to_real("learning_rate", v); }},
      {"optimizer", [](const RunConfig& c) { return c.optimizer; },
       [](RunConfig& c, const std::string& v) { c.optimizer = v; }},
      {"hidden", [](const RunConfig& c) { return std::to_string(c.hidden); },
       [](RunConfig& c, const std::string& v) { c.hidden = to_int("hidden", v); }},
      {"layers", [](const RunConfig& c) { return std::to_string(c.layers); },
       [](RunConfig& c, const std::string& v) { c.layers = to_int("layers", v); }},
      {"alpha", [](const RunConfig& c) { return format_double(c.alpha); },
       [](RunConfig& c, const std::string& v) { c.alpha = to_real("alpha", v); }},
      {"log_offset", [](const RunConfig& c) { return format_double(c.log_offset); },
       [](RunConfig& c, const std::string& v) { c.log_offset = to_real("log_offset", v); }},
      {"cell", [](const RunConfig& c) { return to_string(c.cell); },
       [](RunConfig& c, const std::string& v) { c.cell = parse_cell(v); }},
      {"phase_head", [](const RunConfig& c) { return from_bool(c.phase_head); },
       [](RunConfig& c, const std::string& v) { c.phase_head = to_bool("phase_head", v); }},
      {"pt_symmetric",
       [](const RunConfig& c) { return c.pt_symmetric ? from_bool(*c.pt_symmetric) : std::string("auto"); },
       [](RunConfig& c, const std::string& v) {
         if (v == "auto") {
           c.pt_symmetric.reset();
         } else {
           c.pt_symmetric = to_bool("pt_symmetric", v);
         }
       }},
      {"target", [](const RunConfig& c) { return c.target; },
       [](RunConfig& c, const std::string& v) {
         parse_target(v);
         c.target = v;
       }},
      {"regularizer", [](const RunConfig& c) { return to_string(c.regularizer); },
       [](RunConfig& c, const std::string& v) { c.regularizer = parse_regularizer(v); }},
      {"sampler", [](const RunConfig& c) { return c.sampler; },
       [](RunConfig& c, const std::string& v) { c.sampler = v; }},
      {"burn_in", [](const RunConfig& c) { return std::to_string(c.burn_in); },
       [](RunConfig& c, const std::string& v) { c.burn_in = to_int("burn_in", v); }},
      {"thinning", [](const RunConfig& c) { return std::to_string(c.thinning); },
       [](RunConfig& c, const std::string& v) { c.thinning = to_int("thinning", v); }},
      {"clip_norm", [](const RunConfig& c) { return format_double(c.clip_norm); },
       [](RunConfig& c, const std::string& v) { c.clip_norm = to_real("clip_norm", v); }},
      {"eval_batches", [](const RunConfig& c) { return std::to_string(c.eval_batches); },
       [](RunConfig& c, const std::string& v) { c.eval_batches = to_int("eval_batches", v); }},
      {"jobs", [](const RunConfig& c) { return std::to_string(c.jobs); },
       [](RunConfig& c, const std::string& v) { c.jobs = to_int("jobs", v); }},
  };
  return table;
}

}  // namespace

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& f : fields()) keys.emplace_back(f.key);
  return keys;
}

ModelParams RunConfig::model() const { return {n, j, eta, resolved_xi(), boundary}; }

AnsatzConfig RunConfig::ansatz() const {
  AnsatzConfig a = default_ansatz_config(architecture, n, boundary);
  a.hidden = hidden;
  a.cell = cell;
  a.phase_head = phase_head;
  if (pt_symmetric) a.pt_symmetric = *pt_symmetric;
  return a;
}

SamplerConfig RunConfig::sampler_config() const {
  SamplerConfig s;
  s.batch = samples;
  s.seed = derive_seed(seed, "sampler");
  s.burn_in = burn_in;
  s.thinning = thinning;
  s.jobs = jobs;
  return s;
}

TrainConfig RunConfig::train_config() const {
  TrainConfig t;
  t.steps = steps;
  t.learning_rate = learning_rate;
  t.alpha = alpha;
  t.regularizer = regularizer;
  t.seed = seed;
  t.target = parse_target(target);
  t.clip_norm = clip_norm;
  t.eval_batches = eval_batches;
  t.jobs = jobs;
  return t;
}

std::vector<std::pair<std::string, std::string>> RunConfig::entries() const {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& f : fields()) out.emplace_back(f.key, f.get(*this));
  return out;
}

void RunConfig::set(const std::string& key, const std::string& value) {
  for (const auto& f : fields()) {
    if (key == f.key) {
      f.set(*this, value);
      return;
    }
  }
  throw ConfigError("unknown config key '" + key + "'");
}

void RunConfig::validate() const {
  model();
  if (optimizer != "adam") throw ConfigError("only the adam optimizer is available");
  if (layers != 1) throw ConfigError("only single-hidden-layer networks are available (layers = 1)");
  if (log_offset != Rnn::kLogOffset) throw ConfigError("the log-probability offset is fixed at 1e-15");
  if (hidden < 1) throw ConfigError("hidden must be >= 1");
  if (jobs < 1) throw ConfigError("jobs must be >= 1");
  nhnqs::validate(sampler_config());
  nhnqs::validate(train_config());
  if (sampler != "auto") make_sampler(sampler, architecture, sampler_config());
}

RunConfig parse_config(std::istream& is, RunConfig base) {
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    base.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return base;
}

RunConfig load_config(const std::string& path, RunConfig base) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read config " + path);
  return parse_config(is, std::move(base));
}

std::string config_text(const RunConfig& c) {
  std::string out;
  for (const auto& [k, v] : c.entries()) out += k + " = " + v + "\n";
  return out;
}

std::string git_blob_hash(const std::string& data) {
  const std::string blob = "blob " + std::to_string(data.size()) + std::string(1, '\0') + data;
  unsigned char digest[SHA_DIGEST_LENGTH];
  SHA1(reinterpret_cast<const unsigned char*>(blob.data()), blob.size(), digest);
  std::ostringstream os;
  os << std::hex << std::setfill('0');
  for (unsigned char b : digest) os << std::setw(2) << static_cast<int>(b);
  return os.str();
}

Metadata make_metadata(const std::string& command, const RunConfig& config, std::map<std::string, std::string> extra,
                       const std::vector<std::string>& inputs) {
  Metadata m{command, config, std::move(extra), ""};
  std::string all = "command " + command + "\n" + config_text(config);
  for (const auto& [k, v] : m.extra) all += k + " = " + v + "\n";
  for (const auto& s : inputs) all += s;
  m.input_hash = git_blob_hash(all);
  return m;
}

void write_metadata(std::ostream& os, const Metadata& m) {
  os << "# nhnqs " << kVersion << "\n";
  os << "# command: " << m.command << "\n";
  os << "# seed: " << m.config.seed << "\n";
  os << "# input_hash: " << m.input_hash << "\n";
  for (const auto& [k, v] : m.config.entries()) os << "# config " << k << " = " << v << "\n";
  for (const auto& [k, v] : m.extra) os << "# extra " << k << " = " << v << "\n";
  os << "# end-metadata\n";
}

Metadata read_metadata(std::istream& is) {
  Metadata m;
  std::string line;
  bool ended = false;
  while (std::getline(is, line)) {
    if (line == "# end-metadata") {
      ended = true;
      break;
    }
    if (line.rfind("# command: ", 0) == 0) {
      m.command = line.substr(11);
    } else if (line.rfind("# input_hash: ", 0) == 0) {
      m.input_hash = line.substr(14);
    } else if (line.rfind("# config ", 0) == 0 || line.rfind("# extra ", 0) == 0) {
      const bool is_config = line[2] == 'c';
      const std::string body = line.substr(is_config ? 9 : 8);
      const auto eq = body.find(" = ");
      if (eq == std::string::npos) throw ConfigError("malformed metadata line: " + line);
      if (is_config) {
        m.config.set(body.substr(0, eq), body.substr(eq + 3));
      } else {
        m.extra[body.substr(0, eq)] = body.substr(eq + 3);
      }
    } else if (line.empty() || line[0] != '#') {
      break;
    }
  }
  if (!ended) throw ConfigError("metadata block is not terminated");
  return m;
}

}  // namespace nhnqs
