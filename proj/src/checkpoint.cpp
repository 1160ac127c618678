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

#include "nhnqs/checkpoint.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <vector>

#include "nhnqs/errors.hpp"

namespace nhnqs {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return {buf, res.ptr};
}

double parse_double(const std::string& s) {
  double v = 0.0;
  const char* end = s.data() + s.size();
  const auto res = std::from_chars(s.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) throw ConfigError("not a number: '" + s + "'");
  return v;
}

namespace {

constexpr const char* kMagic = "# nhnqs checkpoint";

std::int64_t parse_int(const std::string& s) {
  std::int64_t v = 0;
  const char* end = s.data() + s.size();
  const auto res = std::from_chars(s.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) throw ConfigError("not an integer: '" + s + "'");
  return v;
}

std::uint64_t parse_uint(const std::string& s) {
  std::uint64_t v = 0;
  const char* end = s.data() + s.size();
  const auto res = std::from_chars(s.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) throw ConfigError("not an unsigned integer: '" + s + "'");
  return v;
}

}  // namespace

void write_checkpoint(std::ostream& os, const Ansatz& ansatz, const ModelParams& model, std::uint64_t seed,
                      std::int64_t step) {
  const AnsatzConfig& c = ansatz.config();
  if (c.n != model.n()) throw InvalidConfigError("ansatz and model disagree on N");
  os << kMagic << "\n";
  os << "format 1\n";
  os << "architecture " << to_string(c.architecture) << "\n";
  os << "n " << model.n() << "\n";
  os << "eta " << format_double(model.eta()) << "\n";
  os << "xi " << format_double(model.xi()) << "\n";
  os << "j " << format_double(model.j()) << "\n";
  os << "boundary " << to_string(model.boundary()) << "\n";
  os << "seed " << seed << "\n";
  os << "step " << step << "\n";
  os << "hidden " << c.hidden << "\n";
  os << "cell " << to_string(c.cell) << "\n";
  os << "phase_head " << (c.phase_head ? 1 : 0) << "\n";
  os << "pt_symmetric " << (c.pt_symmetric ? 1 : 0) << "\n";
  const RealVector& theta = ansatz.params();
  for (const auto& b : ansatz.layout()) {
    os << "array " << b.name << " " << b.rows << " " << b.cols << "\n";
    for (Eigen::Index k = 0; k < b.count(); ++k) {
      const double im = b.complex ? theta(b.offset + b.count() + k) : 0.0;
      os << format_double(theta(b.offset + k)) << " " << format_double(im) << "\n";
    }
  }
  os << "end\n";
}

Checkpoint read_checkpoint(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kMagic) throw ConfigError("not a checkpoint file");
  std::map<std::string, std::string> header;
  struct Array {
    int rows, cols;
    std::vector<std::pair<double, double>> values;
  };
  std::map<std::string, Array> arrays;
  bool ended = false;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "end") {
      ended = true;
      break;
    }
    if (key == "array") {
      std::string name;
      Array a{};
      if (!(ls >> name >> a.rows >> a.cols) || a.rows < 0 || a.cols < 0) {
        throw ConfigError("malformed array line: " + line);
      }
      for (int k = 0; k < a.rows * a.cols; ++k) {
        std::string re, im;
        if (!std::getline(is, line)) throw ConfigError("truncated array " + name);
        std::istringstream vs(line);
        if (!(vs >> re >> im)) throw ConfigError("malformed value in array " + name);
        a.values.emplace_back(parse_double(re), parse_double(im));
      }
      arrays[name] = std::move(a);
      continue;
    }
    std::string value;
    ls >> value;
    header[key] = value;
  }
  if (!ended) throw ConfigError("checkpoint is missing its end marker");
  auto get = [&header](const std::string& k) {
    auto it = header.find(k);
    if (it == header.end()) throw ConfigError("checkpoint header lacks '" + k + "'");
    return it->second;
  };
  if (get("format") != "1") throw ConfigError("unsupported checkpoint format " + get("format"));

  AnsatzConfig c;
  c.architecture = parse_architecture(get("architecture"));
  c.n = static_cast<int>(parse_int(get("n")));
  c.hidden = static_cast<int>(parse_int(get("hidden")));
  c.cell = parse_cell(get("cell"));
  c.phase_head = parse_int(get("phase_head")) != 0;
  c.pt_symmetric = parse_int(get("pt_symmetric")) != 0;
  Checkpoint ck{ModelParams(c.n, parse_double(get("j")), parse_double(get("eta")), parse_double(get("xi")),
                            parse_boundary(get("boundary"))),
                parse_uint(get("seed")), parse_int(get("step")), make_ansatz(c)};

  RealVector theta = ck.ansatz->params();
  for (const auto& b : ck.ansatz->layout()) {
    auto it = arrays.find(b.name);
    if (it == arrays.end()) throw ConfigError("checkpoint lacks array " + b.name);
    const Array& a = it->second;
    if (a.rows != b.rows || a.cols != b.cols) throw ConfigError("array " + b.name + " has the wrong shape");
    for (Eigen::Index k = 0; k < b.count(); ++k) {
      const auto [re, im] = a.values[static_cast<std::size_t>(k)];
      theta(b.offset + k) = re;
      if (b.complex) {
        theta(b.offset + b.count() + k) = im;
      } else if (im != 0.0) {
        throw ConfigError("array " + b.name + " is real but has imaginary entries");
      }
    }
    arrays.erase(it);
  }
  if (!arrays.empty()) throw ConfigError("checkpoint has unknown array " + arrays.begin()->first);
  ck.ansatz->set_params(theta);
  return ck;
}

void save_checkpoint(const std::filesystem::path& path, const Ansatz& ansatz, const ModelParams& model,
                     std::uint64_t seed, std::int64_t step) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write " + path.string());
  write_checkpoint(os, ansatz, model, seed, step);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read " + path.string());
  return read_checkpoint(is);
}

}  // namespace nhnqs
