// Copyright 2026 The uembed Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "uembed/config.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "uembed/error.h"
#include "uembed/maps.h"

namespace uembed {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_list(std::string_view v) {
  std::vector<std::string_view> out;
  while (true) {
    size_t c = v.find(',');
    out.push_back(trim(v.substr(0, c)));
    if (c == std::string_view::npos) break;
    v = v.substr(c + 1);
  }
  for (auto s : out)
    if (s.empty()) throw std::invalid_argument("empty list element");
  return out;
}

double to_real(std::string_view s) {
  double v = 0.0;
  auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size() || !std::isfinite(v))
    throw std::invalid_argument("expected a finite number, got '" + std::string(s) + "'");
  return v;
}

uint64_t to_uint(std::string_view s) {
  uint64_t v = 0;
  auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size())
    throw std::invalid_argument("expected a nonnegative integer, got '" + std::string(s) + "'");
  return v;
}

int to_int(std::string_view s) {
  int v = 0;
  auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size())
    throw std::invalid_argument("expected an integer, got '" + std::string(s) + "'");
  return v;
}

using Setter = std::function<void(ExperimentConfig&, std::string_view)>;

template <typename T, typename F>
Setter list_of(std::vector<T> ExperimentConfig::*field, F conv) {
  return [field, conv](ExperimentConfig& c, std::string_view v) {
    std::vector<T> out;
    for (auto item : split_list(v)) out.push_back(static_cast<T>(conv(item)));
    c.*field = std::move(out);
  };
}

Setter real(double ExperimentConfig::*field) {
  return [field](ExperimentConfig& c, std::string_view v) { c.*field = to_real(v); };
}

Setter count(size_t ExperimentConfig::*field) {
  return [field](ExperimentConfig& c, std::string_view v) { c.*field = to_uint(v); };
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"experiment", [](ExperimentConfig& c, std::string_view v) {
         c.kind = parse_experiment_kind(v);
       }},
      {"seed", [](ExperimentConfig& c, std::string_view v) { c.seed = to_uint(v); }},
      {"output_dir", [](ExperimentConfig& c, std::string_view v) { c.output_dir = v; }},
      {"N", count(&ExperimentConfig::N)},
      {"M", count(&ExperimentConfig::M)},
      {"pairs", count(&ExperimentConfig::pairs)},
      {"d_max", real(&ExperimentConfig::d_max)},
      {"map", [](ExperimentConfig& c, std::string_view v) {
         parse_map(v);
         c.map = v;
       }},
      {"family", [](ExperimentConfig& c, std::string_view v) { c.family = parse_family(v); }},
      {"scale", real(&ExperimentConfig::scale)},
      {"scale_list", list_of(&ExperimentConfig::scale_list, to_real)},
      {"delta", real(&ExperimentConfig::delta)},
      {"delta_list", list_of(&ExperimentConfig::delta_list, to_real)},
      {"bits_list", list_of(&ExperimentConfig::bits_list, to_int)},
      {"m_list", list_of(&ExperimentConfig::m_list, to_uint)},
      {"quant_families", list_of(&ExperimentConfig::quant_families,
                                 [](std::string_view s) { return std::string(s); })},
      {"multibit_period", real(&ExperimentConfig::multibit_period)},
      {"fail_prob", real(&ExperimentConfig::fail_prob)},
      {"eps", real(&ExperimentConfig::eps)},
      {"clusters", count(&ExperimentConfig::clusters)},
      {"points_per_cluster", count(&ExperimentConfig::points_per_cluster)},
      {"cluster_noise", real(&ExperimentConfig::cluster_noise)},
      {"neighbors", count(&ExperimentConfig::neighbors)},
      {"trials", count(&ExperimentConfig::trials)},
      {"extreme_delta", real(&ExperimentConfig::extreme_delta)},
      {"q_list", list_of(&ExperimentConfig::q_list, to_real)},
      {"eps_list", list_of(&ExperimentConfig::eps_list, to_real)},
      {"hbar", real(&ExperimentConfig::hbar)},
      {"n_list", list_of(&ExperimentConfig::n_list, to_real)},
      {"r_ratio_list", list_of(&ExperimentConfig::r_ratio_list, to_real)},
      {"mc_trials", count(&ExperimentConfig::mc_trials)},
      {"c0", real(&ExperimentConfig::c0)},
      {"points", count(&ExperimentConfig::points)},
  };
  return table;
}

}  // namespace

ExperimentKind parse_experiment_kind(std::string_view name) {
  if (name == "design_sim") return ExperimentKind::kDesignSim;
  if (name == "quantization_sim") return ExperimentKind::kQuantizationSim;
  if (name == "universal_scatter") return ExperimentKind::kUniversalScatter;
  if (name == "retrieval") return ExperimentKind::kRetrieval;
  if (name == "bounds_sweep") return ExperimentKind::kBoundsSweep;
  if (name == "map_eval") return ExperimentKind::kMapEval;
  throw std::invalid_argument("unknown experiment kind '" + std::string(name) + "'");
}

std::string experiment_kind_name(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::kDesignSim: return "design_sim";
    case ExperimentKind::kQuantizationSim: return "quantization_sim";
    case ExperimentKind::kUniversalScatter: return "universal_scatter";
    case ExperimentKind::kRetrieval: return "retrieval";
    case ExperimentKind::kBoundsSweep: return "bounds_sweep";
    case ExperimentKind::kMapEval: return "map_eval";
  }
  return "?";
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& [name, _] : setters()) k.push_back(name);
    return k;
  }();
  return keys;
}

ExperimentConfig parse_config_text(std::string_view text) {
  ExperimentConfig cfg;
  std::map<std::string, int> first_line;
  int line_no = 0;
  while (!text.empty()) {
    ++line_no;
    size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view() : text.substr(nl + 1);
    if (size_t hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    size_t eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError("expected 'key = value'", line_no);
    std::string key(trim(line.substr(0, eq)));
    std::string_view value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("missing key before '='", line_no);
    auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError("unknown key '" + key + "'", line_no);
    if (auto prev = first_line.find(key); prev != first_line.end())
      throw ConfigError("duplicate key '" + key + "' (first set on line " +
                            std::to_string(prev->second) + ")",
                        line_no);
    if (value.empty()) throw ConfigError("empty value for '" + key + "'", line_no);
    try {
      it->second(cfg, value);
    } catch (const std::exception& e) {
      throw ConfigError("bad value for '" + key + "': " + e.what(), line_no);
    }
    first_line[key] = line_no;
    cfg.keys_set.insert(key);
  }
  return cfg;
}

ExperimentConfig parse_config(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_config_text(ss.str());
}

void validate_config(const ExperimentConfig& c) {
  auto positive = [](double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw ConfigError(std::string(what) + " must be positive");
  };
  auto nonempty = [](size_t n, const char* what) {
    if (n == 0) throw ConfigError(std::string(what) + " must not be empty");
  };
  if (c.N == 0 || c.M == 0 || c.pairs == 0) throw ConfigError("N, M and pairs must be positive");
  positive(c.d_max, "d_max");
  positive(c.scale, "scale");
  positive(c.delta, "delta");
  positive(c.multibit_period, "multibit_period");
  positive(c.eps, "eps");
  positive(c.hbar, "hbar");
  positive(c.extreme_delta, "extreme_delta");
  positive(c.cluster_noise, "cluster_noise");
  if (!(c.fail_prob > 0.0 && c.fail_prob < 1.0)) throw ConfigError("fail_prob must be in (0, 1)");
  if (!(c.c0 > 0.0)) throw ConfigError("c0 must be positive");
  nonempty(c.scale_list.size(), "scale_list");
  nonempty(c.bits_list.size(), "bits_list");
  nonempty(c.quant_families.size(), "quant_families");
  nonempty(c.q_list.size(), "q_list");
  nonempty(c.eps_list.size(), "eps_list");
  nonempty(c.n_list.size(), "n_list");
  nonempty(c.r_ratio_list.size(), "r_ratio_list");
  for (double v : c.scale_list) positive(v, "scale_list entries");
  for (double v : c.delta_list) positive(v, "delta_list entries");
  for (double v : c.eps_list) positive(v, "eps_list entries");
  for (double v : c.r_ratio_list) positive(v, "r_ratio_list entries");
  for (double v : c.n_list)
    if (!(v >= 1.0) || v != std::floor(v)) throw ConfigError("n_list entries must be integers >= 1");
  for (double v : c.q_list)
    if (!(v >= 2.0)) throw ConfigError("q_list entries must be at least 2");
  for (int b : c.bits_list)
    if (b < 1 || b > 16) throw ConfigError("bits_list entries must be in [1, 16]");
  for (size_t m : c.m_list)
    if (m == 0) throw ConfigError("m_list entries must be positive");
  for (const auto& f : c.quant_families)
    if (f != "mixture" && f != "multibit")
      throw ConfigError("quant_families entries must be 'mixture' or 'multibit'");
  if (c.clusters < 2 || c.points_per_cluster == 0 || c.neighbors == 0 || c.trials == 0)
    throw ConfigError("retrieval needs clusters >= 2 and positive points, neighbors, trials");
  if (c.mc_trials == 0 || c.points < 2) throw ConfigError("mc_trials and points must be positive");
}

}  // namespace uembed
