// Copyright 2026 The htm Authors.
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

#include "htm/config.hpp"

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>

namespace htm {

namespace {

std::string trim(const std::string& s) {
  const char* ws = " \t\r\n";
  auto b = s.find_first_not_of(ws);
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(ws) - b + 1);
}

template <class Int>
Int parse_int(const std::string& key, const std::string& v) {
  Int out{};
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) {
    throw ConfigError("bad integer for " + key + ": " + v);
  }
  return out;
}

double parse_double(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const double out = std::strtod(v.c_str(), &end);
  if (v.empty() || end != v.c_str() + v.size()) throw ConfigError("bad number for " + key + ": " + v);
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "no") return false;
  throw ConfigError("bad boolean for " + key + ": " + v);
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Key binding: parse into the field, and print the field back.
struct Binding {
  std::function<void(const std::string&)> set;
  std::function<std::string()> get;
};

template <class T>
Binding bind(const std::string& key, T& field) {
  if constexpr (std::is_same_v<T, bool>) {
    return {[&field, key](const std::string& v) { field = parse_bool(key, v); },
            [&field] { return std::string(field ? "true" : "false"); }};
  } else if constexpr (std::is_integral_v<T>) {
    return {[&field, key](const std::string& v) { field = parse_int<T>(key, v); },
            [&field] { return std::to_string(field); }};
  } else {
    return {[&field, key](const std::string& v) { field = parse_double(key, v); },
            [&field] { return fmt(field); }};
  }
}

std::map<std::string, Binding> bindings(TrainConfig& c) {
  std::map<std::string, Binding> b;
  b["batch_size"] = bind("batch_size", c.batch_size);
  b["learning_rate"] = bind("learning_rate", c.learning_rate);
  b["weight_decay"] = bind("weight_decay", c.weight_decay);
  b["decoupled_weight_decay"] = bind("decoupled_weight_decay", c.decoupled_weight_decay);
  b["iterations"] = bind("iterations", c.iterations);
  b["lambda"] = bind("lambda", c.lambda);
  b["beta"] = bind("beta", c.beta);
  b["K"] = bind("K", c.stages);
  b["s"] = bind("s", c.pool_divisor);
  b["L"] = bind("L", c.kernel_size);
  b["F"] = bind("F", c.encoder_dim);
  b["F_g"] = bind("F_g", c.hidden_dim);
  b["keep_rate"] = bind("keep_rate", c.keep_rate);
  b["t_max_frames"] = bind("t_max_frames", c.t_max_frames);
  b["tfidf_eps"] = bind("tfidf_eps", c.tfidf_eps);
  b["seed"] = bind("seed", c.seed);
  b["decode_background"] = bind("decode_background", c.decode_background);
  b["background_share"] = bind("background_share", c.background_share);
  b["duration_factor"] = bind("duration_factor", c.duration_factor);
  b["top_m"] = bind("top_m", c.top_m);
  b["action_head_iterations"] = bind("action_head_iterations", c.action_head_iterations);
  b["action_head_lr"] = bind("action_head_lr", c.action_head_lr);
  b["realign_rounds"] = bind("realign_rounds", c.realign_rounds);
  b["fusion.mode"] = {[&c](const std::string& v) { c.fusion_mode = parse_fusion_mode(v); },
                      [&c] { return fusion_mode_name(c.fusion_mode); }};
  return b;
}

std::map<std::string, Binding> bindings(SynthConfig& c) {
  std::map<std::string, Binding> b;
  b["n_tasks"] = bind("n_tasks", c.n_tasks);
  b["n_actions"] = bind("n_actions", c.n_actions);
  b["feature_dim"] = bind("feature_dim", c.feature_dim);
  b["videos_per_task"] = bind("videos_per_task", c.videos_per_task);
  b["test_videos_per_task"] = bind("test_videos_per_task", c.test_videos_per_task);
  b["grammars_per_task"] = bind("grammars_per_task", c.grammars_per_task);
  b["min_grammar_length"] = bind("min_grammar_length", c.min_grammar_length);
  b["max_grammar_length"] = bind("max_grammar_length", c.max_grammar_length);
  b["duration_mean"] = bind("duration_mean", c.duration_mean);
  b["min_duration"] = bind("min_duration", c.min_duration);
  b["noise_sigma"] = bind("noise_sigma", c.noise_sigma);
  b["background_prob"] = bind("background_prob", c.background_prob);
  b["task_pool_size"] = bind("task_pool_size", c.task_pool_size);
  b["seed"] = bind("seed", c.seed);
  return b;
}

template <class Cfg>
void apply_impl(Cfg& cfg, const KeyValues& kv) {
  auto b = bindings(cfg);
  for (const auto& [key, value] : kv) {
    auto it = b.find(key);
    if (it == b.end()) throw ConfigError("unknown config key: " + key);
    it->second.set(value);
  }
  cfg.validate();
}

template <class Cfg>
KeyValues dump_impl(const Cfg& cfg) {
  Cfg copy = cfg;
  KeyValues out;
  for (auto& [key, binding] : bindings(copy)) out[key] = binding.get();
  return out;
}

}  // namespace

void TrainConfig::validate() const {
  if (batch_size < 1 || iterations < 0 || stages < 1 || pool_divisor < 1 || encoder_dim < 1 ||
      hidden_dim < 1 || t_max_frames < 1 || top_m < 1 || action_head_iterations < 0 ||
      realign_rounds < 0) {
    throw ConfigError("integer hyperparameters must be positive");
  }
  if (kernel_size < 1 || kernel_size % 2 == 0) throw ConfigError("L must be odd");
  if (!(learning_rate > 0.0) || weight_decay < 0.0 || beta < 0.0 || !(action_head_lr > 0.0)) {
    throw ConfigError("learning rates must be positive and decay/beta non-negative");
  }
  if (lambda < 0.0 || lambda > 1.0) throw ConfigError("lambda must be in [0,1]");
  if (!(keep_rate > 0.0 && keep_rate <= 1.0)) throw ConfigError("keep_rate must be in (0,1]");
  if (background_share < 0.0 || background_share >= 1.0) {
    throw ConfigError("background_share must be in [0,1)");
  }
  if (!(duration_factor > 0.0)) throw ConfigError("duration_factor must be positive");
  if (!(tfidf_eps > 0.0)) throw ConfigError("tfidf_eps must be positive");
}

KeyValues read_key_values(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config: " + path.string());
  KeyValues kv;
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("expected key=value: " + line);
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

KeyValues parse_overrides(const std::vector<std::string>& items) {
  KeyValues kv;
  for (const auto& item : items) {
    auto eq = item.find('=');
    if (eq == std::string::npos) throw ConfigError("expected key=value: " + item);
    kv[trim(item.substr(0, eq))] = trim(item.substr(eq + 1));
  }
  return kv;
}

void apply(TrainConfig& cfg, const KeyValues& kv) { apply_impl(cfg, kv); }
void apply(SynthConfig& cfg, const KeyValues& kv) { apply_impl(cfg, kv); }
KeyValues to_key_values(const TrainConfig& cfg) { return dump_impl(cfg); }
KeyValues to_key_values(const SynthConfig& cfg) { return dump_impl(cfg); }

}  // namespace htm
