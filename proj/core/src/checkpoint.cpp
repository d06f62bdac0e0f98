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

#include "htm/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "htm/training.hpp"

namespace htm {

namespace fs = std::filesystem;

namespace {

constexpr std::uint32_t kVersion = 1;

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFFu));
}

struct Reader {
  const std::string& buf;
  std::size_t pos = 0;

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t(static_cast<unsigned char>(buf[pos + i])) << (8 * i);
    pos += 4;
    return v;
  }
  std::string bytes(std::size_t n) {
    need(n);
    std::string s = buf.substr(pos, n);
    pos += n;
    return s;
  }
  void need(std::size_t n) const {
    if (pos + n > buf.size()) throw DataError("truncated checkpoint");
  }
};

// All real-valued state that travels as tensors, named.
template <class Model>
std::vector<TensorRef> all_tensors(Model& m) {
  auto& model = const_cast<ModelParams&>(m);
  std::vector<TensorRef> out = tensors(model.weights);
  for (auto& t : tensors(model.action_head)) out.push_back(t);
  auto add = [&](std::string name, auto& x) {
    if (x.size() > 0) out.push_back({std::move(name), x.data(), x.rows(), x.cols()});
  };
  add("tfidf.tf", model.tfidf.tf);
  add("tfidf.idf", model.tfidf.idf);
  add("tfidf.w", model.tfidf.w);
  add("tfidf.mask", model.tfidf.mask);
  add("stats.duration_lambda", model.stats.durations.lambda);
  add("stats.log_prior", model.stats.log_prior);
  return out;
}

std::string join(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + std::to_string(v[i]);
  return s;
}

std::vector<int> split_ints(const std::string& s) {
  std::istringstream in(s);
  std::vector<int> out;
  int v;
  while (in >> v) out.push_back(v);
  return out;
}

std::string real(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

void round_model_to_float(ModelParams& model) { round_to_float(all_tensors(model)); }

void save_checkpoint(const ModelParams& model, const fs::path& path) {
  std::ostringstream meta;
  const auto& w = model.weights;
  meta << "kernel_size=" << w.encoder.kernel_size << '\n'
       << "keep_rate=" << real(w.encoder.keep_rate) << '\n'
       << "s=" << w.shs.s << '\n'
       << "lambda=" << real(w.shs.lambda) << '\n'
       << "stages=" << w.ths.stages() << '\n'
       << "fusion.mode=" << fusion_mode_name(w.fusion.mode) << '\n'
       << "beta=" << real(w.fusion.beta) << '\n'
       << "tfidf_eps=" << real(model.tfidf.eps) << '\n'
       << "background=" << (model.stats.background ? 1 : 0) << '\n'
       << "background_share=" << real(model.stats.background_share) << '\n'
       << "d_max=" << model.stats.durations.d_max << '\n'
       << "t_max_frames=" << model.t_max_frames << '\n';
  for (const auto& t : model.vocab.tasks) meta << "task=" << t << '\n';
  for (const auto& a : model.vocab.actions) meta << "action=" << a << '\n';
  for (const auto& a : model.vocab.attributes) meta << "attribute=" << a << '\n';
  for (std::size_t a = 0; a < model.vocab.action_to_attrs.size(); ++a) {
    meta << "action_attrs=" << join(model.vocab.action_to_attrs[a]) << '\n';
  }
  const auto& g = model.stats.grammars;
  for (int i = 0; i < g.size(); ++i) {
    meta << "grammar=" << join(g.all[i]) << '\n' << "grammar_task=" << g.grammar_task[i] << '\n';
  }
  for (const auto& owned : g.by_task) meta << "task_grammars=" << join(owned) << '\n';

  std::string out = "WTM1";
  put_u32(out, kVersion);
  const std::string m = meta.str();
  put_u32(out, static_cast<std::uint32_t>(m.size()));
  out += m;
  const auto ts = all_tensors(model);
  put_u32(out, static_cast<std::uint32_t>(ts.size()));
  for (const auto& t : ts) {
    put_u32(out, static_cast<std::uint32_t>(t.name.size()));
    out += t.name;
    put_u32(out, static_cast<std::uint32_t>(t.rows));
    put_u32(out, static_cast<std::uint32_t>(t.cols));
    for (Index i = 0; i < t.size(); ++i) {
      put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(t.data[i])));
    }
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot write checkpoint: " + path.string());
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
}

ModelParams load_checkpoint(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError("missing file: " + path.string());
  const std::string buf((std::istreambuf_iterator<char>(f)), {});
  Reader r{buf};
  if (r.bytes(4) != "WTM1") throw DataError("not a model checkpoint: " + path.string());
  if (r.u32() != kVersion) throw DataError("unsupported checkpoint version");
  const std::string meta = r.bytes(r.u32());

  ModelParams m;
  std::map<std::string, std::string> scalars;
  std::istringstream lines(meta);
  std::string line;
  while (std::getline(lines, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw DataError("malformed checkpoint metadata");
    const std::string key = line.substr(0, eq), val = line.substr(eq + 1);
    if (key == "task") m.vocab.tasks.push_back(val);
    else if (key == "action") m.vocab.actions.push_back(val);
    else if (key == "attribute") m.vocab.attributes.push_back(val);
    else if (key == "action_attrs") m.vocab.action_to_attrs.push_back(split_ints(val));
    else if (key == "grammar") m.stats.grammars.all.push_back(split_ints(val));
    else if (key == "grammar_task") m.stats.grammars.grammar_task.push_back(std::stoi(val));
    else if (key == "task_grammars") m.stats.grammars.by_task.push_back(split_ints(val));
    else scalars[key] = val;
  }
  auto scalar = [&](const std::string& k) {
    auto it = scalars.find(k);
    if (it == scalars.end()) throw DataError("checkpoint metadata missing " + k);
    return it->second;
  };
  auto& w = m.weights;
  w.encoder.kernel_size = std::stoi(scalar("kernel_size"));
  w.encoder.keep_rate = std::stod(scalar("keep_rate"));
  w.shs.s = std::stoi(scalar("s"));
  w.shs.lambda = std::stod(scalar("lambda"));
  const int stages = std::stoi(scalar("stages"));
  w.ths.stage_weights.resize(stages);
  w.ths.stage_biases.resize(stages);
  w.fusion.mode = parse_fusion_mode(scalar("fusion.mode"));
  w.fusion.beta = std::stod(scalar("beta"));
  m.tfidf.eps = std::stod(scalar("tfidf_eps"));
  m.stats.background = scalar("background") == "1";
  m.stats.background_share = std::stod(scalar("background_share"));
  m.stats.durations.d_max = std::stoi(scalar("d_max"));
  m.t_max_frames = std::stoi(scalar("t_max_frames"));

  std::map<std::string, Matrix> loaded;
  const std::uint32_t count = r.u32();
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::string name = r.bytes(r.u32());
    const std::uint32_t rows = r.u32(), cols = r.u32();
    Matrix t(rows, cols);
    r.need(std::size_t(rows) * cols * 4);
    for (Index j = 0; j < t.size(); ++j) t.data()[j] = static_cast<double>(std::bit_cast<float>(r.u32()));
    loaded.emplace(name, std::move(t));
  }
  if (r.pos != buf.size()) throw DataError("trailing bytes in checkpoint");

  auto take = [&](const std::string& name, auto& dst, bool required) {
    auto it = loaded.find(name);
    if (it == loaded.end()) {
      if (required) throw DataError("checkpoint missing tensor " + name);
      return;
    }
    using T = std::decay_t<decltype(dst)>;
    if constexpr (std::is_same_v<T, Vector>) {
      dst = Eigen::Map<const Vector>(it->second.data(), it->second.size());
    } else {
      dst = it->second;
    }
  };
  take("encoder.g_weight", w.encoder.g_weight, true);
  take("encoder.g_bias", w.encoder.g_bias, true);
  take("encoder.kernels", w.encoder.kernels, true);
  take("shs.attr_weight", w.shs.attr_weight, true);
  take("shs.attr_bias", w.shs.attr_bias, true);
  take("shs.wc", w.shs.wc, true);
  for (int k = 0; k < stages; ++k) {
    take("ths.stage_weight." + std::to_string(k), w.ths.stage_weights[k], true);
    take("ths.stage_bias." + std::to_string(k), w.ths.stage_biases[k], true);
  }
  take("ths.w_total", w.ths.w_total, true);
  take("fusion.w1", w.fusion.w1, w.fusion.mode == FusionMode::kWeighted);
  take("fusion.w2", w.fusion.w2, w.fusion.mode == FusionMode::kWeighted);
  take("fusion.w_alpha", w.fusion.w_alpha, w.fusion.mode == FusionMode::kGated);
  take("action_head.weight", m.action_head.weight, false);
  take("action_head.bias", m.action_head.bias, false);
  take("tfidf.tf", m.tfidf.tf, true);
  take("tfidf.idf", m.tfidf.idf, true);
  take("tfidf.w", m.tfidf.w, true);
  take("tfidf.mask", m.tfidf.mask, true);
  take("stats.duration_lambda", m.stats.durations.lambda, false);
  take("stats.log_prior", m.stats.log_prior, false);
  m.vocab.validate();
  w.encoder.check();
  return m;
}

}  // namespace htm
