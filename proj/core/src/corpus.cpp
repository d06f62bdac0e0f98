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

#include "htm/corpus.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_set>

namespace htm {

namespace fs = std::filesystem;

namespace {

int find_name(const std::vector<std::string>& names, const std::string& name) {
  auto it = std::find(names.begin(), names.end(), name);
  return it == names.end() ? -1 : static_cast<int>(it - names.begin());
}

std::string trim(const std::string& s) {
  const char* ws = " \t\r\n";
  auto b = s.find_first_not_of(ws);
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

std::vector<std::string> read_lines(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("missing file: " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    lines.push_back(line);
  }
  return lines;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(s);
  while (std::getline(ss, field, sep)) out.push_back(trim(field));
  return out;
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream ss(s);
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

void put_u32(std::ostream& out, std::uint32_t v) {
  std::array<char, 4> b{};
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFFu);
  out.write(b.data(), 4);
}

std::uint32_t get_u32(const unsigned char* p) {
  return std::uint32_t(p[0]) | (std::uint32_t(p[1]) << 8) | (std::uint32_t(p[2]) << 16) |
         (std::uint32_t(p[3]) << 24);
}

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

}  // namespace

int Vocabularies::task_index(const std::string& name) const { return find_name(tasks, name); }
int Vocabularies::action_index(const std::string& name) const { return find_name(actions, name); }
int Vocabularies::attribute_index(const std::string& name) const {
  return find_name(attributes, name);
}

bool Vocabularies::identity_attributes() const {
  if (num_attributes() != num_actions() - 1) return false;
  for (int a = 1; a < num_actions(); ++a) {
    if (action_to_attrs[a] != std::vector<int>{a - 1}) return false;
  }
  return true;
}

Vocabularies Vocabularies::identity(std::vector<std::string> task_names,
                                    std::vector<std::string> action_names) {
  Vocabularies v;
  v.tasks = std::move(task_names);
  if (action_names.empty() || action_names.front() != kBackgroundName) {
    action_names.insert(action_names.begin(), kBackgroundName);
  }
  v.actions = std::move(action_names);
  v.action_to_attrs.resize(v.actions.size());
  for (std::size_t a = 1; a < v.actions.size(); ++a) {
    v.attributes.push_back(v.actions[a]);
    v.action_to_attrs[a] = {static_cast<int>(a - 1)};
  }
  return v;
}

void Vocabularies::validate() const {
  auto check_unique = [](const std::vector<std::string>& names, const char* what) {
    std::unordered_set<std::string> seen;
    for (const auto& n : names) {
      if (!seen.insert(n).second) throw DataError(std::string("duplicate ") + what + " name: " + n);
    }
  };
  check_unique(tasks, "task");
  check_unique(actions, "action");
  check_unique(attributes, "attribute");
  if (actions.empty() || actions.front() != kBackgroundName) {
    throw DataError("action vocabulary must start with SIL");
  }
  if (action_to_attrs.size() != actions.size()) throw DataError("action_to_attrs size mismatch");
  for (std::size_t a = 1; a < actions.size(); ++a) {
    if (action_to_attrs[a].empty()) throw DataError("action maps to no attribute: " + actions[a]);
    for (int j : action_to_attrs[a]) {
      if (j < 0 || j >= num_attributes()) throw DataError("attribute index out of range");
    }
  }
}

void Corpus::validate() const {
  vocab.validate();
  std::unordered_set<std::string> ids;
  for (const auto& v : videos) {
    if (!ids.insert(v.id).second) throw DataError("duplicate video id: " + v.id);
    if (v.num_frames() < 1) throw DataError("video has no frames: " + v.id);
    if (v.feature_dim() != feature_dim()) throw DataError("feature dimension mismatch: " + v.id);
    if (v.task < 0 || v.task >= vocab.num_tasks()) throw DataError("task out of range: " + v.id);
    for (int a : v.transcript) {
      if (a <= kBackground || a >= vocab.num_actions()) {
        throw DataError("transcript action out of range: " + v.id);
      }
    }
    if (v.attributes != attributes_of(v.transcript, vocab)) {
      throw DataError("attribute set inconsistent with transcript: " + v.id);
    }
    if (v.frame_labels) {
      if (static_cast<Index>(v.frame_labels->size()) != v.num_frames()) {
        throw DataError("frame label count mismatch: " + v.id);
      }
      if (non_background_runs(*v.frame_labels) != v.transcript) {
        throw DataError("frame labels disagree with transcript: " + v.id);
      }
    }
  }
}

Matrix read_feature_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("missing file: " + path.string());
  std::vector<unsigned char> buf((std::istreambuf_iterator<char>(in)), {});
  if (buf.size() < 12 || std::memcmp(buf.data(), "WTE1", 4) != 0) {
    throw DataError("malformed header in feature file: " + path.string());
  }
  const std::uint32_t dim = get_u32(buf.data() + 4);
  const std::uint32_t frames = get_u32(buf.data() + 8);
  const std::size_t expected = std::size_t(dim) * frames * 4;
  if (buf.size() - 12 < expected) throw DataError("truncated feature file: " + path.string());
  if (buf.size() - 12 > expected) throw DataError("trailing bytes in feature file: " + path.string());
  Matrix m(dim, frames);
  const unsigned char* p = buf.data() + 12;
  for (std::uint32_t t = 0; t < frames; ++t) {
    for (std::uint32_t f = 0; f < dim; ++f, p += 4) {
      m(f, t) = static_cast<double>(std::bit_cast<float>(get_u32(p)));
    }
  }
  return m;
}

void write_feature_file(const fs::path& path, const Matrix& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write: " + path.string());
  out.write("WTE1", 4);
  put_u32(out, static_cast<std::uint32_t>(m.rows()));
  put_u32(out, static_cast<std::uint32_t>(m.cols()));
  for (Index t = 0; t < m.cols(); ++t) {
    for (Index f = 0; f < m.rows(); ++f) {
      put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(m(f, t))));
    }
  }
}

const std::vector<int>& decompose_attributes(int action, const Vocabularies& vocab) {
  return vocab.action_to_attrs.at(static_cast<std::size_t>(action));
}

std::set<int> attributes_of(const ActionSeq& transcript, const Vocabularies& vocab) {
  std::set<int> out;
  for (int a : transcript) {
    if (a == kBackground) continue;
    const auto& attrs = decompose_attributes(a, vocab);
    out.insert(attrs.begin(), attrs.end());
  }
  return out;
}

ActionSeq non_background_runs(const std::vector<int>& frame_labels) {
  ActionSeq runs;
  int prev = -1;
  for (int a : frame_labels) {
    if (a != prev && a != kBackground) runs.push_back(a);
    prev = a;
  }
  return runs;
}

namespace {

Corpus load_impl(const fs::path& manifest, const CorpusFiles& files, const Vocabularies* preset) {
  const fs::path base = manifest.parent_path();
  const auto lines = read_lines(manifest);

  Corpus corpus;
  Vocabularies& vocab = corpus.vocab;
  const bool fixed_tasks = preset != nullptr || !files.tasks.empty();
  const bool fixed_actions = preset != nullptr || !files.actions.empty();
  if (preset != nullptr) {
    vocab = *preset;
  } else {
    if (fixed_tasks) vocab.tasks = read_lines(files.tasks);
    vocab.actions = {kBackgroundName};
    if (fixed_actions) {
      for (auto& a : read_lines(files.actions)) {
        if (a != kBackgroundName) vocab.actions.push_back(a);
      }
    }
  }

  struct RawVideo {
    std::string id, task;
    fs::path features, transcript, labels;
  };
  std::vector<RawVideo> raw;
  std::unordered_set<std::string> ids;
  for (const auto& line : lines) {
    auto fields = split(line, ',');
    if (fields.size() != 4 && fields.size() != 5) {
      throw DataError("malformed manifest line: " + line);
    }
    if (!ids.insert(fields[0]).second) throw DataError("duplicate video id: " + fields[0]);
    RawVideo r{fields[0], fields[1], resolve(base, fields[2]), resolve(base, fields[3]), {}};
    if (fields.size() == 5 && !fields[4].empty()) r.labels = resolve(base, fields[4]);
    raw.push_back(std::move(r));
  }

  auto intern_action = [&](const std::string& name) {
    int idx = vocab.action_index(name);
    if (idx >= 0) return idx;
    if (fixed_actions) throw DataError("unknown action: " + name);
    vocab.actions.push_back(name);
    return vocab.num_actions() - 1;
  };

  for (const auto& r : raw) {
    VideoRecord v;
    v.id = r.id;
    v.task = vocab.task_index(r.task);
    if (v.task < 0) {
      if (fixed_tasks) throw DataError("unknown task: " + r.task);
      vocab.tasks.push_back(r.task);
      v.task = vocab.num_tasks() - 1;
    }
    v.features = read_feature_file(r.features);
    for (const auto& name : read_lines(r.transcript)) {
      int a = intern_action(name);
      if (a == kBackground) continue;
      v.transcript.push_back(a);
    }
    if (!r.labels.empty()) {
      std::vector<int> labels;
      for (const auto& name : read_lines(r.labels)) labels.push_back(intern_action(name));
      v.frame_labels = std::move(labels);
    }
    corpus.videos.push_back(std::move(v));
  }

  if (preset != nullptr) {
    // the preset vocabulary already carries its attribute map
  } else if (files.attributes.empty()) {
    vocab.action_to_attrs.assign(vocab.actions.size(), {});
    for (int a = 1; a < vocab.num_actions(); ++a) {
      vocab.attributes.push_back(vocab.actions[a]);
      vocab.action_to_attrs[a] = {a - 1};
    }
  } else {
    vocab.action_to_attrs.assign(vocab.actions.size(), {});
    std::vector<bool> seen(vocab.actions.size(), false);
    for (const auto& line : read_lines(files.attributes)) {
      auto toks = split_ws(line);
      if (toks.size() < 2) throw DataError("malformed attribute map line: " + line);
      int a = vocab.action_index(toks[0]);
      if (a < 0) {
        if (fixed_actions) throw DataError("attribute map names unknown action: " + toks[0]);
        continue;  // action absent from this corpus
      }
      if (a == kBackground) continue;
      seen[a] = true;
      std::vector<int> attrs;
      for (std::size_t i = 1; i < toks.size(); ++i) {
        int j = vocab.attribute_index(toks[i]);
        if (j < 0) {
          vocab.attributes.push_back(toks[i]);
          j = vocab.num_attributes() - 1;
        }
        if (std::find(attrs.begin(), attrs.end(), j) == attrs.end()) attrs.push_back(j);
      }
      vocab.action_to_attrs[a] = std::move(attrs);
    }
    for (int a = 1; a < vocab.num_actions(); ++a) {
      if (!seen[a]) throw DataError("attribute map omits action: " + vocab.actions[a]);
    }
  }

  for (auto& v : corpus.videos) v.attributes = attributes_of(v.transcript, vocab);
  corpus.validate();
  return corpus;
}

}  // namespace

Corpus load_corpus(const fs::path& manifest, const CorpusFiles& files) {
  return load_impl(manifest, files, nullptr);
}

Corpus load_corpus(const fs::path& manifest, const Vocabularies& vocab) {
  return load_impl(manifest, {}, &vocab);
}

void save_vocabularies(const Vocabularies& vocab, const fs::path& dir) {
  fs::create_directories(dir);
  std::ofstream tasks(dir / "tasks.txt");
  for (const auto& t : vocab.tasks) tasks << t << '\n';
  std::ofstream actions(dir / "actions.txt");
  for (const auto& a : vocab.actions) actions << a << '\n';
  std::ofstream attrs(dir / "attributes.map");
  for (int a = 1; a < vocab.num_actions(); ++a) {
    attrs << vocab.actions[a];
    for (int j : vocab.action_to_attrs[a]) attrs << ' ' << vocab.attributes[j];
    attrs << '\n';
  }
}

CorpusFiles vocabulary_files(const fs::path& dir) {
  return {dir / "tasks.txt", dir / "actions.txt", dir / "attributes.map"};
}

void save_corpus(const Corpus& corpus, const fs::path& dir, const std::string& name) {
  fs::create_directories(dir / "features");
  fs::create_directories(dir / "transcripts");
  fs::create_directories(dir / "labels");
  save_vocabularies(corpus.vocab, dir);
  std::ofstream manifest(dir / (name + ".manifest"));
  if (!manifest) throw DataError("cannot write manifest in " + dir.string());
  for (const auto& v : corpus.videos) {
    const std::string feat = "features/" + v.id + ".wte";
    const std::string trans = "transcripts/" + v.id + ".txt";
    write_feature_file(dir / feat, v.features);
    std::ofstream t(dir / trans);
    for (int a : v.transcript) t << corpus.vocab.actions[a] << '\n';
    manifest << v.id << ',' << corpus.vocab.tasks[v.task] << ',' << feat << ',' << trans;
    if (v.frame_labels) {
      const std::string lab = "labels/" + v.id + ".txt";
      std::ofstream l(dir / lab);
      for (int a : *v.frame_labels) l << corpus.vocab.actions[a] << '\n';
      manifest << ',' << lab;
    }
    manifest << '\n';
  }
}

}  // namespace htm
