// Copyright 2026 The g2t Authors.
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

#include "g2t/config.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace g2t {
namespace {

std::string Trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T ParseNumber(const std::string& key, const std::string& text) {
  T value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw std::invalid_argument("config " + key + ": cannot parse '" + text + "'");
  }
  return value;
}

bool ParseBool(const std::string& key, const std::string& text) {
  if (text == "1" || text == "true" || text == "on" || text == "yes") return true;
  if (text == "0" || text == "false" || text == "off" || text == "no") return false;
  throw std::invalid_argument("config " + key + ": expected a boolean, got '" + text + "'");
}

std::string Num(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

int TrainConfig::EffectiveCePretrainEpochs() const {
  if (ce_pretrain_epochs >= 0) return ce_pretrain_epochs;
  return epochs * 4 / 5;
}

void TrainConfig::Validate() const {
  auto fail = [](const std::string& m) { throw std::invalid_argument("config: " + m); };
  if (!(gamma >= 0.0 && gamma <= 1.0)) fail("gamma must lie in [0, 1]");
  if (!(lr > 0.0)) fail("lr must be positive");
  if (hybrid_lr == 0.0 || std::isnan(hybrid_lr)) fail("hybrid_lr must be positive (or negative for lr)");
  if (batch_size < 1) fail("batch_size must be >= 1");
  if (epochs < 0) fail("epochs must be >= 0");
  if (hidden < 2 || hidden % 2 != 0) fail("hidden must be an even number >= 2");
  if (embed < 1) fail("embed must be >= 1");
  if (gcn_layers < 1) fail("gcn_layers must be >= 1");
  if (max_len < 1) fail("max_len must be >= 1");
  if (min_freq < 1) fail("min_freq must be >= 1");
  if (!(clip_norm > 0.0)) fail("clip_norm must be positive");
}

void TrainConfig::Set(const std::string& key, const std::string& value) {
  if (key == "lr") lr = ParseNumber<double>(key, value);
  else if (key == "batch_size") batch_size = ParseNumber<int>(key, value);
  else if (key == "gamma") gamma = ParseNumber<double>(key, value);
  else if (key == "epochs") epochs = ParseNumber<int>(key, value);
  else if (key == "ce_pretrain_epochs") ce_pretrain_epochs = ParseNumber<int>(key, value);
  else if (key == "hybrid_lr") hybrid_lr = ParseNumber<double>(key, value);
  else if (key == "hidden") hidden = ParseNumber<int>(key, value);
  else if (key == "embed") embed = ParseNumber<int>(key, value);
  else if (key == "gcn_layers") gcn_layers = ParseNumber<int>(key, value);
  else if (key == "max_len") max_len = ParseNumber<int>(key, value);
  else if (key == "seed") seed = ParseNumber<uint64_t>(key, value);
  else if (key == "masking") masking = ParseBool(key, value);
  else if (key == "clip_norm") clip_norm = ParseNumber<double>(key, value);
  else if (key == "min_freq") min_freq = ParseNumber<int>(key, value);
  else if (key == "freeze_embeddings") freeze_embeddings = ParseBool(key, value);
  else if (key == "beta1") beta1 = ParseNumber<double>(key, value);
  else if (key == "beta2") beta2 = ParseNumber<double>(key, value);
  else if (key == "adam_eps") adam_eps = ParseNumber<double>(key, value);
  else throw std::invalid_argument("unknown config key: " + key);
}

std::string TrainConfig::ToString() const {
  std::ostringstream os;
  os << "lr=" << Num(lr) << " batch_size=" << batch_size << " gamma=" << Num(gamma)
     << " epochs=" << epochs << " ce_pretrain_epochs=" << ce_pretrain_epochs
     << " hybrid_lr=" << Num(hybrid_lr)     << " hidden=" << hidden << " embed=" << embed << " gcn_layers=" << gcn_layers
     << " max_len=" << max_len << " seed=" << seed << " masking=" << (masking ? 1 : 0)
     << " clip_norm=" << Num(clip_norm) << " min_freq=" << min_freq
     << " freeze_embeddings=" << (freeze_embeddings ? 1 : 0) << " beta1=" << Num(beta1)
     << " beta2=" << Num(beta2) << " adam_eps=" << Num(adam_eps);
  return os.str();
}

void ApplyConfigStream(std::istream& in, TrainConfig& config) {
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = Trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key=value");
    }
    config.Set(Trim(line.substr(0, eq)), Trim(line.substr(eq + 1)));
  }
}

void ApplyConfigFile(const std::string& path, TrainConfig& config) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  ApplyConfigStream(in, config);
}

TrainConfig ParseConfigLine(const std::string& line) {
  TrainConfig config;
  std::istringstream is(line);
  std::string kv;
  while (is >> kv) {
    auto eq = kv.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("bad config pair: " + kv);
    config.Set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  return config;
}

}  // namespace g2t
