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

#include "g2t/checkpoint.h"

#include <bit>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace g2t {
namespace {

constexpr char kHex[] = "0123456789abcdef";

void AppendDouble(std::string& out, double v) {
  uint64_t bits = std::bit_cast<uint64_t>(v);
  for (int byte = 0; byte < 8; ++byte) {
    unsigned b = (bits >> (8 * byte)) & 0xffu;
    out.push_back(kHex[b >> 4]);
    out.push_back(kHex[b & 0xf]);
  }
}

int HexDigit(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  throw std::runtime_error(std::string("checkpoint: bad hex digit '") + c + "'");
}

double ParseDouble(std::string_view hex) {
  if (hex.size() != 16) throw std::runtime_error("checkpoint: bad double encoding");
  uint64_t bits = 0;
  for (int byte = 0; byte < 8; ++byte) {
    uint64_t b = static_cast<uint64_t>(HexDigit(hex[2 * byte]) * 16 + HexDigit(hex[2 * byte + 1]));
    bits |= b << (8 * byte);
  }
  return std::bit_cast<double>(bits);
}

std::string Hex1(double v) {
  std::string s;
  AppendDouble(s, v);
  return s;
}

[[noreturn]] void Fail(int lineno, const std::string& msg) {
  throw std::runtime_error("checkpoint line " + std::to_string(lineno) + ": " + msg);
}

struct MatrixRecord {
  std::string name;
  ad::Matrix value;
};

MatrixRecord ParseMatrix(std::istringstream& is, int lineno) {
  MatrixRecord r;
  Eigen::Index rows, cols;
  std::string hex;
  if (!(is >> r.name >> rows >> cols)) Fail(lineno, "expected name rows cols");
  if (rows * cols > 0 && !(is >> hex)) Fail(lineno, "missing data");
  r.value = DecodeDoubles(hex, rows, cols);
  return r;
}

}  // namespace

std::string EncodeDoubles(const ad::Matrix& m) {
  std::string out;
  out.reserve(static_cast<size_t>(m.size()) * 16);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) AppendDouble(out, m(r, c));
  }
  return out;
}

ad::Matrix DecodeDoubles(const std::string& hex, Eigen::Index rows, Eigen::Index cols) {
  if (rows < 0 || cols < 0 || static_cast<size_t>(rows * cols) * 16 != hex.size()) {
    throw std::runtime_error("checkpoint: data length does not match shape " +
                             std::to_string(rows) + "x" + std::to_string(cols));
  }
  ad::Matrix m(rows, cols);
  size_t k = 0;
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c, k += 16) {
      m(r, c) = ParseDouble(std::string_view(hex).substr(k, 16));
    }
  }
  return m;
}

void WriteCheckpoint(const Checkpoint& ckpt, std::ostream& out) {
  out << kCheckpointMagic << "\n";
  out << "config " << ckpt.config.ToString() << "\n";
  out << "vocab " << ckpt.vocab.size() << "\n";
  for (const auto& t : ckpt.vocab.tokens()) out << t << "\n";
  for (const auto& [name, m] : ckpt.params) {
    out << "param " << name << " " << m.rows() << " " << m.cols() << " " << EncodeDoubles(m)
        << "\n";
  }
  if (ckpt.adam) {
    const auto& a = *ckpt.adam;
    out << "adam " << a.step << " " << Hex1(a.lr) << " " << Hex1(a.beta1) << " "
        << Hex1(a.beta2) << " " << Hex1(a.eps) << "\n";
    for (size_t i = 0; i < a.m.size(); ++i) {
      const auto& name = i < ckpt.params.size() ? ckpt.params[i].first : std::to_string(i);
      out << "adam_m " << name << " " << a.m[i].rows() << " " << a.m[i].cols() << " "
          << EncodeDoubles(a.m[i]) << "\n";
      out << "adam_v " << name << " " << a.v[i].rows() << " " << a.v[i].cols() << " "
          << EncodeDoubles(a.v[i]) << "\n";
    }
  }
  out << "end\n";
}

Checkpoint ReadCheckpoint(std::istream& in) {
  Checkpoint ckpt;
  std::string line;
  int lineno = 0;
  auto next = [&]() -> bool {
    if (!std::getline(in, line)) return false;
    ++lineno;
    return true;
  };
  if (!next() || line != kCheckpointMagic) Fail(1, "missing header '" + std::string(kCheckpointMagic) + "'");
  bool ended = false;
  while (next()) {
    std::istringstream is(line);
    std::string kind;
    is >> kind;
    if (kind == "config") {
      std::string rest;
      std::getline(is, rest);
      ckpt.config = ParseConfigLine(rest);
    } else if (kind == "vocab") {
      int n = 0;
      if (!(is >> n) || n < Vocab::kNumReserved) Fail(lineno, "bad vocabulary size");
      std::vector<std::string> tokens;
      for (int i = 0; i < n; ++i) {
        if (!next()) Fail(lineno, "truncated vocabulary");
        tokens.push_back(line);
      }
      ckpt.vocab = Vocab(std::vector<std::string>(tokens.begin() + Vocab::kNumReserved, tokens.end()));
    } else if (kind == "param") {
      auto r = ParseMatrix(is, lineno);
      ckpt.params.emplace_back(std::move(r.name), std::move(r.value));
    } else if (kind == "adam") {
      AdamState a;
      std::string lr, b1, b2, eps;
      if (!(is >> a.step >> lr >> b1 >> b2 >> eps)) Fail(lineno, "bad adam header");
      a.lr = ParseDouble(lr);
      a.beta1 = ParseDouble(b1);
      a.beta2 = ParseDouble(b2);
      a.eps = ParseDouble(eps);
      ckpt.adam = std::move(a);
    } else if (kind == "adam_m" || kind == "adam_v") {
      if (!ckpt.adam) Fail(lineno, kind + " before adam header");
      auto r = ParseMatrix(is, lineno);
      (kind == "adam_m" ? ckpt.adam->m : ckpt.adam->v).push_back(std::move(r.value));
    } else if (kind == "end") {
      ended = true;
      break;
    } else {
      Fail(lineno, "unknown record '" + kind + "'");
    }
  }
  if (!ended) Fail(lineno, "truncated checkpoint (no 'end')");
  return ckpt;
}

void SaveCheckpoint(const Checkpoint& ckpt, const std::string& path) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw std::runtime_error("cannot write checkpoint " + tmp);
    WriteCheckpoint(ckpt, out);
    if (!out) throw std::runtime_error("failed writing checkpoint " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw std::runtime_error("cannot move checkpoint into " + path);
  }
}

Checkpoint LoadCheckpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open checkpoint " + path);
  return ReadCheckpoint(in);
}

ModelDims DimsFor(const TrainConfig& config, const Vocab& vocab) {
  return {vocab.size(), config.embed, config.hidden, config.gcn_layers};
}

Checkpoint MakeCheckpoint(const TrainConfig& config, const Vocab& vocab,
                          const ModelParams& params, const AdamState* adam) {
  Checkpoint ckpt{config, vocab, {}, std::nullopt};
  for (const auto& [name, t] : params.Named()) ckpt.params.emplace_back(name, t.value());
  if (adam) ckpt.adam = *adam;
  return ckpt;
}

ModelParams RestoreModel(const Checkpoint& ckpt) {
  Rng scratch(0);
  ModelParams m = InitModel(DimsFor(ckpt.config, ckpt.vocab), scratch);
  auto named = m.Named();
  if (named.size() != ckpt.params.size()) {
    throw std::runtime_error("checkpoint holds " + std::to_string(ckpt.params.size()) +
                             " parameters, model expects " + std::to_string(named.size()));
  }
  for (size_t i = 0; i < named.size(); ++i) {
    const auto& [name, value] = ckpt.params[i];
    auto& t = named[i].second;
    if (name != named[i].first || value.rows() != t.rows() || value.cols() != t.cols()) {
      throw std::runtime_error("checkpoint parameter " + name + " does not match " +
                               named[i].first);
    }
    t.mutable_value() = value;
  }
  return m;
}

}  // namespace g2t
