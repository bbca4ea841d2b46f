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

#include "g2t/eval.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <stdexcept>

#include "json.hpp"

namespace g2t {
namespace {

constexpr int kMaxOrder = 4;
constexpr int kMaxShiftSize = 10;
constexpr int kMaxShiftDistance = 50;

using NgramCounts = std::map<Tokens, int>;

NgramCounts CountNgrams(const Tokens& toks, int n) {
  NgramCounts counts;
  for (size_t i = 0; i + n <= toks.size(); ++i) ++counts[Tokens(toks.begin() + i, toks.begin() + i + n)];
  return counts;
}

struct SentenceStats {
  std::array<long, kMaxOrder> matches{};
  std::array<long, kMaxOrder> totals{};
  long cand_len = 0;
  long ref_len = 0;
};

SentenceStats Stats(const Tokens& cand, const std::vector<Tokens>& refs) {
  if (refs.empty()) throw std::invalid_argument("bleu: candidate without references");
  SentenceStats s;
  s.cand_len = static_cast<long>(cand.size());
  long best_diff = std::numeric_limits<long>::max();
  for (const auto& r : refs) {
    long len = static_cast<long>(r.size());
    long diff = std::abs(len - s.cand_len);
    if (diff < best_diff || (diff == best_diff && len < s.ref_len)) {
      best_diff = diff;
      s.ref_len = len;
    }
  }
  for (int n = 1; n <= kMaxOrder; ++n) {
    NgramCounts cand_counts = CountNgrams(cand, n);
    NgramCounts max_ref;
    for (const auto& r : refs) {
      for (const auto& [g, c] : CountNgrams(r, n)) max_ref[g] = std::max(max_ref[g], c);
    }
    for (const auto& [g, c] : cand_counts) {
      s.totals[n - 1] += c;
      auto it = max_ref.find(g);
      if (it != max_ref.end()) s.matches[n - 1] += std::min(c, it->second);
    }
  }
  return s;
}

BleuScore FromStats(const SentenceStats& s, double smooth) {
  BleuScore b;
  b.candidate_length = s.cand_len;
  b.reference_length = s.ref_len;
  double log_sum = 0.0;
  bool zero = false;
  for (int n = 0; n < kMaxOrder; ++n) {
    double eps = n == 0 ? 0.0 : smooth;
    double p = s.totals[n] + eps > 0.0 ? (s.matches[n] + eps) / (s.totals[n] + eps) : 0.0;
    b.precisions[n] = p;
    if (p <= 0.0) zero = true;
    else log_sum += std::log(p);
  }
  if (s.cand_len == 0) {
    b.brevity_penalty = 0.0;
    return b;
  }
  b.brevity_penalty = std::exp(std::min(0.0, 1.0 - static_cast<double>(s.ref_len) / s.cand_len));
  b.bleu = zero ? 0.0 : b.brevity_penalty * std::exp(log_sum / kMaxOrder);
  return b;
}

int Levenshtein(const Tokens& a, const Tokens& b) {
  std::vector<int> prev(b.size() + 1), cur(b.size() + 1);
  for (size_t j = 0; j <= b.size(); ++j) prev[j] = static_cast<int>(j);
  for (size_t i = 1; i <= a.size(); ++i) {
    cur[0] = static_cast<int>(i);
    for (size_t j = 1; j <= b.size(); ++j) {
      int sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({sub, prev[j] + 1, cur[j - 1] + 1});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

bool OccursIn(const Tokens& hay, Tokens::const_iterator first, Tokens::const_iterator last) {
  return std::search(hay.begin(), hay.end(), first, last) != hay.end();
}

}  // namespace

BleuScore CorpusBleu(const std::vector<Tokens>& candidates,
                     const std::vector<std::vector<Tokens>>& references) {
  if (candidates.empty()) throw std::invalid_argument("bleu: empty candidate list");
  if (candidates.size() != references.size()) {
    throw std::invalid_argument("bleu: " + std::to_string(candidates.size()) + " candidates but " +
                                std::to_string(references.size()) + " reference sets");
  }
  SentenceStats total;
  for (size_t i = 0; i < candidates.size(); ++i) {
    SentenceStats s = Stats(candidates[i], references[i]);
    for (int n = 0; n < kMaxOrder; ++n) {
      total.matches[n] += s.matches[n];
      total.totals[n] += s.totals[n];
    }
    total.cand_len += s.cand_len;
    total.ref_len += s.ref_len;
  }
  return FromStats(total, 0.0);
}

double SentenceBleu(const Tokens& candidate, const std::vector<Tokens>& references) {
  return FromStats(Stats(candidate, references), 1e-9).bleu;
}

int TerEdits(const Tokens& candidate, const Tokens& reference) {
  Tokens cur = candidate;
  int shifts = 0;
  int dist = Levenshtein(cur, reference);
  while (dist > 0) {
    int best = dist;
    Tokens best_hyp;
    const int n = static_cast<int>(cur.size());
    for (int i = 0; i < n; ++i) {
      for (int len = 1; len <= kMaxShiftSize && i + len <= n; ++len) {
        auto first = cur.begin() + i, last = first + len;
        if (!OccursIn(reference, first, last)) break;  // longer spans cannot occur either
        // Already in place.
        if (i + len <= static_cast<int>(reference.size()) &&
            std::equal(first, last, reference.begin() + i)) {
          continue;
        }
        Tokens rest(cur.begin(), first);
        rest.insert(rest.end(), last, cur.end());
        for (int k = 0; k <= static_cast<int>(rest.size()); ++k) {
          if (k == i || std::abs(k - i) > kMaxShiftDistance) continue;
          Tokens moved(rest.begin(), rest.begin() + k);
          moved.insert(moved.end(), first, last);
          moved.insert(moved.end(), rest.begin() + k, rest.end());
          int d = Levenshtein(moved, reference);
          if (d < best) {
            best = d;
            best_hyp = std::move(moved);
          }
        }
      }
    }
    if (best >= dist) break;
    cur = std::move(best_hyp);
    dist = best;
    ++shifts;
  }
  return shifts + dist;
}

double Ter(const Tokens& candidate, const std::vector<Tokens>& references) {
  if (references.empty()) throw std::invalid_argument("ter: no references");
  double best = std::numeric_limits<double>::infinity();
  for (const auto& r : references) {
    int edits = TerEdits(candidate, r);
    double rate = r.empty() ? (edits == 0 ? 0.0 : static_cast<double>(edits))
                            : static_cast<double>(edits) / static_cast<double>(r.size());
    best = std::min(best, rate);
  }
  return best;
}

namespace {

// Sum of best-reference edits over the sum of those references' lengths.
double CorpusTer(const std::vector<Tokens>& cands, const std::vector<std::vector<Tokens>>& refs) {
  double edits = 0.0, length = 0.0;
  for (size_t i = 0; i < cands.size(); ++i) {
    double best_rate = std::numeric_limits<double>::infinity();
    double best_edits = 0.0, best_len = 0.0;
    for (const auto& r : refs[i]) {
      double e = TerEdits(cands[i], r);
      double len = static_cast<double>(r.size());
      double rate = len > 0 ? e / len : e;
      if (rate < best_rate) {
        best_rate = rate;
        best_edits = e;
        best_len = len;
      }
    }
    edits += best_edits;
    length += best_len;
  }
  return length > 0 ? edits / length : edits;
}

nlohmann::json BleuJson(const BleuScore& b) {
  return {{"bleu", b.bleu},
          {"precisions", b.precisions},
          {"brevity_penalty", b.brevity_penalty},
          {"candidate_length", b.candidate_length},
          {"reference_length", b.reference_length}};
}

}  // namespace

std::vector<SizeBucket> DefaultBuckets() { return {{1, 3}, {4, 7}}; }

EvalReport EvaluateSplit(const std::vector<Tokens>& candidates, const std::vector<Example>& examples,
                         const std::vector<SizeBucket>& buckets) {
  if (candidates.size() != examples.size()) {
    throw std::invalid_argument("evaluate: " + std::to_string(candidates.size()) +
                                " generated lines for " + std::to_string(examples.size()) +
                                " examples");
  }
  std::vector<std::vector<Tokens>> refs;
  for (const auto& ex : examples) refs.push_back(ex.references);

  EvalReport report;
  report.count = static_cast<int>(candidates.size());
  if (candidates.empty()) {
    report.notes.push_back("no examples");
    return report;
  }
  report.bleu = CorpusBleu(candidates, refs);
  report.ter = CorpusTer(candidates, refs);
  for (const auto& b : buckets) {
    std::vector<Tokens> bc;
    std::vector<std::vector<Tokens>> br;
    for (size_t i = 0; i < examples.size(); ++i) {
      int size = static_cast<int>(examples[i].triples.size());
      if (size >= b.min_size && size <= b.max_size) {
        bc.push_back(candidates[i]);
        br.push_back(refs[i]);
      }
    }
    if (bc.empty()) {
      report.notes.push_back("bucket " + std::to_string(b.min_size) + "-" +
                             std::to_string(b.max_size) + " has no examples; omitted");
      continue;
    }
    report.buckets.push_back({b, static_cast<int>(bc.size()), CorpusBleu(bc, br), CorpusTer(bc, br)});
  }
  return report;
}

void EvalReport::PrintTable(std::ostream& out) const {
  char line[160];
  std::snprintf(line, sizeof line, "%-10s %6s %8s %8s %8s %8s %8s %8s\n", "split", "n", "BLEU",
                "BLEU-1", "BLEU-2", "BLEU-3", "BLEU-4", "TER");
  out << line;
  auto row = [&](const std::string& name, int n, const BleuScore& b, double ter) {
    std::snprintf(line, sizeof line, "%-10s %6d %8.4f %8.4f %8.4f %8.4f %8.4f %8.4f\n", name.c_str(),
                  n, b.bleu, b.precisions[0], b.precisions[1], b.precisions[2], b.precisions[3], ter);
    out << line;
  };
  row("all", count, bleu, ter);
  for (const auto& b : buckets) {
    row(std::to_string(b.bucket.min_size) + "-" + std::to_string(b.bucket.max_size), b.count, b.bleu,
        b.ter);
  }
  for (const auto& n : notes) out << "note: " << n << "\n";
}

std::string EvalReport::ToJson() const {
  nlohmann::json j = {{"count", count}, {"ter", ter}, {"notes", notes}};
  j["bleu"] = BleuJson(bleu);
  j["buckets"] = nlohmann::json::array();
  for (const auto& b : buckets) {
    j["buckets"].push_back({{"min_size", b.bucket.min_size},
                            {"max_size", b.bucket.max_size},
                            {"count", b.count},
                            {"bleu", BleuJson(b.bleu)},
                            {"ter", b.ter}});
  }
  return j.dump();
}

std::vector<Tokens> ReadLines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<Tokens> out;
  std::string line;
  while (std::getline(in, line)) out.push_back(Tokenize(line));
  return out;
}

}  // namespace g2t
