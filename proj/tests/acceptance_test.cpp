// Copyright 2026 The cddted Authors
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

// Acceptance gate: prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails. Tolerances are fixed here.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "cddted/detector.hpp"
#include "cddted/distribution.hpp"
#include "cddted/harness.hpp"
#include "cddted/mitigator.hpp"
#include "cddted/synthlab.hpp"
#include "cddted/textdist.hpp"
#include "oracles.hpp"

namespace cddted {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Result {
  bool pass;
  std::string detail;
};

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

std::string Fmt(const char* format, double a = 0, double b = 0, double c = 0,
                double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, a, b, c, d);
  return buf;
}

// ------------------------------------------------------------------ 1

// Every sequence of length <= 8 over {0, 1, 2}. Sequence (len, v) has its
// head as the most significant base-3 digit of v, so its tail is
// (len - 1, v mod 3^(len-1)).
Result EditDistanceOracle() {
  constexpr int kMaxLen = 8;
  const auto start = Clock::now();
  std::vector<std::uint32_t> pow3(kMaxLen + 1, 1), offset(kMaxLen + 2, 0);
  for (int i = 1; i <= kMaxLen; ++i) pow3[i] = pow3[i - 1] * 3;
  for (int l = 0; l <= kMaxLen; ++l) offset[l + 1] = offset[l] + pow3[l];
  const std::uint32_t count = offset[kMaxLen + 1];

  std::vector<std::vector<TokenId>> seqs(count);
  std::vector<std::uint8_t> len_of(count);
  std::vector<std::uint32_t> tail_of(count), head_of(count);
  for (int l = 0; l <= kMaxLen; ++l) {
    for (std::uint32_t v = 0; v < pow3[l]; ++v) {
      const std::uint32_t id = offset[l] + v;
      len_of[id] = static_cast<std::uint8_t>(l);
      std::uint32_t rest = v;
      for (int k = l - 1; k >= 0; --k) {
        seqs[id].push_back(rest / pow3[k]);
        rest %= pow3[k];
      }
      if (l > 0) {
        head_of[id] = v / pow3[l - 1];
        tail_of[id] = offset[l - 1] + v % pow3[l - 1];
      }
    }
  }

  // The recursion tabulated bottom-up: ids are ordered by length, so every tail
  // is filled before the sequences that need it.
  std::vector<std::uint8_t> table(static_cast<std::size_t>(count) * count);
  auto at = [&](std::uint32_t a, std::uint32_t b) -> std::uint8_t& {
    return table[static_cast<std::size_t>(a) * count + b];
  };
  for (std::uint32_t a = 0; a < count; ++a) {
    for (std::uint32_t b = 0; b < count; ++b) {
      std::uint8_t v;
      if (len_of[b] == 0) {
        v = len_of[a];
      } else if (len_of[a] == 0) {
        v = len_of[b];
      } else if (head_of[a] == head_of[b]) {
        v = at(tail_of[a], tail_of[b]);
      } else {
        v = 1 + std::min({at(tail_of[a], b), at(a, tail_of[b]),
                          at(tail_of[a], tail_of[b])});
      }
      at(a, b) = v;
    }
  }

  std::uint64_t mismatches = 0, compared = 0;
  for (std::uint32_t a = 0; a < count; ++a) {
    for (std::uint32_t b = 0; b < count; ++b) {
      ++compared;
      if (EditDistance(seqs[a], seqs[b]) != at(a, b)) ++mismatches;
    }
  }

  std::mt19937_64 gen(20240501);
  std::uniform_int_distribution<int> len(0, 64), sym(0, 3);
  std::uint64_t random_mismatches = 0;
  for (int i = 0; i < 1000; ++i) {
    std::vector<TokenId> x(len(gen)), y(len(gen));
    for (auto& t : x) t = sym(gen);
    for (auto& t : y) t = sym(gen);
    if (EditDistance(x, y) != testing::RecursiveEditDistance(x, y)) {
      ++random_mismatches;
    }
  }
  const double secs = Seconds(start);
  const bool pass = mismatches == 0 && random_mismatches == 0 && secs < 60.0;
  return {pass, Fmt("%.0f exhaustive pairs, %.0f + %.0f mismatches, %.1f s",
                    static_cast<double>(compared),
                    static_cast<double>(mismatches),
                    static_cast<double>(random_mismatches), secs)};
}

// ------------------------------------------------------------------ 2

Result DistributionNormalization() {
  const Tokenizer tok = Tokenizer::WhitespacePunct();
  std::mt19937_64 gen(77);
  std::uniform_int_distribution<int> n_dist(2, 30), len(0, 40), sym(0, 5);
  auto text = [&] {
    std::string s;
    for (int k = len(gen); k > 0; --k) s += "t" + std::to_string(sym(gen)) + " ";
    return s;
  };
  int violations = 0;
  double worst = 0.0;
  for (int iter = 0; iter < 200; ++iter) {
    SampleSet set;
    set.task_id = "r" + std::to_string(iter);
    set.greedy_text = text();
    set.reference_answer = text();
    for (int i = n_dist(gen); i > 0; --i) set.samples.push_back({text()});
    DistanceProfile profile(set, tok);
    for (const auto& d : {DensityPairwise(profile), DensityVsReference(profile),
                          DensityVsGreedy(profile)}) {
      double sum = 0.0;
      for (const auto& [k, v] : d.Histogram()) sum += v;
      worst = std::max(worst, std::abs(sum - 1.0));
      if (std::abs(sum - 1.0) > 1e-12) ++violations;
    }
    const auto rho = DensityVsGreedy(profile);
    const std::size_t l = LengthScale(profile);
    double prev = -1.0;
    for (int a = 0; a <= 100; ++a) {
      const double peak = Peakedness(rho, l, a / 100.0);
      if (peak < prev) ++violations;
      prev = peak;
    }
  }
  return {violations == 0,
          Fmt("200 sets, %.0f violations, max |sum-1| = %.2g",
              static_cast<double>(violations), worst)};
}

// ---------------------------------------------------------- 3 and 4

std::vector<DatasetRecord> Corpus(double m, double lambda,
                                  std::uint32_t stride, std::uint64_t seed) {
  ScenarioSweep sweep;
  sweep.values = {0.0, m};
  sweep.base.edit_noise_rate = lambda;
  sweep.base.variant_stride = stride;
  sweep.base.n_samples = 50;
  sweep.base.seed = seed;
  sweep.seeds_per_point = 100;
  return GenerateLabeledCorpus(sweep);
}

Result CddSeparation() {
  const auto start = Clock::now();
  const auto records = Corpus(0.9, 1.0, 0, 3);
  DetectOptions opt;
  const auto report = RunDetect(records, opt);
  const double secs = Seconds(start);
  const double auc = report.aggregate.auc.value_or(-1);
  const double acc = report.aggregate.accuracy.value_or(-1);
  const bool pass = report.errors.empty() && auc >= 0.95 && acc >= 0.90 &&
                    secs < 300.0;
  return {pass, Fmt("AUC %.4f (>= 0.95), accuracy %.4f (>= 0.90), %.1f s",
                    auc, acc, secs)};
}

Result ImplicitContamination() {
  const auto records = Corpus(0.9, 5.0, 4, 4);
  DetectOptions cdd;
  DetectOptions ngram;
  ngram.method = "ngram_token";
  const auto cdd_report = RunDetect(records, cdd);
  const auto ngram_report = RunDetect(records, ngram);
  const double cdd_auc = cdd_report.aggregate.auc.value_or(-1);
  const double ngram_auc = ngram_report.aggregate.auc.value_or(2);
  const bool pass = cdd_auc >= 0.9 && ngram_auc <= 0.7;
  return {pass, Fmt("CDD AUC %.4f (>= 0.9), ngram_token AUC %.4f (<= 0.7)",
                    cdd_auc, ngram_auc)};
}

// ---------------------------------------------------------- 5 and 6

struct MitigationPoint {
  double raw = 0, rd = 0, ep = 0, ted = 0;
};

MitigationPoint Mitigate(double m, std::uint32_t seeds) {
  ScenarioSweep sweep;
  sweep.values = {m};
  sweep.base.edit_noise_rate = 0.0;
  sweep.base.pass_model = {1.0, 0.2};
  sweep.base.seed = 5;
  sweep.seeds_per_point = seeds;
  const auto report = RunMitigate(GenerateLabeledCorpus(sweep), {},
                                  Tokenizer::WhitespacePunct());
  MitigationPoint p;
  for (const auto& a : report.aggregate) {
    switch (a.variant) {
      case FilterVariant::kRaw: p.raw = a.mean_corrected; break;
      case FilterVariant::kRemoveDuplicates: p.rd = a.mean_corrected; break;
      case FilterVariant::kExcludePeakedness: p.ep = a.mean_corrected; break;
      case FilterVariant::kTed: p.ted = a.mean_corrected; break;
    }
  }
  return p;
}

constexpr std::uint32_t kMitigationSeeds = 400;

Result TedCorrection(std::vector<MitigationPoint>& points) {
  const std::vector<double> ms = {0.0, 0.25, 0.5, 0.75, 0.95};
  for (double m : ms) points.push_back(Mitigate(m, kMitigationSeeds));
  const double rise = points.back().raw - points.front().raw;
  double drift = 0.0;
  for (const auto& p : points) {
    drift = std::max(drift, std::abs(p.ted - points.front().ted));
  }
  const double zero_gap = std::abs(points.front().ted - points.front().raw);
  const bool pass = rise >= 0.5 && drift <= 0.05 && zero_gap <= 0.01;
  std::string detail = Fmt(
      "raw rise %.4f (>= 0.5), max TED drift %.4f (<= 0.05), m=0 gap %.4f "
      "(<= 0.01); TED by m:",
      rise, drift, zero_gap);
  for (std::size_t i = 0; i < ms.size(); ++i) {
    detail += Fmt(" %.2f", points[i].ted);
  }
  return {pass, detail};
}

Result AblationOrdering(const std::vector<MitigationPoint>& points) {
  const MitigationPoint& p = points.back();
  const double ted = p.raw - p.ted, ep = p.raw - p.ep, rd = p.raw - p.rd;
  const bool pass = ted >= ep && ep >= rd && rd >= 0.0;
  return {pass, Fmt("m=0.95 mitigation TED %.4f >= EP %.4f >= RD %.4f >= 0",
                    ted, ep, rd)};
}

// ------------------------------------------------------------------ 7

std::vector<std::vector<int>> AllSequences(int max_len, int alphabet) {
  std::vector<std::vector<int>> out = {{}};
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (static_cast<int>(out[i].size()) == max_len) continue;
    for (int s = 0; s < alphabet; ++s) {
      auto next = out[i];
      next.push_back(s);
      out.push_back(std::move(next));
    }
  }
  return out;
}

std::string Render(const std::vector<int>& seq) {
  std::string s;
  for (int t : seq) s += std::string(s.empty() ? "" : " ") + char('a' + t);
  return s;
}

Result BoundarySemantics() {
  const Tokenizer tok = Tokenizer::WhitespacePunct();
  int peak_cases = 0, peak_bad = 0;
  for (int n = 1; n <= 12; ++n) {
    for (int hits = 0; hits <= n; ++hits) {
      SampleSet set;
      set.task_id = "b";
      set.greedy_text = "g0 g1 g2";
      for (int i = 0; i < n; ++i) {
        set.samples.push_back(
            {i < hits ? "g0 g1 g2" : "x" + std::to_string(i) + " y z"});
      }
      CddConfig cfg;
      cfg.alpha = 0.0;
      cfg.xi = static_cast<double>(hits) / n;
      const auto at = CddDetect(set, cfg, tok);
      ++peak_cases;
      if (at.peak != cfg.xi || at.verdict != Verdict::kUnleaked) ++peak_bad;
      if (hits > 0) {
        cfg.xi = std::nextafter(cfg.xi, 0.0);
        ++peak_cases;
        if (CddDetect(set, cfg, tok).verdict != Verdict::kLeaked) ++peak_bad;
      }
    }
  }

  const auto seqs = AllSequences(4, 3);
  int ep_cases = 0, ep_bad = 0;
  for (const auto& g : AllSequences(3, 3)) {
    SampleSet set;
    set.task_id = "e";
    set.greedy_text = Render(g);
    for (const auto& s : seqs) set.samples.push_back({Render(s)});
    const std::vector<TokenId> gt(g.begin(), g.end());
    for (std::size_t tau = 0; tau <= 4; ++tau) {
      const auto kept = ExcludePeakedness(set, tau, tok);
      std::vector<std::size_t> expected;
      for (std::size_t i = 0; i < seqs.size(); ++i) {
        const std::vector<TokenId> st(seqs[i].begin(), seqs[i].end());
        if (testing::RecursiveEditDistance(st, gt) > tau) expected.push_back(i);
      }
      ++ep_cases;
      if (kept != expected) ++ep_bad;
    }
  }

  int rd_cases = 0, rd_bad = 0;
  for (const auto& list : AllSequences(6, 3)) {
    SampleSet set;
    set.task_id = "d";
    for (int t : list) set.samples.push_back({std::string(1, char('p' + t))});
    std::vector<std::size_t> expected;
    for (std::size_t i = 0; i < list.size(); ++i) {
      bool seen = false;
      for (std::size_t j = 0; j < i; ++j) seen = seen || list[j] == list[i];
      if (!seen) expected.push_back(i);
    }
    ++rd_cases;
    if (RemoveDuplicates(set) != expected) ++rd_bad;
  }
  const bool pass = peak_bad == 0 && ep_bad == 0 && rd_bad == 0;
  return {pass,
          Fmt("peak==xi: %.0f/%.0f ok; ED==tau: %.0f/%.0f ok; ", peak_cases - peak_bad,
              peak_cases, ep_cases - ep_bad, ep_cases) +
              Fmt("first occurrence: %.0f/%.0f ok", rd_cases - rd_bad, rd_cases)};
}

// ------------------------------------------------------------------ 8

Result PassAtKEnumeration() {
  int cases = 0, bad = 0;
  for (int n = 1; n <= 8; ++n) {
    for (int c = 0; c <= n; ++c) {
      for (int k = 1; k <= n; ++k) {
        const auto oracle = testing::EnumeratePassAtK(n, c, k);
        const Fraction f = PassAtKExact(n, c, k);
        ++cases;
        if (f.num * oracle.den != oracle.num * f.den) ++bad;
      }
    }
  }
  return {bad == 0, Fmt("%.0f (n, c, k) cases, %.0f mismatches",
                        static_cast<double>(cases), static_cast<double>(bad))};
}

// ------------------------------------------------------------------ 9

std::string ReadAll(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool RunPipeline(const fs::path& dir) {
  fs::create_directories(dir);
  const std::string cli = CDDTED_CLI_PATH;
  const std::string d = dir.string();
  const std::vector<std::string> steps = {
      "simulate -o " + d + "/data.jsonl --values 0 0.5 0.9 --seeds-per-point 4"
      " --lambda 1 --seed 42",
      "detect -i " + d + "/data.jsonl --method cdd --method ngram_token -o " +
          d + "/detect.json",
      "mitigate -i " + d + "/data.jsonl -o " + d + "/mitigate.json",
      "report -i " + d + "/detect.json -i " + d + "/mitigate.json -o " + d +
          "/report.json",
      "report -i " + d + "/detect.json -i " + d + "/mitigate.json --format csv"
      " -o " + d + "/report.csv"};
  for (const auto& step : steps) {
    const std::string cmd = "\"" + cli + "\" " + step + " 2>/dev/null";
    if (std::system(cmd.c_str()) != 0) return false;
  }
  return true;
}

Result EndToEndDeterminism() {
  const fs::path root = fs::temp_directory_path() /
                        ("cddted_accept_" + std::to_string(::getpid()));
  fs::remove_all(root);
  const bool ran = RunPipeline(root / "a") && RunPipeline(root / "b");
  int files = 0, differ = 0;
  if (ran) {
    for (const char* name :
         {"data.jsonl", "detect.json", "mitigate.json", "report.json",
          "report.csv", "report.csv.tasks.csv", "report.csv.hist.csv"}) {
      ++files;
      const std::string a = ReadAll(root / "a" / name);
      if (a.empty() || a != ReadAll(root / "b" / name)) ++differ;
    }
  }
  fs::remove_all(root);
  return {ran && differ == 0,
          ran ? Fmt("%.0f files compared, %.0f differ",
                    static_cast<double>(files), static_cast<double>(differ))
              : std::string("pipeline failed to run")};
}

}  // namespace
}  // namespace cddted

int main() {
  using cddted::Result;
  std::vector<cddted::MitigationPoint> points;
  const std::vector<std::pair<const char*, std::function<Result()>>> criteria = {
      {"1 edit-distance oracle equivalence", cddted::EditDistanceOracle},
      {"2 distribution normalization", cddted::DistributionNormalization},
      {"3 CDD separation on simulator", cddted::CddSeparation},
      {"4 implicit-contamination robustness", cddted::ImplicitContamination},
      {"5 TED correction", [&] { return cddted::TedCorrection(points); }},
      {"6 ablation ordering", [&] { return cddted::AblationOrdering(points); }},
      {"7 boundary semantics", cddted::BoundarySemantics},
      {"8 pass@k enumeration", cddted::PassAtKEnumeration},
      {"9 end-to-end determinism", cddted::EndToEndDeterminism},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Result r;
    try {
      r = check();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s criterion %s: %s\n", r.pass ? "PASS" : "FAIL", name,
                r.detail.c_str());
    std::fflush(stdout);
    failed += r.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
