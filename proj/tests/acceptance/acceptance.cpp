// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ssrkit Authors
//
// Acceptance checks. Prints one PASS or FAIL line per criterion and exits
// non-zero when any criterion fails.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>

#include "ssr/codec.hpp"
#include "ssr/error.hpp"
#include "ssr/eval.hpp"
#include "ssr/reward.hpp"
#include "ssr/service.hpp"
#include "ssr/synth.hpp"
#include "ssr/trace.hpp"
#include "ssr/verify.hpp"

using namespace ssr;

namespace {

// Thrown by expect() to abort a criterion with a reason.
struct Failure {
  std::string what;
};

void expect(bool ok, const std::string& what) {
  if (!ok) throw Failure{what};
}

std::string fixture(const std::string& name) {
  std::ifstream in(std::string(SSR_FIXTURE_DIR) + "/" + name, std::ios::binary);
  if (!in) throw Failure{"missing fixture " + name};
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Instance case_instance() { return instance_from_json(Json::parse(fixture("case_instance.json"))); }

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

int g_failures = 0;

void run(const char* name, double limit_s, const std::function<std::string()>& body) {
  const auto start = std::chrono::steady_clock::now();
  std::string detail;
  std::string error;
  try {
    detail = body();
  } catch (const Failure& f) {
    error = f.what;
  } catch (const std::exception& e) {
    error = std::string("unexpected exception: ") + e.what();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (error.empty() && secs > limit_s) error = "exceeded time limit of " + num(limit_s) + " s";
  char timing[64];
  std::snprintf(timing, sizeof timing, "%.3f s", secs);
  if (error.empty()) {
    std::printf("PASS %s (%s)%s%s\n", name, timing, detail.empty() ? "" : ": ", detail.c_str());
  } else {
    ++g_failures;
    std::printf("FAIL %s (%s): %s\n", name, timing, error.c_str());
  }
  std::fflush(stdout);
}

// ---------------------------------------------------------------- rewards

std::string r1_truth_table() {
  int checked = 0;
  for (int bits = 0; bits < 8; ++bits) {
    const bool real = bits & 1, consist = bits & 2, ans = bits & 4;
    double expected = 0.0;
    if (real && consist && ans) expected = 1.0;
    else if (real && consist) expected = 0.1;
    else if (real) expected = 0.05;
    const double got = reward_r1(real, consist, ans);
    expect(got == expected, "r1(" + std::to_string(real) + "," + std::to_string(consist) + "," +
                                std::to_string(ans) + ") = " + num(got) + ", want " + num(expected));
    ++checked;
  }
  return std::to_string(checked) + " combinations";
}

Subgraph chain_of(std::size_t size) {
  Subgraph g;
  g.central = {NodeId{0}};
  for (std::uint64_t i = 1; i < size; ++i) {
    g.neighbors.insert(NodeId{i});
    g.edges.insert(make_edge(NodeId{i - 1}, NodeId{i}));
  }
  return g;
}

std::string r2_size_rank() {
  std::array<std::size_t, 5> sizes{1, 2, 3, 4, 5};
  VerifyOutcome ok;
  ok.status_real = ok.status_consist = true;
  ok.status_ans = true;
  const RewardConfig cfg{0.1, Stage::stage2_denoising, SizeMetric::node_count};
  int cases = 0;
  do {
    std::vector<Subgraph> cands;
    for (auto s : sizes) cands.push_back(chain_of(s));
    for (std::size_t c = 0; c < 5; ++c) {
      std::size_t larger = 0;
      for (std::size_t j = 0; j < 5; ++j) larger += sizes[j] > sizes[c] ? 1 : 0;
      const double want_rs = static_cast<double>(larger) / 4.0;
      const double want_r2 = 1.0 + 0.1 * want_rs;
      auto b = reward_r2(ok, cands, c, cfg);
      expect(b.rho == larger, "rho mismatch at case " + std::to_string(cases));
      expect(b.r_s == want_rs, "r_s " + num(b.r_s.value_or(-1)) + " want " + num(want_rs));
      expect(b.r2 == want_r2, "r2 " + num(b.r2) + " want " + num(want_r2));
      ++cases;
    }
  } while (std::next_permutation(sizes.begin(), sizes.end()));
  expect(cases == 600, "enumerated " + std::to_string(cases) + " cases, want 600");
  return std::to_string(cases) + " cases";
}

// Serves a precomputed symmetric distance table, keyed by the single
// neighbor id that makes each candidate distinct.
class TableDistance final : public DistanceProvider {
 public:
  explicit TableDistance(std::vector<std::vector<double>> d) : d_(std::move(d)) {}
  const char* kind() const override { return "table"; }
  double distance(const Subgraph& a, const Subgraph& b, const NodeTexts&) override {
    return d_[index(a)][index(b)];
  }

 private:
  static std::size_t index(const Subgraph& g) { return static_cast<std::size_t>(g.neighbors.begin()->value - 1); }
  std::vector<std::vector<double>> d_;
};

std::string energy_oracle() {
  Rng rng(20260101);
  double worst = 0.0;
  for (int group = 0; group < 1000; ++group) {
    const std::size_t n = 2 + static_cast<std::size_t>(rng.below(7));
    std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        // Mostly uniform over [floor, 1], with exact endpoints mixed in.
        double v = kDistanceFloor + rng.unit() * (1.0 - kDistanceFloor);
        const auto pick = rng.below(20);
        if (pick == 0) v = kDistanceFloor;
        if (pick == 1) v = 1.0;
        d[i][j] = d[j][i] = v;
      }
    }
    std::vector<Subgraph> cands;
    for (std::size_t i = 0; i < n; ++i) {
      Subgraph g;
      g.central = {NodeId{0}};
      g.neighbors = {NodeId{i + 1}};
      g.edges = {make_edge(NodeId{0}, NodeId{i + 1})};
      cands.push_back(g);
    }
    TableDistance provider(d);
    const GroupEnergy got = group_energy(cands, {}, provider);

    double inv = 0.0, dist = 0.0;
    std::size_t ordered = 0, unordered = 0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        inv += 1.0 / std::max(d[i][j], kDistanceFloor);
        ++ordered;
        if (i < j) {
          dist += d[i][j];
          ++unordered;
        }
      }
    }
    const double want_energy = -inv / static_cast<double>(ordered);
    const double want_mean = dist / static_cast<double>(unordered);
    const double err = std::abs(got.energy - want_energy) / std::max(1.0, std::abs(want_energy));
    worst = std::max(worst, err);
    expect(err <= 1e-12, "group " + std::to_string(group) + ": energy " + num(got.energy) + " want " +
                             num(want_energy));
    expect(std::abs(got.mean_distance - want_mean) <= 1e-12, "group " + std::to_string(group) + ": mean distance");
  }
  return "1000 groups, worst relative error " + num(worst);
}

// ---------------------------------------------------------------- fixtures

std::string golden_fixtures() {
  const Instance inst = case_instance();
  JaccardDistance jac;
  struct Want {
    const char* file;
    std::size_t chosen;
    const char* answer;
    bool real, consist, ans;
  };
  const Want wants[] = {
      {"case_full_ssr.txt", 2, "Neural Networks", true, true, true},
      {"case_authenticity_only.txt", 4, "Probabilistic Methods", true, true, false},
      {"case_denoising_only.txt", 0, "Probabilistic Methods", true, true, false},
  };
  for (const auto& w : wants) {
    auto report = parse_trace(fixture(w.file), 5);
    expect(report.clean(), std::string(w.file) + ": unexpected defects");
    expect(report.trace.candidates.size() == 5, std::string(w.file) + ": candidate count");
    expect(report.trace.chosen_index == w.chosen, std::string(w.file) + ": chosen index");
    expect(report.trace.answer == std::string(w.answer), std::string(w.file) + ": answer");
    expect(report.trace.repeated_subgraph.has_value(), std::string(w.file) + ": repeated subgraph");
    auto v = verify(inst.context, inst.texts, report.trace, inst.task, {5, &jac});
    expect(v.status_real == w.real && v.status_consist == w.consist && v.status_ans == w.ans,
           std::string(w.file) + ": statuses differ");
  }
  auto full = parse_trace(fixture("case_full_ssr.txt"), 5).trace;
  Subgraph chosen;
  chosen.central = {NodeId{11}};
  chosen.neighbors = {NodeId{13}, NodeId{17}};
  chosen.edges = {make_edge(NodeId{11}, NodeId{13}), make_edge(NodeId{11}, NodeId{17})};
  expect(full.candidates[2] == chosen && *full.repeated_subgraph == chosen, "chosen subgraph content");
  expect(full.candidates[0].neighbors.empty() && full.candidates[0].edges.empty(), "central-only candidate");

  auto plain = parse_trace(fixture("case_no_ssr.txt"), 5);
  expect(plain.trace.candidates.empty(), "plain answer should have no candidates");
  auto v = verify(inst.context, inst.texts, plain.trace, inst.task);
  expect(!v.status_real && !v.status_consist, "plain answer must not verify");
  return "3 traces plus the plain answer";
}

// Spans of node-id digits inside the candidate blocks.
std::vector<std::size_t> candidate_id_digits(const std::string& text) {
  std::vector<std::size_t> out;
  const std::size_t begin = text.find("**Subgraph_0**");
  const std::size_t end = text.find("**Chosen_subgraph_reasoning**");
  if (begin == std::string::npos || end == std::string::npos) return out;
  for (std::size_t p = text.find("node", begin); p != std::string::npos && p < end; p = text.find("node", p + 4)) {
    for (std::size_t q = p + 4; q < end && text[q] >= '0' && text[q] <= '9'; ++q) out.push_back(q);
  }
  return out;
}

std::string mutate(std::string text, Rng& rng) {
  const auto ops = 1 + rng.below(4);
  for (std::uint64_t k = 0; k < ops; ++k) {
    if (text.empty()) {
      text.push_back(static_cast<char>(rng.below(256)));
      continue;
    }
    const std::size_t pos = rng.below(text.size());
    switch (rng.below(8)) {
      case 0: text[pos] = static_cast<char>(0x20 + rng.below(95)); break;
      case 1: text.erase(pos, 1); break;
      case 2: text.insert(pos, 1, static_cast<char>(rng.below(256))); break;
      case 3: text.resize(pos); break;
      case 4: {  // drop a line
        const std::size_t s = text.rfind('\n', pos);
        const std::size_t e = text.find('\n', pos);
        const std::size_t from = s == std::string::npos ? 0 : s;
        text.erase(from, (e == std::string::npos ? text.size() : e) - from);
        break;
      }
      case 5: {  // duplicate a line
        const std::size_t s = text.rfind('\n', pos);
        const std::size_t e = text.find('\n', pos);
        const std::size_t from = s == std::string::npos ? 0 : s;
        const std::string line = text.substr(from, (e == std::string::npos ? text.size() : e) - from);
        text.insert(from, line);
        break;
      }
      case 6: {  // swap two characters
        const std::size_t other = rng.below(text.size());
        std::swap(text[pos], text[other]);
        break;
      }
      default: text.insert(pos, "\xff\xfe**Subgraph_"); break;
    }
  }
  return text;
}

void check_report(const ParseReport& r, std::size_t input_size, const std::string& where) {
  for (const auto& d : r.defects) {
    const std::string name = to_string(d.kind);
    expect(name != "unknown" && parse_defect_kind(name) == d.kind, where + ": unmapped defect kind");
    expect(d.offset + d.length <= input_size, where + ": defect span outside the input");
  }
}

std::string parser_fuzz() {
  const Instance inst = case_instance();
  JaccardDistance jac;
  const std::vector<std::string> seeds = {fixture("case_full_ssr.txt"), fixture("case_authenticity_only.txt"),
                                          fixture("case_denoising_only.txt"), fixture("case_no_ssr.txt"),
                                          fixture("inconsistent_choice.txt"), fixture("fabricated_edge.txt"),
                                          fixture("gibberish_truncated.txt")};
  Rng rng(424242);
  std::size_t with_defects = 0;
  for (int i = 0; i < 10000; ++i) {
    const std::string text = mutate(seeds[rng.below(seeds.size())], rng);
    const std::size_t k = 1 + rng.below(8);
    const std::string where = "fuzz case " + std::to_string(i);
    ParseReport r = parse_trace(text, k);
    check_report(r, text.size(), where);
    if (!r.defects.empty()) ++with_defects;
    (void)verify(inst.context, inst.texts, r.trace, inst.task, {k, &jac});
    (void)structural_flags(inst.context, r.trace, k);
    const std::string again = format_trace(r.trace);
    check_report(parse_trace(again, k), again.size(), where + " (reformatted)");
  }

  // Single-character corruption of every id digit inside the candidates.
  std::size_t corruptions = 0;
  for (const char* name : {"case_full_ssr.txt", "case_authenticity_only.txt", "case_denoising_only.txt"}) {
    const std::string base = fixture(name);
    for (std::size_t pos : candidate_id_digits(base)) {
      for (int c = 0x20; c < 0x7f; ++c) {
        if (c == base[pos]) continue;
        std::string text = base;
        text[pos] = static_cast<char>(c);
        ParseReport r = parse_trace(text, 5);
        check_report(r, text.size(), name);
        const auto v = verify(inst.context, inst.texts, r.trace, inst.task);
        const bool flagged = !r.defects.empty() || !structural_flags(inst.context, r.trace, 5).empty();
        expect(!v.status_real || flagged, std::string(name) + ": corruption at offset " + std::to_string(pos) +
                                              " to '" + std::string(1, static_cast<char>(c)) + "' passed silently");
        ++corruptions;
      }
    }
  }
  expect(corruptions > 1000, "too few id corruptions enumerated");
  return "10000 mutated inputs (" + std::to_string(with_defects) + " with defects), " + std::to_string(corruptions) +
         " id corruptions all caught";
}

// ---------------------------------------------------------------- training math

std::string advantage_normalization() {
  Rng rng(77);
  const double levels[] = {0.0, 0.05, 0.1, 1.0, 1.05, 1.1};
  int groups = 0;
  while (groups < 1000) {
    const std::size_t n = 2 + rng.below(15);
    std::vector<double> r(n);
    const bool discrete = rng.below(2) == 0;
    for (auto& x : r) x = discrete ? levels[rng.below(6)] : rng.unit() * 2.0 - 0.5;
    if (std::all_of(r.begin(), r.end(), [&](double x) { return x == r[0]; })) continue;
    auto a = group_advantages(r);
    const double mean = std::accumulate(a.begin(), a.end(), 0.0) / static_cast<double>(n);
    double var = 0.0;
    for (double x : a) var += (x - mean) * (x - mean);
    const double sd = std::sqrt(var / static_cast<double>(n));
    expect(std::abs(mean) <= 1e-9, "group " + std::to_string(groups) + ": mean " + num(mean));
    expect(std::abs(sd - 1.0) <= 1e-9, "group " + std::to_string(groups) + ": stdev " + num(sd));
    ++groups;
  }
  for (std::size_t n = 1; n <= 16; ++n) {
    std::vector<double> flat(n, levels[n % 6]);
    for (double x : group_advantages(flat)) expect(x == 0.0, "constant group gave a non-zero advantage");
  }
  return "1000 groups plus 16 constant groups";
}

std::string grpo_table() {
  // Dyadic values keep every product exact, so the branch oracle below must
  // agree bit for bit.
  const double ratios[] = {0.25, 0.5, 0.75, 0.875, 1.0, 1.125, 1.25, 1.5, 2.0, 3.0};
  const double advantages[] = {-2.0, -1.0, -0.5, 0.5, 1.0};
  const double epsilon = 0.25;
  int cases = 0, clipped_high = 0, clipped_low = 0;
  for (double r : ratios) {
    for (double a : advantages) {
      // Hand enumeration: positive advantages cap the ratio from above,
      // negative ones from below; inside the band the raw ratio is used.
      double effective = r;
      if (a > 0 && r > 1.0 + epsilon) {
        effective = 1.0 + epsilon;
        ++clipped_high;
      }
      if (a < 0 && r < 1.0 - epsilon) {
        effective = 1.0 - epsilon;
        ++clipped_low;
      }
      const double want = -(effective * a);
      const double ratio[] = {r}, adv[] = {a}, kl[] = {0.0};
      const double got = grpo_objective(ratio, adv, kl, epsilon, 0.0);
      expect(got == want, "ratio " + num(r) + " advantage " + num(a) + ": got " + num(got) + " want " + num(want));
      ++cases;
    }
  }
  expect(cases == 50, "table has " + std::to_string(cases) + " cases");
  expect(clipped_high > 0 && clipped_low > 0, "both clip directions must be exercised");
  // The two documented single-sample examples.
  const double r2[] = {2.0}, a1[] = {1.0}, r05[] = {0.5}, am1[] = {-1.0}, k0[] = {0.0};
  expect(grpo_objective(r2, a1, k0, 0.2, 0.0) == -1.2, "ratio 2, advantage 1");
  expect(grpo_objective(r05, am1, k0, 0.2, 0.0) == 0.8, "ratio 0.5, advantage -1");
  return "50 cases (" + std::to_string(clipped_high) + " clipped high, " + std::to_string(clipped_low) +
         " clipped low)";
}

// ---------------------------------------------------------------- pipelines

std::string synth_corpus(std::span<const Instance> instances, Policy& teacher, std::size_t concurrency,
                         std::vector<SynthRecord>* records) {
  JaccardDistance jac;
  SynthConfig cfg;
  cfg.concurrency = concurrency;
  std::string out;
  auto recs = synthesize_sft(instances, teacher, jac, cfg);
  for (const auto& r : recs) out += canonical(to_json(r)) + "\n";
  if (records) *records = std::move(recs);
  return out;
}

std::string synth_determinism() {
  const auto instances = make_planted_noise_suite(60, 2026).instances();
  // The teacher is a chat client replaying a script, built once from a
  // seeded scripted policy.
  ScriptedPolicy source({ScriptedBehavior::random_choice, 99});
  ScriptedChatClient script;
  for (const auto& inst : instances) {
    const std::string prompt =
        render_task_prompt(inst.context, inst.texts, inst.task, {5, template_for(inst.task.kind)}).text;
    script.add(prompt, {source.respond(PolicyInput{prompt, inst.task, inst.context, inst.texts, inst.id, 0, 0.6})});
  }
  ChatPolicy teacher(script);
  std::vector<SynthRecord> records;
  const std::string first = synth_corpus(instances, teacher, 4, &records);
  const std::string second = synth_corpus(instances, teacher, 4, nullptr);
  const std::string serial = synth_corpus(instances, teacher, 1, nullptr);
  expect(first == second, "two runs differ");
  expect(first == serial, "serial and concurrent runs differ");
  JaccardDistance jac;
  std::size_t retained = 0;
  for (const auto& r : records) {
    if (!r.retained) continue;
    ++retained;
    expect(reverify_record(r, jac), "retained record " + r.id + " fails re-verification");
    // Re-verification must also hold after a JSON round trip.
    expect(reverify_record(synth_record_from_json(to_json(r)), jac), "round-tripped record " + r.id);
  }
  expect(retained > 0 && retained < records.size(), "corpus should mix retained and rejected records");
  return std::to_string(records.size()) + " records, " + std::to_string(retained) + " retained, " +
         std::to_string(first.size()) + " bytes identical";
}

// Answers correctly on the first `correct` trials and wrongly afterwards.
class CountingPolicy final : public Policy {
 public:
  explicit CountingPolicy(std::size_t correct) : correct_(correct) {}
  std::string respond(const PolicyInput& in) override {
    return in.trial < correct_ ? good_.respond(in) : bad_.respond(in);
  }

 private:
  std::size_t correct_;
  ScriptedPolicy good_{{ScriptedBehavior::oracle_denoiser}};
  ScriptedPolicy bad_{{ScriptedBehavior::greedy_largest}};
};

std::string difficulty_tiers() {
  const DifficultyTier want[] = {DifficultyTier::hard,   DifficultyTier::hard, DifficultyTier::medium,
                                 DifficultyTier::medium, DifficultyTier::easy, DifficultyTier::easy};
  const Instance inst = make_planted_noise_suite(1, 5).tasks[0].instance;
  for (std::size_t c = 0; c <= 5; ++c) {
    expect(tier_for(c, 5) == want[c], "tier_for(" + std::to_string(c) + ", 5)");
    CountingPolicy policy(c);
    auto a = assess_difficulty(inst, policy);
    expect(a.correct_count == c, "assessment counted " + std::to_string(a.correct_count) + " of " +
                                     std::to_string(c));
    expect(a.tier == want[c], "assessment tier for " + std::to_string(c) + " correct");
  }
  std::vector<DifficultyTier> pool;
  for (int i = 0; i < 30000; ++i) pool.push_back(kAllTiers[static_cast<std::size_t>(i % 3)]);
  auto sel = build_rl_dataset(pool, 10000, {2, 2, 1}, 7);
  expect(sel.selected == std::array<std::size_t, 3>{4000, 4000, 2000}, "allocation differs from 4000/4000/2000");
  expect(sel.indices.size() == 10000, "selected index count");
  std::vector<std::size_t> sorted = sel.indices;
  std::sort(sorted.begin(), sorted.end());
  expect(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end(), "duplicate selections");
  std::array<std::size_t, 3> per_tier{};
  for (auto i : sel.indices) ++per_tier[static_cast<std::size_t>(pool[i])];
  expect(per_tier == sel.selected, "selected indices disagree with the tier counts");
  return "counts 0..5 tiered, 10000 split 4000/4000/2000";
}

std::string lambda_direction() {
  const auto instances = make_planted_noise_suite(200, 7).instances();
  const std::vector<double> lambdas{0.0, 0.01, 0.05, 0.1, 0.2, 0.5, 1.0};
  auto rows = lambda_sweep(instances, lambdas);
  expect(rows.size() == lambdas.size(), "row count");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    expect(rows[i].avg_selected_size <= rows[i - 1].avg_selected_size,
           "avg_selected_size rises between lambda " + num(rows[i - 1].lambda) + " and " + num(rows[i].lambda));
  }
  const double at0 = rows.front().accuracy, at1 = rows.back().accuracy;
  std::size_t best = 1;
  for (std::size_t i = 2; i + 1 < rows.size(); ++i) {
    if (rows[i].accuracy > rows[best].accuracy) best = i;
  }
  expect(rows[best].accuracy > at0 && rows[best].accuracy > at1,
         "no intermediate lambda beats both ends (" + num(at0) + ", " + num(at1) + ")");
  return "accuracy " + num(at0) + " at 0, " + num(rows[best].accuracy) + " at " + num(rows[best].lambda) + ", " +
         num(at1) + " at 1";
}

std::string denoiser_direction() {
  const auto instances = make_planted_noise_suite(200, 7).instances();
  ScriptedPolicy oracle({ScriptedBehavior::oracle_denoiser});
  ScriptedPolicy greedy({ScriptedBehavior::greedy_largest});
  const auto o = evaluate(instances, oracle).report;
  const auto g = evaluate(instances, greedy).report;
  expect(o.avg_selected_size < o.avg_context_size, "denoiser does not shrink the context");
  expect(o.accuracy >= g.accuracy, "denoiser accuracy below greedy");
  return "selected " + num(o.avg_selected_size) + " of " + num(o.avg_context_size) + " nodes, accuracy " +
         num(o.accuracy) + " vs " + num(g.accuracy);
}

// ---------------------------------------------------------------- service

std::vector<std::string> parity_requests(std::size_t count) {
  const auto suite = make_planted_noise_suite(50, 31);
  const Instance fixed = case_instance();
  const std::vector<std::string> fixtures = {fixture("case_full_ssr.txt"), fixture("case_authenticity_only.txt"),
                                             fixture("case_denoising_only.txt"), fixture("case_no_ssr.txt"),
                                             fixture("inconsistent_choice.txt"), fixture("fabricated_edge.txt"),
                                             fixture("gibberish_truncated.txt"),
                                             fixture("smallest_choice_correct.txt")};
  const ScriptedBehavior behaviors[] = {ScriptedBehavior::oracle_denoiser, ScriptedBehavior::greedy_largest,
                                        ScriptedBehavior::central_only, ScriptedBehavior::random_choice,
                                        ScriptedBehavior::size_sensitive};
  Rng rng(5150);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < count; ++i) {
    Json body;
    Json completions = Json::array();
    const std::size_t g = 1 + rng.below(6);
    if (i % 4 == 0) {
      body["instance"] = to_json(fixed);
      for (std::size_t j = 0; j < g; ++j) completions.push_back(fixtures[rng.below(fixtures.size())]);
    } else {
      const Instance& inst = suite.tasks[rng.below(suite.tasks.size())].instance;
      body["instance"] = to_json(inst);
      const std::string prompt = "parity";
      for (std::size_t j = 0; j < g; ++j) {
        ScriptedPolicy p({behaviors[rng.below(5)], rng.next(), 0.05 + 0.1 * rng.unit()});
        completions.push_back(p.respond(PolicyInput{prompt, inst.task, inst.context, inst.texts, inst.id, j, 0.6}));
      }
    }
    body["schema"] = kScoreRequestSchema;
    body["completions"] = completions;
    body["stage"] = rng.below(2) == 0 ? "stage1" : "stage2";
    body["lambda"] = static_cast<double>(rng.below(5)) * 0.05;
    if (rng.below(3) == 0) body["size_metric"] = "node_plus_edge_count";
    out.push_back(body.dump());
  }
  return out;
}

std::string service_parity() {
  const auto requests = parity_requests(500);
  std::vector<std::string> expected;
  for (const auto& body : requests) expected.push_back(canonical(to_json(score(parse_score_request(body)))));

  ScoreServer server(ServerOptions{"127.0.0.1", 0, 4});
  const int port = server.bind();
  std::thread serving([&] { server.serve(); });
  struct Stop {
    ScoreServer& s;
    std::thread& t;
    ~Stop() {
      s.stop();
      t.join();
    }
  } stop{server, serving};

  httplib::Client cli("127.0.0.1", port);
  cli.set_keep_alive(true);
  cli.set_tcp_nodelay(true);
  std::vector<std::string> first(requests.size());
  for (std::size_t i = 0; i < requests.size(); ++i) {
    auto res = cli.Post("/v1/score", requests[i], "application/json");
    expect(static_cast<bool>(res), "request " + std::to_string(i) + " got no response");
    expect(res->status == 200, "request " + std::to_string(i) + " returned " + std::to_string(res->status));
    expect(res->body == expected[i], "request " + std::to_string(i) + " differs from in-process scoring");
    first[i] = res->body;
  }
  std::vector<std::size_t> order(requests.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(8);
  for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
  for (std::size_t i : order) {
    auto res = cli.Post("/v1/score", requests[i], "application/json");
    expect(res && res->status == 200 && res->body == first[i],
           "shuffled replay of request " + std::to_string(i) + " differs");
  }
  return "500 requests byte-identical, shuffled replay identical";
}

}  // namespace

int main() {
  run("r1_truth_table", 1.0, r1_truth_table);
  run("r2_size_rank_bruteforce", 1.0, r2_size_rank);
  run("energy_matches_oracle", 5.0, energy_oracle);
  run("golden_case_fixtures", 1.0, golden_fixtures);
  run("parser_fuzz_robustness", 60.0, parser_fuzz);
  run("advantage_normalization", 5.0, advantage_normalization);
  run("grpo_objective_table", 1.0, grpo_table);
  run("filter_cascade_determinism", 30.0, synth_determinism);
  run("difficulty_tiers_and_split", 10.0, difficulty_tiers);
  run("lambda_sweep_direction", 30.0, lambda_direction);
  run("denoiser_shrinks_context", 30.0, denoiser_direction);
  run("service_parity_replay", 60.0, service_parity);
  std::printf("%d criteria failed\n", g_failures);
  return g_failures == 0 ? 0 : 1;
}
