/* Copyright 2026 The sinfer Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include <cmath>
#include <map>
#include <random>
#include <set>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "sinfer/controller/pareto.hpp"
#include "sinfer/controller/policy.hpp"
#include "sinfer/controller/search.hpp"
#include "sinfer/controller/search_space.hpp"
#include "sinfer/estimator/estimator.hpp"

using namespace sinfer;

namespace {

SearchSpace tiny_space() {
  SearchSpace s;
  s.slots = {SlotKind::CR, SlotKind::FC};
  s.choices = {{{1, 2}, {{1, 1}, {3, 3}}, {2, 3}, {2, 3}}, {{}, {}, {2, 3}, {2, 3}}};
  s.input_side = 4;
  s.input_channels = 1;
  s.classes = 2;
  return s;
}

PieConfig cheap_pie() {
  PieConfig c;
  c.mc_trials = 300;
  c.delta = 1e-2;
  return c;
}

PieMemo& shared_memo() {
  static PieMemo memo;
  return memo;
}

}  // namespace

// ---------------------------------------------------------------------------
// search space and decode

TEST_CASE("decision list follows the template") {
  const auto d = tiny_space().decisions();
  REQUIRE(d.size() == 6);  // CR: 4 decisions, final FC: l_i and l_f
  CHECK(d[0].kind == DecisionKind::Filters);
  CHECK(d[1].kind == DecisionKind::Kernel);
  CHECK(d[4].slot == 1);
  CHECK(d[4].kind == DecisionKind::InputBits);
  CHECK(tiny_space().check().empty());

  SearchSpace bad = tiny_space();
  bad.choices[0].kernels.clear();
  CHECK_FALSE(bad.check().empty());
}

TEST_CASE("sw flag is set on multiples of SW_N") {
  CHECK(sw_flag_for(0, 5));
  CHECK_FALSE(sw_flag_for(3, 5));
  CHECK(sw_flag_for(10, 5));
  const std::vector<int> a(6, 0);
  CHECK(std::get<NetworkParms>(decode(a, tiny_space(), 0, 5)).sw_flag);
  CHECK_FALSE(std::get<NetworkParms>(decode(a, tiny_space(), 3, 5)).sw_flag);
}

TEST_CASE("decode propagates dimensions and validates") {
  SearchSpace s;
  s.slots = {SlotKind::CR, SlotKind::PL, SlotKind::CR, SlotKind::PL, SlotKind::FC};
  const SlotChoices conv{{4, 8}, {{3, 3}, {5, 3}}, {4, 6}, {5, 7}};
  s.choices = {conv, {}, conv, {}, {{}, {}, {4, 6}, {5, 7}}};
  s.input_side = 16;
  s.input_channels = 3;
  const auto decisions = s.decisions();
  // Exhaust every action sequence: each decodes to a valid network.
  std::vector<int> a(decisions.size(), 0);
  std::size_t count = 0;
  for (;;) {
    const auto r = decode(a, s);
    REQUIRE(std::holds_alternative<NetworkParms>(r));
    const auto& net = std::get<NetworkParms>(r);
    CHECK(validate_network(net).empty());
    const auto& fc = std::get<LinearLayerParms>(net.layers.back());
    const auto& conv2 = std::get<LinearLayerParms>(net.layers[3]);
    CHECK(fc.n_i == 16 * conv2.c_o);
    CHECK(conv2.n_i == 64);
    ++count;
    std::size_t k = 0;
    while (k < a.size() && ++a[k] == static_cast<int>(decisions[k].choices)) a[k++] = 0;
    if (k == a.size()) break;
  }
  CHECK(count == 1024);  // 10 binary decisions
}

TEST_CASE("feature map smaller than the filter is rejected") {
  SearchSpace s;
  s.slots = {SlotKind::CR, SlotKind::PL, SlotKind::CR, SlotKind::FC};
  s.choices = {{{2}, {{3, 3}}, {4}, {4}}, {}, {{2}, {{3, 3}, {5, 5}}, {4}, {4}}, {{}, {}, {4}, {4}}};
  s.input_side = 8;
  s.input_channels = 1;
  const std::vector<int> fits{0, 0, 0, 0, 0, 0, 0, 0, 0, 0};
  CHECK(std::holds_alternative<NetworkParms>(decode(fits, s)));
  std::vector<int> big = fits;
  big[5] = 1;  // 5x5 on the 4x4 map after pooling
  const auto r = decode(big, s);
  REQUIRE(std::holds_alternative<Rejection>(r));
  CHECK(std::get<Rejection>(r).slot == 2);

  SearchSpace odd = s;
  odd.input_side = 7;
  const auto r2 = decode(fits, odd);
  REQUIRE(std::holds_alternative<Rejection>(r2));
  CHECK(std::get<Rejection>(r2).slot == 1);
}

// ---------------------------------------------------------------------------
// sampling

TEST_CASE("single-choice decisions give that choice with log-probability 0") {
  const std::vector<std::size_t> sizes{1, 1, 1};
  const auto p = PolicyState::uniform(sizes);
  const auto s = sample(p, 7);
  CHECK(s.actions == std::vector<int>{0, 0, 0});
  for (const double lp : s.log_probs) CHECK(lp == 0.0);
}

TEST_CASE("a dominant logit is sampled almost always") {
  PolicyState p;
  p.logits = {{10.0, -10.0, -10.0}};
  Rng rng = make_rng(11);
  int first = 0;
  for (int i = 0; i < 10000; ++i) first += sample(p, rng).actions[0] == 0;
  CHECK(first >= 9990);
}

TEST_CASE("sampling is deterministic under a seed and matches softmax") {
  PolicyState p;
  p.logits = {{0.3, -1.0, 2.0}, {0.0, 0.5}};
  CHECK(sample(p, 5).actions == sample(p, 5).actions);
  for (const auto& row : p.logits) {
    const auto pr = softmax(row);
    double s = 0.0;
    for (const double x : pr) s += x;
    CHECK(s == doctest::Approx(1.0).epsilon(1e-15));
  }
  const auto s = sample(p, 5);
  for (std::size_t t = 0; t < 2; ++t) {
    CHECK(s.log_probs[t] == doctest::Approx(std::log(softmax(p.logits[t])[s.actions[t]])));
  }
  // Empirical frequencies within 4 standard errors of softmax.
  Rng rng = make_rng(3);
  std::vector<int> hits(3, 0);
  const int draws = 200000;
  for (int i = 0; i < draws; ++i) ++hits[sample(p, rng).actions[0]];
  const auto pr = softmax(p.logits[0]);
  for (int j = 0; j < 3; ++j) {
    const double se = std::sqrt(pr[j] * (1 - pr[j]) / draws);
    CHECK(std::abs(hits[j] / double(draws) - pr[j]) < 4 * se);
  }
}

TEST_CASE("forced decisions are honored") {
  PolicyState p;
  p.logits = {{0.0, 0.0, 0.0}, {5.0, -5.0}};
  Rng rng = make_rng(1);
  const std::vector<int> forced{2, -1};
  for (int i = 0; i < 20; ++i) CHECK(sample(p, rng, forced).actions[0] == 2);
}

// ---------------------------------------------------------------------------
// reward

TEST_CASE("reward examples") {
  CHECK(reward(0.7, 0.0) == 0.7);
  CHECK(reward(0.0, 3.5) == 0.0);
  CHECK(reward(0.8, 0.25) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS(reward(1.5, 0.0));
  for (const double xi : {0.0, 0.3, 2.0}) {
    double prev = -1.0;
    for (double a = 0.0; a <= 1.0; a += 0.05) {
      const double r = reward(a, xi);
      CHECK(r > prev);
      prev = r;
    }
  }
}

TEST_CASE("cost shaping rewards cheaper networks") {
  CHECK(shape_xi(0.5, 2.0) == 1.5);
  CHECK(shape_xi(3.0, 2.0) == 0.0);
  CHECK(shape_xi(-1.0, 2.0) == 2.0);
  CHECK(shape_xi(0.5, 2.0, true) == 0.5);
  CHECK(shape_xi(0.1, 2.0) > shape_xi(0.2, 2.0));
}

// ---------------------------------------------------------------------------
// update

TEST_CASE("a centered batch gives a zero update") {
  PolicyState p;
  p.logits = {{0.1, 0.4}, {-0.2, 0.0, 0.3}};
  p.baseline = 0.6;
  p.baseline_mode = BaselineMode::Fixed;
  const auto before = p.logits;
  std::vector<Trajectory> batch{{{0, 1}, {}, 0.6}, {{1, 2}, {}, 0.6}, {{1, 0}, {}, 0.6}};
  update(p, batch);
  CHECK(p.logits == before);
}

TEST_CASE("discount limits") {
  PolicyState p = PolicyState::uniform(std::vector<std::size_t>{3, 3, 3});
  const std::vector<Trajectory> batch{{{1, 1, 1}, {}, 1.0}};
  p.gamma = 1.0;
  const auto g1 = policy_gradient(p, batch, 0.0);
  CHECK(g1[0] == g1[1]);
  CHECK(g1[1] == g1[2]);
  CHECK(g1[0][1] > 0.0);

  // gamma = 0: only the final decision keeps weight.
  p.gamma = 0.0;
  const auto g0 = policy_gradient(p, batch, 0.0);
  for (const double x : g0[0]) CHECK(x == 0.0);
  for (const double x : g0[1]) CHECK(x == 0.0);
  CHECK(g0[2] == g1[2]);

  p.gamma = 0.5;
  const auto gh = policy_gradient(p, batch, 0.0);
  CHECK(gh[0][1] == doctest::Approx(0.25 * g1[0][1]));
  CHECK(gh[1][1] == doctest::Approx(0.5 * g1[1][1]));
}

TEST_CASE("masked decisions receive no gradient") {
  PolicyState p = PolicyState::uniform(std::vector<std::size_t>{2, 2});
  const std::vector<Trajectory> batch{{{1, 1}, {true, false}, 1.0}};
  const auto g = policy_gradient(p, batch, 0.0);
  CHECK(g[0] == std::vector<double>{0.0, 0.0});
  CHECK(g[1][1] > 0.0);
}

TEST_CASE("estimator is unbiased against the enumerated gradient") {
  const auto r = oracle::reinforce_against_enumeration(100000, 2024);
  CHECK(r.entries == 9);
  CHECK(r.max_z < 3.0);
}

TEST_CASE("batch-mean baseline makes the update translation invariant") {
  // Dyadic rewards and m = 4 keep every sum and mean exact.
  PolicyState a;
  a.logits = {{0.5, -0.25}, {0.0, 0.125, 0.25}};
  a.baseline_mode = BaselineMode::BatchMean;
  a.learning_rate = 0.5;
  PolicyState b = a;
  std::vector<Trajectory> batch{
      {{0, 1}, {}, 0.25}, {{1, 2}, {}, 0.5}, {{1, 0}, {}, 0.75}, {{0, 2}, {}, 1.0}};
  auto shifted = batch;
  for (auto& k : shifted) k.reward += 4.0;
  update(a, batch);
  update(b, shifted);
  CHECK(a.logits == b.logits);
}

TEST_CASE("EMA baseline starts at the first batch mean") {
  PolicyState p = PolicyState::uniform(std::vector<std::size_t>{2});
  p.ema_decay = 0.5;
  const std::vector<Trajectory> b1{{{0}, {}, 1.0}, {{1}, {}, 3.0}};
  CHECK(update(p, b1) == 2.0);
  CHECK(*p.baseline == 2.0);
  const std::vector<Trajectory> b2{{{0}, {}, 4.0}, {{1}, {}, 4.0}};
  CHECK(update(p, b2) == 2.0);
  CHECK(*p.baseline == 3.0);
}

TEST_CASE("two-arm bandit converges to the better arm") {
  int passed = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto r = oracle::two_arm_bandit(seed, oracle::kBanditEpisodeBudget);
    MESSAGE("seed " << seed << ": P(best) = " << r.p_best << " after " << r.episodes);
    passed += r.p_best > 0.95;
  }
  CHECK(passed >= 8);
}

// ---------------------------------------------------------------------------
// Pareto


TEST_CASE("Pareto front matches the brute-force oracle") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    // Coarse grids force ties in every objective.
    std::uniform_int_distribution<int> coarse(0, trial % 2 == 0 ? 6 : 1000);
    std::vector<Objectives> pts(1000);
    for (auto& p : pts) p = {coarse(rng) / 6.0, double(coarse(rng)), double(coarse(rng))};
    CHECK(pareto_front(pts) == oracle::brute_front(pts));
  }
  const std::vector<Objectives> one{{0.5, 1.0, 2.0}};
  CHECK(pareto_front(one) == std::vector<std::size_t>{0});
  const std::vector<Objectives> dom{{0.9, 1.0, 1.0}, {0.8, 2.0, 1.0}, {0.95, 3.0, 1.0}};
  CHECK(pareto_front(dom) == std::vector<std::size_t>{0, 2});
  const std::vector<Objectives> same{{0.5, 1.0, 1.0}, {0.5, 1.0, 1.0}};
  CHECK(pareto_front(same) == std::vector<std::size_t>{0, 1});
  CHECK(pareto_front(std::vector<Objectives>{}).empty());
}

// ---------------------------------------------------------------------------
// search loop

namespace {

struct Harness {
  SearchSpace space = tiny_space();
  SearchSettings settings;
  PieConfig pie = cheap_pie();
  ScoreWeights weights{0.5, 1e-3, 1e6};
  SurrogateEstimator surrogate;

  SearchResult run(AccuracyEstimator* est = nullptr,
                   std::function<void(const Episode&)> cb = {}) {
    SearchContext ctx{space, settings, pie, weights, reference_profile(),
                      est ? *est : surrogate, &shared_memo(), std::move(cb)};
    return run_search(ctx);
  }
};

class FailingEstimator final : public AccuracyEstimator {
 public:
  AccuracyResponse estimate(const AccuracyRequest& r) override {
    if (++calls_ % 3 == 0) throw TrainerTimeout("scripted timeout");
    return inner_.estimate(r);
  }

 private:
  int calls_ = 0;
  SurrogateEstimator inner_;
};

std::string trace_of(const SearchResult& r) {
  std::string s = trace_csv_header();
  for (const auto& e : r.episodes) s += trace_csv_row(e);
  return s;
}

}  // namespace

TEST_CASE("N = 0 gives an empty trace") {
  Harness h;
  h.settings.episodes = 0;
  const auto r = h.run();
  CHECK(r.episodes.empty());
  CHECK(r.pareto.empty());
}

TEST_CASE("search loop records episodes, reuse and a valid front") {
  Harness h;
  h.settings.episodes = 23;
  h.settings.sw_period = 4;
  h.settings.batch = 5;
  std::vector<std::int64_t> seen;
  const auto r = h.run(nullptr, [&](const Episode& e) { seen.push_back(e.index); });
  REQUIRE(r.episodes.size() == 23);
  for (std::int64_t i = 0; i < 23; ++i) CHECK(seen[i] == i);

  const auto decisions = h.space.decisions();
  for (const auto& e : r.episodes) {
    CHECK(e.sw_flag == (e.index % 4 == 0));
    const auto& train = r.episodes[static_cast<std::size_t>(e.index / 4 * 4)];
    for (std::size_t k = 0; k < decisions.size(); ++k) {
      if (decisions[k].architectural()) CHECK(e.actions[k] == train.actions[k]);
      CHECK(e.copied[k] == (!e.sw_flag && decisions[k].architectural()));
    }
    if (e.status == EpisodeStatus::Ok) {
      CHECK(e.A == doctest::Approx(surrogate_accuracy(*e.net)));
      CHECK(e.R == doctest::Approx(reward(e.A, shape_xi(e.xi, h.settings.xi_max))));
      CHECK(e.weights_id == architecture_fingerprint(*e.net));
    } else {
      CHECK(e.R == 0.0);
    }
  }
  REQUIRE_FALSE(r.pareto.empty());
  for (const auto i : r.pareto) {
    CHECK(r.episodes[i].status == EpisodeStatus::Ok);
    for (const auto& e : r.episodes) {
      if (e.status != EpisodeStatus::Ok) continue;
      CHECK_FALSE(dominates({e.A, e.T, e.B}, {r.episodes[i].A, r.episodes[i].T, r.episodes[i].B}));
    }
  }
  // The trace alone reproduces the front.
  CHECK(pareto_rows(parse_trace_csv(trace_of(r))) == r.pareto);
}

TEST_CASE("same seed gives a byte-identical trace") {
  Harness h;
  h.settings.episodes = 15;
  h.settings.seed = 77;
  const auto a = trace_of(h.run());
  const auto b = trace_of(h.run());
  CHECK(a == b);
  h.settings.jobs = 3;
  CHECK(trace_of(h.run()) == a);
  h.settings.seed = 78;
  CHECK(trace_of(h.run()) != a);
}

TEST_CASE("estimator failures and rejections score zero") {
  Harness h;
  h.settings.episodes = 12;
  h.settings.sw_period = 1;
  FailingEstimator flaky;
  const auto r = h.run(&flaky);
  int failed = 0;
  for (const auto& e : r.episodes) {
    if (e.status == EpisodeStatus::EstimatorFailed) {
      ++failed;
      CHECK(e.R == 0.0);
      CHECK(e.detail == "scripted timeout");
    }
  }
  CHECK(failed == 4);

  Harness small;
  small.space.input_side = 2;  // every 3x3 kernel underflows
  small.settings.episodes = 10;
  const auto r2 = small.run();
  int rejected = 0;
  for (const auto& e : r2.episodes) {
    if (e.status == EpisodeStatus::Rejected) {
      ++rejected;
      CHECK(e.R == 0.0);
      CHECK_FALSE(e.net.has_value());
    }
  }
  CHECK(rejected > 0);
}

TEST_CASE("trace CSV parses back") {
  Episode e;
  e.index = 3;
  e.actions = {1, 0, 2};
  e.sw_flag = false;
  e.status = EpisodeStatus::Rejected;
  const auto rows = parse_trace_csv(trace_csv_header() + trace_csv_row(e));
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].eps == 3);
  CHECK(rows[0].actions == "1-0-2");
  CHECK_FALSE(rows[0].A.has_value());
  CHECK(rows[0].status == "rejected");
  CHECK_THROWS(parse_trace_csv("bad header\n"));
  CHECK_THROWS(parse_trace_csv(trace_csv_header() + "1,2,x,,,,0,1,ok\n"));
}
