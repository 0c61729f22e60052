// Acceptance suite. Each test case covers one numbered criterion and prints
// a single PASS/FAIL line; run this binary directly to see all of them.
//
// Shared setup: a seeded synthetic graph with 1,000 nodes, average degree 8,
// feature length 16, and a 200-round single-edge update stream (~60% inserts,
// 40% deletes), processed by three configurations:
//   gcn:  2 layers, min, hidden 16
//   sage: 2 layers, min, hidden 16
//   gin:  5 layers, max, hidden 8, 2-layer MLP, epsilon 0.1

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <map>
#include <set>
#include <string>

#include "core/engine.hpp"
#include "core/synth.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace streamgnn;

namespace {

constexpr uint64_t kGraphSeed = 2024;
constexpr uint64_t kModelSeed = 7;
constexpr uint32_t kNodes = 1000;
constexpr uint32_t kFeatureLen = 16;
constexpr uint32_t kRounds = 200;

void report(int criterion, bool ok, const std::string& what) {
  std::printf("[%s] criterion %d: %s\n", ok ? "PASS" : "FAIL", criterion, what.c_str());
  std::fflush(stdout);
  CHECK_MESSAGE(ok, "criterion ", criterion, ": ", what);
}

synth::GenConfig dataset_config() {
  synth::GenConfig gc;
  gc.num_nodes = kNodes;
  gc.avg_degree = 8.0;
  gc.feature_len = kFeatureLen;
  gc.stream_len = kRounds;
  gc.seed = kGraphSeed;
  gc.insert_fraction = 0.6;
  return gc;
}

synth::ModelGenConfig model_config(const std::string& kind) {
  synth::ModelGenConfig mc;
  mc.kind = kind;
  mc.feature_len = kFeatureLen;
  mc.seed = kModelSeed;
  if (kind == "gin") {
    mc.hidden = 8;
    mc.layers = 5;
    mc.epsilon = 0.1f;
  } else {
    mc.hidden = 16;
    mc.layers = 2;
  }
  return mc;
}

struct Dataset {
  DynamicGraph graph;
  Mat features;
  std::vector<EdgeDelta> stream;
};

const Dataset& dataset() {
  static Dataset d = [] {
    synth::GenConfig gc = dataset_config();
    synth::Rng rng(gc.seed);
    DynamicGraph g = synth::gen_graph(gc, rng);
    Mat features = synth::gen_features(gc, rng);
    std::vector<EdgeDelta> stream = synth::gen_stream(g, gc, rng);
    return Dataset{std::move(g), std::move(features), std::move(stream)};
  }();
  return d;
}

struct StreamRun {
  bool exact_every_round = true;         // criterion 1
  bool containment_ok = true;            // criterion 4 (dirty sets in BFS cone)
  bool untouched_identical = true;       // criterion 4 (bytes outside the cone)
  bool affected_equals_full = true;      // criterion 9
  std::vector<uint64_t> engine_fetches;  // criterion 5
  std::vector<uint64_t> affected_fetches;
  uint64_t incremental_targets = 0;  // criterion 6
  uint64_t exposed_targets = 0;
};

// Processes the shared stream with one model configuration, gathering all
// per-round evidence in a single pass.
StreamRun run_stream(const std::string& kind) {
  const Dataset& d = dataset();
  auto model = test_helpers::make_shared_model(model_config(kind));
  const int k = model->num_layers();

  EngineOptions opts;
  opts.baseline_counters = true;
  Engine engine(d.graph, model, d.features, opts);

  // Independent reference chain for criterion 9.
  DynamicGraph ref_graph = d.graph;
  baseline::EmbeddingSet prev = baseline::full_inference(ref_graph, d.features, *model);

  StreamRun run;
  for (uint32_t r = 0; r < d.stream.size(); ++r) {
    std::vector<EdgeDelta> delta{d.stream[r]};
    CheckpointStore before = engine.store();
    RoundStats stats = engine.process_update_round(delta);

    // criterion 1: bitwise equality with full inference on this snapshot
    if (baseline::verify_against_full(engine.store(), engine.graph(), d.features, *model))
      run.exact_every_round = false;

    // criterion 4: containment and untouched bytes, layer by layer
    auto net = net_edge_delta(delta);
    std::set<NodeId> cone;
    for (const EdgeDelta& e : net) {
      cone.insert(e.src);
      cone.insert(e.dst);
    }
    std::vector<NodeId> frontier(cone.begin(), cone.end());
    for (int l = 1; l <= k; ++l) {
      std::vector<NodeId> next;
      for (NodeId u : frontier)
        for (NodeId v : engine.graph().neighbors(u, Direction::Out))
          if (cone.insert(v).second) next.push_back(v);
      frontier = std::move(next);

      for (NodeId v : engine.last_dirty_nodes()[l - 1])
        if (!cone.count(v)) run.containment_ok = false;

      auto untouched_rows_equal = [&](int layer, Stage stage) {
        const Mat& now = engine.store().table(layer, stage);
        const Mat& was = before.table(layer, stage);
        for (NodeId v = 0; v < kNodes; ++v) {
          if (cone.count(v)) continue;
          auto a = now.row(v), b = was.row(v);
          if (std::memcmp(a.data(), b.data(), a.size() * sizeof(float)) != 0) return false;
        }
        return true;
      };
      if (!untouched_rows_equal(l, Stage::Aggregated) ||
          !untouched_rows_equal(l + 1, Stage::Message))
        run.untouched_identical = false;
    }

    // criterion 5 counters
    run.engine_fetches.push_back(stats.engine_fetches());
    run.affected_fetches.push_back(stats.affected_fetches);

    // criterion 6 condition totals
    run.incremental_targets += stats.incremental_targets();
    run.exposed_targets += stats.total(&LayerRoundStats::exposed_reset);

    // criterion 9 reference chain
    ref_graph.apply_delta(delta);
    ref_graph.commit();
    baseline::EmbeddingSet affected =
        baseline::affected_inference(ref_graph, delta, d.features, *model, prev);
    if (!(affected == baseline::full_inference(ref_graph, d.features, *model)))
      run.affected_equals_full = false;
    prev = std::move(affected);
  }
  return run;
}

const StreamRun& stream_run(const std::string& kind) {
  static std::map<std::string, StreamRun> cache;
  auto it = cache.find(kind);
  if (it == cache.end()) it = cache.emplace(kind, run_stream(kind)).first;
  return it->second;
}

}  // namespace

TEST_CASE("criterion 1: zero-loss exactness across the stream") {
  bool ok = true;
  std::string detail;
  for (const char* kind : {"gcn", "sage", "gin"}) {
    const StreamRun& run = stream_run(kind);
    if (!run.exact_every_round) {
      ok = false;
      detail += std::string(kind) + " diverged; ";
    }
  }
  report(1, ok,
         "per-round and final checkpoints bitwise equal full inference for "
         "gcn/sage/gin over 200 single-edge rounds" +
             (detail.empty() ? "" : " (" + detail + ")"));
}

TEST_CASE("criterion 2: batching invariance (num_updates 1, 10, 100)") {
  const Dataset& d = dataset();
  std::vector<EdgeDelta> prefix(d.stream.begin(), d.stream.begin() + 100);
  auto model = test_helpers::make_shared_model(model_config("gcn"));

  bool ok = true;
  std::vector<CheckpointStore> finals;
  for (uint32_t batch : {1u, 10u, 100u}) {
    Engine engine(d.graph, model, d.features);
    for (size_t start = 0; start < prefix.size(); start += batch) {
      size_t end = std::min(prefix.size(), start + batch);
      engine.process_update_round(std::span<const EdgeDelta>(prefix).subspan(start, end - start));
    }
    finals.push_back(engine.store());
    if (!test_helpers::stores_equal(finals.front(), finals.back())) ok = false;
  }
  report(2, ok, "identical final checkpoints for the same 100-edge stream at batch sizes 1/10/100");
}

TEST_CASE("criterion 3: condition-classification oracle on 10,000 micro-instances") {
  synth::Rng rng(555);
  bool ok = true;
  const uint32_t dim = 4;
  for (int iter = 0; iter < 10000 && ok; ++iter) {
    const Aggregator agg = rng.below(2) ? Aggregator::Max : Aggregator::Min;
    const uint32_t n_nbrs = 2 + rng.below(5);                             // 2..6
    const uint32_t n_del = 1 + rng.below(std::min<uint32_t>(3, n_nbrs));  // 1..3
    const uint32_t n_add = rng.below(4);                                  // 0..3

    auto grid = [&] { return static_cast<float>(rng.below(10)) * 0.25f; };
    std::vector<Vec> nbrs(n_nbrs, Vec(dim));
    for (auto& v : nbrs)
      for (float& x : v) x = grid();
    std::vector<Vec> adds(n_add, Vec(dim));
    for (auto& v : adds)
      for (float& x : v) x = grid();

    Vec alpha_prev = ewise_reduce(agg, nbrs);
    std::vector<Vec> deleted(nbrs.begin(), nbrs.begin() + n_del);
    std::vector<Vec> survivors(nbrs.begin() + n_del, nbrs.end());

    GroupedEvents grp;
    grp.del_reduced = ewise_reduce(agg, deleted);
    if (!adds.empty()) grp.add_reduced = ewise_reduce(agg, adds);

    std::vector<Vec> current = survivors;
    current.insert(current.end(), adds.begin(), adds.end());
    Vec brute = current.empty() ? Vec(dim, 0.0f) : ewise_reduce(agg, current);

    auto rep = classify(alpha_prev, grp, agg);
    if (rep.kind == Condition::ExposedReset) {
      // recompute over a star graph holding the current neighbor messages
      const uint32_t n_cur = static_cast<uint32_t>(current.size());
      DynamicGraph g(n_cur + 1);
      Mat features(n_cur + 1, dim);
      for (uint32_t i = 0; i < n_cur; ++i) {
        g.add_edge(i, n_cur);
        std::copy(current[i].begin(), current[i].end(), features.row(i).begin());
      }
      auto model = test_helpers::identity_model(1, dim, agg);
      CheckpointStore store = init_full_inference(g, features, *model);
      if (recompute(store, g, 1, n_cur, agg) != brute) ok = false;
    } else {
      if (incremental_update(alpha_prev, grp, agg) != brute) ok = false;
    }
  }

  // Simultaneous Del+Add that covers the reset: incremental, no recompute.
  {
    Vec alpha_prev{1, 2};
    GroupedEvents grp{0, Vec{1, 2}, Vec{0, 1}};
    auto rep = classify(alpha_prev, grp, Aggregator::Min);
    if (rep.kind != Condition::CoveredReset) ok = false;
    Vec expect = ewise_reduce(Aggregator::Min, std::vector<Vec>{{5, 3}, {0, 1}});
    if (incremental_update(alpha_prev, grp, Aggregator::Min) != expect) ok = false;
  }
  report(3, ok,
         "incremental path equals brute force whenever applicable, recompute equals brute "
         "force on exposed resets, Del+Add trap classifies as covered");
}

TEST_CASE("criterion 4: pruning containment and untouched-byte identity") {
  bool ok = true;
  std::string detail;
  for (const char* kind : {"gcn", "sage", "gin"}) {
    const StreamRun& run = stream_run(kind);
    if (!run.containment_ok) {
      ok = false;
      detail += std::string(kind) + " dirty set escaped the cone; ";
    }
    if (!run.untouched_identical) {
      ok = false;
      detail += std::string(kind) + " untouched bytes changed; ";
    }
  }
  report(4, ok,
         "dirty nodes stay inside the l-hop forward BFS of the delta endpoints and bytes "
         "outside it are unchanged" +
             (detail.empty() ? "" : " (" + detail + ")"));
}

TEST_CASE("criterion 5: fetch reduction against the Affected baseline") {
  const StreamRun& gcn = stream_run("gcn");
  std::vector<double> ratios;
  for (size_t r = 0; r < gcn.engine_fetches.size(); ++r) {
    double denom = static_cast<double>(std::max<uint64_t>(gcn.affected_fetches[r], 1));
    ratios.push_back(static_cast<double>(gcn.engine_fetches[r]) / denom);
  }
  std::sort(ratios.begin(), ratios.end());
  const double median = ratios[ratios.size() / 2];
  bool ok = median <= 0.1;

  bool monotone = true;
  for (const char* kind : {"sage", "gin"}) {
    const StreamRun& run = stream_run(kind);
    for (size_t r = 0; r < run.engine_fetches.size(); ++r)
      if (run.engine_fetches[r] > run.affected_fetches[r]) monotone = false;
  }
  ok = ok && monotone;

  char buf[160];
  std::snprintf(buf, sizeof buf,
                "gcn median engine/affected fetch ratio %.4f (<= 0.1 required); sage/gin "
                "never exceed the baseline: %s",
                median, monotone ? "yes" : "NO");
  report(5, ok, buf);
}

TEST_CASE("criterion 6: condition distribution favors incremental updates") {
  bool ok = true;
  std::string detail;
  for (const char* kind : {"gcn", "sage"}) {
    const StreamRun& run = stream_run(kind);
    const uint64_t visited = run.incremental_targets + run.exposed_targets;
    const double incremental =
        visited ? 100.0 * static_cast<double>(run.incremental_targets) / visited : 0.0;
    char buf[96];
    std::snprintf(buf, sizeof buf, "%s incremental %.1f%% vs exposed %.1f%%; ", kind, incremental,
                  100.0 - incremental);
    detail += buf;
    if (run.incremental_targets <= run.exposed_targets) ok = false;
  }
  report(6, ok, "reported distribution: " + detail);
}

TEST_CASE("criterion 7: duplicate-event tolerance over 20 random rounds") {
  const Dataset& d = dataset();
  auto model = test_helpers::make_shared_model(model_config("gcn"));
  Engine plain(d.graph, model, d.features);
  EngineOptions dup;
  dup.duplicate_seed_events = true;
  Engine duplicated(d.graph, model, d.features, dup);

  bool ok = true;
  for (uint32_t r = 0; r < 20; ++r) {
    std::vector<EdgeDelta> delta{d.stream[r]};
    plain.process_update_round(delta);
    duplicated.process_update_round(delta);
    if (!test_helpers::stores_equal(plain.store(), duplicated.store())) ok = false;
  }
  report(7, ok, "duplicating every seeded edge event changes no stored value");
}

TEST_CASE("criterion 8: aggregation order-invariance on 1,000 neighbor sets") {
  synth::Rng rng(808);
  bool ok = true;
  for (int iter = 0; iter < 1000; ++iter) {
    const uint32_t count = 1 + rng.below(10);
    const uint32_t len = 1 + rng.below(16);
    std::vector<Vec> in(count, Vec(len));
    for (auto& v : in)
      for (float& x : v) x = rng.range(-4.0f, 4.0f);
    const Aggregator agg = rng.below(2) ? Aggregator::Max : Aggregator::Min;
    Vec base = ewise_reduce(agg, in);
    std::vector<Vec> shuffled = in;
    for (size_t i = shuffled.size(); i > 1; --i)
      std::swap(shuffled[i - 1], shuffled[rng.below(static_cast<uint32_t>(i))]);
    Vec permuted = ewise_reduce(agg, shuffled);
    if (std::memcmp(base.data(), permuted.data(), len * sizeof(float)) != 0) ok = false;
  }
  report(8, ok, "ewise_reduce output is bitwise identical under input permutation");
}

TEST_CASE("criterion 9: Affected baseline equals Full on every snapshot") {
  bool ok = true;
  std::string detail;
  for (const char* kind : {"gcn", "sage", "gin"}) {
    const StreamRun& run = stream_run(kind);
    if (!run.affected_equals_full) {
      ok = false;
      detail += std::string(kind) + " differs; ";
    }
  }
  report(9, ok,
         "affected_inference equals full_inference bitwise across all streams" +
             (detail.empty() ? "" : " (" + detail + ")"));
}
