#include "core/engine.hpp"

#include <cstring>

namespace streamgnn {

uint32_t EventQueue::push_message(Vec v) {
  messages_.push_back(std::move(v));
  return static_cast<uint32_t>(messages_.size() - 1);
}

void EventQueue::push_event(EventOp op, NodeId target, uint32_t msg_idx) {
  if (msg_idx >= messages_.size()) fail(Errc::contract, "event references missing message");
  events_.push_back({op, target, msg_idx});
}

const Vec& EventQueue::message(uint32_t idx) const {
  if (idx >= messages_.size()) fail(Errc::contract, "message index out of range");
  return messages_[idx];
}

void EventQueue::clear() {
  events_.clear();
  messages_.clear();
}

std::vector<GroupedEvents> group_and_reduce(const EventQueue& queue, Aggregator agg) {
  std::map<NodeId, GroupedEvents> grouped;
  for (const Event& e : queue.events()) {
    GroupedEvents& g = grouped[e.target];
    g.target = e.target;
    std::optional<Vec>& slot = e.op == EventOp::Del ? g.del_reduced : g.add_reduced;
    const Vec& msg = queue.message(e.msg_idx);
    if (!slot)
      slot = msg;
    else
      ewise_reduce_into(agg, msg, *slot);
  }
  std::vector<GroupedEvents> out;
  out.reserve(grouped.size());
  for (auto& [node, g] : grouped) out.push_back(std::move(g));
  return out;
}

ConditionReport classify(std::span<const float> alpha_prev, const GroupedEvents& grp,
                         Aggregator agg) {
  if (!grp.del_reduced && !grp.add_reduced)
    fail(Errc::contract, "classify: grouped events carry neither operation");
  if (!grp.del_reduced) return {Condition::NoDeletion, {}};

  const Vec& del = *grp.del_reduced;
  if (del.size() != alpha_prev.size()) fail(Errc::dimension, "classify: deletion length mismatch");

  ConditionReport report;
  for (uint32_t i = 0; i < alpha_prev.size(); ++i)
    if (alpha_prev[i] == del[i]) report.reset_positions.push_back(i);
  if (report.reset_positions.empty()) {
    report.kind = Condition::DeletionNoEffect;
    return report;
  }

  if (grp.add_reduced) {
    const Vec& add = *grp.add_reduced;
    if (add.size() != alpha_prev.size()) fail(Errc::dimension, "classify: addition length mismatch");
    bool covered = true;
    for (uint32_t i : report.reset_positions)
      if (reduce2(agg, del[i], add[i]) != add[i]) {
        covered = false;
        break;
      }
    if (covered) {
      report.kind = Condition::CoveredReset;
      return report;
    }
  }
  report.kind = Condition::ExposedReset;
  return report;
}

Vec incremental_update(std::span<const float> alpha_prev, const GroupedEvents& grp,
                       Aggregator agg) {
  if (classify(alpha_prev, grp, agg).kind == Condition::ExposedReset)
    fail(Errc::contract, "incremental_update called on an exposed reset");
  Vec out(alpha_prev.begin(), alpha_prev.end());
  if (grp.add_reduced) ewise_reduce_into(agg, *grp.add_reduced, out);
  return out;
}

Vec recompute(const CheckpointStore& store, const DynamicGraph& g, int layer, NodeId node,
              Aggregator agg) {
  auto nbrs = g.neighbors(node, Direction::In);
  Vec alpha(store.dim(layer, Stage::Message), 0.0f);
  if (nbrs.empty()) return alpha;
  auto first = store.read_current(layer, nbrs[0], Stage::Message);
  alpha.assign(first.begin(), first.end());
  for (size_t i = 1; i < nbrs.size(); ++i)
    ewise_reduce_into(agg, store.read_current(layer, nbrs[i], Stage::Message), alpha);
  return alpha;
}

void seed_edge_events(EventQueue& queue, std::span<const EdgeDelta> net_delta,
                      const CheckpointStore& store, int layer) {
  for (const EdgeDelta& d : net_delta) {
    if (d.op == EdgeOp::Delete) {
      auto m = store.read_prev(layer, d.src, Stage::Message);
      queue.push_event(EventOp::Del, d.dst, queue.push_message(Vec(m.begin(), m.end())));
    } else {
      auto m = store.read_current(layer, d.src, Stage::Message);
      queue.push_event(EventOp::Add, d.dst, queue.push_message(Vec(m.begin(), m.end())));
    }
  }
}

namespace {

// Resolves the node's own message from the user-event stash when it changed
// this round, falling back to a counted checkpoint read.
class EngineApplyContext : public ApplyContext {
public:
  EngineApplyContext(const CheckpointStore& store, int layer, NodeId node, const Vec* stashed)
      : store_(store), layer_(layer), node_(node), stashed_(stashed) {}

  std::span<const float> self_message() override {
    if (stashed_) return *stashed_;
    return store_.read_current(layer_, node_, Stage::Message);
  }

private:
  const CheckpointStore& store_;
  int layer_;
  NodeId node_;
  const Vec* stashed_;
};

bool rows_equal(std::span<const float> a, std::span<const float> b) {
  return a.size() == b.size() &&
         std::memcmp(a.data(), b.data(), a.size() * sizeof(float)) == 0;
}

}  // namespace

Engine::Engine(DynamicGraph graph, std::shared_ptr<const Model> model, Mat features,
               EngineOptions opts)
    : graph_(std::move(graph)),
      model_(std::move(model)),
      features_(std::move(features)),
      store_(init_full_inference(graph_, features_, *model_)),
      opts_(opts) {
  validate_inputs();
}

Engine::Engine(DynamicGraph graph, std::shared_ptr<const Model> model, Mat features,
               CheckpointStore store, EngineOptions opts)
    : graph_(std::move(graph)),
      model_(std::move(model)),
      features_(std::move(features)),
      store_(std::move(store)),
      opts_(opts) {
  validate_inputs();
  if (store_.num_nodes() != graph_.num_nodes() || store_.num_layers() != model_->num_layers())
    fail(Errc::dimension, "checkpoint store does not match graph/model");
}

void Engine::validate_inputs() const {
  if (!model_) fail(Errc::invalid_argument, "engine requires a model");
  if (features_.rows() != graph_.num_nodes()) fail(Errc::dimension, "feature rows != node count");
  if (features_.cols() != model_->input_dim())
    fail(Errc::dimension, "feature length != model input dimension");
}

RoundStats Engine::process_update_round(std::span<const EdgeDelta> delta) {
  const int k = model_->num_layers();
  const Aggregator agg = model_->aggregator();
  queues_.resize(k);
  user_queues_.resize(k);
  dirty_.assign(k, {});
  store_.fetches() = {};

  graph_.apply_delta(delta);
  const std::vector<EdgeDelta> net = net_edge_delta(graph_.pending_delta());

  RoundStats stats;
  stats.num_updates = delta.size();
  stats.layers.resize(k);

  for (int l = 1; l <= k; ++l) {
    LayerRoundStats& lstats = stats.layers[l - 1];
    const FetchCounters before = store_.fetches();
    EventQueue& queue = queues_[l - 1];

    seed_edge_events(queue, net, store_, l);
    if (opts_.duplicate_seed_events) {
      const std::vector<Event> seeded = queue.events();
      for (const Event& e : seeded) queue.push_event(e.op, e.target, e.msg_idx);
    }

    std::vector<GroupedEvents> groups = group_and_reduce(queue, agg);

    // user_grouping: the only built-in user event carries the target's own
    // refreshed message.
    std::map<NodeId, Vec> stash;
    for (UserEvent& ue : user_queues_[l - 1]) stash[ue.target] = std::move(ue.payload);
    user_queues_[l - 1].clear();

    lstats.events = queue.events().size();
    lstats.grouped_targets = groups.size();
    lstats.user_targets = stash.size();

    // Merge native and user targets in ascending node order.
    size_t gi = 0;
    auto si = stash.begin();
    while (gi < groups.size() || si != stash.end()) {
      const GroupedEvents* grp = nullptr;
      const Vec* self_new = nullptr;
      NodeId v;
      if (gi < groups.size() && (si == stash.end() || groups[gi].target <= si->first)) {
        grp = &groups[gi];
        v = grp->target;
        if (si != stash.end() && si->first == v) {
          self_new = &si->second;
          ++si;
        }
        ++gi;
      } else {
        v = si->first;
        self_new = &si->second;
        ++si;
      }

      Vec alpha_new;
      bool alpha_changed = false;
      if (grp) {
        auto alpha_prev = store_.read_prev(l, v, Stage::Aggregated);
        if (!grp->del_reduced && graph_.neighbors_prev(v, Direction::In).empty()) {
          // The stored vector is the empty-neighborhood default, not a real
          // reduction; the first neighbors ever aggregate on their own.
          alpha_new = *grp->add_reduced;
          ++lstats.no_deletion;
        } else {
          ConditionReport report = classify(alpha_prev, *grp, agg);
          switch (report.kind) {
            case Condition::NoDeletion: ++lstats.no_deletion; break;
            case Condition::DeletionNoEffect: ++lstats.deletion_no_effect; break;
            case Condition::CoveredReset: ++lstats.covered_reset; break;
            case Condition::ExposedReset: ++lstats.exposed_reset; break;
          }
          if (report.kind == Condition::ExposedReset) {
            alpha_new = recompute(store_, graph_, l, v, agg);
            ++lstats.recomputes;
          } else {
            alpha_new = incremental_update(alpha_prev, *grp, agg);
          }
        }
        alpha_changed = !rows_equal(alpha_new, alpha_prev);
      }

      // Resilient: nothing to write, subtree pruned.
      if (!alpha_changed && !self_new) continue;

      if (alpha_changed) {
        store_.write_current(l, v, Stage::Aggregated, alpha_new);
      } else if (!grp) {
        auto cur = store_.read_current(l, v, Stage::Aggregated);
        alpha_new.assign(cur.begin(), cur.end());
      }
      dirty_[l - 1].push_back(v);

      EngineApplyContext ctx(store_, l, v, self_new);
      Vec m_next = run_combination(*model_, l - 1, std::move(alpha_new), &ctx);

      if (l < k) {
        auto prev_span = store_.read_prev(l + 1, v, Stage::Message);
        Vec m_prev(prev_span.begin(), prev_span.end());
        const bool msg_changed = !rows_equal(m_next, m_prev);
        store_.write_current(l + 1, v, Stage::Message, m_next);

        EventQueue& next_queue = queues_[l];
        uint32_t idx_old = next_queue.push_message(std::move(m_prev));
        uint32_t idx_new = next_queue.push_message(std::move(m_next));
        for (NodeId w : graph_.neighbors_prev(v, Direction::Out))
          next_queue.push_event(EventOp::Del, w, idx_old);
        for (NodeId w : graph_.neighbors(v, Direction::Out))
          next_queue.push_event(EventOp::Add, w, idx_new);

        // user_propagate: pass the refreshed message to the node itself so the
        // next layer's combination sees it even without native events.
        if (model_->has_user_ops() && msg_changed)
          user_queues_[l].push_back({v, Vec(next_queue.message(idx_new))});
      } else {
        store_.write_current(k + 1, v, Stage::Message, m_next);
      }
    }

    queue.clear();
    lstats.dirty_nodes = dirty_[l - 1].size();
    const FetchCounters after = store_.fetches();
    lstats.fetch_rows = after.total() - before.total();
  }

  const FetchCounters fetched = store_.fetches();
  if (model_->has_prefix_ops()) {
    stats.feature_fetches = 0;
    stats.checkpoint_fetches = fetched.total();
  } else {
    stats.feature_fetches = fetched.layer1_message_rows;
    stats.checkpoint_fetches = fetched.other_rows;
  }

  if (opts_.baseline_counters) {
    stats.has_baseline = true;
    stats.affected_fetches = baseline::affected_fetch_count(graph_, net, *model_);
    stats.full_fetches = baseline::full_fetch_count(graph_, *model_);
    stats.affected_area_nodes = baseline::affected_area(graph_, net, k).back().size();
  }

  graph_.commit();
  store_.commit_round();
  return stats;
}

}  // namespace streamgnn
