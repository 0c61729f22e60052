#pragma once

#include <map>
#include <memory>
#include <optional>

#include "core/baseline.hpp"
#include "core/checkpoint.hpp"
#include "core/stats.hpp"

namespace streamgnn {

enum class EventOp : uint8_t { Add, Del };

// {op, target, msg_idx}: apply or cancel the impact of the message stored at
// msg_idx on the target's aggregated neighborhood in the current layer.
struct Event {
  EventOp op;
  NodeId target;
  uint32_t msg_idx;
};

// Per-layer pair of event list and shared message list. Message indices are
// stable for the duration of one round.
class EventQueue {
public:
  uint32_t push_message(Vec v);
  void push_event(EventOp op, NodeId target, uint32_t msg_idx);
  const std::vector<Event>& events() const { return events_; }
  const Vec& message(uint32_t idx) const;
  size_t num_messages() const { return messages_.size(); }
  void clear();

private:
  std::vector<Event> events_;
  std::vector<Vec> messages_;
};

struct GroupedEvents {
  NodeId target = 0;
  std::optional<Vec> del_reduced;  // m_A^-
  std::optional<Vec> add_reduced;  // m_A
};

enum class Condition : uint8_t { NoDeletion, DeletionNoEffect, CoveredReset, ExposedReset };

struct ConditionReport {
  Condition kind = Condition::NoDeletion;
  std::vector<uint32_t> reset_positions;  // D
};

// One GroupedEvents per distinct target, ascending by node id; events with the
// same operation are reduced with the aggregation function.
std::vector<GroupedEvents> group_and_reduce(const EventQueue& queue, Aggregator agg);

// Reset positions are the indices where the old aggregate equals the reduced
// deleted message; they are covered when the reduced added message is at least
// as extreme there.
ConditionReport classify(std::span<const float> alpha_prev, const GroupedEvents& grp,
                         Aggregator agg);

// alpha = A(alpha_prev, m_A); only valid when classify did not report an
// exposed reset.
Vec incremental_update(std::span<const float> alpha_prev, const GroupedEvents& grp,
                       Aggregator agg);

// Fetches every current in-neighbor message and aggregates from scratch.
Vec recompute(const CheckpointStore& store, const DynamicGraph& g, int layer, NodeId node,
              Aggregator agg);

// One event per net-changed edge: deletions push the source's previous
// message, insertions its current one.
void seed_edge_events(EventQueue& queue, std::span<const EdgeDelta> net_delta,
                      const CheckpointStore& store, int layer);

struct EngineOptions {
  bool duplicate_seed_events = false;  // stress option: push every seeded edge event twice
  bool baseline_counters = false;      // include Full/Affected fetch counts in round stats
};

// Event-driven incremental updater. Owns its graph, checkpoint store and a
// copy of the input features; after every round the store matches full
// inference on the current graph bit for bit.
class Engine {
public:
  Engine(DynamicGraph graph, std::shared_ptr<const Model> model, Mat features,
         EngineOptions opts = {});
  Engine(DynamicGraph graph, std::shared_ptr<const Model> model, Mat features,
         CheckpointStore store, EngineOptions opts = {});

  RoundStats process_update_round(std::span<const EdgeDelta> delta);

  const DynamicGraph& graph() const { return graph_; }
  const CheckpointStore& store() const { return store_; }
  const Model& model() const { return *model_; }
  const Mat& features() const { return features_; }
  EngineOptions& options() { return opts_; }

  // Targets written during the last round, per layer (ascending).
  const std::vector<std::vector<NodeId>>& last_dirty_nodes() const { return dirty_; }

private:
  struct UserEvent {
    NodeId target;
    Vec payload;
  };

  void validate_inputs() const;

  DynamicGraph graph_;
  std::shared_ptr<const Model> model_;
  Mat features_;
  CheckpointStore store_;
  EngineOptions opts_;
  std::vector<EventQueue> queues_;                  // [l-1] consumed at layer l
  std::vector<std::vector<UserEvent>> user_queues_;  // [l-1] consumed at layer l
  std::vector<std::vector<NodeId>> dirty_;
};

}  // namespace streamgnn
