#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace streamgnn {

struct LayerRoundStats {
  uint64_t events = 0;           // native events consumed at this layer
  uint64_t grouped_targets = 0;  // distinct targets after grouping
  uint64_t user_targets = 0;     // targets carrying a user self-message event
  uint64_t no_deletion = 0;
  uint64_t deletion_no_effect = 0;
  uint64_t covered_reset = 0;
  uint64_t exposed_reset = 0;
  uint64_t recomputes = 0;
  uint64_t dirty_nodes = 0;
  uint64_t fetch_rows = 0;
};

// One record per update round, serialized as a single key=value line so runs
// diff cleanly and reports can be assembled from plain text.
struct RoundStats {
  uint64_t round_index = 0;
  uint64_t num_updates = 0;
  std::vector<LayerRoundStats> layers;
  uint64_t checkpoint_fetches = 0;
  uint64_t feature_fetches = 0;
  bool has_baseline = false;
  uint64_t affected_fetches = 0;
  uint64_t full_fetches = 0;
  uint64_t affected_area_nodes = 0;  // |area(k)| of the theoretical affected area

  uint64_t engine_fetches() const { return checkpoint_fetches + feature_fetches; }
  uint64_t total(uint64_t LayerRoundStats::* field) const;
  uint64_t incremental_targets() const;  // no_deletion + deletion_no_effect + covered_reset

  std::string to_line() const;
  static RoundStats from_line(const std::string& line);
};

}  // namespace streamgnn
