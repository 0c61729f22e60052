#include "core/stats.hpp"

#include <sstream>

#include "core/error.hpp"

namespace streamgnn {

uint64_t RoundStats::total(uint64_t LayerRoundStats::* field) const {
  uint64_t sum = 0;
  for (const auto& l : layers) sum += l.*field;
  return sum;
}

uint64_t RoundStats::incremental_targets() const {
  return total(&LayerRoundStats::no_deletion) + total(&LayerRoundStats::deletion_no_effect) +
         total(&LayerRoundStats::covered_reset);
}

std::string RoundStats::to_line() const {
  std::ostringstream out;
  out << "round=" << round_index << " updates=" << num_updates << " layers=" << layers.size()
      << " events=" << total(&LayerRoundStats::events)
      << " targets=" << total(&LayerRoundStats::grouped_targets)
      << " user_targets=" << total(&LayerRoundStats::user_targets)
      << " no_deletion=" << total(&LayerRoundStats::no_deletion)
      << " deletion_no_effect=" << total(&LayerRoundStats::deletion_no_effect)
      << " covered_reset=" << total(&LayerRoundStats::covered_reset)
      << " exposed_reset=" << total(&LayerRoundStats::exposed_reset)
      << " recomputes=" << total(&LayerRoundStats::recomputes)
      << " dirty=" << total(&LayerRoundStats::dirty_nodes)
      << " ckpt_fetches=" << checkpoint_fetches << " feat_fetches=" << feature_fetches;
  if (has_baseline)
    out << " affected_fetches=" << affected_fetches << " full_fetches=" << full_fetches
        << " area_nodes=" << affected_area_nodes;
  for (size_t i = 0; i < layers.size(); ++i) {
    const auto& l = layers[i];
    const std::string p = "l" + std::to_string(i + 1) + ".";
    out << ' ' << p << "events=" << l.events << ' ' << p << "targets=" << l.grouped_targets
        << ' ' << p << "user_targets=" << l.user_targets << ' ' << p
        << "no_deletion=" << l.no_deletion << ' ' << p
        << "deletion_no_effect=" << l.deletion_no_effect << ' ' << p
        << "covered_reset=" << l.covered_reset << ' ' << p << "exposed_reset=" << l.exposed_reset
        << ' ' << p << "recomputes=" << l.recomputes << ' ' << p << "dirty=" << l.dirty_nodes
        << ' ' << p << "fetch_rows=" << l.fetch_rows;
  }
  return out.str();
}

RoundStats RoundStats::from_line(const std::string& line) {
  RoundStats stats;
  std::istringstream in(line);
  std::string tok;
  size_t num_layers = 0;

  auto parse_u64 = [](const std::string& s) -> uint64_t {
    return std::stoull(s);
  };

  std::vector<std::pair<std::string, std::string>> kvs;
  while (in >> tok) {
    auto eq = tok.find('=');
    if (eq == std::string::npos) fail(Errc::format, "bad stats token: " + tok);
    kvs.emplace_back(tok.substr(0, eq), tok.substr(eq + 1));
  }
  for (const auto& [k, v] : kvs)
    if (k == "layers") num_layers = parse_u64(v);
  stats.layers.resize(num_layers);

  for (const auto& [k, v] : kvs) {
    uint64_t val = parse_u64(v);
    if (k == "round")
      stats.round_index = val;
    else if (k == "updates")
      stats.num_updates = val;
    else if (k == "ckpt_fetches")
      stats.checkpoint_fetches = val;
    else if (k == "feat_fetches")
      stats.feature_fetches = val;
    else if (k == "affected_fetches") {
      stats.affected_fetches = val;
      stats.has_baseline = true;
    } else if (k == "full_fetches") {
      stats.full_fetches = val;
      stats.has_baseline = true;
    } else if (k == "area_nodes") {
      stats.affected_area_nodes = val;
      stats.has_baseline = true;
    } else if (k.size() > 1 && k[0] == 'l' && k.find('.') != std::string::npos) {
      size_t dot = k.find('.');
      size_t idx = parse_u64(k.substr(1, dot - 1));
      if (idx < 1 || idx > num_layers) fail(Errc::format, "bad layer index in stats: " + k);
      LayerRoundStats& l = stats.layers[idx - 1];
      std::string field = k.substr(dot + 1);
      if (field == "events")
        l.events = val;
      else if (field == "targets")
        l.grouped_targets = val;
      else if (field == "user_targets")
        l.user_targets = val;
      else if (field == "no_deletion")
        l.no_deletion = val;
      else if (field == "deletion_no_effect")
        l.deletion_no_effect = val;
      else if (field == "covered_reset")
        l.covered_reset = val;
      else if (field == "exposed_reset")
        l.exposed_reset = val;
      else if (field == "recomputes")
        l.recomputes = val;
      else if (field == "dirty")
        l.dirty_nodes = val;
      else if (field == "fetch_rows")
        l.fetch_rows = val;
    }
    // Totals are recomputed from the per-layer fields; unknown keys ignored.
  }
  return stats;
}

}  // namespace streamgnn
