#pragma once

#include <filesystem>
#include <random>

#include "core/graph.hpp"
#include "core/model.hpp"

namespace streamgnn::synth {

// Deterministic generator helpers; the float construction avoids
// std::uniform_real_distribution so output is identical across standard
// library implementations.
class Rng {
public:
  explicit Rng(uint64_t seed) : eng_(seed) {}
  uint64_t next_u64() { return eng_(); }
  uint32_t below(uint32_t n) { return static_cast<uint32_t>(next_u64() % n); }
  float unit() { return static_cast<float>(next_u64() >> 40) * (1.0f / 16777216.0f); }  // [0,1)
  float range(float lo, float hi) { return flush_zero(lo + (hi - lo) * unit()); }

private:
  std::mt19937_64 eng_;
};

struct GenConfig {
  uint32_t num_nodes = 1000;
  double avg_degree = 8.0;
  uint32_t feature_len = 16;
  uint32_t stream_len = 200;
  uint64_t seed = 1;
  double insert_fraction = 0.6;
};

DynamicGraph gen_graph(const GenConfig& cfg, Rng& rng);
Mat gen_features(const GenConfig& cfg, Rng& rng);  // uniform [0,1)

// Mixed insert/delete stream; every delete targets an edge that is live at
// that point of the stream.
std::vector<EdgeDelta> gen_stream(const DynamicGraph& base, const GenConfig& cfg, Rng& rng);

// Writes edges.txt, features.tnsr, stream.txt and a gen.txt config echo.
void write_dataset(const GenConfig& cfg, const std::filesystem::path& dir);

struct ModelGenConfig {
  std::string kind;  // "gcn" | "sage" | "gin"
  uint32_t feature_len = 16;
  uint32_t hidden = 16;
  uint32_t layers = 2;
  uint64_t seed = 1;
  float epsilon = 0.1f;  // gin only
};

std::pair<ModelSpec, WeightSet> make_model(const ModelGenConfig& cfg);

// Writes description.txt plus a weight manifest and tensor files.
void write_model(const ModelGenConfig& cfg, const std::filesystem::path& dir);

}  // namespace streamgnn::synth
