#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "core/error.hpp"

namespace streamgnn {

using Vec = std::vector<float>;

enum class Aggregator : uint8_t { Min, Max };

// Negative zeros would make min/max selection depend on input order; every
// produced value is flushed to +0 so stored vectors compare bitwise.
inline float flush_zero(float x) { return x == 0.0f ? 0.0f : x; }

inline float reduce2(Aggregator agg, float acc, float v) {
  return agg == Aggregator::Min ? (v < acc ? v : acc) : (v > acc ? v : acc);
}

// Row-major float matrix. Used both for weight matrices (rows x cols) and for
// per-node tables (num_nodes x dim).
class Mat {
public:
  Mat() = default;
  Mat(uint32_t rows, uint32_t cols)
      : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols, 0.0f) {}
  Mat(uint32_t rows, uint32_t cols, std::vector<float> data);

  uint32_t rows() const { return rows_; }
  uint32_t cols() const { return cols_; }
  std::span<const float> row(uint32_t r) const;
  std::span<float> row(uint32_t r);
  const std::vector<float>& data() const { return data_; }
  std::vector<float>& data() { return data_; }

  bool operator==(const Mat&) const = default;

private:
  uint32_t rows_ = 0;
  uint32_t cols_ = 0;
  std::vector<float> data_;
};

bool has_nan(std::span<const float> v);

// acc[i] = A(acc[i], v[i])
void ewise_reduce_into(Aggregator agg, std::span<const float> v, std::span<float> acc);

Vec ewise_reduce(Aggregator agg, std::span<const Vec> vs);

// W * x (+ b). Accumulation is a plain float sum over ascending column index,
// no FMA or reordering, with b added after the dot product; oracles that want
// bitwise agreement must follow the same order.
Vec matvec_affine(const Mat& w, std::span<const float> x, const Vec* bias);

Vec relu(Vec x);

struct MlpLayer {
  Mat weight;
  Vec bias;  // empty = no bias
};

// Affine layers with ReLU between them; no activation after the last layer.
Vec mlp_forward(std::span<const MlpLayer> layers, Vec x);

}  // namespace streamgnn
