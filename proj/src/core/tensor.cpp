#include "core/tensor.hpp"

#include <cmath>

namespace streamgnn {

Mat::Mat(uint32_t rows, uint32_t cols, std::vector<float> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != static_cast<size_t>(rows_) * cols_)
    fail(Errc::dimension, "matrix data length does not match rows*cols");
}

std::span<const float> Mat::row(uint32_t r) const {
  if (r >= rows_) fail(Errc::invalid_argument, "matrix row out of range");
  return {data_.data() + static_cast<size_t>(r) * cols_, cols_};
}

std::span<float> Mat::row(uint32_t r) {
  if (r >= rows_) fail(Errc::invalid_argument, "matrix row out of range");
  return {data_.data() + static_cast<size_t>(r) * cols_, cols_};
}

bool has_nan(std::span<const float> v) {
  for (float x : v)
    if (std::isnan(x)) return true;
  return false;
}

void ewise_reduce_into(Aggregator agg, std::span<const float> v, std::span<float> acc) {
  if (v.size() != acc.size()) fail(Errc::dimension, "ewise_reduce: length mismatch");
  for (size_t i = 0; i < v.size(); ++i) acc[i] = reduce2(agg, acc[i], v[i]);
}

Vec ewise_reduce(Aggregator agg, std::span<const Vec> vs) {
  if (vs.empty()) fail(Errc::invalid_argument, "ewise_reduce: empty input");
  Vec out = vs[0];
  for (size_t i = 1; i < vs.size(); ++i) ewise_reduce_into(agg, vs[i], out);
  return out;
}

Vec matvec_affine(const Mat& w, std::span<const float> x, const Vec* bias) {
  if (w.cols() != x.size()) fail(Errc::dimension, "matvec_affine: W.cols != x.len");
  if (bias && bias->size() != w.rows()) fail(Errc::dimension, "matvec_affine: bias length != W.rows");
  Vec out(w.rows());
  for (uint32_t r = 0; r < w.rows(); ++r) {
    auto row = w.row(r);
    float acc = 0.0f;
    for (uint32_t c = 0; c < w.cols(); ++c) acc += row[c] * x[c];
    if (bias) acc += (*bias)[r];
    out[r] = flush_zero(acc);
  }
  return out;
}

Vec relu(Vec x) {
  for (float& v : x) v = v > 0.0f ? v : 0.0f;
  return x;
}

Vec mlp_forward(std::span<const MlpLayer> layers, Vec x) {
  if (layers.empty()) fail(Errc::invalid_argument, "mlp_forward: no layers");
  for (size_t i = 0; i < layers.size(); ++i) {
    const MlpLayer& l = layers[i];
    x = matvec_affine(l.weight, x, l.bias.empty() ? nullptr : &l.bias);
    if (i + 1 < layers.size()) x = relu(std::move(x));
  }
  return x;
}

}  // namespace streamgnn
