#pragma once

#include <filesystem>
#include <vector>

#include "core/tensor.hpp"

namespace streamgnn {

// Tensor file: magic "TNSR", u32 rank, u32 dims[rank], f32 payload row-major,
// all little-endian.
struct Tensor {
  std::vector<uint32_t> dims;
  std::vector<float> data;
};

void write_tensor(const std::filesystem::path& path, std::span<const uint32_t> dims,
                  std::span<const float> data);

// Rejects NaN payloads and flushes negative zeros.
Tensor read_tensor(const std::filesystem::path& path);

void write_mat(const std::filesystem::path& path, const Mat& m);
Mat read_mat(const std::filesystem::path& path);

void write_vec(const std::filesystem::path& path, const Vec& v);
Vec read_vec(const std::filesystem::path& path);

}  // namespace streamgnn
