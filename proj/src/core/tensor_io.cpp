#include "core/tensor_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>

namespace streamgnn {

static_assert(std::endian::native == std::endian::little,
              "tensor files are little-endian; big-endian hosts are not supported");

namespace {
constexpr char kMagic[4] = {'T', 'N', 'S', 'R'};
constexpr uint32_t kMaxRank = 8;
}  // namespace

void write_tensor(const std::filesystem::path& path, std::span<const uint32_t> dims,
                  std::span<const float> data) {
  if (dims.empty() || dims.size() > kMaxRank)
    fail(Errc::invalid_argument, "write_tensor: bad rank");
  size_t expected = 1;
  for (uint32_t d : dims) expected *= d;
  if (expected != data.size()) fail(Errc::dimension, "write_tensor: dims do not match payload");

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(Errc::io, "cannot open for write: " + path.string());
  out.write(kMagic, 4);
  uint32_t rank = static_cast<uint32_t>(dims.size());
  out.write(reinterpret_cast<const char*>(&rank), sizeof rank);
  out.write(reinterpret_cast<const char*>(dims.data()), dims.size() * sizeof(uint32_t));
  out.write(reinterpret_cast<const char*>(data.data()), data.size() * sizeof(float));
  if (!out) fail(Errc::io, "write failed: " + path.string());
}

Tensor read_tensor(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::io, "cannot open: " + path.string());

  char magic[4];
  uint32_t rank = 0;
  in.read(magic, 4);
  in.read(reinterpret_cast<char*>(&rank), sizeof rank);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    fail(Errc::format, "not a tensor file: " + path.string());
  if (rank == 0 || rank > kMaxRank) fail(Errc::format, "bad tensor rank in " + path.string());

  Tensor t;
  t.dims.resize(rank);
  in.read(reinterpret_cast<char*>(t.dims.data()), rank * sizeof(uint32_t));
  if (!in) fail(Errc::format, "truncated tensor header: " + path.string());

  size_t count = 1;
  for (uint32_t d : t.dims) {
    if (d == 0) fail(Errc::format, "zero dimension in " + path.string());
    count *= d;
  }
  t.data.resize(count);
  in.read(reinterpret_cast<char*>(t.data.data()), count * sizeof(float));
  if (!in) fail(Errc::format, "truncated tensor payload: " + path.string());
  if (in.peek() != std::ifstream::traits_type::eof())
    fail(Errc::format, "trailing bytes in tensor file: " + path.string());

  if (has_nan(t.data)) fail(Errc::nan_input, "NaN in tensor file: " + path.string());
  for (float& v : t.data) v = flush_zero(v);
  return t;
}

void write_mat(const std::filesystem::path& path, const Mat& m) {
  uint32_t dims[2] = {m.rows(), m.cols()};
  write_tensor(path, dims, m.data());
}

Mat read_mat(const std::filesystem::path& path) {
  Tensor t = read_tensor(path);
  if (t.dims.size() != 2) fail(Errc::format, "expected rank-2 tensor: " + path.string());
  return Mat(t.dims[0], t.dims[1], std::move(t.data));
}

void write_vec(const std::filesystem::path& path, const Vec& v) {
  uint32_t dims[1] = {static_cast<uint32_t>(v.size())};
  write_tensor(path, dims, v);
}

Vec read_vec(const std::filesystem::path& path) {
  Tensor t = read_tensor(path);
  if (t.dims.size() != 1) fail(Errc::format, "expected rank-1 tensor: " + path.string());
  return std::move(t.data);
}

}  // namespace streamgnn
