#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>

#include "core/synth.hpp"
#include "core/tensor.hpp"
#include "core/tensor_io.hpp"
#include "doctest.h"
#include "helpers.hpp"
#include "oracle.hpp"

using namespace streamgnn;
using test_helpers::identity_mat;
using test_helpers::mat_from_rows;

namespace {

std::vector<Vec> vecs(std::initializer_list<Vec> vs) { return {vs}; }

bool bitwise_equal(const Vec& a, const Vec& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(float)) == 0;
}

}  // namespace

TEST_CASE("ewise_reduce basics") {
  auto in = vecs({{3, 1}, {2, 4}});
  CHECK(ewise_reduce(Aggregator::Min, in) == Vec{2, 1});
  CHECK(ewise_reduce(Aggregator::Max, in) == Vec{3, 4});
  auto single = vecs({{5, 5}});
  CHECK(ewise_reduce(Aggregator::Min, single) == Vec{5, 5});
}

TEST_CASE("ewise_reduce errors") {
  std::vector<Vec> empty;
  CHECK_THROWS_AS(ewise_reduce(Aggregator::Min, empty), Error);
  auto mismatched = vecs({{1, 2}, {1, 2, 3}});
  CHECK_THROWS_AS(ewise_reduce(Aggregator::Min, mismatched), Error);
}

TEST_CASE("ewise_reduce properties") {
  synth::Rng rng(7);
  for (int iter = 0; iter < 200; ++iter) {
    const uint32_t count = 1 + rng.below(6);
    const uint32_t len = 1 + rng.below(8);
    std::vector<Vec> in(count, Vec(len));
    for (auto& v : in)
      for (float& x : v) x = rng.range(-2.0f, 2.0f);
    const Aggregator agg = rng.below(2) ? Aggregator::Max : Aggregator::Min;
    Vec base = ewise_reduce(agg, in);

    // permutation invariance (bitwise)
    std::vector<Vec> shuffled = in;
    for (size_t i = shuffled.size(); i > 1; --i)
      std::swap(shuffled[i - 1], shuffled[rng.below(static_cast<uint32_t>(i))]);
    CHECK(bitwise_equal(ewise_reduce(agg, shuffled), base));

    // idempotence under duplication
    std::vector<Vec> duplicated = in;
    duplicated.push_back(in[rng.below(count)]);
    CHECK(bitwise_equal(ewise_reduce(agg, duplicated), base));

    // selection: every output index equals one of the inputs there
    for (uint32_t j = 0; j < len; ++j) {
      bool found = false;
      for (const auto& v : in) found |= v[j] == base[j];
      CHECK(found);
    }
  }
}

TEST_CASE("matvec_affine basics") {
  Vec b{0, 0};
  CHECK(matvec_affine(identity_mat(2), Vec{3, 4}, &b) == Vec{3, 4});
  CHECK(matvec_affine(mat_from_rows({{1, 1}, {0, 2}}), Vec{1, 2}, nullptr) == Vec{3, 4});

  CHECK_THROWS_AS(matvec_affine(identity_mat(2), Vec{1, 2, 3}, nullptr), Error);
  Vec bad_bias{1, 2, 3};
  CHECK_THROWS_AS(matvec_affine(identity_mat(2), Vec{1, 2}, &bad_bias), Error);
}

TEST_CASE("matvec_affine matches the scalar oracle on random 8x8 inputs") {
  synth::Rng rng(42);
  for (int iter = 0; iter < 50; ++iter) {
    Mat w(8, 8);
    for (float& v : w.data()) v = rng.range(-1.0f, 1.0f);
    Vec x(8), b(8);
    for (float& v : x) v = rng.range(-1.0f, 1.0f);
    for (float& v : b) v = rng.range(-1.0f, 1.0f);

    std::vector<oracle::VecF> w_rows(8, oracle::VecF(8));
    for (uint32_t r = 0; r < 8; ++r)
      for (uint32_t c = 0; c < 8; ++c) w_rows[r][c] = w.row(r)[c];

    CHECK(bitwise_equal(matvec_affine(w, x, &b), oracle::matvec(w_rows, x, &b)));
    CHECK(bitwise_equal(matvec_affine(w, x, nullptr), oracle::matvec(w_rows, x, nullptr)));
  }
}

TEST_CASE("matvec_affine never produces negative zero") {
  Mat w = mat_from_rows({{0, 0}});
  Vec out = matvec_affine(w, Vec{-1, -1}, nullptr);
  CHECK(out[0] == 0.0f);
  CHECK(!std::signbit(out[0]));
}

TEST_CASE("relu") {
  CHECK(relu(Vec{-1, 0, 2}) == Vec{0, 0, 2});
  CHECK(relu(Vec{0, 0}) == Vec{0, 0});
  CHECK(relu(Vec{-3, -0.5f, -100}) == Vec{0, 0, 0});
  Vec flushed = relu(Vec{-0.0f});
  CHECK(!std::signbit(flushed[0]));
}

TEST_CASE("mlp_forward") {
  std::vector<MlpLayer> single;
  single.push_back({identity_mat(2), {}});
  CHECK(mlp_forward(single, Vec{1, -1}) == Vec{1, -1});

  std::vector<MlpLayer> two;
  two.push_back({identity_mat(2), {}});
  two.push_back({identity_mat(2), {}});
  CHECK(mlp_forward(two, Vec{-2, 3}) == Vec{0, 3});  // ReLU between layers clamps -2

  std::vector<MlpLayer> none;
  CHECK_THROWS_AS(mlp_forward(none, Vec{1}), Error);
}

TEST_CASE("mlp_forward matches the scalar oracle on a random 2-layer MLP") {
  synth::Rng rng(9);
  for (int iter = 0; iter < 20; ++iter) {
    std::vector<MlpLayer> layers;
    Vec x(4);
    for (float& v : x) v = rng.range(-1.0f, 1.0f);
    uint32_t dims[3] = {4, 6, 3};
    for (int l = 0; l < 2; ++l) {
      Mat w(dims[l + 1], dims[l]);
      for (float& v : w.data()) v = rng.range(-1.0f, 1.0f);
      Vec b(dims[l + 1]);
      for (float& v : b) v = rng.range(-1.0f, 1.0f);
      layers.push_back({std::move(w), std::move(b)});
    }

    oracle::VecF expect = x;
    for (int l = 0; l < 2; ++l) {
      std::vector<oracle::VecF> w_rows(layers[l].weight.rows(),
                                       oracle::VecF(layers[l].weight.cols()));
      for (uint32_t r = 0; r < layers[l].weight.rows(); ++r)
        for (uint32_t c = 0; c < layers[l].weight.cols(); ++c)
          w_rows[r][c] = layers[l].weight.row(r)[c];
      expect = oracle::matvec(w_rows, expect, &layers[l].bias);
      if (l == 0) expect = oracle::relu(std::move(expect));
    }
    CHECK(bitwise_equal(mlp_forward(layers, x), expect));
  }
}

TEST_CASE("tensor files") {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "sgnn_test_tensor";
  fs::create_directories(dir);

  SUBCASE("round trip is value-identical") {
    synth::Rng rng(5);
    Mat m(7, 3);
    for (float& v : m.data()) v = rng.range(-1.0f, 1.0f);
    write_mat(dir / "m.tnsr", m);
    CHECK(test_helpers::mats_equal(read_mat(dir / "m.tnsr"), m));

    Vec v{1.5f, -2.25f, 0.0f};
    write_vec(dir / "v.tnsr", v);
    CHECK(read_vec(dir / "v.tnsr") == v);
  }
  SUBCASE("rejects NaN payloads") {
    Vec bad{std::numeric_limits<float>::quiet_NaN()};
    uint32_t dims[1] = {1};
    write_tensor(dir / "bad.tnsr", dims, bad);
    CHECK_THROWS_AS(read_vec(dir / "bad.tnsr"), Error);
  }
  SUBCASE("rejects truncated files") {
    std::ofstream out(dir / "trunc.tnsr", std::ios::binary | std::ios::trunc);
    out << "TNSR";
    out.close();
    CHECK_THROWS_AS(read_vec(dir / "trunc.tnsr"), Error);
  }
  SUBCASE("rejects wrong magic") {
    std::ofstream out(dir / "junk.tnsr", std::ios::binary | std::ios::trunc);
    out << "JUNKJUNKJUNKJUNK";
    out.close();
    CHECK_THROWS_AS(read_vec(dir / "junk.tnsr"), Error);
  }
  SUBCASE("flushes negative zero on load") {
    Vec nz{-0.0f};
    uint32_t dims[1] = {1};
    write_tensor(dir / "nz.tnsr", dims, nz);
    Vec loaded = read_vec(dir / "nz.tnsr");
    CHECK(!std::signbit(loaded[0]));
  }
  fs::remove_all(dir);
}
