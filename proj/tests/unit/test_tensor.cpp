#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "helpers.hpp"
#include "rfk/errors.hpp"
#include "rfk/tensor.hpp"
#include "rfk/tensor_io.hpp"

using namespace rfk;

namespace {

FeatureMap random_map(int w, int h, int c, std::uint64_t seed, double lo = -2.0, double hi = 2.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  FeatureMap m(w, h, c);
  for (double& v : m.data()) v = dist(rng);
  return m;
}

// Independent convolution reference: collect products in (ky, kx, cin)
// order, then add them up one by one.
double conv_reference_at(const FeatureMap& a, const ConvKernel& k, int x, int y, int co) {
  std::vector<double> products;
  int half = k.k / 2;
  for (int ky = 0; ky < k.k; ++ky) {
    for (int kx = 0; kx < k.k; ++kx) {
      for (int ci = 0; ci < k.in_channels; ++ci) {
        int sy = y + ky - half;
        int sx = x + kx - half;
        if (sy < 0 || sy >= a.height() || sx < 0 || sx >= a.width()) continue;
        products.push_back(a.at(sx, sy, ci) * k.at(ky, kx, ci, co));
      }
    }
  }
  double acc = 0.0;
  for (double p : products) acc += p;
  return acc;
}

}  // namespace

TEST_CASE("elementwise ops and identities") {
  FeatureMap a = random_map(3, 2, 4, 1);
  FeatureMap zeros(3, 2, 4);
  FeatureMap ones = FeatureMap::constant(3, 2, 4, 1.0);

  CHECK(ew(EwOp::add, a, zeros) == a);
  CHECK(ew(EwOp::mul, a, ones) == a);
  CHECK(ew(EwOp::sub, a, a) == zeros);

  FeatureMap b = random_map(3, 2, 4, 2);
  CHECK(ew(EwOp::add, a, b) == ew(EwOp::add, b, a));  // bit-exact commutativity
  CHECK(ew(EwOp::mul, a, b) == ew(EwOp::mul, b, a));

  CHECK_THROWS_AS(ew(EwOp::add, a, FeatureMap(2, 2, 4)), ValidationError);
}

TEST_CASE("spatial and channel scaling") {
  FeatureMap a = random_map(4, 3, 2, 3);
  SpatialMap s_one(4, 3, 1.0);
  SpatialMap s_zero(4, 3, 0.0);
  ChannelVector c_one(2, 1.0);

  CHECK(scale_spatial(a, s_one) == a);
  CHECK(scale_channel(a, c_one) == a);
  FeatureMap zeroed = scale_spatial(a, s_zero);
  for (double v : zeroed.data()) CHECK(v == 0.0);

  SUBCASE("composition order does not matter") {
    SpatialMap s(4, 3);
    for (std::size_t i = 0; i < s.values.size(); ++i) s.values[i] = 0.5 + 0.1 * double(i);
    ChannelVector c(2);
    c[0] = 2.0;
    c[1] = -0.5;
    CHECK(scale_channel(scale_spatial(a, s), c) == scale_spatial(scale_channel(a, c), s));
  }
  SUBCASE("dimension mismatch") {
    CHECK_THROWS_AS(scale_spatial(a, SpatialMap(3, 3)), ValidationError);
    CHECK_THROWS_AS(scale_channel(a, ChannelVector(3)), ValidationError);
  }
}

TEST_CASE("pooling") {
  SUBCASE("constant map pools to the constant") {
    FeatureMap c = FeatureMap::constant(3, 3, 2, 4.25);
    ChannelVector pc = pool_channel(c, PoolMode::avg);
    CHECK(pc[0] == 4.25);
    CHECK(pc[1] == 4.25);
    SpatialMap ps = pool_spatial(c, PoolMode::max);
    CHECK(ps.at(1, 1) == 4.25);
  }
  SUBCASE("avg of {1, 3} is 2") {
    FeatureMap m(2, 1, 1, {1.0, 3.0});
    CHECK(pool_channel(m, PoolMode::avg)[0] == 2.0);
    CHECK(pool_channel(m, PoolMode::max)[0] == 3.0);
    FeatureMap chans(1, 1, 2, {1.0, 3.0});
    CHECK(pool_spatial(chans, PoolMode::avg).at(0, 0) == 2.0);
    CHECK(pool_spatial(chans, PoolMode::max).at(0, 0) == 3.0);
  }
  SUBCASE("max dominates avg") {
    FeatureMap m = random_map(5, 4, 3, 4);
    ChannelVector avg = pool_channel(m, PoolMode::avg);
    ChannelVector mx = pool_channel(m, PoolMode::max);
    for (std::size_t i = 0; i < avg.size(); ++i) CHECK(mx[i] >= avg[i]);
    SpatialMap savg = pool_spatial(m, PoolMode::avg);
    SpatialMap smax = pool_spatial(m, PoolMode::max);
    for (std::size_t i = 0; i < savg.values.size(); ++i) CHECK(smax.values[i] >= savg.values[i]);
  }
}

TEST_CASE("conv2d with a delta kernel is the identity") {
  FeatureMap a = random_map(5, 5, 2, 5);
  ConvKernel k(3, 2, 2);
  k.at(1, 1, 0, 0) = 1.0;
  k.at(1, 1, 1, 1) = 1.0;
  CHECK(conv2d(a, k) == a);
}

TEST_CASE("conv2d single position matches a hand dot product") {
  FeatureMap a(3, 3, 1, {1, 2, 3, 4, 5, 6, 7, 8, 9});
  ConvKernel k(3, 1, 1);
  for (int ky = 0; ky < 3; ++ky)
    for (int kx = 0; kx < 3; ++kx) k.at(ky, kx, 0, 0) = 0.1 * (ky * 3 + kx + 1);
  FeatureMap out = conv2d(a, k);
  // center output: full overlap, sum_i 0.1*i * a_i with a in reading order
  double expected = 0.0;
  for (int i = 1; i <= 9; ++i) expected += 0.1 * i * i;
  CHECK(out.at(1, 1, 0) == doctest::Approx(expected).epsilon(1e-15));
  // corner output: only the bottom-right 2x2 of the kernel sees data
  double corner = 0.5 * 1 + 0.6 * 2 + 0.8 * 4 + 0.9 * 5;
  CHECK(out.at(0, 0, 0) == doctest::Approx(corner).epsilon(1e-15));
}

TEST_CASE("conv2d matches the naive reference exactly on random cases") {
  std::mt19937_64 seeds(99);
  for (int trial = 0; trial < 10; ++trial) {
    FeatureMap a = random_map(5, 5, 2, seeds());
    ConvKernel k(3, 2, 3);
    std::mt19937_64 rng(seeds());
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (double& w : k.w) w = dist(rng);
    FeatureMap out = conv2d(a, k);
    for (int y = 0; y < 5; ++y)
      for (int x = 0; x < 5; ++x)
        for (int co = 0; co < 3; ++co) CHECK(out.at(x, y, co) == conv_reference_at(a, k, x, y, co));
  }
}

TEST_CASE("conv2d shape validation") {
  FeatureMap a = random_map(4, 4, 2, 6);
  ConvKernel even(2, 2, 1);
  even.w.assign(2 * 2 * 2 * 1, 0.0);
  CHECK_THROWS_AS(conv2d(a, even), ValidationError);
  ConvKernel wrong_cin(3, 3, 1);
  CHECK_THROWS_AS(conv2d(a, wrong_cin), ValidationError);
}

TEST_CASE("sigmoid") {
  CHECK(sigmoid(0.0) == 0.5);
  CHECK(sigmoid(100.0) > 0.999);
  CHECK(sigmoid(-100.0) < 0.001);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> dist(-10.0, 10.0);
  double prev_x = -std::numeric_limits<double>::infinity();
  std::vector<double> xs;
  for (int i = 0; i < 100; ++i) xs.push_back(dist(rng));
  std::sort(xs.begin(), xs.end());
  double prev = 0.0;
  for (double x : xs) {
    double y = sigmoid(x);
    CHECK(y > 0.0);
    CHECK(y < 1.0);
    CHECK(y >= prev);
    prev = y;
    prev_x = x;
  }
  (void)prev_x;
  FeatureMap m(1, 1, 2, {0.0, 1.0});
  FeatureMap s = sigmoid(m);
  CHECK(s.at(0, 0, 0) == 0.5);
}

TEST_CASE("dense layer") {
  DenseLayer layer(2, 2);
  layer.w = {1.0, 2.0, 3.0, 4.0};  // out x in
  layer.b = {0.5, -0.5};
  std::vector<double> out = dense(layer, {1.0, 1.0});
  CHECK(out[0] == doctest::Approx(3.5));
  CHECK(out[1] == doctest::Approx(6.5));
  CHECK_THROWS_AS(dense(layer, {1.0}), ValidationError);
}

TEST_CASE("concat doubles the channel count") {
  FeatureMap a = random_map(2, 2, 2, 8);
  FeatureMap b = random_map(2, 2, 3, 9);
  FeatureMap c = concat_channels(a, b);
  CHECK(c.channels() == 5);
  CHECK(c.at(1, 1, 1) == a.at(1, 1, 1));
  CHECK(c.at(1, 1, 3) == b.at(1, 1, 1));
  CHECK_THROWS_AS(concat_channels(a, FeatureMap(3, 2, 1)), ValidationError);
}

TEST_CASE("feature maps reject non-finite values and bad shapes") {
  CHECK_THROWS_AS(FeatureMap(1, 1, 1, {std::numeric_limits<double>::quiet_NaN()}),
                  ValidationError);
  CHECK_THROWS_AS(FeatureMap(1, 1, 1, {std::numeric_limits<double>::infinity()}),
                  ValidationError);
  CHECK_THROWS_AS(FeatureMap(2, 2, 1, {1.0}), ValidationError);
  CHECK_THROWS_AS(FeatureMap(0, 1, 1), ValidationError);
}

TEST_CASE("fmap serialization round trips") {
  FeatureMap m = random_map(4, 3, 2, 10);
  std::vector<std::uint8_t> bytes = serialize_feature_map(m);
  CHECK(deserialize_feature_map(bytes) == m);

  test::TempDir dir;
  write_feature_map(m, dir.file("m.fmap"));
  CHECK(read_feature_map(dir.file("m.fmap")) == m);

  SUBCASE("bad magic") {
    bytes[0] = 'X';
    CHECK_THROWS_AS(deserialize_feature_map(bytes), ParseError);
  }
  SUBCASE("size mismatch") {
    bytes.resize(bytes.size() - 8);
    CHECK_THROWS_AS(deserialize_feature_map(bytes), ParseError);
  }
}
