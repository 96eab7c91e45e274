#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "rfk/errors.hpp"
#include "rfk/fusion.hpp"

using namespace rfk;

namespace {

FeatureMap random_map(int w, int h, int c, std::uint64_t seed, double lo = -2.0, double hi = 2.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  FeatureMap m(w, h, c);
  for (double& v : m.data()) v = dist(rng);
  return m;
}

// SAFB parameters that force every weight to exactly one: zero attention
// internals give sigmoid 0.5, doubled extras bring it back to 1.
SafbParams unit_safb(int w, int h, int c) {
  SafbParams p = SafbParams::neutral(w, h, c);
  p.channel.extra_weight = ChannelVector(static_cast<std::size_t>(c), 2.0);
  p.spatial.extra_weight = SpatialMap(w, h, 2.0);
  return p;
}

}  // namespace

TEST_CASE("swfb with unit maps is elementwise addition, bit for bit") {
  FeatureMap img = random_map(4, 3, 2, 11);
  FeatureMap rad = random_map(4, 3, 2, 12);
  SwfbParams p = SwfbParams::identity(4, 3, 2);
  CHECK(swfb(img, rad, p) == ew(EwOp::add, img, rad));
}

TEST_CASE("swfb annihilates a branch with zero spatial weight") {
  FeatureMap img = random_map(3, 3, 2, 13);
  FeatureMap rad = random_map(3, 3, 2, 14);
  SwfbParams p = SwfbParams::identity(3, 3, 2);
  p.img_spatial = SpatialMap(3, 3, 0.0);
  CHECK(swfb(img, rad, p) == rad);
}

TEST_CASE("swfb single-pixel hand substitution") {
  FeatureMap img(1, 1, 1, {2.0});
  FeatureMap rad(1, 1, 1, {3.0});
  SwfbParams p = SwfbParams::identity(1, 1, 1);
  p.img_spatial.at(0, 0) = 0.5;
  p.img_channel[0] = 1.0;
  p.rad_spatial.at(0, 0) = 1.0;
  p.rad_channel[0] = 2.0;
  CHECK(swfb(img, rad, p).at(0, 0, 0) == doctest::Approx(7.0).epsilon(1e-15));
}

TEST_CASE("swfb is linear in the image branch") {
  FeatureMap img = random_map(3, 2, 2, 15);
  FeatureMap rad = random_map(3, 2, 2, 16);
  SwfbParams p = SwfbParams::identity(3, 2, 2);
  p.img_spatial.at(1, 0) = 0.7;
  p.rad_channel[1] = 1.3;
  FeatureMap base = swfb(img, rad, p);
  FeatureMap zero_rad(3, 2, 2);
  FeatureMap img_term = swfb(img, zero_rad, p);
  FeatureMap scaled_img = img;
  for (double& v : scaled_img.data()) v *= 2.0;
  FeatureMap doubled = swfb(scaled_img, zero_rad, p);
  for (std::size_t i = 0; i < base.data().size(); ++i) {
    CHECK(doubled.data()[i] == doctest::Approx(2.0 * img_term.data()[i]).epsilon(1e-12));
  }
}

TEST_CASE("channel attention closed forms") {
  FeatureMap img = random_map(4, 4, 4, 17, 0.1, 1.0);
  SafbParams p = SafbParams::neutral(4, 4, 4);

  SUBCASE("zero weights and unit extra give 0.5 everywhere") {
    ChannelVector w = safb_channel_attention(img, p.channel);
    for (std::size_t c = 0; c < w.size(); ++c) CHECK(w[c] == 0.5);
  }
  SUBCASE("extra weight 2 gives exactly 1") {
    p.channel.extra_weight = ChannelVector(4, 2.0);
    ChannelVector w = safb_channel_attention(img, p.channel);
    for (std::size_t c = 0; c < w.size(); ++c) CHECK(w[c] == 1.0);
  }
  SUBCASE("constant input makes both mlp branches coincide") {
    FeatureMap constant = FeatureMap::constant(4, 4, 4, 0.7);
    // nonzero mlp so the branches actually compute something
    std::mt19937_64 rng(18);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (double& v : p.channel.fc1.w) v = dist(rng);
    for (double& v : p.channel.fc2.w) v = dist(rng);
    ChannelVector avg = pool_channel(constant, PoolMode::avg);
    ChannelVector mx = pool_channel(constant, PoolMode::max);
    for (std::size_t c = 0; c < avg.size(); ++c) {
      CHECK(avg[c] == doctest::Approx(mx[c]).epsilon(1e-12));
    }
    ChannelVector w = safb_channel_attention(constant, p.channel);
    // both branches (nearly) equal => sigmoid(2 * branch)
    std::vector<double> hidden = dense(p.channel.fc1, mx.values);
    for (double& v : hidden) v = std::max(0.0, v);
    std::vector<double> branch = dense(p.channel.fc2, hidden);
    for (std::size_t c = 0; c < w.size(); ++c) {
      CHECK(w[c] == doctest::Approx(sigmoid(2.0 * branch[c])).epsilon(1e-9));
    }
  }
}

TEST_CASE("spatial attention closed forms") {
  FeatureMap img = random_map(5, 4, 3, 19);
  SafbParams p = SafbParams::neutral(5, 4, 3);

  SUBCASE("zero kernel and unit extra give 0.5") {
    SpatialMap w = safb_spatial_attention(img, p.spatial);
    for (double v : w.values) CHECK(v == 0.5);
  }
  SUBCASE("zero extra annihilates") {
    p.spatial.extra_weight = SpatialMap(5, 4, 0.0);
    SpatialMap w = safb_spatial_attention(img, p.spatial);
    for (double v : w.values) CHECK(v == 0.0);
  }
  SUBCASE("1x1 input reduces the conv to a dot product") {
    FeatureMap tiny(1, 1, 2, {3.0, -1.0});
    SafbParams q = SafbParams::neutral(1, 1, 2, 4, 3);
    // only the kernel center sees the single pixel
    q.spatial.kernel.at(1, 1, 0, 0) = 0.25;  // avg plane: (3 - 1)/2 = 1
    q.spatial.kernel.at(1, 1, 1, 0) = 0.5;   // max plane: 3
    SpatialMap w = safb_spatial_attention(tiny, q.spatial);
    CHECK(w.at(0, 0) == doctest::Approx(sigmoid(0.25 * 1.0 + 0.5 * 3.0)).epsilon(1e-15));
  }
}

TEST_CASE("similarity weight") {
  SUBCASE("identical nonzero vectors give exactly 1") {
    FeatureMap a = random_map(4, 3, 3, 20, 0.5, 1.5);
    SpatialMap w = similarity_weight(a, a);
    for (double v : w.values) CHECK(v == 1.0);
  }
  SUBCASE("orthogonal vectors give 0.5") {
    FeatureMap a(1, 1, 2, {1.0, 0.0});
    FeatureMap b(1, 1, 2, {0.0, 1.0});
    CHECK(similarity_weight(a, b).at(0, 0) == 0.5);
  }
  SUBCASE("anti-parallel vectors give 0") {
    FeatureMap a(1, 1, 2, {1.0, 2.0});
    FeatureMap b(1, 1, 2, {-1.0, -2.0});
    CHECK(similarity_weight(a, b).at(0, 0) == 0.0);
  }
  SUBCASE("near-zero norms are neutral") {
    FeatureMap a(1, 1, 2, {0.0, 0.0});
    FeatureMap b(1, 1, 2, {1.0, 2.0});
    CHECK(similarity_weight(a, b).at(0, 0) == 0.5);
    CHECK(similarity_weight(b, a).at(0, 0) == 0.5);
  }
}

TEST_CASE("safb with forced unit weights is elementwise addition, bit for bit") {
  for (std::uint64_t seed : {21ull, 22ull, 23ull}) {
    FeatureMap img = random_map(3, 4, 2, seed, 0.5, 1.5);
    FusionOutput out = safb(img, img, unit_safb(3, 4, 2));
    CHECK(out.fused == ew(EwOp::add, img, img));
    for (double v : out.diagnostics.w_similarity.values) CHECK(v == 1.0);
  }
}

TEST_CASE("safb with zero image map returns the radar map") {
  FeatureMap img(3, 3, 2);  // all zeros
  FeatureMap rad = random_map(3, 3, 2, 24);
  FusionOutput out = safb(img, rad, SafbParams::neutral(3, 3, 2));
  CHECK(out.fused == rad);
  for (double v : out.diagnostics.w_similarity.values) CHECK(v == 0.5);
}

TEST_CASE("safb single-pixel hand substitution") {
  // weights multiply to 0.25: fused = 1 + 4 * 0.25 = 2
  FeatureMap img(1, 1, 1, {4.0});
  FeatureMap rad(1, 1, 1, {1.0});
  SafbParams p = SafbParams::neutral(1, 1, 1);
  // neutral params: W_c = W_s = 0.5; parallel 1-d vectors: W_sim = 1
  FusionOutput out = safb(img, rad, p);
  CHECK(out.diagnostics.w_channel[0] == 0.5);
  CHECK(out.diagnostics.w_spatial.at(0, 0) == 0.5);
  CHECK(out.diagnostics.w_similarity.at(0, 0) == 1.0);
  CHECK(out.fused.at(0, 0, 0) == doctest::Approx(2.0).epsilon(1e-15));

  SUBCASE("orthogonal channels push W_sim to the midpoint") {
    FeatureMap img2(1, 1, 2, {4.0, 0.0});
    FeatureMap rad2(1, 1, 2, {0.0, 1.0});
    FusionOutput out2 = safb(img2, rad2, SafbParams::neutral(1, 1, 2));
    CHECK(out2.diagnostics.w_similarity.at(0, 0) == 0.5);
    // fused ch0 = 0 + 4 * 0.5 * 0.5 * 0.5 = 0.5
    CHECK(out2.fused.at(0, 0, 0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(out2.fused.at(0, 0, 1) == doctest::Approx(1.0).epsilon(1e-15));
  }
}

TEST_CASE("safb attention weights stay inside their ranges") {
  std::mt19937_64 seeds(25);
  for (int trial = 0; trial < 5; ++trial) {
    FeatureMap img = random_map(4, 4, 3, seeds());
    FeatureMap rad = random_map(4, 4, 3, seeds());
    SafbParams p = SafbParams::neutral(4, 4, 3);
    std::mt19937_64 rng(seeds());
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (double& v : p.channel.fc1.w) v = dist(rng);
    for (double& v : p.channel.fc2.w) v = dist(rng);
    for (double& v : p.spatial.kernel.w) v = dist(rng);
    FusionOutput out = safb(img, rad, p);
    for (double v : out.diagnostics.w_channel.values) {
      CHECK(v > 0.0);
      CHECK(v < 1.0);
    }
    for (double v : out.diagnostics.w_spatial.values) {
      CHECK(v > 0.0);
      CHECK(v < 1.0);
    }
    for (double v : out.diagnostics.w_similarity.values) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
    // therefore the image contribution is attenuated elementwise
    for (int y = 0; y < 4; ++y)
      for (int x = 0; x < 4; ++x)
        for (int c = 0; c < 3; ++c) {
          double contribution = out.fused.at(x, y, c) - rad.at(x, y, c);
          CHECK(std::abs(contribution) <= std::abs(img.at(x, y, c)) + 1e-15);
        }
  }
}

TEST_CASE("baseline fusions") {
  FeatureMap img = random_map(3, 2, 2, 26);
  FeatureMap rad = random_map(3, 2, 2, 27);
  FeatureMap zeros(3, 2, 2);
  FeatureMap ones = FeatureMap::constant(3, 2, 2, 1.0);
  CHECK(baseline_fuse(BaselineFusion::add, img, zeros) == img);
  CHECK(baseline_fuse(BaselineFusion::mul, img, ones) == img);
  FeatureMap cat = baseline_fuse(BaselineFusion::concat, img, rad);
  CHECK(cat.channels() == 4);
  CHECK(cat.at(2, 1, 3) == rad.at(2, 1, 1));
}

TEST_CASE("swfb gradients: zero upstream and the hand formula") {
  FeatureMap img = random_map(3, 2, 2, 28);
  FeatureMap rad = random_map(3, 2, 2, 29);
  SwfbParams p = SwfbParams::identity(3, 2, 2);
  p.img_spatial.at(1, 1) = 0.4;
  p.img_channel[1] = -0.7;

  SUBCASE("zero upstream zeroes every gradient") {
    SwfbGradients g = swfb_gradients(img, rad, p, FeatureMap(3, 2, 2));
    for (double v : g.img_spatial.values) CHECK(v == 0.0);
    for (double v : g.rad_spatial.values) CHECK(v == 0.0);
    for (double v : g.img_channel.values) CHECK(v == 0.0);
    for (double v : g.rad_channel.values) CHECK(v == 0.0);
  }

  SUBCASE("channel gradient matches the explicit sum") {
    FeatureMap up = random_map(3, 2, 2, 30);
    SwfbGradients g = swfb_gradients(img, rad, p, up);
    for (int c = 0; c < 2; ++c) {
      double expected = 0.0;
      for (int y = 0; y < 2; ++y)
        for (int x = 0; x < 3; ++x)
          expected += up.at(x, y, c) * img.at(x, y, c) * p.img_spatial.at(x, y);
      CHECK(g.img_channel[static_cast<std::size_t>(c)] ==
            doctest::Approx(expected).epsilon(1e-12));
    }
  }
}

namespace {

// Central finite differences of sum(upstream * swfb(...)) along one scalar.
template <typename Eval>
double central_difference(Eval eval, double& slot, double step = 1e-5) {
  const double saved = slot;
  slot = saved + step;
  double plus = eval();
  slot = saved - step;
  double minus = eval();
  slot = saved;
  return (plus - minus) / (2.0 * step);
}

double weighted_sum(const FeatureMap& upstream, const FeatureMap& value) {
  double acc = 0.0;
  for (std::size_t i = 0; i < value.data().size(); ++i) {
    acc += upstream.data()[i] * value.data()[i];
  }
  return acc;
}

}  // namespace

TEST_CASE("swfb gradients match central finite differences") {
  std::mt19937_64 seeds(31);
  double worst = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    FeatureMap img = random_map(4, 4, 3, seeds());
    FeatureMap rad = random_map(4, 4, 3, seeds());
    FeatureMap up = random_map(4, 4, 3, seeds());
    SwfbParams p = SwfbParams::identity(4, 4, 3);
    std::mt19937_64 rng(seeds());
    std::uniform_real_distribution<double> dist(0.2, 1.8);
    for (double& v : p.img_spatial.values) v = dist(rng);
    for (double& v : p.rad_spatial.values) v = dist(rng);
    for (double& v : p.img_channel.values) v = dist(rng);
    for (double& v : p.rad_channel.values) v = dist(rng);

    SwfbGradients g = swfb_gradients(img, rad, p, up);
    auto eval = [&] { return weighted_sum(up, swfb(img, rad, p)); };
    auto check = [&](double analytic, double& slot) {
      double numeric = central_difference(eval, slot);
      double scale = std::max({1.0, std::abs(analytic), std::abs(numeric)});
      double rel = std::abs(analytic - numeric) / scale;
      worst = std::max(worst, rel);
      CHECK(rel < 1e-6);
    };
    for (std::size_t i = 0; i < p.img_spatial.values.size(); ++i)
      check(g.img_spatial.values[i], p.img_spatial.values[i]);
    for (std::size_t i = 0; i < p.rad_spatial.values.size(); ++i)
      check(g.rad_spatial.values[i], p.rad_spatial.values[i]);
    for (std::size_t i = 0; i < p.img_channel.values.size(); ++i)
      check(g.img_channel.values[i], p.img_channel.values[i]);
    for (std::size_t i = 0; i < p.rad_channel.values.size(); ++i)
      check(g.rad_channel.values[i], p.rad_channel.values[i]);
  }
  MESSAGE("worst swfb relative error: ", worst);
}

TEST_CASE("safb extra-weight gradients match central finite differences") {
  std::mt19937_64 seeds(32);
  for (int trial = 0; trial < 3; ++trial) {
    FeatureMap img = random_map(4, 3, 3, seeds(), 0.2, 1.5);
    FeatureMap rad = random_map(4, 3, 3, seeds(), 0.2, 1.5);
    FeatureMap up = random_map(4, 3, 3, seeds());
    SafbParams p = SafbParams::neutral(4, 3, 3);
    std::mt19937_64 rng(seeds());
    std::uniform_real_distribution<double> dist(-0.8, 0.8);
    for (double& v : p.channel.fc1.w) v = dist(rng);
    for (double& v : p.channel.fc2.w) v = dist(rng);
    for (double& v : p.spatial.kernel.w) v = dist(rng);
    std::uniform_real_distribution<double> extras(0.3, 1.7);
    for (double& v : p.channel.extra_weight.values) v = extras(rng);
    for (double& v : p.spatial.extra_weight.values) v = extras(rng);

    SafbExtraGradients g = safb_extra_gradients(img, rad, p, up);
    auto eval = [&] { return weighted_sum(up, safb(img, rad, p).fused); };
    for (std::size_t i = 0; i < p.channel.extra_weight.values.size(); ++i) {
      double numeric = central_difference(eval, p.channel.extra_weight.values[i]);
      double analytic = g.extra_channel.values[i];
      double rel = std::abs(analytic - numeric) /
                   std::max({1.0, std::abs(analytic), std::abs(numeric)});
      CHECK(rel < 1e-6);
    }
    for (std::size_t i = 0; i < p.spatial.extra_weight.values.size(); ++i) {
      double numeric = central_difference(eval, p.spatial.extra_weight.values[i]);
      double analytic = g.extra_spatial.values[i];
      double rel = std::abs(analytic - numeric) /
                   std::max({1.0, std::abs(analytic), std::abs(numeric)});
      CHECK(rel < 1e-6);
    }
  }
}

TEST_CASE("fusion shape mismatches are rejected") {
  FeatureMap a(2, 2, 2);
  FeatureMap b(3, 2, 2);
  CHECK_THROWS_AS(swfb(a, b, SwfbParams::identity(2, 2, 2)), ValidationError);
  CHECK_THROWS_AS(similarity_weight(a, b), ValidationError);
  CHECK_THROWS_AS(safb(a, b, SafbParams::neutral(2, 2, 2)), ValidationError);
  CHECK_THROWS_AS(swfb_gradients(a, b, SwfbParams::identity(2, 2, 2), a), ValidationError);
}
