#include "rfk/fusion.hpp"

#include <algorithm>
#include <cmath>

#include "rfk/errors.hpp"

namespace rfk {

namespace {

void require(bool ok, const char* message) {
  if (!ok) throw ValidationError(message);
}

void require_same_shape(const FeatureMap& a, const FeatureMap& b, const char* who) {
  if (!a.same_shape(b)) throw ValidationError(std::string(who) + ": shape mismatch");
}

int attention_hidden_size(int channels, int reduction) {
  return std::max(1, (channels + reduction - 1) / reduction);
}

std::vector<double> relu(std::vector<double> v) {
  for (double& x : v) x = std::max(0.0, x);
  return v;
}

}  // namespace

SwfbParams SwfbParams::identity(int width, int height, int channels) {
  SwfbParams p;
  p.img_spatial = SpatialMap(width, height, 1.0);
  p.rad_spatial = SpatialMap(width, height, 1.0);
  p.img_channel = ChannelVector(static_cast<std::size_t>(channels), 1.0);
  p.rad_channel = ChannelVector(static_cast<std::size_t>(channels), 1.0);
  return p;
}

FeatureMap swfb(const FeatureMap& f_img, const FeatureMap& f_rad, const SwfbParams& params) {
  require_same_shape(f_img, f_rad, "swfb");
  require(params.img_spatial.width == f_img.width() &&
              params.img_spatial.height == f_img.height() &&
              params.rad_spatial.width == f_img.width() &&
              params.rad_spatial.height == f_img.height(),
          "swfb: spatial map shape mismatch");
  require(params.img_channel.size() == static_cast<std::size_t>(f_img.channels()) &&
              params.rad_channel.size() == static_cast<std::size_t>(f_img.channels()),
          "swfb: channel vector size mismatch");

  FeatureMap out(f_img.width(), f_img.height(), f_img.channels());
  for (int y = 0; y < f_img.height(); ++y) {
    for (int x = 0; x < f_img.width(); ++x) {
      const double ws_img = params.img_spatial.at(x, y);
      const double ws_rad = params.rad_spatial.at(x, y);
      for (int c = 0; c < f_img.channels(); ++c) {
        out.at(x, y, c) = f_img.at(x, y, c) * ws_img * params.img_channel[c] +
                          f_rad.at(x, y, c) * ws_rad * params.rad_channel[c];
      }
    }
  }
  return out;
}

SwfbGradients swfb_gradients(const FeatureMap& f_img, const FeatureMap& f_rad,
                             const SwfbParams& params, const FeatureMap& upstream) {
  require_same_shape(f_img, f_rad, "swfb_gradients");
  require_same_shape(f_img, upstream, "swfb_gradients");

  SwfbGradients g;
  g.img_spatial = SpatialMap(f_img.width(), f_img.height());
  g.rad_spatial = SpatialMap(f_img.width(), f_img.height());
  g.img_channel = ChannelVector(static_cast<std::size_t>(f_img.channels()));
  g.rad_channel = ChannelVector(static_cast<std::size_t>(f_img.channels()));

  for (int y = 0; y < f_img.height(); ++y) {
    for (int x = 0; x < f_img.width(); ++x) {
      double acc_img = 0.0;
      double acc_rad = 0.0;
      for (int c = 0; c < f_img.channels(); ++c) {
        const double up = upstream.at(x, y, c);
        acc_img += up * f_img.at(x, y, c) * params.img_channel[c];
        acc_rad += up * f_rad.at(x, y, c) * params.rad_channel[c];
        g.img_channel[c] += up * f_img.at(x, y, c) * params.img_spatial.at(x, y);
        g.rad_channel[c] += up * f_rad.at(x, y, c) * params.rad_spatial.at(x, y);
      }
      g.img_spatial.at(x, y) = acc_img;
      g.rad_spatial.at(x, y) = acc_rad;
    }
  }
  return g;
}

SafbParams SafbParams::neutral(int width, int height, int channels, int reduction,
                               int kernel_size) {
  require(reduction >= 1, "safb: reduction must be >= 1");
  require(kernel_size >= 1 && kernel_size % 2 == 1, "safb: kernel size must be odd");
  SafbParams p;
  const int hidden = attention_hidden_size(channels, reduction);
  p.channel.fc1 = DenseLayer(channels, hidden);
  p.channel.fc2 = DenseLayer(hidden, channels);
  p.channel.extra_weight = ChannelVector(static_cast<std::size_t>(channels), 1.0);
  p.spatial.kernel = ConvKernel(kernel_size, 2, 1);
  p.spatial.extra_weight = SpatialMap(width, height, 1.0);
  return p;
}

ChannelVector safb_channel_attention(const FeatureMap& f_img,
                                     const ChannelAttentionParams& params) {
  require(params.extra_weight.size() == static_cast<std::size_t>(f_img.channels()),
          "channel attention: extra weight size mismatch");
  ChannelVector avg = pool_channel(f_img, PoolMode::avg);
  ChannelVector mx = pool_channel(f_img, PoolMode::max);
  std::vector<double> branch_avg = dense(params.fc2, relu(dense(params.fc1, avg.values)));
  std::vector<double> branch_max = dense(params.fc2, relu(dense(params.fc1, mx.values)));
  ChannelVector out(static_cast<std::size_t>(f_img.channels()));
  for (std::size_t c = 0; c < out.size(); ++c) {
    out[c] = sigmoid(branch_avg[c] + branch_max[c]) * params.extra_weight[c];
  }
  return out;
}

SpatialMap safb_spatial_attention(const FeatureMap& f_img, const SpatialAttentionParams& params) {
  require(params.extra_weight.width == f_img.width() &&
              params.extra_weight.height == f_img.height(),
          "spatial attention: extra weight shape mismatch");
  require(params.kernel.in_channels == 2 && params.kernel.out_channels == 1,
          "spatial attention: kernel must be K x K x 2 x 1");
  FeatureMap pooled = concat_channels(to_feature_map(pool_spatial(f_img, PoolMode::avg)),
                                      to_feature_map(pool_spatial(f_img, PoolMode::max)));
  FeatureMap conv = conv2d(pooled, params.kernel);
  SpatialMap out(f_img.width(), f_img.height());
  for (int y = 0; y < out.height; ++y) {
    for (int x = 0; x < out.width; ++x) {
      out.at(x, y) = sigmoid(conv.at(x, y, 0)) * params.extra_weight.at(x, y);
    }
  }
  return out;
}

SpatialMap similarity_weight(const FeatureMap& f_img, const FeatureMap& f_rad) {
  require_same_shape(f_img, f_rad, "similarity_weight");
  SpatialMap out(f_img.width(), f_img.height());
  constexpr double kNormFloor = 1e-12;  // squared-norm threshold is its square
  for (int y = 0; y < f_img.height(); ++y) {
    for (int x = 0; x < f_img.width(); ++x) {
      double dot = 0.0;
      double nn_img = 0.0;
      double nn_rad = 0.0;
      for (int c = 0; c < f_img.channels(); ++c) {
        const double a = f_img.at(x, y, c);
        const double b = f_rad.at(x, y, c);
        dot += a * b;
        nn_img += a * a;
        nn_rad += b * b;
      }
      if (nn_img < kNormFloor * kNormFloor || nn_rad < kNormFloor * kNormFloor) {
        out.at(x, y) = 0.5;
      } else {
        // sqrt of the product keeps identical inputs at exactly cos = 1.
        double cosine = dot / std::sqrt(nn_img * nn_rad);
        cosine = std::clamp(cosine, -1.0, 1.0);
        out.at(x, y) = (cosine + 1.0) / 2.0;
      }
    }
  }
  return out;
}

FusionOutput safb(const FeatureMap& f_img, const FeatureMap& f_rad, const SafbParams& params) {
  require_same_shape(f_img, f_rad, "safb");
  FusionOutput out;
  out.diagnostics.w_channel = safb_channel_attention(f_img, params.channel);
  out.diagnostics.w_spatial = safb_spatial_attention(f_img, params.spatial);
  out.diagnostics.w_similarity = similarity_weight(f_img, f_rad);

  out.fused = FeatureMap(f_img.width(), f_img.height(), f_img.channels());
  for (int y = 0; y < f_img.height(); ++y) {
    for (int x = 0; x < f_img.width(); ++x) {
      const double pixel_w =
          out.diagnostics.w_similarity.at(x, y) * out.diagnostics.w_spatial.at(x, y);
      for (int c = 0; c < f_img.channels(); ++c) {
        out.fused.at(x, y, c) =
            f_rad.at(x, y, c) + f_img.at(x, y, c) * pixel_w * out.diagnostics.w_channel[c];
      }
    }
  }
  return out;
}

FeatureMap baseline_fuse(BaselineFusion mode, const FeatureMap& f_img, const FeatureMap& f_rad) {
  switch (mode) {
    case BaselineFusion::concat:
      return concat_channels(f_img, f_rad);
    case BaselineFusion::add:
      return ew(EwOp::add, f_img, f_rad);
    case BaselineFusion::mul:
      return ew(EwOp::mul, f_img, f_rad);
  }
  throw ValidationError("baseline_fuse: unknown mode");
}

SafbExtraGradients safb_extra_gradients(const FeatureMap& f_img, const FeatureMap& f_rad,
                                        const SafbParams& params, const FeatureMap& upstream) {
  require_same_shape(f_img, f_rad, "safb_extra_gradients");
  require_same_shape(f_img, upstream, "safb_extra_gradients");

  // Attention outputs before the extra weights.
  ChannelAttentionParams channel_unit = params.channel;
  channel_unit.extra_weight =
      ChannelVector(static_cast<std::size_t>(f_img.channels()), 1.0);
  SpatialAttentionParams spatial_unit = params.spatial;
  spatial_unit.extra_weight = SpatialMap(f_img.width(), f_img.height(), 1.0);

  ChannelVector base_channel = safb_channel_attention(f_img, channel_unit);
  SpatialMap base_spatial = safb_spatial_attention(f_img, spatial_unit);
  SpatialMap sim = similarity_weight(f_img, f_rad);

  SafbExtraGradients g;
  g.extra_channel = ChannelVector(static_cast<std::size_t>(f_img.channels()));
  g.extra_spatial = SpatialMap(f_img.width(), f_img.height());

  for (int y = 0; y < f_img.height(); ++y) {
    for (int x = 0; x < f_img.width(); ++x) {
      const double sim_w = sim.at(x, y);
      const double full_spatial = base_spatial.at(x, y) * params.spatial.extra_weight.at(x, y);
      double acc_spatial = 0.0;
      for (int c = 0; c < f_img.channels(); ++c) {
        const double up = upstream.at(x, y, c);
        const double img = f_img.at(x, y, c);
        const double full_channel = base_channel[c] * params.channel.extra_weight[c];
        g.extra_channel[c] += up * img * sim_w * full_spatial * base_channel[c];
        acc_spatial += up * img * sim_w * full_channel;
      }
      g.extra_spatial.at(x, y) = acc_spatial * base_spatial.at(x, y);
    }
  }
  return g;
}

}  // namespace rfk
