#pragma once

#include "rfk/tensor.hpp"

namespace rfk {

// Per-modality spatial and channel weighting maps. With every map at 1 the
// block reduces to elementwise addition.
struct SwfbParams {
  SpatialMap img_spatial;
  SpatialMap rad_spatial;
  ChannelVector img_channel;
  ChannelVector rad_channel;

  static SwfbParams identity(int width, int height, int channels);
};

// out(i,j,k) = img(i,j,k) * Ps_img(i,j) * Pc_img(k)
//            + rad(i,j,k) * Ps_rad(i,j) * Pc_rad(k)
FeatureMap swfb(const FeatureMap& f_img, const FeatureMap& f_rad, const SwfbParams& params);

struct SwfbGradients {
  SpatialMap img_spatial;
  SpatialMap rad_spatial;
  ChannelVector img_channel;
  ChannelVector rad_channel;
};

// Gradients of sum(upstream * swfb(...)) with respect to the four maps.
SwfbGradients swfb_gradients(const FeatureMap& f_img, const FeatureMap& f_rad,
                             const SwfbParams& params, const FeatureMap& upstream);

// Channel attention: shared two-layer MLP (hidden = ceil(C / reduction),
// ReLU) applied to the average- and max-pooled channel descriptors, summed,
// squashed, then multiplied by a trainable per-channel weight.
struct ChannelAttentionParams {
  DenseLayer fc1;
  DenseLayer fc2;
  ChannelVector extra_weight;
};

// Spatial attention: a K x K x 2 x 1 convolution (no bias) over the
// channel-pooled avg/max planes, squashed, then multiplied by a trainable
// per-pixel weight.
struct SpatialAttentionParams {
  ConvKernel kernel;  // k x k x 2 x 1
  SpatialMap extra_weight;
};

struct SafbParams {
  ChannelAttentionParams channel;
  SpatialAttentionParams spatial;

  // Zero attention weights, extra weights at 1: the attention outputs are a
  // uniform 0.5 and the extras act as identity.
  static SafbParams neutral(int width, int height, int channels, int reduction = 4,
                            int kernel_size = 7);
};

ChannelVector safb_channel_attention(const FeatureMap& f_img,
                                     const ChannelAttentionParams& params);
SpatialMap safb_spatial_attention(const FeatureMap& f_img, const SpatialAttentionParams& params);

// Per-pixel cosine similarity of the two channel vectors, rescaled to
// [0, 1]. Pixels where either vector has near-zero norm get the neutral 0.5.
SpatialMap similarity_weight(const FeatureMap& f_img, const FeatureMap& f_rad);

struct FusionDiagnostics {
  ChannelVector w_channel;
  SpatialMap w_spatial;
  SpatialMap w_similarity;
};

struct FusionOutput {
  FeatureMap fused;
  FusionDiagnostics diagnostics;
};

// fused(i,j,k) = f_rad(i,j,k) + f_img(i,j,k) * W_sim(i,j) * W_s(i,j) * W_c(k)
FusionOutput safb(const FeatureMap& f_img, const FeatureMap& f_rad, const SafbParams& params);

enum class BaselineFusion { concat, add, mul };
FeatureMap baseline_fuse(BaselineFusion mode, const FeatureMap& f_img, const FeatureMap& f_rad);

struct SafbExtraGradients {
  ChannelVector extra_channel;
  SpatialMap extra_spatial;
};

// Gradients of sum(upstream * safb(...).fused) with respect to the two
// trainable extra weighting maps.
SafbExtraGradients safb_extra_gradients(const FeatureMap& f_img, const FeatureMap& f_rad,
                                        const SafbParams& params, const FeatureMap& upstream);

}  // namespace rfk
