#include "rfk/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rfk/errors.hpp"

namespace rfk {

namespace {
void require(bool ok, const char* message) {
  if (!ok) throw ValidationError(message);
}
}  // namespace

FeatureMap::FeatureMap(int width, int height, int channels)
    : width_(width), height_(height), channels_(channels),
      data_(static_cast<std::size_t>(width) * height * channels, 0.0) {
  require(width >= 1 && height >= 1 && channels >= 1, "feature map dimensions must be >= 1");
}

FeatureMap::FeatureMap(int width, int height, int channels, std::vector<double> data)
    : width_(width), height_(height), channels_(channels), data_(std::move(data)) {
  require(width >= 1 && height >= 1 && channels >= 1, "feature map dimensions must be >= 1");
  require(data_.size() == static_cast<std::size_t>(width) * height * channels,
          "feature map data size does not match dimensions");
  for (double v : data_) {
    if (!std::isfinite(v)) throw ValidationError("feature map values must be finite");
  }
}

FeatureMap FeatureMap::constant(int width, int height, int channels, double value) {
  FeatureMap m(width, height, channels);
  std::fill(m.data_.begin(), m.data_.end(), value);
  return m;
}

FeatureMap ew(EwOp op, const FeatureMap& a, const FeatureMap& b) {
  require(a.same_shape(b), "ew: shape mismatch");
  FeatureMap out(a.width(), a.height(), a.channels());
  const auto& da = a.data();
  const auto& db = b.data();
  auto& dst = out.data();
  switch (op) {
    case EwOp::add:
      for (std::size_t i = 0; i < da.size(); ++i) dst[i] = da[i] + db[i];
      break;
    case EwOp::sub:
      for (std::size_t i = 0; i < da.size(); ++i) dst[i] = da[i] - db[i];
      break;
    case EwOp::mul:
      for (std::size_t i = 0; i < da.size(); ++i) dst[i] = da[i] * db[i];
      break;
  }
  return out;
}

FeatureMap scale_spatial(const FeatureMap& a, const SpatialMap& s) {
  require(s.width == a.width() && s.height == a.height(), "scale_spatial: plane mismatch");
  FeatureMap out(a.width(), a.height(), a.channels());
  for (int y = 0; y < a.height(); ++y) {
    for (int x = 0; x < a.width(); ++x) {
      double w = s.at(x, y);
      for (int c = 0; c < a.channels(); ++c) out.at(x, y, c) = a.at(x, y, c) * w;
    }
  }
  return out;
}

FeatureMap scale_channel(const FeatureMap& a, const ChannelVector& c) {
  require(c.size() == static_cast<std::size_t>(a.channels()), "scale_channel: vector mismatch");
  FeatureMap out(a.width(), a.height(), a.channels());
  for (int y = 0; y < a.height(); ++y) {
    for (int x = 0; x < a.width(); ++x) {
      for (int k = 0; k < a.channels(); ++k) out.at(x, y, k) = a.at(x, y, k) * c[k];
    }
  }
  return out;
}

ChannelVector pool_channel(const FeatureMap& a, PoolMode mode) {
  ChannelVector out(static_cast<std::size_t>(a.channels()));
  for (int c = 0; c < a.channels(); ++c) {
    if (mode == PoolMode::avg) {
      double acc = 0.0;
      for (int y = 0; y < a.height(); ++y)
        for (int x = 0; x < a.width(); ++x) acc += a.at(x, y, c);
      out[c] = acc / (static_cast<double>(a.width()) * a.height());
    } else {
      double best = a.at(0, 0, c);
      for (int y = 0; y < a.height(); ++y)
        for (int x = 0; x < a.width(); ++x) best = std::max(best, a.at(x, y, c));
      out[c] = best;
    }
  }
  return out;
}

SpatialMap pool_spatial(const FeatureMap& a, PoolMode mode) {
  SpatialMap out(a.width(), a.height());
  for (int y = 0; y < a.height(); ++y) {
    for (int x = 0; x < a.width(); ++x) {
      if (mode == PoolMode::avg) {
        double acc = 0.0;
        for (int c = 0; c < a.channels(); ++c) acc += a.at(x, y, c);
        out.at(x, y) = acc / static_cast<double>(a.channels());
      } else {
        double best = a.at(x, y, 0);
        for (int c = 1; c < a.channels(); ++c) best = std::max(best, a.at(x, y, c));
        out.at(x, y) = best;
      }
    }
  }
  return out;
}

FeatureMap conv2d(const FeatureMap& a, const ConvKernel& kernel) {
  require(kernel.k >= 1 && kernel.k % 2 == 1, "conv2d: kernel size must be odd");
  require(kernel.in_channels == a.channels(), "conv2d: input channel mismatch");
  require(kernel.w.size() == static_cast<std::size_t>(kernel.k) * kernel.k *
                                 kernel.in_channels * kernel.out_channels,
          "conv2d: kernel weight size mismatch");
  FeatureMap out(a.width(), a.height(), kernel.out_channels);
  int half = kernel.k / 2;
  for (int y = 0; y < a.height(); ++y) {
    for (int x = 0; x < a.width(); ++x) {
      for (int co = 0; co < kernel.out_channels; ++co) {
        double acc = 0.0;
        for (int ky = 0; ky < kernel.k; ++ky) {
          int sy = y + ky - half;
          if (sy < 0 || sy >= a.height()) continue;  // zero padding
          for (int kx = 0; kx < kernel.k; ++kx) {
            int sx = x + kx - half;
            if (sx < 0 || sx >= a.width()) continue;
            for (int ci = 0; ci < kernel.in_channels; ++ci) {
              acc += a.at(sx, sy, ci) * kernel.at(ky, kx, ci, co);
            }
          }
        }
        out.at(x, y, co) = acc;
      }
    }
  }
  return out;
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

FeatureMap sigmoid(const FeatureMap& a) {
  FeatureMap out(a.width(), a.height(), a.channels());
  const auto& src = a.data();
  auto& dst = out.data();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = sigmoid(src[i]);
  return out;
}

std::vector<double> dense(const DenseLayer& layer, const std::vector<double>& v) {
  require(v.size() == static_cast<std::size_t>(layer.in), "dense: input size mismatch");
  require(layer.w.size() == static_cast<std::size_t>(layer.in) * layer.out &&
              layer.b.size() == static_cast<std::size_t>(layer.out),
          "dense: weight size mismatch");
  std::vector<double> out(static_cast<std::size_t>(layer.out));
  for (int o = 0; o < layer.out; ++o) {
    double acc = layer.b[static_cast<std::size_t>(o)];
    const double* row = layer.w.data() + static_cast<std::size_t>(o) * layer.in;
    for (int i = 0; i < layer.in; ++i) acc += row[i] * v[static_cast<std::size_t>(i)];
    out[static_cast<std::size_t>(o)] = acc;
  }
  return out;
}

FeatureMap concat_channels(const FeatureMap& a, const FeatureMap& b) {
  require(a.width() == b.width() && a.height() == b.height(),
          "concat_channels: spatial shape mismatch");
  FeatureMap out(a.width(), a.height(), a.channels() + b.channels());
  for (int y = 0; y < a.height(); ++y) {
    for (int x = 0; x < a.width(); ++x) {
      for (int c = 0; c < a.channels(); ++c) out.at(x, y, c) = a.at(x, y, c);
      for (int c = 0; c < b.channels(); ++c) out.at(x, y, a.channels() + c) = b.at(x, y, c);
    }
  }
  return out;
}

FeatureMap to_feature_map(const SpatialMap& s) {
  FeatureMap out(s.width, s.height, 1);
  for (int y = 0; y < s.height; ++y)
    for (int x = 0; x < s.width; ++x) out.at(x, y, 0) = s.at(x, y);
  return out;
}

SpatialMap to_spatial_map(const FeatureMap& single_channel) {
  require(single_channel.channels() == 1, "to_spatial_map: expected a single channel");
  SpatialMap out(single_channel.width(), single_channel.height());
  for (int y = 0; y < out.height; ++y)
    for (int x = 0; x < out.width; ++x) out.at(x, y) = single_channel.at(x, y, 0);
  return out;
}

}  // namespace rfk
