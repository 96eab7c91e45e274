#pragma once

#include <cstddef>
#include <vector>

namespace rfk {

// Dense W x H x C grid of doubles, row-major with the channel index
// innermost: index(x, y, c) = (y*W + x)*C + c. All kernels in this project
// assume this one layout and a fixed summation order, so results are
// bit-reproducible.
class FeatureMap {
 public:
  FeatureMap() = default;
  FeatureMap(int width, int height, int channels);
  FeatureMap(int width, int height, int channels, std::vector<double> data);

  static FeatureMap constant(int width, int height, int channels, double value);

  int width() const { return width_; }
  int height() const { return height_; }
  int channels() const { return channels_; }
  std::size_t size() const { return data_.size(); }

  std::size_t index(int x, int y, int c) const {
    return (static_cast<std::size_t>(y) * width_ + x) * channels_ + c;
  }
  double at(int x, int y, int c) const { return data_[index(x, y, c)]; }
  double& at(int x, int y, int c) { return data_[index(x, y, c)]; }

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  bool same_shape(const FeatureMap& other) const {
    return width_ == other.width_ && height_ == other.height_ && channels_ == other.channels_;
  }
  bool operator==(const FeatureMap& other) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  std::vector<double> data_;
};

struct SpatialMap {
  int width = 0;
  int height = 0;
  std::vector<double> values;

  SpatialMap() = default;
  SpatialMap(int w, int h, double fill = 0.0)
      : width(w), height(h), values(static_cast<std::size_t>(w) * h, fill) {}

  std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * width + x; }
  double at(int x, int y) const { return values[index(x, y)]; }
  double& at(int x, int y) { return values[index(x, y)]; }
  bool operator==(const SpatialMap&) const = default;
};

struct ChannelVector {
  std::vector<double> values;

  ChannelVector() = default;
  explicit ChannelVector(std::size_t n, double fill = 0.0) : values(n, fill) {}
  std::size_t size() const { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
  double& operator[](std::size_t i) { return values[i]; }
  bool operator==(const ChannelVector&) const = default;
};

enum class EwOp { add, sub, mul };
FeatureMap ew(EwOp op, const FeatureMap& a, const FeatureMap& b);

FeatureMap scale_spatial(const FeatureMap& a, const SpatialMap& s);
FeatureMap scale_channel(const FeatureMap& a, const ChannelVector& c);

enum class PoolMode { avg, max };
// Global spatial pooling, one value per channel.
ChannelVector pool_channel(const FeatureMap& a, PoolMode mode);
// Per-pixel pooling across channels.
SpatialMap pool_spatial(const FeatureMap& a, PoolMode mode);

// K x K x Cin x Cout weights, K odd; index (ky, kx, cin, cout).
struct ConvKernel {
  int k = 1;
  int in_channels = 1;
  int out_channels = 1;
  std::vector<double> w;

  ConvKernel() = default;
  ConvKernel(int k_, int cin, int cout)
      : k(k_), in_channels(cin), out_channels(cout),
        w(static_cast<std::size_t>(k_) * k_ * cin * cout, 0.0) {}

  std::size_t index(int ky, int kx, int cin, int cout) const {
    return ((static_cast<std::size_t>(ky) * k + kx) * in_channels + cin) * out_channels + cout;
  }
  double at(int ky, int kx, int cin, int cout) const { return w[index(ky, kx, cin, cout)]; }
  double& at(int ky, int kx, int cin, int cout) { return w[index(ky, kx, cin, cout)]; }
};

// Zero-padded "same" convolution; output is W x H x Cout.
FeatureMap conv2d(const FeatureMap& a, const ConvKernel& kernel);

double sigmoid(double x);
FeatureMap sigmoid(const FeatureMap& a);

// Fully connected layer: weights are out x in row-major plus a bias per output.
struct DenseLayer {
  int in = 0;
  int out = 0;
  std::vector<double> w;  // out * in
  std::vector<double> b;  // out

  DenseLayer() = default;
  DenseLayer(int in_, int out_)
      : in(in_), out(out_), w(static_cast<std::size_t>(in_) * out_, 0.0), b(out_, 0.0) {}
};
std::vector<double> dense(const DenseLayer& layer, const std::vector<double>& v);

FeatureMap concat_channels(const FeatureMap& a, const FeatureMap& b);

// Single-channel bridges used by the attention modules.
FeatureMap to_feature_map(const SpatialMap& s);
SpatialMap to_spatial_map(const FeatureMap& single_channel);

}  // namespace rfk
