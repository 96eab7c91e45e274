#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "rfk/scene.hpp"
#include "rfk/tensor.hpp"

namespace rfk {

// Two complementary binary planes: free(i,j) + occupied(i,j) = 1 everywhere.
struct SegMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> free_space;
  std::vector<std::uint8_t> occupied;

  std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * width + x; }
};

// occupied = union of box interiors (boundary-inclusive on integer pixels),
// free = its complement.
SegMask make_seg_mask(const std::vector<Box2D>& boxes, int width, int height);

constexpr double kLossEps = 1e-7;

struct LossFlags {
  bool clamped = false;  // a probability hit the epsilon clamp
};

// RetinaNet focal loss for one binary prediction. y is 0 or 1; p is the
// predicted probability of the positive class.
double focal_loss(double p, int y, double alpha = 0.25, double gamma = 2.0,
                  LossFlags* flags = nullptr);

// Huber-style box regression loss summed over the four box coordinates.
double smooth_l1(const std::array<double, 4>& pred, const std::array<double, 4>& target,
                 double beta = 1.0);

// Mean binary cross-entropy over all pixels and both mask channels.
// Channel 0 is free space, channel 1 is occupied.
double bce(const FeatureMap& pred, const SegMask& gt, LossFlags* flags = nullptr);

enum class Reduction { sum_positive, mean };

double focal_loss_batch(const std::vector<double>& p, const std::vector<int>& y, double alpha,
                        double gamma, Reduction reduction, LossFlags* flags = nullptr);

double smooth_l1_batch(const std::vector<std::array<double, 4>>& pred,
                       const std::vector<std::array<double, 4>>& target, double beta,
                       Reduction reduction);

}  // namespace rfk
