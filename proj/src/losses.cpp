#include "rfk/losses.hpp"

#include <algorithm>
#include <cmath>

#include "rfk/errors.hpp"

namespace rfk {

namespace {

double clamped_probability(double p, LossFlags* flags) {
  if (p < kLossEps || p > 1.0 - kLossEps) {
    if (flags) flags->clamped = true;
    return std::clamp(p, kLossEps, 1.0 - kLossEps);
  }
  return p;
}

}  // namespace

SegMask make_seg_mask(const std::vector<Box2D>& boxes, int width, int height) {
  if (width <= 0 || height <= 0) throw ValidationError("make_seg_mask: bad dimensions");
  SegMask mask;
  mask.width = width;
  mask.height = height;
  mask.free_space.assign(static_cast<std::size_t>(width) * height, 1);
  mask.occupied.assign(static_cast<std::size_t>(width) * height, 0);
  for (const Box2D& box : boxes) {
    const int x1 = std::max(0, static_cast<int>(std::ceil(box.x1)));
    const int x2 = std::min(width - 1, static_cast<int>(std::floor(box.x2)));
    const int y1 = std::max(0, static_cast<int>(std::ceil(box.y1)));
    const int y2 = std::min(height - 1, static_cast<int>(std::floor(box.y2)));
    for (int y = y1; y <= y2; ++y) {
      for (int x = x1; x <= x2; ++x) {
        mask.occupied[mask.index(x, y)] = 1;
        mask.free_space[mask.index(x, y)] = 0;
      }
    }
  }
  return mask;
}

double focal_loss(double p, int y, double alpha, double gamma, LossFlags* flags) {
  if (y != 0 && y != 1) throw ValidationError("focal_loss: label must be 0 or 1");
  double pt = (y == 1) ? p : 1.0 - p;
  pt = clamped_probability(pt, flags);
  const double alpha_t = (y == 1) ? alpha : 1.0 - alpha;
  return -alpha_t * std::pow(1.0 - pt, gamma) * std::log(pt);
}

double smooth_l1(const std::array<double, 4>& pred, const std::array<double, 4>& target,
                 double beta) {
  if (!(beta > 0.0)) throw ValidationError("smooth_l1: beta must be positive");
  double total = 0.0;
  for (int i = 0; i < 4; ++i) {
    const double x = std::abs(pred[static_cast<std::size_t>(i)] - target[static_cast<std::size_t>(i)]);
    total += (x < beta) ? 0.5 * x * x / beta : x - 0.5 * beta;
  }
  return total;
}

double bce(const FeatureMap& pred, const SegMask& gt, LossFlags* flags) {
  if (pred.width() != gt.width || pred.height() != gt.height || pred.channels() != 2) {
    throw ValidationError("bce: prediction must be W x H x 2 matching the mask");
  }
  double total = 0.0;
  for (int y = 0; y < pred.height(); ++y) {
    for (int x = 0; x < pred.width(); ++x) {
      const double targets[2] = {static_cast<double>(gt.free_space[gt.index(x, y)]),
                                 static_cast<double>(gt.occupied[gt.index(x, y)])};
      for (int c = 0; c < 2; ++c) {
        const double p = clamped_probability(pred.at(x, y, c), flags);
        total += -(targets[c] * std::log(p) + (1.0 - targets[c]) * std::log(1.0 - p));
      }
    }
  }
  return total / (2.0 * static_cast<double>(pred.width()) * pred.height());
}

double focal_loss_batch(const std::vector<double>& p, const std::vector<int>& y, double alpha,
                        double gamma, Reduction reduction, LossFlags* flags) {
  if (p.size() != y.size()) throw ValidationError("focal_loss_batch: size mismatch");
  if (p.empty()) throw ValidationError("focal_loss_batch: empty input");
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) total += focal_loss(p[i], y[i], alpha, gamma, flags);
  if (reduction == Reduction::mean) return total / static_cast<double>(p.size());
  return total;
}

double smooth_l1_batch(const std::vector<std::array<double, 4>>& pred,
                       const std::vector<std::array<double, 4>>& target, double beta,
                       Reduction reduction) {
  if (pred.size() != target.size()) throw ValidationError("smooth_l1_batch: size mismatch");
  if (pred.empty()) throw ValidationError("smooth_l1_batch: empty input");
  double total = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) total += smooth_l1(pred[i], target[i], beta);
  if (reduction == Reduction::mean) return total / static_cast<double>(pred.size());
  return total;
}

}  // namespace rfk
