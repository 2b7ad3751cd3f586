#pragma once

#include <Eigen/Core>
#include <stdexcept>

namespace ssp {

/// Running weighted average of the iterates. Two schemes from the rate
/// analysis plus a last-iterate mode:
///  - ConvexWeighted: weight alpha_k (2 - alpha_k L) per iterate,
///  - StronglyConvexWeighted: weight (k+1)^2 for k > k0, nothing before,
///  - LastIterate: no averaging.
class AveragingState {
 public:
  enum class Mode { ConvexWeighted, StronglyConvexWeighted, LastIterate };

  AveragingState() = default;

  static AveragingState convex_weighted(Eigen::Index dim) {
    return AveragingState(Mode::ConvexWeighted, dim, 0);
  }

  static AveragingState strongly_convex_weighted(Eigen::Index dim, long k0) {
    return AveragingState(Mode::StronglyConvexWeighted, dim, k0);
  }

  static AveragingState last_iterate(Eigen::Index dim) {
    return AveragingState(Mode::LastIterate, dim, 0);
  }

  Mode mode() const { return mode_; }
  double total_weight() const { return total_weight_; }
  long k0() const { return k0_; }

  void update(const Eigen::VectorXd& x_k, long k, double alpha_k, double L) {
    last_ = x_k;
    switch (mode_) {
      case Mode::LastIterate:
        return;
      case Mode::ConvexWeighted: {
        const double w = alpha_k * (2.0 - alpha_k * L);
        weighted_sum_ += w * x_k;
        total_weight_ += w;
        return;
      }
      case Mode::StronglyConvexWeighted: {
        if (k <= k0_) return;
        const double w = static_cast<double>(k + 1) * static_cast<double>(k + 1);
        weighted_sum_ += w * x_k;
        total_weight_ += w;
        return;
      }
    }
  }

  /// Current average (or last iterate before any weight accumulates).
  Eigen::VectorXd average() const {
    if (mode_ == Mode::LastIterate || total_weight_ <= 0.0) return last_;
    return weighted_sum_ / total_weight_;
  }

 private:
  AveragingState(Mode mode, Eigen::Index dim, long k0)
      : mode_(mode),
        k0_(k0),
        weighted_sum_(Eigen::VectorXd::Zero(dim)),
        last_(Eigen::VectorXd::Zero(dim)) {}

  Mode mode_ = Mode::LastIterate;
  long k0_ = 0;
  double total_weight_ = 0.0;
  Eigen::VectorXd weighted_sum_;
  Eigen::VectorXd last_;
};

}  // namespace ssp
