#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace artist::calib {

// Row-major samples x features.
struct FeatureMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  FeatureMatrix() = default;
  FeatureMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  std::span<double> row(std::size_t i) { return {data.data() + i * cols, cols}; }
  std::span<const double> row(std::size_t i) const { return {data.data() + i * cols, cols}; }
};

struct LossGradient {
  double loss = 0.0;  // mean over samples
  std::vector<double> grad_w;
  double grad_b = 0.0;
};

namespace kernels {

inline constexpr double kProbClamp = 1e-12;

double logit(std::span<const double> w, double b, std::span<const double> features);
double sigmoid(double z);

// Binary cross-entropy of one sample; the sigmoid is clamped to
// [1e-12, 1 - 1e-12] before the logs.
double sample_loss(double z, double label);

// Softmax via log-sum-exp.
std::vector<double> softmax(std::span<const double> logits);

// Full-batch mean logistic loss and its gradient. Both variants accumulate
// the per-sample terms in index order, so their results are bit-identical;
// the parallel one only spreads the per-sample work across OpenMP threads.
namespace serial {
LossGradient loss_and_gradient(const FeatureMatrix& x, std::span<const double> labels,
                               std::span<const double> w, double b);
double loss(const FeatureMatrix& x, std::span<const double> labels, std::span<const double> w,
            double b);
}  // namespace serial

namespace parallel {
LossGradient loss_and_gradient(const FeatureMatrix& x, std::span<const double> labels,
                               std::span<const double> w, double b);
double loss(const FeatureMatrix& x, std::span<const double> labels, std::span<const double> w,
            double b);
}  // namespace parallel

}  // namespace kernels
}  // namespace artist::calib
