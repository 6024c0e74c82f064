#include "artist/calibration_kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "artist/errors.hpp"

namespace artist::calib::kernels {

double logit(std::span<const double> w, double b, std::span<const double> features) {
  if (w.size() != features.size()) {
    throw DimensionMismatch("feature length " + std::to_string(features.size()) +
                            " does not match model dimension " + std::to_string(w.size()));
  }
  double z = b;
  for (std::size_t j = 0; j < w.size(); ++j) z += w[j] * features[j];
  return z;
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double sample_loss(double z, double label) {
  const double s = std::clamp(sigmoid(z), kProbClamp, 1.0 - kProbClamp);
  return -label * std::log(s) - (1.0 - label) * std::log(1.0 - s);
}

std::vector<double> softmax(std::span<const double> logits) {
  std::vector<double> out(logits.size());
  if (logits.empty()) return out;
  const double top = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - top);
    sum += out[i];
  }
  for (auto& v : out) v /= sum;
  return out;
}

namespace {

void check_shapes(const FeatureMatrix& x, std::span<const double> labels,
                  std::span<const double> w) {
  if (labels.size() != x.rows) throw DimensionMismatch("label count does not match sample count");
  if (w.size() != x.cols) throw DimensionMismatch("weight length does not match feature length");
  if (x.rows == 0) throw EmptyDataset("no samples");
}

// Ordered reduction shared by both variants.
LossGradient accumulate(const FeatureMatrix& x, std::span<const double> losses,
                        std::span<const double> residuals) {
  LossGradient out;
  out.grad_w.assign(x.cols, 0.0);
  for (std::size_t i = 0; i < x.rows; ++i) {
    const auto f = x.row(i);
    out.loss += losses[i];
    out.grad_b += residuals[i];
    for (std::size_t j = 0; j < x.cols; ++j) out.grad_w[j] += residuals[i] * f[j];
  }
  const double inv = 1.0 / static_cast<double>(x.rows);
  out.loss *= inv;
  out.grad_b *= inv;
  for (auto& g : out.grad_w) g *= inv;
  return out;
}

}  // namespace

namespace serial {

LossGradient loss_and_gradient(const FeatureMatrix& x, std::span<const double> labels,
                               std::span<const double> w, double b) {
  check_shapes(x, labels, w);
  std::vector<double> losses(x.rows);
  std::vector<double> residuals(x.rows);
  for (std::size_t i = 0; i < x.rows; ++i) {
    const double z = logit(w, b, x.row(i));
    losses[i] = sample_loss(z, labels[i]);
    residuals[i] = sigmoid(z) - labels[i];
  }
  return accumulate(x, losses, residuals);
}

double loss(const FeatureMatrix& x, std::span<const double> labels, std::span<const double> w,
            double b) {
  check_shapes(x, labels, w);
  double total = 0.0;
  for (std::size_t i = 0; i < x.rows; ++i) total += sample_loss(logit(w, b, x.row(i)), labels[i]);
  return total * (1.0 / static_cast<double>(x.rows));
}

}  // namespace serial

namespace parallel {

LossGradient loss_and_gradient(const FeatureMatrix& x, std::span<const double> labels,
                               std::span<const double> w, double b) {
  check_shapes(x, labels, w);
  const auto rows = static_cast<std::ptrdiff_t>(x.rows);
  std::vector<double> losses(x.rows);
  std::vector<double> residuals(x.rows);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < rows; ++i) {
    const auto k = static_cast<std::size_t>(i);
    const double z = logit(w, b, x.row(k));
    losses[k] = sample_loss(z, labels[k]);
    residuals[k] = sigmoid(z) - labels[k];
  }
  return accumulate(x, losses, residuals);
}

double loss(const FeatureMatrix& x, std::span<const double> labels, std::span<const double> w,
            double b) {
  check_shapes(x, labels, w);
  const auto rows = static_cast<std::ptrdiff_t>(x.rows);
  std::vector<double> losses(x.rows);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < rows; ++i) {
    const auto k = static_cast<std::size_t>(i);
    losses[k] = sample_loss(logit(w, b, x.row(k)), labels[k]);
  }
  double total = 0.0;
  for (double l : losses) total += l;
  return total * (1.0 / static_cast<double>(x.rows));
}

}  // namespace parallel
}  // namespace artist::calib::kernels
