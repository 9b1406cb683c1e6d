#include "sitm/fusion.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numeric>

#include "sitm/error.hpp"
#include "sitm/gbdt.hpp"

namespace sitm {
namespace {

double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

}  // namespace

std::size_t polynomial_feature_count(std::size_t m) { return 1 + m + m * (m + 1) / 2; }

std::vector<double> polynomial_features(std::span<const double> p) {
  std::vector<double> out;
  out.reserve(polynomial_feature_count(p.size()));
  out.push_back(1.0);
  for (double v : p) out.push_back(v);
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (std::size_t j = i; j < p.size(); ++j) out.push_back(p[i] * p[j]);
  }
  return out;
}

double FusionModel::margin(std::span<const double> probabilities) const {
  const auto terms = polynomial_features(probabilities);
  double z = weights[0];
  for (std::size_t k = 1; k < terms.size(); ++k) z += weights[k] * (terms[k] - center[k]) / scale[k];
  return z;
}

double FusionModel::predict_proba(std::span<const double> probabilities) const {
  return sigmoid(margin(probabilities));
}

FusionModel late_fusion_fit(const Matrix& probabilities, std::span<const std::uint8_t> labels,
                            std::span<const std::size_t> rows, const FusionParams& params,
                            std::vector<std::string> modality_order) {
  const std::size_t m = probabilities.cols();
  const std::size_t d = polynomial_feature_count(m);
  const std::size_t n = rows.size();
  if (m == 0 || n == 0) throw Error(ErrorKind::InputError, "late fusion needs at least one modality and one row");
  if (!(params.regularization_c > 0.0)) throw Error(ErrorKind::ConfigError, "fusion regularization must be positive");

  Eigen::MatrixXd z(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  Eigen::VectorXd y(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = probabilities.row(rows[i]);
    for (double p : row) {
      if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
        throw Error(ErrorKind::InputError, "fusion inputs must be finite probabilities");
      }
    }
    const auto terms = polynomial_features(row);
    for (std::size_t k = 0; k < d; ++k) z(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = terms[k];
    y(static_cast<Eigen::Index>(i)) = labels[rows[i]] ? 1.0 : 0.0;
  }

  FusionModel model;
  model.modality_order = std::move(modality_order);
  model.center.assign(d, 0.0);
  model.scale.assign(d, 1.0);
  for (std::size_t k = 1; k < d; ++k) {
    auto col = z.col(static_cast<Eigen::Index>(k));
    const double mu = col.mean();
    const double sd = std::sqrt((col.array() - mu).square().mean());
    model.center[k] = mu;
    model.scale[k] = sd > 1e-12 ? sd : 1.0;
    col = (col.array() - mu) / model.scale[k];
  }

  const double lambda = 1.0 / params.regularization_c;
  Eigen::VectorXd penalty = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(d), lambda);
  penalty(0) = 0.0;

  auto objective = [&](const Eigen::VectorXd& w) {
    const Eigen::VectorXd eta = z * w;
    double loss = 0.0;
    for (Eigen::Index i = 0; i < eta.size(); ++i) loss += softplus(eta(i)) - y(i) * eta(i);
    return loss + 0.5 * (penalty.array() * w.array().square()).sum();
  };

  Eigen::VectorXd w = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d));
  double current = objective(w);
  int iter = 0;
  for (; iter < params.max_iterations; ++iter) {
    const Eigen::VectorXd eta = z * w;
    Eigen::VectorXd p(eta.size()), s(eta.size());
    for (Eigen::Index i = 0; i < eta.size(); ++i) {
      p(i) = sigmoid(eta(i));
      s(i) = p(i) * (1.0 - p(i));
    }
    const Eigen::VectorXd grad = z.transpose() * (p - y) + penalty.cwiseProduct(w);
    if (grad.norm() < params.tolerance) {
      model.converged = true;
      break;
    }
    Eigen::MatrixXd hess = z.transpose() * s.asDiagonal() * z;
    hess.diagonal() += penalty;
    hess.diagonal().array() += 1e-12;
    const Eigen::VectorXd step = hess.ldlt().solve(grad);
    const double slope = grad.dot(step);
    double t = 1.0;
    Eigen::VectorXd candidate = w - step;
    double next = objective(candidate);
    while (next > current - 1e-4 * t * slope && t > 1e-10) {
      t *= 0.5;
      candidate = w - t * step;
      next = objective(candidate);
    }
    if (!(next < current)) {
      // No further decrease is representable; the gradient is at round-off level.
      model.converged = grad.norm() < 1e-6;
      break;
    }
    w = candidate;
    current = next;
  }
  model.iterations = iter;
  model.weights.assign(w.data(), w.data() + w.size());
  return model;
}

FusionModel late_fusion_fit(const Matrix& probabilities, std::span<const std::uint8_t> labels,
                            const FusionParams& params, std::vector<std::string> modality_order) {
  std::vector<std::size_t> rows(probabilities.rows());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return late_fusion_fit(probabilities, labels, rows, params, std::move(modality_order));
}

}  // namespace sitm
