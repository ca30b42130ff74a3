#ifndef NETMY_OPTIM_HPP
#define NETMY_OPTIM_HPP

#include <Eigen/Core>

#include "netmy/errors.hpp"

namespace netmy {

/// Cosine learning-rate decay from eta_base to floor_frac * eta_base across
/// total steps: eta(t) = eta_min + (eta_base - eta_min) (1 + cos(pi t/T)) / 2.
double cosine_lr(long epoch, long total, double eta_base, double floor_frac = 0.01);

/// Clips to unit global norm (or `clip`) before the moment update; decoupled
/// weight decay by default, classic coupled L2 when decoupled = false.
struct AdamW {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  bool decoupled = true;

  Eigen::VectorXd m, v;
  long t = 0;

  void reset(long n) {
    m = Eigen::VectorXd::Zero(n);
    v = Eigen::VectorXd::Zero(n);
    t = 0;
  }

  void step(Eigen::VectorXd& params, Eigen::VectorXd grad, double lr, double weight_decay, double clip) {
    if (m.size() != params.size()) reset(params.size());
    if (grad.size() != params.size()) throw InvalidInputError("AdamW::step: gradient size mismatch");
    if (clip > 0.0) {
      double n = grad.norm();
      if (n > clip) grad *= clip / n;
    }
    if (!decoupled && weight_decay != 0.0) grad += weight_decay * params;
    ++t;
    m = beta1 * m + (1.0 - beta1) * grad;
    v = beta2 * v + (1.0 - beta2) * grad.cwiseProduct(grad);
    double bc1 = 1.0 - std::pow(beta1, static_cast<double>(t));
    double bc2 = 1.0 - std::pow(beta2, static_cast<double>(t));
    params.array() -= lr * (m.array() / bc1) / ((v.array() / bc2).sqrt() + eps);
    if (decoupled && weight_decay != 0.0) params -= (lr * weight_decay) * params;
  }
};

}  // namespace netmy

#endif
