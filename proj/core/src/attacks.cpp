#include "advjnd/attacks.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "advjnd/error.hpp"

namespace advjnd {

void AttackConfig::validate() const {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw Error(Errc::invalid_config, "attacks", "epsilon must lie in [0,1]");
  }
  if (!(step >= 0.0 && step <= epsilon)) {
    throw Error(Errc::invalid_config, "attacks", "step must lie in [0,epsilon]");
  }
  if (max_iters < 1) {
    throw Error(Errc::invalid_config, "attacks", "max_iters must be >= 1");
  }
  if (!(rho_ratio > 0.0 && rho_ratio < 1.0)) {
    throw Error(Errc::invalid_config, "attacks", "rho_ratio must lie in (0,1)");
  }
  if (!(gamma > 0.0 && gamma <= 1.0)) {
    throw Error(Errc::invalid_config, "attacks", "gamma must lie in (0,1]");
  }
  if (!(power >= 1.0)) {
    throw Error(Errc::invalid_config, "attacks", "power must be >= 1");
  }
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// magnitude * sign(g), with sign(0) = 0.
Tensor sign_scaled(const Tensor& grad, double magnitude) {
  Tensor out = grad;
  for (double& v : out.values) {
    v = v > 0.0 ? magnitude : (v < 0.0 ? -magnitude : 0.0);
  }
  return out;
}

void check_label(const Network& net, int label) {
  if (label < 0 || label >= net.num_classes()) {
    throw Error(Errc::invalid_label, "attacks",
                "label " + std::to_string(label) + " out of range");
  }
}

AttackOutcome finish(const Network& net, const ImageTensor& original, ImageTensor adversarial,
                     int label, int iterations, Clock::time_point start) {
  AttackOutcome out;
  out.adversarial = std::move(adversarial);
  out.perturbation = subtract(out.adversarial, original);
  out.original_label = label;
  out.adversarial_label = net.predict(out.adversarial);
  out.success = out.adversarial_label != label;
  out.iterations_used = iterations;
  out.wall_time = seconds_since(start);
  return out;
}

}  // namespace

Tensor clip_ball(const Tensor& original, const Tensor& candidate, double epsilon) {
  if (!original.same_shape(candidate)) {
    throw Error(Errc::shape_mismatch, "attacks", "clip_ball shapes differ");
  }
  Tensor out = candidate;
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    const double x = original.values[i];
    double v = out.values[i];
    v = std::max(v, std::max(x - epsilon, 0.0));
    v = std::min(v, std::min(x + epsilon, 1.0));
    out.values[i] = v;
  }
  return out;
}

AttackOutcome fgsm(const Network& net, const ImageTensor& image, int label,
                   const AttackConfig& cfg) {
  cfg.validate();
  check_label(net, label);
  const auto start = Clock::now();

  const InputGradient g = loss_and_input_gradient(net, image, label);
  const Tensor step = sign_scaled(g.gradient, cfg.epsilon);
  ImageTensor adv = clamp01(add(image, step));
  return finish(net, image, std::move(adv), label, 1, start);
}

AttackOutcome ifgsm(const Network& net, const ImageTensor& image, int label,
                    const AttackConfig& cfg) {
  cfg.validate();
  check_label(net, label);
  const auto start = Clock::now();
  const double alpha = cfg.resolved_step();

  ImageTensor x = image;
  int iterations = 0;
  for (int t = 0; t < cfg.max_iters; ++t) {
    const InputGradient g = loss_and_input_gradient(net, x, label);
    x = clip_ball(image, add(x, sign_scaled(g.gradient, alpha)), cfg.epsilon);
    ++iterations;
    if (cfg.early_stop && net.predict(x) != label) break;
  }
  return finish(net, image, std::move(x), label, iterations, start);
}

Perturbation jnd_shape_perturbation(const Perturbation& raw, const JndMap& powered_map,
                                    double budget, const AttackConfig& cfg) {
  if (!raw.same_shape(powered_map)) {
    throw Error(Errc::shape_mismatch, "attacks",
                "perturbation and threshold map shapes differ");
  }
  if (!(budget >= 0.0)) {
    throw Error(Errc::domain_error, "attacks", "budget must be nonnegative");
  }
  for (const double v : powered_map.values) {
    if (!(v > 0.0)) {
      throw Error(Errc::nonpositive_jnd, "attacks",
                  "threshold map must be strictly positive");
    }
  }

  const double rho = cfg.rho_ratio * budget;
  Perturbation out = raw;
  for (int c = 0; c < raw.channels; ++c) {
    double peak = 0.0;
    for (int y = 0; y < raw.height; ++y) {
      for (int x = 0; x < raw.width; ++x) {
        peak = std::max(peak, powered_map.at(y, x, c));
      }
    }
    for (int y = 0; y < raw.height; ++y) {
      for (int x = 0; x < raw.width; ++x) {
        // k = p * (map/peak) keeps k == p bitwise wherever map == peak.
        const double k = raw.at(y, x, c) * (powered_map.at(y, x, c) / peak);
        const double t = std::fabs(k) >= rho ? 1.0 : cfg.gamma;
        out.at(y, x, c) = k * t;
      }
    }
  }
  return out;
}

AttackOutcome fgsm_jnd(const Network& net, const ImageTensor& image, int label,
                       const AttackConfig& cfg) {
  cfg.validate();
  check_label(net, label);
  const auto start = Clock::now();

  const JndMap powered = jnd_power(jnd_map(image, cfg.jnd), cfg.power);
  const InputGradient g = loss_and_input_gradient(net, image, label);
  const Perturbation raw = sign_scaled(g.gradient, cfg.epsilon);
  const Perturbation shaped = jnd_shape_perturbation(raw, powered, cfg.epsilon, cfg);
  ImageTensor adv = clamp01(add(image, shaped));
  return finish(net, image, std::move(adv), label, 1, start);
}

AttackOutcome ifgsm_jnd(const Network& net, const ImageTensor& image, int label,
                        const AttackConfig& cfg) {
  cfg.validate();
  check_label(net, label);
  const auto start = Clock::now();
  const double alpha = cfg.resolved_step();

  ImageTensor x = image;
  int iterations = 0;
  for (int t = 0; t < cfg.max_iters; ++t) {
    const JndMap powered = jnd_power(jnd_map(x, cfg.jnd), cfg.power);
    const InputGradient g = loss_and_input_gradient(net, x, label);
    const Perturbation raw = sign_scaled(g.gradient, alpha);
    const Perturbation shaped = jnd_shape_perturbation(raw, powered, alpha, cfg);
    x = clip_ball(image, add(x, shaped), cfg.epsilon);
    ++iterations;
    if (cfg.early_stop && net.predict(x) != label) break;
  }
  return finish(net, image, std::move(x), label, iterations, start);
}

AttackOutcome deepfool(const Network& net, const ImageTensor& image, int label, int max_iters,
                       double overshoot) {
  if (max_iters < 1) {
    throw Error(Errc::invalid_config, "attacks", "max_iters must be >= 1");
  }
  if (!(overshoot >= 0.0)) {
    throw Error(Errc::invalid_config, "attacks", "overshoot must be nonnegative");
  }
  check_label(net, label);
  const auto start = Clock::now();

  const int classes = net.num_classes();
  const std::size_t dim = image.values.size();

  ImageTensor x = image;
  Tensor r_total(image.height, image.width, image.channels);
  int iterations = 0;

  auto onehot = [classes](int k) {
    std::vector<double> v(static_cast<std::size_t>(classes), 0.0);
    v[static_cast<std::size_t>(k)] = 1.0;
    return v;
  };

  // The walk lives on the clamped iterate: linearizing at an infeasible point
  // and clamping only at the end can silently undo the crossing on images
  // with saturated pixels.
  while (iterations < max_iters) {
    const Trace tr = net.forward(x);
    const std::vector<double>& z = tr.activations.back();
    const int pred =
        static_cast<int>(std::max_element(z.begin(), z.end()) - z.begin());
    if (pred != label) break;

    const std::vector<double> grad_label = net.backward(tr, onehot(label));

    double best_ratio = std::numeric_limits<double>::infinity();
    double best_f = 0.0;
    double best_norm2 = 0.0;
    std::vector<double> best_w;
    for (int k = 0; k < classes; ++k) {
      if (k == label) continue;
      std::vector<double> w = net.backward(tr, onehot(k));
      double norm2 = 0.0;
      for (std::size_t i = 0; i < dim; ++i) {
        w[i] -= grad_label[i];
        norm2 += w[i] * w[i];
      }
      if (norm2 <= 0.0) continue;  // this boundary is flat here, skip it
      const double f = z[static_cast<std::size_t>(k)] - z[static_cast<std::size_t>(label)];
      const double ratio = std::fabs(f) / std::sqrt(norm2);
      if (ratio < best_ratio) {
        best_ratio = ratio;
        best_f = f;
        best_norm2 = norm2;
        best_w = std::move(w);
      }
    }
    if (best_w.empty()) break;  // no reachable boundary in the linearization

    const double scale = std::fabs(best_f) / best_norm2;
    for (std::size_t i = 0; i < dim; ++i) r_total.values[i] += scale * best_w[i];
    for (std::size_t i = 0; i < dim; ++i) {
      x.values[i] = image.values[i] + (1.0 + overshoot) * r_total.values[i];
    }
    x = clamp01(std::move(x));
    ++iterations;
  }

  return finish(net, image, std::move(x), label, iterations, start);
}

}  // namespace advjnd
