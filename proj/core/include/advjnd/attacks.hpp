#pragma once

#include "advjnd/jnd.hpp"
#include "advjnd/network.hpp"
#include "advjnd/tensor.hpp"

namespace advjnd {

struct AttackConfig {
  double epsilon = 0.1;   // max-norm budget, in [0,1]
  double step = 0.0;      // per-iteration step; 0 means epsilon/10
  int max_iters = 10;
  bool early_stop = true; // stop iterating once the label flips
  double rho_ratio = 0.5; // amplify/suppress threshold as a fraction of the budget
  double gamma = 0.25;    // suppression factor for sub-threshold components
  double power = 2.0;     // exponent applied to the threshold map
  JndParams jnd;

  // Throws invalid_config / domain_error on out-of-range fields.
  void validate() const;
  double resolved_step() const { return step > 0.0 ? step : epsilon / 10.0; }
};

struct AttackOutcome {
  ImageTensor adversarial;   // in [0,1]
  Perturbation perturbation; // adversarial - original, elementwise
  int original_label = 0;    // the label the attack tried to escape
  int adversarial_label = 0; // argmax prediction on `adversarial`
  bool success = false;      // adversarial_label != original_label
  int iterations_used = 0;
  double wall_time = 0.0;    // seconds, measured around this attack only
};

// Project `candidate` onto the intersection of [0,1] and the L-infinity ball
// of radius epsilon around `original`, elementwise.
Tensor clip_ball(const Tensor& original, const Tensor& candidate, double epsilon);

// Single-step sign attack: x + epsilon * sign(d loss / d x), clamped to [0,1].
AttackOutcome fgsm(const Network& net, const ImageTensor& image, int label,
                   const AttackConfig& cfg);

// Iterated sign attack with per-step projection onto the epsilon ball.
AttackOutcome ifgsm(const Network& net, const ImageTensor& image, int label,
                    const AttackConfig& cfg);

// Reshape a raw sign perturbation by a (powered) threshold map: each channel
// is scaled by map/max(map), then components whose magnitude stays below
// rho_ratio*budget are suppressed by gamma. Never grows a component.
Perturbation jnd_shape_perturbation(const Perturbation& raw, const JndMap& powered_map,
                                    double budget, const AttackConfig& cfg);

// fgsm / ifgsm with the perturbation shaped toward perceptually busy pixels.
// The iterated form recomputes the threshold map on the current iterate and
// shapes each step against the per-step budget before projecting.
AttackOutcome fgsm_jnd(const Network& net, const ImageTensor& image, int label,
                       const AttackConfig& cfg);
AttackOutcome ifgsm_jnd(const Network& net, const ImageTensor& image, int label,
                        const AttackConfig& cfg);

// Minimal-perturbation baseline: walks to the nearest class boundary of the
// local linearization each step, then overshoots slightly. Unbudgeted, so
// outcomes satisfy only the [0,1] range, not an epsilon ball.
AttackOutcome deepfool(const Network& net, const ImageTensor& image, int label,
                       int max_iters = 50, double overshoot = 0.02);

}  // namespace advjnd
