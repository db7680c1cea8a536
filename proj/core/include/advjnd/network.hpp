#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "advjnd/dataset.hpp"
#include "advjnd/tensor.hpp"

namespace advjnd {

enum class LayerKind : std::uint32_t {
  conv = 1,
  maxpool = 2,
  relu = 3,
  flatten = 4,
  dense = 5,
};

// One feed-forward stage. Geometry fields are meaningful only for the kinds
// that use them; weights/bias are empty for parameter-free layers.
struct Layer {
  LayerKind kind{};

  // conv
  int kernel_h = 0;
  int kernel_w = 0;
  int in_channels = 0;
  int out_channels = 0;
  int stride = 1;

  // maxpool
  int window = 0;
  int pool_stride = 0;

  // dense
  int inputs = 0;
  int outputs = 0;

  std::vector<double> weights;
  std::vector<double> bias;

  static Layer conv2d(int kernel_h, int kernel_w, int in_channels, int out_channels,
                      int stride = 1);
  static Layer maxpool2d(int window, int stride);
  static Layer relu();
  static Layer flatten();
  static Layer dense(int inputs, int outputs);

  std::size_t weight_count() const;
  std::size_t bias_count() const;
};

// Per-parameter gradient buffers, parallel to a network's layer list.
struct Gradients {
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> bias;

  void zero();
};

class Network;

// Everything forward() computes, kept for the backward pass.
// activations[0] is the input; activations[i+1] is layer i's output, so
// activations.back() holds the logits. pool_sources[i] maps each maxpool
// output element to the flat input index it was copied from.
struct Trace {
  std::vector<std::vector<double>> activations;
  std::vector<std::vector<int>> pool_sources;
};

class Network {
 public:
  Network() = default;
  // Validates the layer chain against the input shape (kernel fits, channel
  // counts line up, dense sizes match the flattened volume) and that any
  // preloaded weight vectors have the right lengths. Empty weight vectors are
  // zero-filled.
  Network(Shape3 input_shape, std::vector<Layer> layers);

  const Shape3& input_shape() const { return input_shape_; }
  int num_classes() const { return num_classes_; }
  const std::vector<Layer>& layers() const { return layers_; }
  std::vector<Layer>& layers() { return layers_; }
  // Output shape after each layer; entry i is the shape of layer i's output.
  const std::vector<Shape3>& output_shapes() const { return output_shapes_; }

  Trace forward(const ImageTensor& image) const;
  std::vector<double> logits(const ImageTensor& image) const;
  int predict(const ImageTensor& image) const;

  // Back-propagate d(loss)/d(logits) through the trace. Returns the gradient
  // with respect to the input pixels. When grads is non-null, parameter
  // gradients are accumulated (added) into it; it must already be sized via
  // make_gradients(). Skips the input-gradient work for the first layer when
  // want_input_gradient is false (training does not need it).
  std::vector<double> backward(const Trace& trace, const std::vector<double>& dlogits,
                               Gradients* grads = nullptr,
                               bool want_input_gradient = true) const;

  Gradients make_gradients() const;

 private:
  Shape3 input_shape_{};
  std::vector<Layer> layers_;
  std::vector<Shape3> output_shapes_;
  int num_classes_ = 0;
};

// Numerically safe softmax (max-subtracted) over raw logits.
std::vector<double> softmax(const std::vector<double>& logits);

// Cross-entropy of the softmax, computed via log-sum-exp.
double cross_entropy_loss(const std::vector<double>& logits, int label);

struct InputGradient {
  double loss = 0.0;
  Tensor gradient;             // d(loss)/d(input pixel), image-shaped
  std::vector<double> logits;
};

// Loss and input-pixel gradient of softmax cross-entropy at (image, label).
InputGradient loss_and_input_gradient(const Network& net, const ImageTensor& image, int label);

struct TrainConfig {
  double learning_rate = 0.01;
  double momentum = 0.9;
  int batch_size = 64;
  int epochs = 6;
  std::uint64_t seed = 1;
};

using EpochLogger = std::function<void(int epoch, double mean_loss)>;

// Minibatch SGD with momentum. Examples are shuffled per epoch with an RNG
// seeded from cfg.seed; per-example gradients are reduced in example-index
// order so the result does not depend on the worker count.
Network train(Network net, const LabeledDataset& data, const TrainConfig& cfg,
              const EpochLogger& log = {});

// Fraction of examples whose argmax logit equals the label.
double evaluate_accuracy(const Network& net, const LabeledDataset& data);

// Binary weight-file round trip. Little-endian throughout; layout:
// "AJND" magic, u32 version (=1), u32 h/w/c input shape, u32 layer count,
// then per layer a u32 kind tag, its geometry as u32s, and raw f64 weights
// followed by biases.
void save_weights(const Network& net, const std::string& path);
Network load_weights(const std::string& path);

// Small convolutional classifier sized for the input: for single-channel
// inputs a 6/16-filter stack with a 120-unit hidden layer, for 3-channel
// inputs a 12/24-filter stack with a 160-unit hidden layer. Weights start
// uniform in [-1/sqrt(fan_in), +1/sqrt(fan_in)] from the given seed; biases
// start at zero.
Network make_default_cnn(Shape3 input_shape, int num_classes, std::uint64_t seed);

}  // namespace advjnd
