#include "advjnd/network.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <random>

#include "advjnd/error.hpp"
#include "advjnd/parallel.hpp"

namespace advjnd {

// ---------------------------------------------------------------------------
// Layer factories

Layer Layer::conv2d(int kernel_h, int kernel_w, int in_channels, int out_channels, int stride) {
  Layer l;
  l.kind = LayerKind::conv;
  l.kernel_h = kernel_h;
  l.kernel_w = kernel_w;
  l.in_channels = in_channels;
  l.out_channels = out_channels;
  l.stride = stride;
  return l;
}

Layer Layer::maxpool2d(int window, int stride) {
  Layer l;
  l.kind = LayerKind::maxpool;
  l.window = window;
  l.pool_stride = stride;
  return l;
}

Layer Layer::relu() {
  Layer l;
  l.kind = LayerKind::relu;
  return l;
}

Layer Layer::flatten() {
  Layer l;
  l.kind = LayerKind::flatten;
  return l;
}

Layer Layer::dense(int inputs, int outputs) {
  Layer l;
  l.kind = LayerKind::dense;
  l.inputs = inputs;
  l.outputs = outputs;
  return l;
}

std::size_t Layer::weight_count() const {
  switch (kind) {
    case LayerKind::conv:
      return static_cast<std::size_t>(kernel_h) * kernel_w * in_channels * out_channels;
    case LayerKind::dense:
      return static_cast<std::size_t>(inputs) * outputs;
    default:
      return 0;
  }
}

std::size_t Layer::bias_count() const {
  switch (kind) {
    case LayerKind::conv:
      return static_cast<std::size_t>(out_channels);
    case LayerKind::dense:
      return static_cast<std::size_t>(outputs);
    default:
      return 0;
  }
}

void Gradients::zero() {
  for (auto& w : weights) std::fill(w.begin(), w.end(), 0.0);
  for (auto& b : bias) std::fill(b.begin(), b.end(), 0.0);
}

// ---------------------------------------------------------------------------
// Construction and shape validation

namespace {

[[noreturn]] void shape_error(const std::string& msg) {
  throw Error(Errc::shape_mismatch, "nn", msg);
}

}  // namespace

Network::Network(Shape3 input_shape, std::vector<Layer> layers)
    : input_shape_(input_shape), layers_(std::move(layers)) {
  if (input_shape_.height < 1 || input_shape_.width < 1 || input_shape_.channels < 1) {
    shape_error("input shape must have positive extents");
  }
  if (layers_.empty()) {
    throw Error(Errc::invalid_config, "nn", "network needs at least one layer");
  }

  Shape3 s = input_shape_;
  output_shapes_.reserve(layers_.size());
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    Layer& l = layers_[i];
    const std::string where = "layer " + std::to_string(i);
    Shape3 out;
    switch (l.kind) {
      case LayerKind::conv: {
        if (l.kernel_h < 1 || l.kernel_w < 1 || l.stride < 1 || l.out_channels < 1) {
          shape_error(where + ": bad conv geometry");
        }
        if (l.in_channels != s.channels) {
          shape_error(where + ": conv expects " + std::to_string(l.in_channels) +
                      " input channels, got " + std::to_string(s.channels));
        }
        if (s.height < l.kernel_h || s.width < l.kernel_w) {
          shape_error(where + ": conv kernel larger than its input");
        }
        out = {(s.height - l.kernel_h) / l.stride + 1,
               (s.width - l.kernel_w) / l.stride + 1, l.out_channels};
        break;
      }
      case LayerKind::maxpool: {
        if (l.window < 1 || l.pool_stride < 1) shape_error(where + ": bad pool geometry");
        if (s.height < l.window || s.width < l.window) {
          shape_error(where + ": pool window larger than its input");
        }
        out = {(s.height - l.window) / l.pool_stride + 1,
               (s.width - l.window) / l.pool_stride + 1, s.channels};
        break;
      }
      case LayerKind::relu:
        out = s;
        break;
      case LayerKind::flatten:
        out = {1, 1, static_cast<int>(s.volume())};
        break;
      case LayerKind::dense: {
        if (l.inputs < 1 || l.outputs < 1) shape_error(where + ": bad dense geometry");
        if (s.height != 1 || s.width != 1 || s.channels != l.inputs) {
          shape_error(where + ": dense expects a flat input of " + std::to_string(l.inputs));
        }
        out = {1, 1, l.outputs};
        break;
      }
      default:
        shape_error(where + ": unknown layer kind");
    }

    const std::size_t nw = l.weight_count();
    const std::size_t nb = l.bias_count();
    if (l.weights.empty() && nw > 0) l.weights.assign(nw, 0.0);
    if (l.bias.empty() && nb > 0) l.bias.assign(nb, 0.0);
    if (l.weights.size() != nw || l.bias.size() != nb) {
      shape_error(where + ": weight buffers do not match the layer geometry");
    }

    output_shapes_.push_back(out);
    s = out;
  }

  if (s.height != 1 || s.width != 1 || s.channels < 2) {
    throw Error(Errc::invalid_config, "nn",
                "network must end in a flat logit vector of at least 2 classes");
  }
  num_classes_ = s.channels;
}

Gradients Network::make_gradients() const {
  Gradients g;
  g.weights.resize(layers_.size());
  g.bias.resize(layers_.size());
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    g.weights[i].assign(layers_[i].weight_count(), 0.0);
    g.bias[i].assign(layers_[i].bias_count(), 0.0);
  }
  return g;
}

// ---------------------------------------------------------------------------
// Forward

namespace {

void conv_forward(const Layer& l, Shape3 is, const std::vector<double>& in, Shape3 os,
                  std::vector<double>& out) {
  out.assign(os.volume(), 0.0);
  const int iw = is.width, ic = is.channels;
  const int oh = os.height, ow = os.width, oc = os.channels;
  const int kh = l.kernel_h, kw = l.kernel_w, stride = l.stride;
  const int span = kw * ic;
  const double* W = l.weights.data();
  const double* B = l.bias.data();
  const double* I = in.data();
  double* O = out.data();

  for (int oy = 0; oy < oh; ++oy) {
    for (int ox = 0; ox < ow; ++ox) {
      double* opix = O + (static_cast<std::size_t>(oy) * ow + ox) * oc;
      const std::size_t ibase =
          (static_cast<std::size_t>(oy) * stride * iw + static_cast<std::size_t>(ox) * stride) * ic;
      for (int f = 0; f < oc; ++f) {
        const double* wf = W + static_cast<std::size_t>(f) * kh * span;
        double acc = B[f];
        for (int m = 0; m < kh; ++m) {
          const double* irow = I + ibase + static_cast<std::size_t>(m) * iw * ic;
          const double* wrow = wf + static_cast<std::size_t>(m) * span;
          for (int t = 0; t < span; ++t) acc += wrow[t] * irow[t];
        }
        opix[f] = acc;
      }
    }
  }
}

void maxpool_forward(const Layer& l, Shape3 is, const std::vector<double>& in, Shape3 os,
                     std::vector<double>& out, std::vector<int>& sources) {
  out.assign(os.volume(), 0.0);
  sources.assign(os.volume(), 0);
  const int iw = is.width, ic = is.channels;
  const int oh = os.height, ow = os.width;

  for (int oy = 0; oy < oh; ++oy) {
    for (int ox = 0; ox < ow; ++ox) {
      for (int c = 0; c < ic; ++c) {
        int best_idx = -1;
        double best = 0.0;
        for (int m = 0; m < l.window; ++m) {
          for (int n = 0; n < l.window; ++n) {
            const int iy = oy * l.pool_stride + m;
            const int ix = ox * l.pool_stride + n;
            const std::size_t idx = (static_cast<std::size_t>(iy) * iw + ix) * ic + c;
            // First strictly-larger value wins, so ties resolve to the
            // earliest window position.
            if (best_idx < 0 || in[idx] > best) {
              best = in[idx];
              best_idx = static_cast<int>(idx);
            }
          }
        }
        const std::size_t oidx = (static_cast<std::size_t>(oy) * ow + ox) * ic + c;
        out[oidx] = best;
        sources[oidx] = best_idx;
      }
    }
  }
}

void dense_forward(const Layer& l, const std::vector<double>& in, std::vector<double>& out) {
  out.assign(static_cast<std::size_t>(l.outputs), 0.0);
  const double* W = l.weights.data();
  const double* X = in.data();
  for (int o = 0; o < l.outputs; ++o) {
    const double* row = W + static_cast<std::size_t>(o) * l.inputs;
    double acc = l.bias[static_cast<std::size_t>(o)];
    for (int i = 0; i < l.inputs; ++i) acc += row[i] * X[i];
    out[static_cast<std::size_t>(o)] = acc;
  }
}

}  // namespace

Trace Network::forward(const ImageTensor& image) const {
  if (image.shape() != input_shape_) {
    shape_error("forward input does not match the network input shape");
  }
  Trace tr;
  tr.activations.resize(layers_.size() + 1);
  tr.pool_sources.resize(layers_.size());
  tr.activations[0] = image.values;

  Shape3 s = input_shape_;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const Layer& l = layers_[i];
    const std::vector<double>& in = tr.activations[i];
    std::vector<double>& out = tr.activations[i + 1];
    const Shape3 os = output_shapes_[i];
    switch (l.kind) {
      case LayerKind::conv:
        conv_forward(l, s, in, os, out);
        break;
      case LayerKind::maxpool:
        maxpool_forward(l, s, in, os, out, tr.pool_sources[i]);
        break;
      case LayerKind::relu:
        out = in;
        for (double& v : out) v = v > 0.0 ? v : 0.0;
        break;
      case LayerKind::flatten:
        out = in;
        break;
      case LayerKind::dense:
        dense_forward(l, in, out);
        break;
    }
    s = os;
  }
  return tr;
}

std::vector<double> Network::logits(const ImageTensor& image) const {
  return forward(image).activations.back();
}

int Network::predict(const ImageTensor& image) const {
  const std::vector<double> z = logits(image);
  return static_cast<int>(std::max_element(z.begin(), z.end()) - z.begin());
}

// ---------------------------------------------------------------------------
// Backward

namespace {

void conv_backward(const Layer& l, Shape3 is, const std::vector<double>& in, Shape3 os,
                   const std::vector<double>& dout, std::vector<double>* din,
                   std::vector<double>* dweights, std::vector<double>* dbias) {
  if (din) din->assign(is.volume(), 0.0);
  const int iw = is.width, ic = is.channels;
  const int oh = os.height, ow = os.width, oc = os.channels;
  const int kh = l.kernel_h, kw = l.kernel_w, stride = l.stride;
  const int span = kw * ic;
  const double* W = l.weights.data();
  const double* I = in.data();
  const double* G = dout.data();

  for (int oy = 0; oy < oh; ++oy) {
    for (int ox = 0; ox < ow; ++ox) {
      const double* gpix = G + (static_cast<std::size_t>(oy) * ow + ox) * oc;
      const std::size_t ibase =
          (static_cast<std::size_t>(oy) * stride * iw + static_cast<std::size_t>(ox) * stride) * ic;
      for (int f = 0; f < oc; ++f) {
        const double g = gpix[f];
        if (dbias) (*dbias)[static_cast<std::size_t>(f)] += g;
        const std::size_t fbase = static_cast<std::size_t>(f) * kh * span;
        for (int m = 0; m < kh; ++m) {
          const std::size_t irow = ibase + static_cast<std::size_t>(m) * iw * ic;
          const std::size_t wrow = fbase + static_cast<std::size_t>(m) * span;
          if (dweights) {
            double* dw = dweights->data() + wrow;
            const double* ip = I + irow;
            for (int t = 0; t < span; ++t) dw[t] += ip[t] * g;
          }
          if (din) {
            double* dp = din->data() + irow;
            const double* wp = W + wrow;
            for (int t = 0; t < span; ++t) dp[t] += wp[t] * g;
          }
        }
      }
    }
  }
}

void dense_backward(const Layer& l, const std::vector<double>& in,
                    const std::vector<double>& dout, std::vector<double>* din,
                    std::vector<double>* dweights, std::vector<double>* dbias) {
  if (din) din->assign(static_cast<std::size_t>(l.inputs), 0.0);
  const double* W = l.weights.data();
  const double* X = in.data();
  for (int o = 0; o < l.outputs; ++o) {
    const double g = dout[static_cast<std::size_t>(o)];
    if (dbias) (*dbias)[static_cast<std::size_t>(o)] += g;
    const std::size_t row = static_cast<std::size_t>(o) * l.inputs;
    if (dweights) {
      double* dw = dweights->data() + row;
      for (int i = 0; i < l.inputs; ++i) dw[i] += X[i] * g;
    }
    if (din) {
      double* dx = din->data();
      const double* wp = W + row;
      for (int i = 0; i < l.inputs; ++i) dx[i] += wp[i] * g;
    }
  }
}

}  // namespace

std::vector<double> Network::backward(const Trace& trace, const std::vector<double>& dlogits,
                                      Gradients* grads, bool want_input_gradient) const {
  if (trace.activations.size() != layers_.size() + 1) {
    shape_error("trace does not belong to this network");
  }
  if (dlogits.size() != static_cast<std::size_t>(num_classes_)) {
    shape_error("dlogits length does not match the class count");
  }

  std::vector<double> dcur = dlogits;
  for (std::size_t ri = layers_.size(); ri-- > 0;) {
    const Layer& l = layers_[ri];
    const std::vector<double>& lin = trace.activations[ri];
    const Shape3 in_shape = ri == 0 ? input_shape_ : output_shapes_[ri - 1];
    const Shape3 out_shape = output_shapes_[ri];
    const bool need_din = want_input_gradient || ri > 0;
    std::vector<double>* dw = grads ? &grads->weights[ri] : nullptr;
    std::vector<double>* db = grads ? &grads->bias[ri] : nullptr;
    std::vector<double> din;

    switch (l.kind) {
      case LayerKind::conv:
        conv_backward(l, in_shape, lin, out_shape, dcur, need_din ? &din : nullptr, dw, db);
        break;
      case LayerKind::maxpool:
        if (need_din) {
          din.assign(in_shape.volume(), 0.0);
          const std::vector<int>& src = trace.pool_sources[ri];
          for (std::size_t k = 0; k < dcur.size(); ++k) {
            din[static_cast<std::size_t>(src[k])] += dcur[k];
          }
        }
        break;
      case LayerKind::relu:
        if (need_din) {
          din.resize(dcur.size());
          for (std::size_t k = 0; k < dcur.size(); ++k) {
            din[k] = lin[k] > 0.0 ? dcur[k] : 0.0;
          }
        }
        break;
      case LayerKind::flatten:
        if (need_din) din = dcur;
        break;
      case LayerKind::dense:
        dense_backward(l, lin, dcur, need_din ? &din : nullptr, dw, db);
        break;
    }

    if (!need_din) return {};
    dcur = std::move(din);
  }
  return dcur;
}

// ---------------------------------------------------------------------------
// Loss

std::vector<double> softmax(const std::vector<double>& logits) {
  if (logits.empty()) throw Error(Errc::domain_error, "nn", "softmax of an empty vector");
  const double zmax = *std::max_element(logits.begin(), logits.end());
  std::vector<double> p(logits.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    p[i] = std::exp(logits[i] - zmax);
    sum += p[i];
  }
  for (double& v : p) v /= sum;
  return p;
}

double cross_entropy_loss(const std::vector<double>& logits, int label) {
  if (label < 0 || static_cast<std::size_t>(label) >= logits.size()) {
    throw Error(Errc::invalid_label, "nn", "label " + std::to_string(label) + " out of range");
  }
  const double zmax = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (const double z : logits) sum += std::exp(z - zmax);
  return std::log(sum) + zmax - logits[static_cast<std::size_t>(label)];
}

InputGradient loss_and_input_gradient(const Network& net, const ImageTensor& image, int label) {
  if (label < 0 || label >= net.num_classes()) {
    throw Error(Errc::invalid_label, "nn", "label " + std::to_string(label) + " out of range");
  }
  const Trace tr = net.forward(image);
  const std::vector<double>& z = tr.activations.back();

  InputGradient out;
  out.loss = cross_entropy_loss(z, label);
  out.logits = z;

  std::vector<double> dlogits = softmax(z);
  dlogits[static_cast<std::size_t>(label)] -= 1.0;

  out.gradient = Tensor(net.input_shape().height, net.input_shape().width,
                        net.input_shape().channels);
  out.gradient.values = net.backward(tr, dlogits, nullptr, true);
  return out;
}

// ---------------------------------------------------------------------------
// Training and evaluation

namespace {

void check_dataset(const Network& net, const LabeledDataset& data) {
  if (data.empty()) throw Error(Errc::empty_dataset, "nn", "dataset is empty");
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data.images[i].shape() != net.input_shape()) {
      shape_error("dataset image " + std::to_string(i) + " does not match the input shape");
    }
    const int label = data.labels[i];
    if (label < 0 || label >= net.num_classes()) {
      throw Error(Errc::invalid_label, "nn",
                  "label " + std::to_string(label) + " at index " + std::to_string(i) +
                      " out of range");
    }
  }
}

}  // namespace

Network train(Network net, const LabeledDataset& data, const TrainConfig& cfg,
              const EpochLogger& log) {
  if (!(cfg.learning_rate > 0.0)) {
    throw Error(Errc::invalid_config, "nn", "learning rate must be positive");
  }
  if (!(cfg.momentum >= 0.0 && cfg.momentum < 1.0)) {
    throw Error(Errc::invalid_config, "nn", "momentum must lie in [0,1)");
  }
  if (cfg.batch_size < 1) throw Error(Errc::invalid_config, "nn", "batch size must be >= 1");
  if (cfg.epochs < 1) throw Error(Errc::invalid_config, "nn", "epoch count must be >= 1");
  check_dataset(net, data);

  const std::size_t n = data.size();
  const std::size_t batch = static_cast<std::size_t>(cfg.batch_size);
  const int workers = configured_workers();

  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  std::mt19937_64 rng(cfg.seed);

  Gradients velocity = net.make_gradients();
  Gradients batch_grad = net.make_gradients();
  // One gradient buffer per batch slot so parallel workers never share
  // accumulators; the reduction below walks slots in index order, which keeps
  // training bit-identical for any worker count.
  std::vector<Gradients> slots(batch, net.make_gradients());
  std::vector<double> slot_loss(batch, 0.0);

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;

    for (std::size_t start = 0; start < n; start += batch) {
      const std::size_t count = std::min(batch, n - start);

      parallel_for(count, workers, [&](std::size_t k) {
        slots[k].zero();
        const std::uint32_t idx = order[start + k];
        const Trace tr = net.forward(data.images[idx]);
        const std::vector<double>& z = tr.activations.back();
        slot_loss[k] = cross_entropy_loss(z, data.labels[idx]);
        std::vector<double> dlogits = softmax(z);
        dlogits[static_cast<std::size_t>(data.labels[idx])] -= 1.0;
        net.backward(tr, dlogits, &slots[k], false);
      });

      batch_grad.zero();
      for (std::size_t k = 0; k < count; ++k) {
        loss_sum += slot_loss[k];
        for (std::size_t li = 0; li < batch_grad.weights.size(); ++li) {
          auto& accw = batch_grad.weights[li];
          const auto& sw = slots[k].weights[li];
          for (std::size_t j = 0; j < accw.size(); ++j) accw[j] += sw[j];
          auto& accb = batch_grad.bias[li];
          const auto& sb = slots[k].bias[li];
          for (std::size_t j = 0; j < accb.size(); ++j) accb[j] += sb[j];
        }
      }

      const double scale = cfg.learning_rate / static_cast<double>(count);
      for (std::size_t li = 0; li < net.layers().size(); ++li) {
        Layer& l = net.layers()[li];
        auto& vw = velocity.weights[li];
        const auto& gw = batch_grad.weights[li];
        for (std::size_t j = 0; j < vw.size(); ++j) {
          vw[j] = cfg.momentum * vw[j] - scale * gw[j];
          l.weights[j] += vw[j];
        }
        auto& vb = velocity.bias[li];
        const auto& gb = batch_grad.bias[li];
        for (std::size_t j = 0; j < vb.size(); ++j) {
          vb[j] = cfg.momentum * vb[j] - scale * gb[j];
          l.bias[j] += vb[j];
        }
      }

      for (const Layer& l : net.layers()) {
        for (const double w : l.weights) {
          if (!std::isfinite(w)) {
            throw Error(Errc::domain_error, "nn", "training produced non-finite weights");
          }
        }
        for (const double b : l.bias) {
          if (!std::isfinite(b)) {
            throw Error(Errc::domain_error, "nn", "training produced non-finite biases");
          }
        }
      }
    }

    if (log) log(epoch, loss_sum / static_cast<double>(n));
  }
  return net;
}

double evaluate_accuracy(const Network& net, const LabeledDataset& data) {
  check_dataset(net, data);
  const std::size_t n = data.size();
  std::vector<char> correct(n, 0);
  parallel_for(n, configured_workers(), [&](std::size_t i) {
    correct[i] = net.predict(data.images[i]) == data.labels[i] ? 1 : 0;
  });
  std::size_t hits = 0;
  for (std::size_t i = 0; i < n; ++i) hits += static_cast<std::size_t>(correct[i]);
  return static_cast<double>(hits) / static_cast<double>(n);
}

// ---------------------------------------------------------------------------
// Weight file round trip

namespace {

constexpr char kMagic[4] = {'A', 'J', 'N', 'D'};
constexpr std::uint32_t kVersion = 1;
constexpr std::uint32_t kMaxDim = 1u << 20;

void put_u32(std::ostream& out, std::uint32_t v) {
  const unsigned char b[4] = {
      static_cast<unsigned char>(v & 0xff),
      static_cast<unsigned char>((v >> 8) & 0xff),
      static_cast<unsigned char>((v >> 16) & 0xff),
      static_cast<unsigned char>((v >> 24) & 0xff),
  };
  out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::istream& in, const std::string& path) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  if (in.gcount() != 4) {
    throw Error(Errc::truncated_file, "nn", path + " ends unexpectedly");
  }
  return std::uint32_t(b[0]) | (std::uint32_t(b[1]) << 8) | (std::uint32_t(b[2]) << 16) |
         (std::uint32_t(b[3]) << 24);
}

void put_f64_array(std::ostream& out, const std::vector<double>& v) {
  std::vector<unsigned char> buf(v.size() * 8);
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::uint64_t u = std::bit_cast<std::uint64_t>(v[i]);
    for (int k = 0; k < 8; ++k) buf[i * 8 + k] = static_cast<unsigned char>((u >> (8 * k)) & 0xff);
  }
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
}

std::vector<double> get_f64_array(std::istream& in, std::size_t count, const std::string& path) {
  std::vector<unsigned char> buf(count * 8);
  in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (static_cast<std::size_t>(in.gcount()) != buf.size()) {
    throw Error(Errc::truncated_file, "nn", path + " ends inside a weight block");
  }
  std::vector<double> v(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::uint64_t u = 0;
    for (int k = 0; k < 8; ++k) u |= std::uint64_t(buf[i * 8 + k]) << (8 * k);
    v[i] = std::bit_cast<double>(u);
  }
  return v;
}

int checked_dim(std::uint32_t v, const std::string& path) {
  if (v == 0 || v > kMaxDim) {
    throw Error(Errc::shape_mismatch, "nn", path + " declares an implausible dimension");
  }
  return static_cast<int>(v);
}

}  // namespace

void save_weights(const Network& net, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::io_error, "nn", "cannot open " + path + " for writing");

  out.write(kMagic, 4);
  put_u32(out, kVersion);
  put_u32(out, static_cast<std::uint32_t>(net.input_shape().height));
  put_u32(out, static_cast<std::uint32_t>(net.input_shape().width));
  put_u32(out, static_cast<std::uint32_t>(net.input_shape().channels));
  put_u32(out, static_cast<std::uint32_t>(net.layers().size()));

  for (const Layer& l : net.layers()) {
    put_u32(out, static_cast<std::uint32_t>(l.kind));
    switch (l.kind) {
      case LayerKind::conv:
        put_u32(out, static_cast<std::uint32_t>(l.kernel_h));
        put_u32(out, static_cast<std::uint32_t>(l.kernel_w));
        put_u32(out, static_cast<std::uint32_t>(l.in_channels));
        put_u32(out, static_cast<std::uint32_t>(l.out_channels));
        put_u32(out, static_cast<std::uint32_t>(l.stride));
        break;
      case LayerKind::maxpool:
        put_u32(out, static_cast<std::uint32_t>(l.window));
        put_u32(out, static_cast<std::uint32_t>(l.pool_stride));
        break;
      case LayerKind::relu:
      case LayerKind::flatten:
        break;
      case LayerKind::dense:
        put_u32(out, static_cast<std::uint32_t>(l.inputs));
        put_u32(out, static_cast<std::uint32_t>(l.outputs));
        break;
    }
    if (!l.weights.empty()) put_f64_array(out, l.weights);
    if (!l.bias.empty()) put_f64_array(out, l.bias);
  }
  if (!out) throw Error(Errc::io_error, "nn", "short write to " + path);
}

Network load_weights(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_error, "nn", "cannot open " + path);

  char magic[4];
  in.read(magic, 4);
  if (in.gcount() != 4) throw Error(Errc::truncated_file, "nn", path + " is too short");
  if (std::memcmp(magic, kMagic, 4) != 0) {
    throw Error(Errc::bad_magic, "nn", path + " is not a weight file");
  }
  const std::uint32_t version = get_u32(in, path);
  if (version != kVersion) {
    throw Error(Errc::version_mismatch, "nn",
                path + " has version " + std::to_string(version) + ", expected " +
                    std::to_string(kVersion));
  }

  Shape3 input;
  input.height = checked_dim(get_u32(in, path), path);
  input.width = checked_dim(get_u32(in, path), path);
  input.channels = checked_dim(get_u32(in, path), path);

  const std::uint32_t layer_count = get_u32(in, path);
  if (layer_count == 0 || layer_count > 4096) {
    throw Error(Errc::shape_mismatch, "nn", path + " declares an implausible layer count");
  }

  std::vector<Layer> layers;
  layers.reserve(layer_count);
  for (std::uint32_t i = 0; i < layer_count; ++i) {
    const std::uint32_t kind = get_u32(in, path);
    Layer l;
    switch (static_cast<LayerKind>(kind)) {
      case LayerKind::conv: {
        const int kh = checked_dim(get_u32(in, path), path);
        const int kw = checked_dim(get_u32(in, path), path);
        const int ic = checked_dim(get_u32(in, path), path);
        const int oc = checked_dim(get_u32(in, path), path);
        const int stride = checked_dim(get_u32(in, path), path);
        l = Layer::conv2d(kh, kw, ic, oc, stride);
        break;
      }
      case LayerKind::maxpool: {
        const int window = checked_dim(get_u32(in, path), path);
        const int stride = checked_dim(get_u32(in, path), path);
        l = Layer::maxpool2d(window, stride);
        break;
      }
      case LayerKind::relu:
        l = Layer::relu();
        break;
      case LayerKind::flatten:
        l = Layer::flatten();
        break;
      case LayerKind::dense: {
        const int inputs = checked_dim(get_u32(in, path), path);
        const int outputs = checked_dim(get_u32(in, path), path);
        l = Layer::dense(inputs, outputs);
        break;
      }
      default:
        throw Error(Errc::shape_mismatch, "nn",
                    path + " contains an unknown layer kind tag " + std::to_string(kind));
    }
    const std::size_t nw = l.weight_count();
    const std::size_t nb = l.bias_count();
    if (nw > 0) l.weights = get_f64_array(in, nw, path);
    if (nb > 0) l.bias = get_f64_array(in, nb, path);
    layers.push_back(std::move(l));
  }

  return Network(input, std::move(layers));
}

// ---------------------------------------------------------------------------
// Default architecture

Network make_default_cnn(Shape3 input_shape, int num_classes, std::uint64_t seed) {
  if (num_classes < 2) {
    throw Error(Errc::invalid_config, "nn", "a classifier needs at least 2 classes");
  }
  if (input_shape.channels != 1 && input_shape.channels != 3) {
    shape_error("default cnn expects 1- or 3-channel inputs");
  }
  if (input_shape.height < 16 || input_shape.width < 16) {
    shape_error("default cnn needs inputs of at least 16x16 pixels");
  }

  const int c1 = input_shape.channels == 1 ? 6 : 12;
  const int c2 = input_shape.channels == 1 ? 16 : 24;
  const int hidden = input_shape.channels == 1 ? 120 : 160;

  const auto after_pool = [](int extent) { return (extent - 2) / 2 + 1; };
  const int h2 = after_pool(after_pool(input_shape.height - 4) - 4);
  const int w2 = after_pool(after_pool(input_shape.width - 4) - 4);
  const int flat = h2 * w2 * c2;

  std::vector<Layer> layers;
  layers.push_back(Layer::conv2d(5, 5, input_shape.channels, c1));
  layers.push_back(Layer::relu());
  layers.push_back(Layer::maxpool2d(2, 2));
  layers.push_back(Layer::conv2d(5, 5, c1, c2));
  layers.push_back(Layer::relu());
  layers.push_back(Layer::maxpool2d(2, 2));
  layers.push_back(Layer::flatten());
  layers.push_back(Layer::dense(flat, hidden));
  layers.push_back(Layer::relu());
  layers.push_back(Layer::dense(hidden, num_classes));

  Network net(input_shape, std::move(layers));

  std::mt19937_64 rng(seed);
  for (Layer& l : net.layers()) {
    if (l.kind != LayerKind::conv && l.kind != LayerKind::dense) continue;
    const double fan_in = l.kind == LayerKind::conv
                              ? static_cast<double>(l.kernel_h) * l.kernel_w * l.in_channels
                              : static_cast<double>(l.inputs);
    const double bound = 1.0 / std::sqrt(fan_in);
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (double& w : l.weights) w = dist(rng);
  }
  return net;
}

}  // namespace advjnd
