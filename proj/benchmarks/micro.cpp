// Microbenchmarks for the hot paths: convolution, threshold-map
// construction, forward/backward passes, the attacks, and the HOG
// descriptor. Run the advjnd_benchmarks binary directly; these are not
// registered with ctest.

#include <cstdint>
#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "advjnd/attacks.hpp"
#include "advjnd/jnd.hpp"
#include "advjnd/metrics.hpp"
#include "advjnd/network.hpp"

using namespace advjnd;

namespace {

ImageTensor random_image(int h, int w, int c, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  ImageTensor img(h, w, c);
  for (double& v : img.values) v = unit(rng);
  return img;
}

Network conv_only_net(std::uint64_t seed) {
  std::vector<Layer> layers;
  layers.push_back(Layer::conv2d(5, 5, 1, 8));
  layers.push_back(Layer::flatten());
  layers.push_back(Layer::dense(24 * 24 * 8, 10));
  Network net({28, 28, 1}, std::move(layers));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-0.1, 0.1);
  for (Layer& l : net.layers()) {
    for (double& w : l.weights) w = dist(rng);
    for (double& b : l.bias) b = dist(rng);
  }
  return net;
}

AttackConfig bench_config() {
  AttackConfig cfg;
  cfg.epsilon = 0.1;
  cfg.max_iters = 10;
  cfg.early_stop = false;  // fixed work per attack so iterations compare fairly
  return cfg;
}

void BM_Convolution(benchmark::State& state) {
  const Network net = conv_only_net(5);
  const ImageTensor img = random_image(28, 28, 1, 6);
  for (auto _ : state) {
    benchmark::DoNotOptimize(net.logits(img));
  }
}
BENCHMARK(BM_Convolution);

void BM_JndMap(benchmark::State& state) {
  const ImageTensor img = random_image(28, 28, 1, 7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(jnd_map(img));
  }
}
BENCHMARK(BM_JndMap);

void BM_Forward(benchmark::State& state) {
  const Network net = make_default_cnn({28, 28, 1}, 10, 1);
  const ImageTensor img = random_image(28, 28, 1, 8);
  for (auto _ : state) {
    benchmark::DoNotOptimize(net.logits(img));
  }
}
BENCHMARK(BM_Forward);

void BM_InputGradient(benchmark::State& state) {
  const Network net = make_default_cnn({28, 28, 1}, 10, 2);
  const ImageTensor img = random_image(28, 28, 1, 9);
  for (auto _ : state) {
    benchmark::DoNotOptimize(loss_and_input_gradient(net, img, 3));
  }
}
BENCHMARK(BM_InputGradient);

void BM_Fgsm(benchmark::State& state) {
  const Network net = make_default_cnn({28, 28, 1}, 10, 3);
  const ImageTensor img = random_image(28, 28, 1, 10);
  const int label = net.predict(img);
  const AttackConfig cfg = bench_config();
  for (auto _ : state) {
    benchmark::DoNotOptimize(fgsm(net, img, label, cfg));
  }
}
BENCHMARK(BM_Fgsm);

void BM_IfgsmJnd(benchmark::State& state) {
  const Network net = make_default_cnn({28, 28, 1}, 10, 3);
  const ImageTensor img = random_image(28, 28, 1, 10);
  const int label = net.predict(img);
  const AttackConfig cfg = bench_config();
  for (auto _ : state) {
    benchmark::DoNotOptimize(ifgsm_jnd(net, img, label, cfg));
  }
}
BENCHMARK(BM_IfgsmJnd);

void BM_Deepfool(benchmark::State& state) {
  const Network net = make_default_cnn({28, 28, 1}, 10, 3);
  const ImageTensor img = random_image(28, 28, 1, 10);
  const int label = net.predict(img);
  for (auto _ : state) {
    benchmark::DoNotOptimize(deepfool(net, img, label));
  }
}
BENCHMARK(BM_Deepfool);

void BM_HogDescriptor(benchmark::State& state) {
  const ImageTensor img = random_image(64, 64, 3, 11);
  for (auto _ : state) {
    benchmark::DoNotOptimize(hog_descriptor(img));
  }
}
BENCHMARK(BM_HogDescriptor);

}  // namespace

BENCHMARK_MAIN();
