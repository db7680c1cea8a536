#pragma once

#include <functional>
#include <string>
#include <vector>

#include "advjnd/attacks.hpp"
#include "advjnd/dataset.hpp"
#include "advjnd/metrics.hpp"
#include "advjnd/network.hpp"

namespace advjnd {

enum class AttackMethod {
  fgsm,
  ifgsm,
  fgsm_jnd,
  ifgsm_jnd,
  deepfool,
};

// Accepts both dash and underscore spellings ("fgsm-jnd" / "fgsm_jnd").
AttackMethod parse_method(const std::string& name);
std::string method_name(AttackMethod method);

struct BenchmarkRow {
  std::string method;
  double epsilon = 0.0;
  std::size_t n = 0;
  double success_rate = 0.0;
  double mean_linf = 0.0;
  double mean_l2 = 0.0;
  double mean_hog_dist = 0.0;
  double mean_time_s = 0.0;
};

struct BenchmarkOptions {
  // Timed runs execute attacks strictly serially and report mean wall time;
  // untimed runs may parallelize and pin mean_time_s to 0 so repeated runs
  // produce byte-identical reports.
  bool timed = false;
  int deepfool_max_iters = 50;
  double deepfool_overshoot = 0.02;
};

// Called once per attacked example, in index order, after each
// (method, config) batch finishes.
using AttackObserver = std::function<void(AttackMethod method, const AttackConfig& cfg,
                                          std::size_t index, const AttackOutcome& outcome)>;

// Attack every image in `data` with every (config, method) pair, aggregating
// per-pair rows. The first row is always the clean "non-attack" row whose
// success_rate is 1 - evaluate_accuracy. Attacks receive the dataset label,
// so success means "prediction differs from the ground truth".
std::vector<BenchmarkRow> run_benchmark(const Network& net, const LabeledDataset& data,
                                        const std::vector<AttackMethod>& methods,
                                        const std::vector<AttackConfig>& cfgs,
                                        const BenchmarkOptions& opts = {},
                                        const AttackObserver& observer = {});

enum class ReportFormat { csv, json };

// CSV columns exactly: method,epsilon,n,success_rate,mean_linf,mean_l2,
// mean_hog_dist,mean_time_s with reals at 6 significant digits; JSON is an
// array of objects with the same field names.
void write_report(const std::vector<BenchmarkRow>& rows, const std::string& path,
                  ReportFormat format);

}  // namespace advjnd
