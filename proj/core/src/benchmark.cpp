#include "advjnd/benchmark.hpp"

#include <cstdio>
#include <fstream>

#include "json.hpp"

#include "advjnd/error.hpp"
#include "advjnd/parallel.hpp"

namespace advjnd {

AttackMethod parse_method(const std::string& name) {
  if (name == "fgsm") return AttackMethod::fgsm;
  if (name == "ifgsm") return AttackMethod::ifgsm;
  if (name == "fgsm-jnd" || name == "fgsm_jnd") return AttackMethod::fgsm_jnd;
  if (name == "ifgsm-jnd" || name == "ifgsm_jnd") return AttackMethod::ifgsm_jnd;
  if (name == "deepfool") return AttackMethod::deepfool;
  throw Error(Errc::unknown_method, "eval", "unknown attack method '" + name + "'");
}

std::string method_name(AttackMethod method) {
  switch (method) {
    case AttackMethod::fgsm: return "fgsm";
    case AttackMethod::ifgsm: return "ifgsm";
    case AttackMethod::fgsm_jnd: return "fgsm-jnd";
    case AttackMethod::ifgsm_jnd: return "ifgsm-jnd";
    case AttackMethod::deepfool: return "deepfool";
  }
  throw Error(Errc::unknown_method, "eval", "invalid attack method value");
}

namespace {

AttackOutcome run_one(AttackMethod method, const Network& net, const ImageTensor& image,
                      int label, const AttackConfig& cfg, const BenchmarkOptions& opts) {
  switch (method) {
    case AttackMethod::fgsm: return fgsm(net, image, label, cfg);
    case AttackMethod::ifgsm: return ifgsm(net, image, label, cfg);
    case AttackMethod::fgsm_jnd: return fgsm_jnd(net, image, label, cfg);
    case AttackMethod::ifgsm_jnd: return ifgsm_jnd(net, image, label, cfg);
    case AttackMethod::deepfool:
      return deepfool(net, image, label, opts.deepfool_max_iters, opts.deepfool_overshoot);
  }
  throw Error(Errc::unknown_method, "eval", "invalid attack method value");
}

}  // namespace

std::vector<BenchmarkRow> run_benchmark(const Network& net, const LabeledDataset& data,
                                        const std::vector<AttackMethod>& methods,
                                        const std::vector<AttackConfig>& cfgs,
                                        const BenchmarkOptions& opts,
                                        const AttackObserver& observer) {
  if (data.empty()) throw Error(Errc::empty_dataset, "eval", "benchmark dataset is empty");
  for (const AttackConfig& cfg : cfgs) cfg.validate();

  const std::size_t n = data.size();
  std::vector<BenchmarkRow> rows;
  rows.reserve(1 + methods.size() * cfgs.size());

  BenchmarkRow clean;
  clean.method = "non-attack";
  clean.epsilon = 0.0;
  clean.n = n;
  clean.success_rate = 1.0 - evaluate_accuracy(net, data);
  rows.push_back(clean);

  const int workers = opts.timed ? 1 : configured_workers();
  std::vector<AttackOutcome> outcomes(n);
  std::vector<FidelityReport> reports(n);

  for (const AttackConfig& cfg : cfgs) {
    for (const AttackMethod method : methods) {
      parallel_for(n, workers, [&](std::size_t i) {
        outcomes[i] = run_one(method, net, data.images[i], data.labels[i], cfg, opts);
        reports[i] = fidelity(data.images[i], outcomes[i].adversarial);
      });

      BenchmarkRow row;
      row.method = method_name(method);
      row.epsilon = cfg.epsilon;
      row.n = n;
      double successes = 0.0;
      double time_sum = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (observer) observer(method, cfg, i, outcomes[i]);
        successes += outcomes[i].success ? 1.0 : 0.0;
        row.mean_linf += reports[i].linf;
        row.mean_l2 += reports[i].l2;
        row.mean_hog_dist += reports[i].hog_dist;
        time_sum += outcomes[i].wall_time;
      }
      row.success_rate = successes / static_cast<double>(n);
      row.mean_linf /= static_cast<double>(n);
      row.mean_l2 /= static_cast<double>(n);
      row.mean_hog_dist /= static_cast<double>(n);
      row.mean_time_s = opts.timed ? time_sum / static_cast<double>(n) : 0.0;
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

namespace {

std::string real6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%#.6g", v);
  return buf;
}

nlohmann::ordered_json row_to_json(const BenchmarkRow& row) {
  nlohmann::ordered_json j;
  j["method"] = row.method;
  j["epsilon"] = row.epsilon;
  j["n"] = row.n;
  j["success_rate"] = row.success_rate;
  j["mean_linf"] = row.mean_linf;
  j["mean_l2"] = row.mean_l2;
  j["mean_hog_dist"] = row.mean_hog_dist;
  j["mean_time_s"] = row.mean_time_s;
  return j;
}

}  // namespace

void write_report(const std::vector<BenchmarkRow>& rows, const std::string& path,
                  ReportFormat format) {
  if (rows.empty()) {
    throw Error(Errc::domain_error, "eval", "cannot write a report with no rows");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::io_error, "eval", "cannot open " + path + " for writing");

  if (format == ReportFormat::csv) {
    out << "method,epsilon,n,success_rate,mean_linf,mean_l2,mean_hog_dist,mean_time_s\n";
    for (const BenchmarkRow& row : rows) {
      out << row.method << ',' << real6(row.epsilon) << ',' << row.n << ','
          << real6(row.success_rate) << ',' << real6(row.mean_linf) << ','
          << real6(row.mean_l2) << ',' << real6(row.mean_hog_dist) << ','
          << real6(row.mean_time_s) << '\n';
    }
  } else {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const BenchmarkRow& row : rows) arr.push_back(row_to_json(row));
    out << arr.dump(2) << '\n';
  }
  if (!out) throw Error(Errc::io_error, "eval", "short write to " + path);
}

}  // namespace advjnd
