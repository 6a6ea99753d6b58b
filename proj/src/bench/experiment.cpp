#include "mc/bench/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace mc::bench {

namespace {

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  std::ostringstream os;
  os << std::setprecision(12) << v;
  return os.str();
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::vector<std::string> metric_keys(const Report& r) {
  std::vector<std::string> keys;
  for (const auto& [k, v] : r.replicates.front().metrics) keys.push_back(k);
  return keys;
}

}  // namespace

Outcome run_replicate(const ExperimentConfig& cfg, RandomStream& rng) {
  const auto& e = cfg.experiment;
  if (e == "gm1d") return run_gm1d(cfg.sampler, gm1d_settings(cfg.params, cfg.budget), rng);
  if (e == "gm2d5")
    return run_gm2d5(cfg.sampler, gm2d_settings(cfg.sampler, cfg.params, cfg.budget), rng);
  if (e == "logistic_map")
    return run_logistic(cfg.sampler, logistic_settings(cfg.params, cfg.budget), rng);
  if (e == "wsn") {
    const WsnSettings s = wsn_settings(cfg.params, cfg.budget);
    return run_wsn(cfg.sampler, s, wsn_dataset(s), rng);
  }
  if (e == "spectral")
    return run_spectral(cfg.sampler, spectral_settings(cfg.params, cfg.budget), rng);
  throw ConfigError("unknown experiment '" + e + "'");
}

Report run_experiment(const ExperimentConfig& cfg) {
  validate(cfg);
  const auto start = std::chrono::steady_clock::now();
  Report rep;
  rep.config = cfg;
  RandomStream root(cfg.seed);
  auto streams = root.split(static_cast<std::size_t>(cfg.replicates));
  // The WSN data set is shared; build it once.
  std::optional<Mat> wsn_Y;
  std::optional<WsnSettings> wsn_s;
  if (cfg.experiment == "wsn") {
    wsn_s = wsn_settings(cfg.params, cfg.budget);
    wsn_Y = wsn_dataset(*wsn_s);
  }
  for (auto& s : streams) {
    if (wsn_Y) rep.replicates.push_back(run_wsn(cfg.sampler, *wsn_s, *wsn_Y, s));
    else rep.replicates.push_back(run_replicate(cfg, s));
  }
  rep.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const auto D = rep.replicates.front().estimate.size();
  rep.mse = Vec::Zero(D);
  for (const auto& o : rep.replicates) rep.mse += (o.estimate - o.truth).array().square().matrix();
  rep.mse /= static_cast<double>(rep.replicates.size());
  rep.mse_mean = rep.mse.mean();

  nlohmann::json& j = rep.summary;
  j["experiment"] = cfg.experiment;
  j["sampler"] = cfg.sampler;
  if (cfg.experiment == "spectral" && cfg.sampler == "omcmc_approx")
    j["note"] = "approximation of O-MCMC: parallel MH chains plus a population-proposal exchange move";
  j["replicates"] = cfg.replicates;
  j["seed"] = cfg.seed;
  j["mse"] = std::vector<double>(rep.mse.data(), rep.mse.data() + D);
  j["mse_mean"] = rep.mse_mean;
  Vec mean_est = Vec::Zero(D);
  double evals = 0.0;
  std::vector<double> log_z;
  for (const auto& o : rep.replicates) {
    mean_est += o.estimate / static_cast<double>(rep.replicates.size());
    evals += static_cast<double>(o.evaluations) / rep.replicates.size();
    if (!std::isnan(o.log_z)) log_z.push_back(o.log_z);
  }
  j["mean_estimate"] = std::vector<double>(mean_est.data(), mean_est.data() + D);
  j["mean_evaluations"] = evals;
  if (!log_z.empty()) {
    double zm = 0.0;
    for (double l : log_z) zm += std::exp(l) / log_z.size();
    j["mean_z_hat"] = zm;
  }
  nlohmann::json metrics;
  for (const auto& k : metric_keys(rep)) {
    std::vector<double> v;
    for (const auto& o : rep.replicates) v.push_back(o.metrics.at(k));
    double m = 0.0;
    for (double x : v) m += x / v.size();
    metrics[k] = {{"mean", m}, {"median", median(v)}};
  }
  j["metrics"] = metrics;
  j["wall_time_s"] = rep.wall_time_s;
  return rep;
}

void write_replicates_csv(const Report& r, std::ostream& os) {
  if (r.replicates.empty()) return;
  const auto D = r.replicates.front().estimate.size();
  const auto keys = metric_keys(r);
  os << "replicate";
  for (Eigen::Index d = 0; d < D; ++d) os << ",estimate_" << d;
  for (Eigen::Index d = 0; d < D; ++d) os << ",truth_" << d;
  os << ",sq_err,log_z,evaluations";
  for (const auto& k : keys) os << "," << k;
  os << "\n";
  for (std::size_t i = 0; i < r.replicates.size(); ++i) {
    const auto& o = r.replicates[i];
    os << i;
    for (Eigen::Index d = 0; d < D; ++d) os << "," << fmt(o.estimate[d]);
    for (Eigen::Index d = 0; d < D; ++d) os << "," << fmt(o.truth[d]);
    os << "," << fmt((o.estimate - o.truth).squaredNorm() / D) << "," << fmt(o.log_z) << ","
       << o.evaluations;
    for (const auto& k : keys) os << "," << fmt(o.metrics.at(k));
    os << "\n";
  }
}

void write_replicates_jsonl(const Report& r, std::ostream& os) {
  for (std::size_t i = 0; i < r.replicates.size(); ++i) {
    const auto& o = r.replicates[i];
    nlohmann::json j;
    j["replicate"] = i;
    j["estimate"] = std::vector<double>(o.estimate.data(), o.estimate.data() + o.estimate.size());
    j["truth"] = std::vector<double>(o.truth.data(), o.truth.data() + o.truth.size());
    j["evaluations"] = o.evaluations;
    if (!std::isnan(o.log_z)) j["log_z"] = o.log_z;
    j["metrics"] = o.metrics;
    os << j.dump() << "\n";
  }
}

void write_alpha_csv(const Report& r, std::ostream& os) {
  const std::size_t T = r.replicates.front().alpha.size();
  os << "t,mean_alpha\n";
  for (std::size_t t = 0; t < T; ++t) {
    double m = 0.0;
    for (const auto& o : r.replicates) m += o.alpha[t];
    os << t + 1 << "," << fmt(m / r.replicates.size()) << "\n";
  }
}

void write_report(const Report& r) {
  if (r.config.out.empty()) return;
  namespace fs = std::filesystem;
  const fs::path dir(r.config.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("cannot create output directory " + dir.string());
  auto open = [&](const char* name) {
    std::ofstream f(dir / name);
    if (!f) throw Error("cannot write " + (dir / name).string());
    return f;
  };
  {
    auto f = open("replicates.csv");
    write_replicates_csv(r, f);
  }
  {
    auto f = open("replicates.jsonl");
    write_replicates_jsonl(r, f);
  }
  {
    auto f = open("summary.json");
    f << r.summary.dump(2) << "\n";
  }
  if (!r.replicates.empty() && !r.replicates.front().alpha.empty()) {
    auto f = open("alpha.csv");
    write_alpha_csv(r, f);
  }
}

}  // namespace mc::bench
