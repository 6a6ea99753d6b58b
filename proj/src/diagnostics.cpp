#include "mc/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mc {

namespace {

double mean_of(const Series& x) { return std::accumulate(x.begin(), x.end(), 0.0) / x.size(); }

double unbiased_var(const Series& x, double m) {
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / (x.size() - 1);
}

double autocovariance(const Series& x, double m, std::size_t k) {
  double s = 0.0;
  for (std::size_t t = 0; t + k < x.size(); ++t) s += (x[t] - m) * (x[t + k] - m);
  return s / x.size();
}

double ess_from_tau(double tau, std::size_t T) {
  const double cap = T * std::log10(std::max<double>(T, 10.0));
  if (tau <= T / cap) return cap;
  return T / tau;
}

}  // namespace

double psrf(const std::vector<Series>& chains) {
  const std::size_t S = chains.size();
  if (S < 2) throw Error("psrf: need at least two chains");
  const std::size_t M = chains[0].size();
  if (M < 2) throw Error("psrf: chains must have length >= 2");
  for (const auto& c : chains)
    if (c.size() != M) throw Error("psrf: chains of unequal length");
  std::vector<double> means(S);
  double grand = 0.0, W = 0.0;
  for (std::size_t j = 0; j < S; ++j) {
    means[j] = mean_of(chains[j]);
    grand += means[j];
    W += unbiased_var(chains[j], means[j]);
  }
  grand /= S;
  W /= S;
  double B = 0.0;
  for (double m : means) B += (m - grand) * (m - grand);
  B *= static_cast<double>(M) / (S - 1);
  if (!(W > 0.0)) throw NumericalError("degenerate within-chain variance");
  const double var_plus = (M - 1.0) / M * W + B / M;
  return std::sqrt(var_plus / W);
}

std::vector<double> psrf(const std::vector<std::vector<Vec>>& chains) {
  if (chains.empty() || chains[0].empty()) throw Error("psrf: empty chains");
  const int D = static_cast<int>(chains[0][0].size());
  std::vector<double> out(D);
  for (int d = 0; d < D; ++d) {
    std::vector<Series> sc;
    for (const auto& c : chains) {
      Series s(c.size());
      for (std::size_t t = 0; t < c.size(); ++t) s[t] = c[t][d];
      sc.push_back(std::move(s));
    }
    out[d] = psrf(sc);
  }
  return out;
}

double autocorrelation(const Series& trace, std::size_t lag) {
  if (lag >= trace.size()) throw Error("autocorrelation: lag must be smaller than the trace");
  const double m = mean_of(trace);
  double c0 = 0.0, ck = 0.0;
  for (std::size_t t = 0; t < trace.size(); ++t) {
    c0 += (trace[t] - m) * (trace[t] - m);
    if (t + lag < trace.size()) ck += (trace[t] - m) * (trace[t + lag] - m);
  }
  if (!(c0 > 0.0)) throw NumericalError("autocorrelation: constant trace");
  return ck / c0;
}

double ess_mcmc(const Series& trace) {
  const std::size_t T = trace.size();
  if (T < 4) throw Error("ess: trace too short");
  const double m = mean_of(trace);
  const double c0 = autocovariance(trace, m, 0);
  if (!(c0 > 0.0)) throw NumericalError("ess: constant trace");
  // tau = -1 + 2 sum_k Gamma_k, Gamma_k = rho(2k) + rho(2k+1).
  double sum_gamma = 0.0;
  for (std::size_t k = 0; 2 * k + 1 < T; ++k) {
    const double g =
        (autocovariance(trace, m, 2 * k) + autocovariance(trace, m, 2 * k + 1)) / c0;
    if (k > 0 && g <= 0.0) break;
    sum_gamma += g;
  }
  return ess_from_tau(-1.0 + 2.0 * sum_gamma, T);
}

double ess_mcmc(const Series& trace, std::size_t max_lag) {
  const std::size_t T = trace.size();
  if (T < 2) throw Error("ess: trace too short");
  if (max_lag >= T) throw Error("ess: lag must be smaller than the trace");
  const double m = mean_of(trace);
  const double c0 = autocovariance(trace, m, 0);
  if (!(c0 > 0.0)) throw NumericalError("ess: constant trace");
  double tau = 1.0;
  for (std::size_t k = 1; k <= max_lag; ++k) tau += 2.0 * autocovariance(trace, m, k) / c0;
  return ess_from_tau(tau, T);
}

std::vector<Series> split_second_half(const std::vector<Series>& chains) {
  std::vector<Series> out;
  for (const auto& c : chains) {
    if (c.size() < 4) throw Error("split: chains must have length >= 4");
    const std::size_t keep = c.size() / 2;
    out.emplace_back(c.end() - keep, c.end());
  }
  return out;
}

std::vector<Series> split_chain(const Series& chain, std::size_t parts) {
  if (parts < 1) throw Error("split: need at least one part");
  if (chain.size() < 4 || chain.size() < 2 * parts) throw Error("split: chain too short");
  const std::size_t len = chain.size() / parts;
  std::vector<Series> out;
  for (std::size_t p = 0; p < parts; ++p)
    out.emplace_back(chain.begin() + p * len, chain.begin() + (p + 1) * len);
  return out;
}

nlohmann::json diagnostic_report(const std::vector<ChainTrace>& chains) {
  if (chains.empty()) throw Error("diagnostics: no chains");
  const int D = static_cast<int>(chains[0].initial.size());
  nlohmann::json rep;
  rep["chains"] = chains.size();
  double acc = 0.0;
  for (const auto& c : chains) acc += c.acceptance_rate();
  rep["acceptance_rate"] = acc / chains.size();
  nlohmann::json dims = nlohmann::json::array();
  for (int d = 0; d < D; ++d) {
    std::vector<Series> cols;
    Series pooled;
    for (const auto& c : chains) {
      cols.push_back(c.column(d));
      pooled.insert(pooled.end(), cols.back().begin(), cols.back().end());
    }
    nlohmann::json e;
    e["dim"] = d;
    auto guarded = [](auto&& f) -> nlohmann::json {
      try {
        return f();
      } catch (const Error&) {
        return nullptr;
      }
    };
    e["rhat"] = cols.size() >= 2 ? guarded([&] { return psrf(cols); }) : nlohmann::json(nullptr);
    e["ess"] = guarded([&] {
      double s = 0.0;
      for (const auto& c : cols) s += ess_mcmc(c);
      return s;
    });
    e["lag1"] = guarded([&] { return autocorrelation(pooled, 1); });
    dims.push_back(e);
  }
  rep["dims"] = dims;
  return rep;
}

}  // namespace mc
