#pragma once

#include <vector>

#include <json.hpp>

#include "mc/core.hpp"
#include "mc/mcmc.hpp"

namespace mc {

using Series = std::vector<double>;

// Potential scale reduction factor of S >= 2 scalar chains of equal length M >= 2.
double psrf(const std::vector<Series>& chains);
// One value per coordinate of vector-valued chains.
std::vector<double> psrf(const std::vector<std::vector<Vec>>& chains);

// Biased sample autocorrelation at the given lag (divisor T at every lag).
double autocorrelation(const Series& trace, std::size_t lag);

// T / (1 + 2 sum rho), the sum truncated by Geyer's initial positive sequence:
// pairs rho(2k) + rho(2k+1) are accumulated while they stay positive. The
// result is capped at T log10(T) for strongly anticorrelated traces.
double ess_mcmc(const Series& trace);
// Same, with a fixed truncation lag instead of the automatic cutoff.
double ess_mcmc(const Series& trace, std::size_t max_lag);

// Second half of every chain; an odd length drops the middle element.
std::vector<Series> split_second_half(const std::vector<Series>& chains);
// Splits one chain into `parts` consecutive pieces of equal length.
std::vector<Series> split_chain(const Series& chain, std::size_t parts);

// Per-coordinate R hat, ESS (pooled over chains) and lag-1 autocorrelation of
// the post-burn-in states, plus the mean acceptance rate.
nlohmann::json diagnostic_report(const std::vector<ChainTrace>& chains);

}  // namespace mc
