#pragma once

#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "mc/core.hpp"

namespace mc {

using Aux = std::map<std::string, double>;

// Chain output. states[t-1] holds theta^(t) for t = 1..T; the starting point is
// kept separately in `initial`.
struct ChainTrace {
  Vec initial;
  std::vector<Vec> states;
  std::vector<char> accepted;
  std::size_t burn_in = 0;
  std::vector<Aux> aux;

  std::size_t size() const { return states.size(); }
  double acceptance_rate() const;
  // Post-burn-in values of coordinate d.
  std::vector<double> column(int d, bool after_burn_in = true) const;
};

struct StepResult {
  Vec state;
  bool accepted = true;
  Aux aux;
};

// One transition. t is the 1-based iteration index.
using Kernel = std::function<StepResult(const Vec& state, std::size_t t, RandomStream& rng)>;

ChainTrace run_chain(const Kernel& kernel, const Vec& init, std::size_t T, std::size_t burn_in,
                     RandomStream& rng);
double trace_estimate(const ChainTrace& trace, const std::function<double(const Vec&)>& g);
Vec trace_mean(const ChainTrace& trace);

// Keeps theta^(burn_in + 1 + mK), m = 0, 1, ...; the result has burn_in = 0.
ChainTrace thin(const ChainTrace& trace, std::size_t K);

void write_trace_csv(const ChainTrace& trace, std::ostream& os);
void write_trace_jsonl(const ChainTrace& trace, std::ostream& os);

// ---- Metropolis-Hastings -------------------------------------------------

struct MhResult {
  Vec state;
  double log_density = kNegInf;  // log pi at the returned state
  bool accepted = false;
  double alpha = 0.0;
};

// Acceptance probability for moving x -> y given cached log pi values.
double mh_alpha(const Vec& x, double logp_x, const Vec& y, double logp_y, const Proposal& q);

MhResult mh_step(const Vec& state, const LogTarget& target, const Proposal& proposal,
                 RandomStream& rng);
// Same, reusing a known log pi(state).
MhResult mh_step(const Vec& state, double logp_state, const LogTarget& target,
                 const Proposal& proposal, RandomStream& rng);

Kernel mh_kernel(const LogTarget& target, const Proposal& proposal);

// pi(y) q(x|y) / (pi(y) q(x|y) + pi(x) q(y|x)) for the move x -> y.
double barker_alpha(const Vec& state, const Vec& candidate, const LogTarget& target,
                    const Proposal& proposal);

// ---- Gibbs family ----------------------------------------------------------

enum class ScanKind { systematic, symmetric, random };

struct ScanPolicy {
  ScanKind kind = ScanKind::systematic;
  int dim = 1;

  // 0-based coordinate for 1-based step t. Only the random scan uses rng.
  int index(std::size_t t, RandomStream& rng) const;
};

// Draws coordinate d of the state from its full conditional given the rest.
using ConditionalSampler = std::function<double(int d, const Vec& state, RandomStream& rng)>;

Vec gibbs_step(const Vec& state, const ConditionalSampler& sampler, const ScanPolicy& policy,
               std::size_t t, RandomStream& rng);

// Block variant: blocks[b] lists the coordinates of block b; policy.dim must be
// the number of blocks.
using BlockSampler = std::function<Vec(int block, const Vec& state, RandomStream& rng)>;
Vec gibbs_block_step(const Vec& state, const BlockSampler& sampler,
                     const std::vector<std::vector<int>>& blocks, const ScanPolicy& policy,
                     std::size_t t, RandomStream& rng);

// Runs `sweeps` passes of policy.dim single-coordinate updates. With
// keep_intermediate the trace records every coordinate update, otherwise one
// state per sweep.
ChainTrace run_gibbs(const ConditionalSampler& sampler, const ScanPolicy& policy, const Vec& init,
                     std::size_t sweeps, std::size_t burn_in, bool keep_intermediate,
                     RandomStream& rng);

// Updates the coordinate picked by the policy with T_MH inner MH steps on the
// conditional of `target`. proposals holds one 1-D proposal per coordinate, or a
// single shared one. Inner accept counts go to aux["acc_<d>"] when aux is given.
Vec mh_within_gibbs_step(const Vec& state, const LogTarget& target,
                         const std::vector<Proposal>& proposals, int T_MH,
                         const ScanPolicy& policy, std::size_t t, RandomStream& rng,
                         Aux* aux = nullptr);

// Data augmentation: theta | latents from the 1/K mixture, then K fresh latents.
struct AugmentationModel {
  std::function<Vec(const Vec& latent, RandomStream&)> sample_theta;
  std::function<Vec(const Vec& theta, RandomStream&)> sample_latent;
};

struct DaState {
  Vec theta;
  std::vector<Vec> latents;
};

DaState da_step(const std::vector<Vec>& latents, const Vec& state, const AugmentationModel& model,
                std::size_t K, RandomStream& rng);

// ---- Slice, hit-and-run, ADS ----------------------------------------------

struct SliceOptions {
  double width = 1.0;
  int max_doublings = 64;
};

// Univariate slice sampler (doubling expansion and shrinkage). Throws
// "unbounded slice" if the slice does not close within max_doublings.
double slice_step_1d(double state, const std::function<double(double)>& log_target,
                     RandomStream& rng, const SliceOptions& opt = {});

using DirectionSampler = std::function<Vec(const Vec& state, RandomStream& rng)>;
DirectionSampler uniform_directions(int dim);
DirectionSampler axis_directions(int dim);

struct LineSamplerOptions {
  // exact = true uses the slice sampler along the line, so every step is an
  // exact conditional draw. Otherwise a Metropolised random walk on the line.
  bool exact = false;
  int steps = 50;
  double step_sd = 1.0;
  SliceOptions slice;
};

// Draws r from the density proportional to exp(log_line(r)), starting at r = 0.
double sample_line(const std::function<double(double)>& log_line, RandomStream& rng,
                   const LineSamplerOptions& opt);

Vec hit_and_run_step(const Vec& state, const LogTarget& target, const DirectionSampler& directions,
                     RandomStream& rng, const LineSamplerOptions& opt = {});

enum class AdsMode { snooker, parallel, hitrun, gibbs };

// Replaces one support point. Throws "support too small" when K <= dim and
// "zero direction" when the chosen direction vanishes.
std::vector<Vec> ads_step(const std::vector<Vec>& support, const LogTarget& target, AdsMode mode,
                          RandomStream& rng, const LineSamplerOptions& opt = {});

}  // namespace mc
