#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "projlab/metrics.hpp"
#include "projlab/mixtures.hpp"
#include "projlab/projector.hpp"
#include "projlab/random.hpp"
#include "projlab/sources.hpp"

namespace projlab {

/// A process sampled on a fixed increasing grid.
struct ProcessPath {
  std::vector<double> grid;
  std::vector<double> values;
};

/// L paths computed from one shared dataset.
struct MultiProjectionRun {
  std::vector<ProcessPath> paths;
  std::uint64_t shared_data_id = 0;
};

/// Supplies the CDF of gamma^T P (d = 1) for a given projector.
using ReferenceProvider = std::function<Cdf(const ProjectionMatrix&, RandomStream&)>;

/// Exact projected CDF when one is known: Phi for GaussianIso, the mixture CDF
/// for GaussianScaleMixture, a normal CDF for Gaussian RotatedIndependent,
/// step functions for finitely supported sources. nullopt otherwise.
std::optional<ReferenceProvider> analytic_reference(const SourceSpec& spec, int q);

/// Plug-in reference: the empirical CDF of aux_size fresh draws projected
/// through the same gamma. Its error is O(aux_size^{-1/2}).
ReferenceProvider plugin_reference(const SourceSpec& spec, int q, int aux_size);

/// analytic_reference when available, otherwise plugin_reference.
ReferenceProvider default_reference(const SourceSpec& spec, int q, int aux_size);

/// Hashes the bytes of a data matrix; used to tag runs that share a dataset.
std::uint64_t data_fingerprint(const Matrix& data);

/// values[j] = sqrt(n) (F_n(grid[j]) - F(grid[j])) for the n projected values.
ProcessPath process_from_projected(std::span<const double> projected, std::span<const double> grid,
                                   const Cdf& reference);

/// Draws n points from spec, projects them with a d = 1 projector and returns
/// the standardized empirical process on the grid. Without a reference the
/// analytic projected law is used; throws MissingReferenceError if none exists.
ProcessPath one_projection_process(const SourceSpec& spec, int q, int n, const ProjectionMatrix& gamma,
                                   std::span<const double> grid, const std::optional<Cdf>& reference,
                                   RandomStream& rng);

/// One dataset of size n, then L independent projectors, one path each.
MultiProjectionRun multi_projection_run(const SourceSpec& spec, int q, int n, int L, std::span<const double> grid,
                                        const ReferenceProvider& reference, RandomStream& rng);

/// m rows (gamma^T X, gamma^T X~), each pair with its own fresh gamma. Shape m x 2d.
Matrix hoeffding_pair_sample(const SourceSpec& spec, int q, int d, int m, RandomStream& rng);

/// max_j |values[j]|.
double sup_statistic(const ProcessPath& path);

struct FunctionalEstimate {
  double estimate;
  double bound;  ///< L^{-1/2} sup|F|
};

/// Averages F over the paths of a run, the sample-mean stand-in for the
/// conditional expectation given the data.
FunctionalEstimate conditional_mean_functional(const std::function<double(const ProcessPath&)>& functional,
                                               double sup_norm, const MultiProjectionRun& run);

/// Throws ConditionError when R has an atom at 0: the halfspace class then
/// fails the continuity condition (C3) the limit theorems need.
void require_no_atom_at_zero(const MixingMeasure& mixing);

}  // namespace projlab
