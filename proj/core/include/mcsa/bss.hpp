#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "mcsa/matrix.hpp"
#include "mcsa/record.hpp"

namespace mcsa {

// Affine preconditioner fitted by center_whiten: y = transform * (x - mean)
// has zero mean and identity covariance on the fitting data.
struct Whitener {
  std::vector<double> mean;
  Matrix transform;  // n x n

  std::size_t size() const { return mean.size(); }
  MultiChannelRecord apply(const MultiChannelRecord& x) const;
};

enum class ScoreKind { SuperGaussian, SubGaussian };

// Marginal source models and their score functions phi = -d/du log p(u):
//   SuperGaussian  p(u) = 1 / (pi cosh u)        phi(u) = tanh(u)
//   SubGaussian    p(u) = exp(-u^4/4) / Z        phi(u) = u^3
// Adaptive resolves each channel by the sign of its excess kurtosis
// (re-checked every iteration during fitting, with a small dead zone so
// near-Gaussian channels do not flap).
struct SourcePrior {
  enum class Mode { Adaptive, Fixed, PerChannel };
  Mode mode = Mode::Adaptive;
  ScoreKind fixed_kind = ScoreKind::SuperGaussian;
  std::vector<ScoreKind> kinds;  // used when mode == PerChannel

  static SourcePrior adaptive() { return {}; }
  static SourcePrior super_gaussian() {
    return {Mode::Fixed, ScoreKind::SuperGaussian, {}};
  }
  static SourcePrior sub_gaussian() {
    return {Mode::Fixed, ScoreKind::SubGaussian, {}};
  }
  static SourcePrior per_channel(std::vector<ScoreKind> k) {
    return {Mode::PerChannel, ScoreKind::SuperGaussian, std::move(k)};
  }
};

struct IcaConfig {
  double learning_rate = 0.1;
  std::size_t max_iterations = 500;
  double tolerance = 1e-6;  // on the accepted update Frobenius norm
  std::uint64_t seed = 0;
  SourcePrior prior = SourcePrior::adaptive();

  void validate() const;
};

// Fitted unmixing: u = w * transform * (x - mean). The determinant term of
// the contrast is bookkept in whitened coordinates; the constant contributed
// by the whitener is dropped since it does not move the optimum.
struct UnmixingMatrix {
  Matrix w;  // n x n, invertible
  Whitener whitener;
  std::size_t fit_iterations = 0;
  double final_objective = 0.0;
  bool converged = false;
  // Frobenius distance of the input covariance from identity; above 0.05 the
  // input was not properly whitened (diagnostic, not an error).
  double input_whiteness_error = 0.0;
  std::vector<double> objective_history;  // contrast after each accepted step
};

// Zero-mean, identity-covariance preconditioning. Requires at least two
// channels and 10 samples per channel dimension; throws on singular
// covariance (e.g. a duplicated channel).
std::pair<MultiChannelRecord, Whitener> center_whiten(const MultiChannelRecord& x);

// Likelihood contrast of an unmixing candidate on whitened data:
//   L(W) = sum_i mean_t log p(u_i(t)) - log|det W^-1|
// i.e. the determinant enters as +log|det W|; the optimizer ascends L.
double log_likelihood(const Matrix& w, const MultiChannelRecord& x_whitened,
                      const SourcePrior& prior);

// Natural-gradient ascent of the contrast: W += eta * (I - E[phi(u) u^T]) W,
// with step halving whenever a step would decrease the contrast. Stops when
// the accepted update norm falls below tolerance; returns with
// converged == false (never throws) when max_iterations runs out. The result
// carries an identity whitener; callers that whitened with center_whiten
// should store that whitener in the result before calling separate on raw
// data.
UnmixingMatrix ica_fit(const MultiChannelRecord& x_whitened, const IcaConfig& cfg);

// u(t) = W x_whitened(t); applies the stored whitener first.
MultiChannelRecord separate(const UnmixingMatrix& w, const MultiChannelRecord& x);

// Standard permutation/scale-invariant separation quality index, normalized
// to [0, 1]: 0 exactly when g is a scaled permutation. Throws on an all-zero
// row or column.
double amari_index(const Matrix& g);

struct SourceMatch {
  std::size_t estimated_index = 0;
  std::size_t reference_index = 0;
  double correlation = 0.0;  // signed Pearson correlation
};

// Greedy maximal-|correlation| assignment of estimated sources to reference
// sources; each reference is matched exactly once. Result sorted by
// estimated_index.
std::vector<SourceMatch> match_sources(const MultiChannelRecord& u,
                                       const SourceSet& s_ref);

// Closed forms behind SourcePrior, exposed for testing.
double score_function(ScoreKind kind, double u);
double log_density(ScoreKind kind, double u);
double excess_kurtosis(const std::vector<double>& samples);

}  // namespace mcsa
