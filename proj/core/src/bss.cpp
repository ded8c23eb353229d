#include "mcsa/bss.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

#include "mcsa/rng.hpp"

namespace mcsa {

namespace {

constexpr double kSingularDet = 1e-12;
constexpr double kKurtosisDeadZone = 0.1;

Eigen::MatrixXd to_eigen(const Matrix& m) {
  Eigen::MatrixXd e(m.rows, m.cols);
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t j = 0; j < m.cols; ++j) e(i, j) = m.at(i, j);
  return e;
}

Matrix from_eigen(const Eigen::MatrixXd& e) {
  Matrix m(static_cast<std::size_t>(e.rows()), static_cast<std::size_t>(e.cols()));
  for (Eigen::Index i = 0; i < e.rows(); ++i)
    for (Eigen::Index j = 0; j < e.cols(); ++j)
      m.at(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = e(i, j);
  return m;
}

// Channels as rows: n x T.
Eigen::MatrixXd record_to_eigen(const MultiChannelRecord& x) {
  const std::size_t n = x.channel_count();
  const std::size_t t = x.length();
  Eigen::MatrixXd m(n, t);
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t i = 0; i < t; ++i) m(c, i) = x.channels[c].samples[i];
  }
  return m;
}

double log_abs_det(const Eigen::MatrixXd& w) {
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(w);
  double log_det = 0.0;
  for (Eigen::Index i = 0; i < w.rows(); ++i) {
    const double d = std::abs(lu.matrixLU()(i, i));
    if (d < kSingularDet) {
      throw std::invalid_argument("bss: singular unmixing matrix");
    }
    log_det += std::log(d);
  }
  return log_det;
}

double stable_log_cosh(double u) {
  const double a = std::abs(u);
  return a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
}

std::vector<ScoreKind> resolve_prior(const SourcePrior& prior,
                                     const Eigen::MatrixXd& u) {
  const auto n = static_cast<std::size_t>(u.rows());
  switch (prior.mode) {
    case SourcePrior::Mode::Fixed:
      return std::vector<ScoreKind>(n, prior.fixed_kind);
    case SourcePrior::Mode::PerChannel:
      if (prior.kinds.size() != n) {
        throw std::invalid_argument("prior: per-channel kind count mismatch");
      }
      return prior.kinds;
    case SourcePrior::Mode::Adaptive:
    default: {
      std::vector<ScoreKind> kinds(n, ScoreKind::SuperGaussian);
      for (std::size_t i = 0; i < n; ++i) {
        const auto row = u.row(static_cast<Eigen::Index>(i));
        const double m2 = row.array().square().mean();
        const double m4 = row.array().square().square().mean();
        const double k = m2 > 0.0 ? m4 / (m2 * m2) - 3.0 : 0.0;
        kinds[i] = k >= 0.0 ? ScoreKind::SuperGaussian : ScoreKind::SubGaussian;
      }
      return kinds;
    }
  }
}

double contrast(const Eigen::MatrixXd& w, const Eigen::MatrixXd& z,
                const std::vector<ScoreKind>& kinds) {
  const double log_det = log_abs_det(w);
  const Eigen::MatrixXd u = w * z;
  double data_term = 0.0;
  for (Eigen::Index i = 0; i < u.rows(); ++i) {
    const ScoreKind kind = kinds[static_cast<std::size_t>(i)];
    double acc = 0.0;
    for (Eigen::Index t = 0; t < u.cols(); ++t) acc += log_density(kind, u(i, t));
    data_term += acc / static_cast<double>(u.cols());
  }
  return data_term + log_det;
}

}  // namespace

double score_function(ScoreKind kind, double u) {
  return kind == ScoreKind::SuperGaussian ? std::tanh(u) : u * u * u;
}

double log_density(ScoreKind kind, double u) {
  if (kind == ScoreKind::SuperGaussian) {
    // p(u) = 1 / (pi cosh u)
    return -stable_log_cosh(u) - std::log(std::numbers::pi);
  }
  // p(u) = exp(-u^4 / 4) / Z, Z = Gamma(1/4) / sqrt(2)
  const double log_z = std::lgamma(0.25) - 0.5 * std::numbers::ln2;
  return -0.25 * u * u * u * u - log_z;
}

double excess_kurtosis(const std::vector<double>& samples) {
  if (samples.empty()) return 0.0;
  const double n = static_cast<double>(samples.size());
  const double mean = std::accumulate(samples.begin(), samples.end(), 0.0) / n;
  double m2 = 0.0, m4 = 0.0;
  for (double s : samples) {
    const double d = s - mean;
    m2 += d * d;
    m4 += d * d * d * d;
  }
  m2 /= n;
  m4 /= n;
  if (m2 <= 0.0) return 0.0;
  return m4 / (m2 * m2) - 3.0;
}

void IcaConfig::validate() const {
  if (learning_rate <= 0.0) throw std::invalid_argument("ica: learning_rate must be > 0");
  if (max_iterations == 0) throw std::invalid_argument("ica: max_iterations must be >= 1");
  if (tolerance <= 0.0) throw std::invalid_argument("ica: tolerance must be > 0");
}

MultiChannelRecord Whitener::apply(const MultiChannelRecord& x) const {
  x.validate();
  const std::size_t n = size();
  if (x.channel_count() != n) {
    throw std::invalid_argument("whitener: channel count mismatch");
  }
  const std::size_t t = x.length();
  MultiChannelRecord out;
  out.sample_rate_hz = x.sample_rate_hz;
  out.channels.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.channels[i].label = "whitened_" + std::to_string(i);
    out.channels[i].samples.assign(t, 0.0);
  }
  for (std::size_t k = 0; k < t; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        acc += transform.at(i, j) * (x.channels[j].samples[k] - mean[j]);
      }
      out.channels[i].samples[k] = acc;
    }
  }
  return out;
}

std::pair<MultiChannelRecord, Whitener> center_whiten(const MultiChannelRecord& x) {
  x.validate();
  const std::size_t n = x.channel_count();
  const std::size_t t = x.length();
  if (n < 2) throw std::invalid_argument("whiten: need at least two channels");
  if (t < 10 * n) {
    throw std::invalid_argument("whiten: need at least 10 samples per channel dimension");
  }

  Eigen::MatrixXd data = record_to_eigen(x);
  Eigen::VectorXd mean = data.rowwise().mean();
  data.colwise() -= mean;
  // Population covariance (1/T), matched by the identity check in tests.
  const Eigen::MatrixXd cov = data * data.transpose() / static_cast<double>(t);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("whiten: eigendecomposition failed");
  }
  const Eigen::VectorXd evals = es.eigenvalues();
  const double max_eval = evals(static_cast<Eigen::Index>(n) - 1);
  if (evals(0) <= 1e-12 * std::max(max_eval, 1e-30)) {
    throw std::invalid_argument(
        "whiten: singular covariance (degenerate or duplicated channel)");
  }

  const Eigen::MatrixXd transform =
      evals.cwiseSqrt().cwiseInverse().asDiagonal() * es.eigenvectors().transpose();

  Whitener wh;
  wh.mean.assign(mean.data(), mean.data() + n);
  wh.transform = from_eigen(transform);

  const Eigen::MatrixXd whitened = transform * data;
  MultiChannelRecord out;
  out.sample_rate_hz = x.sample_rate_hz;
  out.channels.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.channels[i].label = "whitened_" + std::to_string(i);
    out.channels[i].samples.resize(t);
    for (std::size_t k = 0; k < t; ++k) {
      out.channels[i].samples[k] = whitened(static_cast<Eigen::Index>(i),
                                            static_cast<Eigen::Index>(k));
    }
  }
  return {std::move(out), std::move(wh)};
}

double log_likelihood(const Matrix& w, const MultiChannelRecord& x_whitened,
                      const SourcePrior& prior) {
  x_whitened.validate();
  if (!w.square() || w.rows != x_whitened.channel_count()) {
    throw std::invalid_argument("log_likelihood: matrix/record dimension mismatch");
  }
  const Eigen::MatrixXd we = to_eigen(w);
  const Eigen::MatrixXd z = record_to_eigen(x_whitened);
  const std::vector<ScoreKind> kinds = resolve_prior(prior, we * z);
  return contrast(we, z, kinds);
}

UnmixingMatrix ica_fit(const MultiChannelRecord& x_whitened, const IcaConfig& cfg) {
  x_whitened.validate();
  cfg.validate();
  const std::size_t n = x_whitened.channel_count();
  const auto t = static_cast<double>(x_whitened.length());
  if (n < 2) throw std::invalid_argument("ica: need at least two channels");

  const Eigen::MatrixXd z = record_to_eigen(x_whitened);

  UnmixingMatrix result;
  {
    const Eigen::MatrixXd centered = z.colwise() - z.rowwise().mean().eval();
    const Eigen::MatrixXd cov = centered * centered.transpose() / t;
    result.input_whiteness_error =
        (cov - Eigen::MatrixXd::Identity(cov.rows(), cov.cols())).norm();
  }

  // Identity plus a small seeded perturbation: a deterministic,
  // near-orthonormal start in whitened coordinates.
  Rng rng(cfg.seed);
  Eigen::MatrixXd w = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n),
                                                static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < w.rows(); ++i)
    for (Eigen::Index j = 0; j < w.cols(); ++j) w(i, j) += rng.uniform(-0.01, 0.01);

  const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(
      static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));

  std::vector<ScoreKind> kinds = resolve_prior(cfg.prior, w * z);
  double objective = contrast(w, z, kinds);
  result.objective_history.push_back(objective);

  bool converged = false;
  std::size_t iterations = 0;
  for (std::size_t iter = 0; iter < cfg.max_iterations; ++iter) {
    const Eigen::MatrixXd u = w * z;

    if (cfg.prior.mode == SourcePrior::Mode::Adaptive) {
      // Flip a channel's kind only on a clear kurtosis sign, so the
      // per-iteration objective stays comparable while a channel hovers
      // near Gaussian.
      bool changed = false;
      for (std::size_t i = 0; i < n; ++i) {
        const auto row = u.row(static_cast<Eigen::Index>(i));
        const double m2 = row.array().square().mean();
        const double m4 = row.array().square().square().mean();
        const double k = m2 > 0.0 ? m4 / (m2 * m2) - 3.0 : 0.0;
        const ScoreKind want =
            k >= 0.0 ? ScoreKind::SuperGaussian : ScoreKind::SubGaussian;
        if (want != kinds[i] && std::abs(k) > kKurtosisDeadZone) {
          kinds[i] = want;
          changed = true;
        }
      }
      if (changed) objective = contrast(w, z, kinds);
    }

    Eigen::MatrixXd phi(u.rows(), u.cols());
    for (Eigen::Index i = 0; i < u.rows(); ++i) {
      const ScoreKind kind = kinds[static_cast<std::size_t>(i)];
      for (Eigen::Index c = 0; c < u.cols(); ++c) {
        phi(i, c) = score_function(kind, u(i, c));
      }
    }
    const Eigen::MatrixXd gradient = (identity - phi * u.transpose() / t) * w;
    const double gradient_norm = gradient.norm();

    double step = cfg.learning_rate;
    bool accepted = false;
    Eigen::MatrixXd w_next;
    double objective_next = 0.0;
    for (int halving = 0; halving < 30; ++halving) {
      w_next = w + step * gradient;
      bool singular = false;
      try {
        objective_next = contrast(w_next, z, kinds);
      } catch (const std::invalid_argument&) {
        singular = true;
      }
      if (!singular && objective_next >= objective) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // no improving step exists at any scale

    w = w_next;
    objective = objective_next;
    result.objective_history.push_back(objective);
    iterations = iter + 1;
    if (step * gradient_norm < cfg.tolerance) {
      converged = true;
      break;
    }
  }

  result.w = from_eigen(w);
  result.whitener.mean.assign(n, 0.0);
  result.whitener.transform = Matrix::identity(n);
  result.fit_iterations = iterations;
  result.final_objective = objective;
  result.converged = converged;
  return result;
}

MultiChannelRecord separate(const UnmixingMatrix& w, const MultiChannelRecord& x) {
  x.validate();
  if (!w.w.square() || x.channel_count() != w.whitener.size() ||
      w.w.rows != w.whitener.size()) {
    throw std::invalid_argument("separate: channel count mismatch");
  }
  const MultiChannelRecord whitened = w.whitener.apply(x);
  const std::size_t n = whitened.channel_count();
  const std::size_t t = whitened.length();
  MultiChannelRecord out;
  out.sample_rate_hz = x.sample_rate_hz;
  out.channels.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.channels[i].label = "source_" + std::to_string(i);
    out.channels[i].samples.assign(t, 0.0);
  }
  for (std::size_t k = 0; k < t; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        acc += w.w.at(i, j) * whitened.channels[j].samples[k];
      }
      out.channels[i].samples[k] = acc;
    }
  }
  return out;
}

double amari_index(const Matrix& g) {
  if (!g.square()) throw std::invalid_argument("amari: matrix must be square");
  const std::size_t n = g.rows;
  if (n == 1) return 0.0;

  // The ambiguity acts on the left (u = Wx recovers sources up to a row
  // permutation and scaling), so rows are normalized by their largest entry
  // before either term is computed. That makes the index exactly invariant
  // under G -> P D G and zero exactly on scaled permutations.
  std::vector<double> row_max(n, 0.0), col_max_check(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double v = std::abs(g.at(i, j));
      row_max[i] = std::max(row_max[i], v);
      col_max_check[j] = std::max(col_max_check[j], v);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (row_max[i] <= 0.0) throw std::invalid_argument("amari: all-zero row");
    if (col_max_check[i] <= 0.0) throw std::invalid_argument("amari: all-zero column");
  }

  Matrix normalized(n, n, 0.0);
  std::vector<double> col_max(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      normalized.at(i, j) = std::abs(g.at(i, j)) / row_max[i];
      col_max[j] = std::max(col_max[j], normalized.at(i, j));
    }
  }

  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double row_sum = 0.0, col_sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      row_sum += normalized.at(i, j);
      col_sum += normalized.at(j, i) / col_max[i];
    }
    total += (row_sum - 1.0) + (col_sum - 1.0);
  }
  return total / (2.0 * static_cast<double>(n) * static_cast<double>(n - 1));
}

std::vector<SourceMatch> match_sources(const MultiChannelRecord& u,
                                       const SourceSet& s_ref) {
  u.validate();
  s_ref.validate();
  if (u.channel_count() != s_ref.channel_count() || u.length() != s_ref.length()) {
    throw std::invalid_argument("match_sources: shape mismatch");
  }
  const std::size_t n = u.channel_count();
  const auto t = static_cast<double>(u.length());

  auto stats = [&](const std::vector<double>& v) {
    double mean = std::accumulate(v.begin(), v.end(), 0.0) / t;
    double var = 0.0;
    for (double s : v) var += (s - mean) * (s - mean);
    return std::pair{mean, var};
  };

  Matrix corr(n, n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto [mu_i, var_i] = stats(u.channels[i].samples);
    for (std::size_t j = 0; j < n; ++j) {
      const auto [mu_j, var_j] = stats(s_ref.channels[j].samples);
      if (var_i <= 0.0 || var_j <= 0.0) continue;  // degenerate: correlation 0
      double cov = 0.0;
      for (std::size_t k = 0; k < u.length(); ++k) {
        cov += (u.channels[i].samples[k] - mu_i) * (s_ref.channels[j].samples[k] - mu_j);
      }
      corr.at(i, j) = cov / std::sqrt(var_i * var_j);
    }
  }

  std::vector<bool> est_used(n, false), ref_used(n, false);
  std::vector<SourceMatch> matches;
  for (std::size_t round = 0; round < n; ++round) {
    double best = -1.0;
    std::size_t bi = 0, bj = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (est_used[i]) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (ref_used[j]) continue;
        if (std::abs(corr.at(i, j)) > best) {
          best = std::abs(corr.at(i, j));
          bi = i;
          bj = j;
        }
      }
    }
    est_used[bi] = true;
    ref_used[bj] = true;
    matches.push_back({bi, bj, corr.at(bi, bj)});
  }
  std::sort(matches.begin(), matches.end(),
            [](const SourceMatch& a, const SourceMatch& b) {
              return a.estimated_index < b.estimated_index;
            });
  return matches;
}

}  // namespace mcsa
