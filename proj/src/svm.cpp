#include "ovoscope/svm.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <string>

#include "ovoscope/error.hpp"
#include "ovoscope/random.hpp"
#include "ovoscope/simd/kernels.hpp"

namespace ovoscope {

void TrainConfig::validate() const {
  if (!(c > 0.0) || !std::isfinite(c)) {
    throw InvalidArgument("svm: c must be a positive finite number");
  }
  if (!(kkt_tol > 0.0) || !(eps > 0.0)) {
    throw InvalidArgument("svm: tolerances must be positive");
  }
}

std::vector<double> FeatureScaling::apply(std::span<const double> x) const {
  if (x.size() != means.size()) {
    throw InvalidArgument("svm: feature dimension mismatch");
  }
  std::vector<double> out(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    out[k] = (x[k] - means[k]) / scales[k];
  }
  return out;
}

FeatureScaling FeatureScaling::fit(std::span<const LabeledSample> samples) {
  const std::size_t d = samples.front().x.size();
  const double n = static_cast<double>(samples.size());
  FeatureScaling s;
  s.means.assign(d, 0.0);
  s.scales.assign(d, 0.0);
  for (const auto& smp : samples) {
    for (std::size_t k = 0; k < d; ++k) s.means[k] += smp.x[k];
  }
  for (auto& m : s.means) m /= n;
  for (const auto& smp : samples) {
    for (std::size_t k = 0; k < d; ++k) {
      const double dev = smp.x[k] - s.means[k];
      s.scales[k] += dev * dev;
    }
  }
  for (auto& v : s.scales) {
    v = std::sqrt(v / n);
    if (!(v > 0.0)) v = 1.0;
  }
  return s;
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw InvalidArgument("svm: feature dimension mismatch");
  }
  return simd::active().dot(a.data(), b.data(), a.size());
}

void check_samples(std::span<const LabeledSample> samples) {
  if (samples.size() < 2) {
    throw InvalidArgument("svm: need at least two training samples");
  }
  const std::size_t d = samples.front().x.size();
  if (d == 0) {
    throw InvalidArgument("svm: empty feature vectors");
  }
  bool pos = false, neg = false;
  for (const auto& s : samples) {
    if (s.x.size() != d) {
      throw InvalidArgument("svm: feature dimension mismatch");
    }
    if (s.y != 1 && s.y != -1) {
      throw InvalidArgument("svm: labels must be +1 or -1");
    }
    for (double v : s.x) {
      if (!std::isfinite(v)) {
        throw InvalidArgument("svm: non-finite feature value");
      }
    }
    (s.y > 0 ? pos : neg) = true;
  }
  if (!pos || !neg) {
    throw InvalidArgument("svm: training data must contain both classes");
  }
}

bool at_lower(double a, double c) { return a <= c * 1e-12; }
bool at_upper(double a, double c) { return a >= c * (1.0 - 1e-12); }

// Dual coefficients live on the grid q * Z, where q is a power of two small
// enough that every sum of at most n coefficients (each <= c) is exact in
// double precision. Pairwise updates then keep sum_j a_j y_j at exactly zero
// and land exactly on the box bounds.
class AlphaGrid {
 public:
  AlphaGrid(std::size_t n, double c) {
    const int e = static_cast<int>(std::ceil(std::log2(static_cast<double>(n) * c)));
    quantum_ = std::ldexp(1.0, e - 52);
    box_ = snap_down(c);
  }
  double box() const { return box_; }
  double snap(double v) const { return std::nearbyint(v / quantum_) * quantum_; }
  double snap_down(double v) const { return std::floor(v / quantum_) * quantum_; }

 private:
  double quantum_;
  double box_;
};

class SmoSolver {
 public:
  SmoSolver(std::span<const std::vector<double>> xs, std::span<const int> ys,
            const TrainConfig& cfg)
      : xs_(xs), ys_(ys), cfg_(cfg), n_(xs.size()), grid_(n_, cfg.c), c_(grid_.box()),
        gram_(n_ * n_), alpha_(n_, 0.0), grad_(n_, 0.0) {
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = i; j < n_; ++j) {
        const double k = dot(xs_[i], xs_[j]);
        gram_[i * n_ + j] = k;
        gram_[j * n_ + i] = k;
      }
    }
  }

  void run() {
    Rng rng(cfg_.seed);
    std::vector<std::size_t> order;
    order.reserve(n_);
    bool reset_bias = false;
    while (passes_ < cfg_.max_passes) {
      std::size_t changed = 0;
      for (std::size_t i = 0; i < n_; ++i) {
        if (!violates(i)) continue;
        order.clear();
        for (std::size_t j = 0; j < n_; ++j) {
          if (j != i) order.push_back(j);
        }
        rng.shuffle(order);
        for (std::size_t j : order) {
          if (take_step(i, j)) {
            ++changed;
            break;
          }
        }
      }
      ++passes_;
      refresh_gradient();
      if (changed == 0) {
        // Re-evaluate the quiescent point with the final bias before giving up.
        const double b = final_bias();
        bool clean = true;
        bias_ = b;
        for (std::size_t i = 0; i < n_ && clean; ++i) clean = !violates(i);
        if (clean) {
          converged_ = true;
          return;
        }
        if (reset_bias) {
          return;
        }
        reset_bias = true;
      } else {
        reset_bias = false;
      }
    }
    bias_ = final_bias();
  }

  const std::vector<double>& alphas() const { return alpha_; }
  double bias() const { return bias_; }
  bool converged() const { return converged_; }
  std::size_t passes() const { return passes_; }

  std::vector<double> weights() const {
    const std::size_t d = xs_.front().size();
    std::vector<double> w(d, 0.0);
    for (std::size_t j = 0; j < n_; ++j) {
      if (alpha_[j] == 0.0) continue;
      const double coef = alpha_[j] * ys_[j];
      for (std::size_t k = 0; k < d; ++k) w[k] += coef * xs_[j][k];
    }
    return w;
  }

  // Mean of y - w.x over free support vectors; without any, the midpoint of the
  // interval of biases consistent with the bound coefficients.
  double final_bias() const {
    const std::vector<double> w = weights();
    double sum = 0.0;
    std::size_t free = 0;
    double lo = -HUGE_VAL, hi = HUGE_VAL;
    for (std::size_t j = 0; j < n_; ++j) {
      const double wx = dot(w, xs_[j]);
      const double target = ys_[j] - wx;  // bias putting sample j on its margin
      if (alpha_[j] > 0.0 && alpha_[j] < c_) {
        sum += target;
        ++free;
      } else if ((alpha_[j] == 0.0) == (ys_[j] > 0)) {
        // y f >= 1 with y = +1 at a = 0, or y f <= 1 with y = -1 at a = c
        lo = std::max(lo, target);
      } else {
        hi = std::min(hi, target);
      }
    }
    if (free > 0) return sum / static_cast<double>(free);
    if (std::isfinite(lo) && std::isfinite(hi)) return 0.5 * (lo + hi);
    if (std::isfinite(lo)) return lo;
    if (std::isfinite(hi)) return hi;
    return 0.0;
  }

 private:
  double error(std::size_t k) const { return grad_[k] + bias_ - ys_[k]; }

  bool violates(std::size_t i) const {
    const double r = ys_[i] * error(i);  // y f - 1
    return (r < -cfg_.kkt_tol && alpha_[i] < c_) || (r > cfg_.kkt_tol && alpha_[i] > 0.0);
  }

  double pair_objective(std::size_t i, std::size_t j, double ai, double aj) const {
    // Dual objective restricted to (a_i, a_j), up to a constant.
    const double kii = gram_[i * n_ + i], kjj = gram_[j * n_ + j], kij = gram_[i * n_ + j];
    const double yi = ys_[i], yj = ys_[j];
    const double vi = grad_[i] - alpha_[i] * yi * kii - alpha_[j] * yj * kij;
    const double vj = grad_[j] - alpha_[i] * yi * kij - alpha_[j] * yj * kjj;
    return ai + aj - 0.5 * kii * ai * ai - 0.5 * kjj * aj * aj - yi * yj * kij * ai * aj -
           yi * ai * vi - yj * aj * vj;
  }

  bool take_step(std::size_t i, std::size_t j) {
    const double ai = alpha_[i], aj = alpha_[j];
    const int yi = ys_[i], yj = ys_[j];
    const double ei = error(i), ej = error(j);
    double lo, hi;
    if (yi != yj) {
      lo = std::max(0.0, aj - ai);
      hi = std::min(c_, c_ + aj - ai);
    } else {
      lo = std::max(0.0, ai + aj - c_);
      hi = std::min(c_, ai + aj);
    }
    if (lo >= hi) return false;

    const double eta = gram_[i * n_ + i] + gram_[j * n_ + j] - 2.0 * gram_[i * n_ + j];
    double aj_new;
    if (eta > 1e-12) {
      aj_new = std::clamp(grid_.snap(aj + yj * (ei - ej) / eta), lo, hi);
    } else {
      // Flat or non-convex along the pair direction: take the better endpoint.
      const double s = yi * yj;
      const double obj_lo = pair_objective(i, j, ai + s * (aj - lo), lo);
      const double obj_hi = pair_objective(i, j, ai + s * (aj - hi), hi);
      if (obj_lo > obj_hi + cfg_.eps) {
        aj_new = lo;
      } else if (obj_hi > obj_lo + cfg_.eps) {
        aj_new = hi;
      } else {
        return false;
      }
    }
    // Relative floor: raw, unscaled features give tiny coefficients.
    if (std::abs(aj_new - aj) < cfg_.eps * (aj_new + aj + cfg_.eps)) return false;

    // Exact on the grid.
    const double ai_new = ai + (yi * yj) * (aj - aj_new);
    assert(ai_new >= 0.0 && ai_new <= c_);

    const double dai = ai_new - ai, daj = aj_new - aj;
    const double b1 = bias_ - ei - yi * dai * gram_[i * n_ + i] - yj * daj * gram_[i * n_ + j];
    const double b2 = bias_ - ej - yi * dai * gram_[i * n_ + j] - yj * daj * gram_[j * n_ + j];
    alpha_[i] = ai_new;
    alpha_[j] = aj_new;
    if (ai_new > 0.0 && ai_new < c_) {
      bias_ = b1;
    } else if (aj_new > 0.0 && aj_new < c_) {
      bias_ = b2;
    } else {
      bias_ = 0.5 * (b1 + b2);
    }
    for (std::size_t k = 0; k < n_; ++k) {
      grad_[k] += yi * dai * gram_[i * n_ + k] + yj * daj * gram_[j * n_ + k];
    }
#ifndef NDEBUG
    double balance = 0.0;
    for (std::size_t k = 0; k < n_; ++k) balance += alpha_[k] * ys_[k];
    assert(balance == 0.0);
#endif
    return true;
  }

  // Recompute sum_j a_j y_j K(j, k) from scratch to shed accumulated rounding.
  void refresh_gradient() {
    for (std::size_t k = 0; k < n_; ++k) {
      double g = 0.0;
      for (std::size_t j = 0; j < n_; ++j) {
        if (alpha_[j] != 0.0) g += alpha_[j] * ys_[j] * gram_[j * n_ + k];
      }
      grad_[k] = g;
    }
  }

  std::span<const std::vector<double>> xs_;
  std::span<const int> ys_;
  const TrainConfig& cfg_;
  std::size_t n_;
  AlphaGrid grid_;
  double c_;
  std::vector<double> gram_;
  std::vector<double> alpha_;
  std::vector<double> grad_;  // sum_j a_j y_j K(j, k), no bias
  double bias_ = 0.0;
  bool converged_ = false;
  std::size_t passes_ = 0;
};

}  // namespace

double dual_objective(std::span<const LabeledSample> samples, std::span<const double> alphas) {
  if (samples.size() != alphas.size()) {
    throw InvalidArgument("dual_objective: sample and coefficient counts differ");
  }
  double linear = 0.0, quad = 0.0;
  for (std::size_t j = 0; j < samples.size(); ++j) {
    linear += alphas[j];
    if (alphas[j] == 0.0) continue;
    for (std::size_t k = 0; k < samples.size(); ++k) {
      if (alphas[k] == 0.0) continue;
      quad += alphas[j] * alphas[k] * samples[j].y * samples[k].y *
              dot(samples[j].x, samples[k].x);
    }
  }
  return linear - 0.5 * quad;
}

SvmModel train_smo(std::span<const LabeledSample> samples, const TrainConfig& cfg) {
  cfg.validate();
  check_samples(samples);

  SvmModel model;
  model.c = cfg.c;
  std::vector<std::vector<double>> xs;
  std::vector<int> ys;
  xs.reserve(samples.size());
  ys.reserve(samples.size());
  if (cfg.standardize) {
    model.scaling = FeatureScaling::fit(samples);
  }
  for (const auto& s : samples) {
    xs.push_back(model.scaling ? model.scaling->apply(s.x) : s.x);
    ys.push_back(s.y);
  }

  SmoSolver solver(xs, ys, cfg);
  solver.run();

  model.alphas = solver.alphas();
  model.weights = solver.weights();
  model.bias = solver.bias();
  model.converged = solver.converged();
  model.passes = solver.passes();
  for (std::size_t j = 0; j < xs.size(); ++j) {
    if (model.alphas[j] > 0.0) {
      model.support_vectors.push_back({xs[j], ys[j], model.alphas[j]});
    }
  }
  return model;
}

namespace {

std::vector<double> model_input(const SvmModel& model, std::span<const double> x) {
  if (x.size() != model.dimension()) {
    throw InvalidArgument("svm: expected " + std::to_string(model.dimension()) +
                          " features, got " + std::to_string(x.size()));
  }
  if (model.scaling) return model.scaling->apply(x);
  return {x.begin(), x.end()};
}

}  // namespace

double decision_value(const SvmModel& model, std::span<const double> x) {
  return dot(model.weights, model_input(model, x)) + model.bias;
}

double decision_value_sv(const SvmModel& model, std::span<const double> x) {
  const std::vector<double> in = model_input(model, x);
  double sum = 0.0;
  for (const auto& sv : model.support_vectors) {
    sum += sv.alpha * sv.y * dot(in, sv.x);
  }
  return sum + model.bias;
}

int predict(const SvmModel& model, std::span<const double> x) {
  return decision_value(model, x) > 0.0 ? 1 : -1;
}

double kkt_violation(const SvmModel& model, std::span<const LabeledSample> samples) {
  if (model.alphas.size() != samples.size()) {
    throw InvalidArgument("kkt_violation: model coefficients do not match the samples");
  }
  double worst = 0.0;
  for (std::size_t j = 0; j < samples.size(); ++j) {
    const double margin = samples[j].y * decision_value(model, samples[j].x);
    const double a = model.alphas[j];
    double r;
    if (at_lower(a, model.c)) {
      r = std::max(0.0, 1.0 - margin);
    } else if (at_upper(a, model.c)) {
      r = std::max(0.0, margin - 1.0);
    } else {
      r = std::abs(margin - 1.0);
    }
    worst = std::max(worst, r);
  }
  return worst;
}

double primal_objective(const SvmModel& model, std::span<const LabeledSample> samples) {
  double hinge = 0.0;
  for (const auto& s : samples) {
    hinge += std::max(0.0, 1.0 - s.y * decision_value(model, s.x));
  }
  return 0.5 * dot(model.weights, model.weights) + model.c * hinge;
}

}  // namespace ovoscope
