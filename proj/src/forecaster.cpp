#include "driftpool/forecaster.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>

#include "driftpool/error.hpp"
#include "driftpool/rng.hpp"

namespace driftpool {

namespace {

void check_lr(double lr) {
  if (!(lr >= 0.0) || !std::isfinite(lr)) {
    throw Error(ErrorKind::Validation, "learning rate must be finite and >= 0");
  }
}

double finite_loss(double loss) {
  if (!std::isfinite(loss)) throw Error(ErrorKind::Numeric, "non-finite training loss");
  return loss;
}

void apply_sgd(std::vector<double>& params, const std::vector<double>& grad, double lr) {
  if (lr == 0.0) return;
  for (std::size_t i = 0; i < params.size(); ++i) params[i] -= lr * grad[i];
}

}  // namespace

double mse(std::span<const double> forecast, std::span<const double> truth) {
  if (forecast.size() != truth.size() || forecast.empty()) {
    throw Error(ErrorKind::Shape, "mse: length mismatch (" + std::to_string(forecast.size()) +
                                      " vs " + std::to_string(truth.size()) + ")");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < forecast.size(); ++i) {
    const double e = forecast[i] - truth[i];
    s += e * e;
  }
  return s / static_cast<double>(forecast.size());
}

std::uint64_t Forecaster::parameter_checksum() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (double p : parameters()) {
    unsigned char bytes[sizeof(double)];
    std::memcpy(bytes, &p, sizeof(double));
    for (unsigned char b : bytes) {
      h ^= b;
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

void Forecaster::check_window(std::span<const double> window) const {
  if (window.size() != lookback()) {
    throw Error(ErrorKind::Shape, "expected window of length " + std::to_string(lookback()) +
                                      ", got " + std::to_string(window.size()));
  }
}

void Forecaster::check_truth(std::span<const double> truth) const {
  if (truth.size() != horizon()) {
    throw Error(ErrorKind::Shape, "expected truth of length " + std::to_string(horizon()) +
                                      ", got " + std::to_string(truth.size()));
  }
}

// ---- naive ----

NaiveForecaster::NaiveForecaster(std::size_t lookback, std::size_t horizon)
    : lookback_(lookback), horizon_(horizon) {
  if (lookback == 0 || horizon == 0) {
    throw Error(ErrorKind::Validation, "lookback and horizon must be >= 1");
  }
}

std::vector<double> NaiveForecaster::predict(std::span<const double> window) const {
  check_window(window);
  return std::vector<double>(horizon_, window.back());
}

double NaiveForecaster::train_step(std::span<const double> window,
                                   std::span<const double> truth, double lr) {
  check_lr(lr);
  check_truth(truth);
  return finite_loss(mse(predict(window), truth));
}

std::unique_ptr<Forecaster> NaiveForecaster::clone() const {
  return std::make_unique<NaiveForecaster>(*this);
}

void NaiveForecaster::set_parameters(std::span<const double> params) {
  if (!params.empty()) throw Error(ErrorKind::Shape, "naive forecaster has no parameters");
}

std::vector<double> NaiveForecaster::gradient(std::span<const double> window,
                                              std::span<const double> truth) const {
  check_window(window);
  check_truth(truth);
  return {};
}

// ---- linear ----

LinearForecaster::LinearForecaster(std::size_t lookback, std::size_t horizon)
    : lookback_(lookback), horizon_(horizon), params_(horizon * lookback + horizon, 0.0) {
  if (lookback == 0 || horizon == 0) {
    throw Error(ErrorKind::Validation, "lookback and horizon must be >= 1");
  }
}

LinearForecaster::LinearForecaster(std::size_t lookback, std::size_t horizon,
                                   std::vector<double> weights, std::vector<double> bias)
    : LinearForecaster(lookback, horizon) {
  if (weights.size() != horizon * lookback || bias.size() != horizon) {
    throw Error(ErrorKind::Shape, "linear forecaster: weights must be horizon x lookback");
  }
  std::copy(weights.begin(), weights.end(), params_.begin());
  std::copy(bias.begin(), bias.end(), params_.begin() + static_cast<std::ptrdiff_t>(weights.size()));
}

std::vector<double> LinearForecaster::predict(std::span<const double> window) const {
  check_window(window);
  std::vector<double> out(horizon_);
  const double* bias = params_.data() + horizon_ * lookback_;
  for (std::size_t h = 0; h < horizon_; ++h) {
    const double* row = params_.data() + h * lookback_;
    double acc = bias[h];
    for (std::size_t l = 0; l < lookback_; ++l) acc += row[l] * window[l];
    out[h] = acc;
  }
  return out;
}

double LinearForecaster::loss_and_gradient(std::span<const double> window,
                                           std::span<const double> truth,
                                           std::vector<double>& grad) const {
  check_truth(truth);
  const auto forecast = predict(window);
  grad.assign(params_.size(), 0.0);
  const double scale = 2.0 / static_cast<double>(horizon_);
  double loss = 0.0;
  for (std::size_t h = 0; h < horizon_; ++h) {
    const double e = forecast[h] - truth[h];
    loss += e * e;
    const double g = scale * e;
    double* row = grad.data() + h * lookback_;
    for (std::size_t l = 0; l < lookback_; ++l) row[l] = g * window[l];
    grad[horizon_ * lookback_ + h] = g;
  }
  return loss / static_cast<double>(horizon_);
}

double LinearForecaster::train_step(std::span<const double> window,
                                    std::span<const double> truth, double lr) {
  check_lr(lr);
  std::vector<double> grad;
  const double loss = finite_loss(loss_and_gradient(window, truth, grad));
  apply_sgd(params_, grad, lr);
  return loss;
}

std::unique_ptr<Forecaster> LinearForecaster::clone() const {
  return std::make_unique<LinearForecaster>(*this);
}

void LinearForecaster::set_parameters(std::span<const double> params) {
  if (params.size() != params_.size()) {
    throw Error(ErrorKind::Shape, "linear forecaster: parameter count mismatch");
  }
  params_.assign(params.begin(), params.end());
}

std::vector<double> LinearForecaster::gradient(std::span<const double> window,
                                               std::span<const double> truth) const {
  std::vector<double> grad;
  loss_and_gradient(window, truth, grad);
  return grad;
}

// ---- mlp ----

MlpForecaster::MlpForecaster(std::size_t lookback, std::size_t horizon, std::size_t hidden,
                             std::uint64_t seed)
    : lookback_(lookback), horizon_(horizon), hidden_(hidden) {
  if (lookback == 0 || horizon == 0 || hidden == 0) {
    throw Error(ErrorKind::Validation, "lookback, horizon and hidden width must be >= 1");
  }
  params_.resize(b2_offset() + horizon_);
  Rng rng(seed);
  const double bound1 = 1.0 / std::sqrt(static_cast<double>(lookback_));
  const double bound2 = 1.0 / std::sqrt(static_cast<double>(hidden_));
  for (std::size_t i = w1_offset(); i < w2_offset(); ++i) params_[i] = rng.uniform(-bound1, bound1);
  for (std::size_t i = w2_offset(); i < params_.size(); ++i) params_[i] = rng.uniform(-bound2, bound2);
}

std::vector<double> MlpForecaster::forward(std::span<const double> window,
                                           std::vector<double>& act) const {
  check_window(window);
  act.resize(hidden_);
  const double* w1 = params_.data() + w1_offset();
  const double* b1 = params_.data() + b1_offset();
  for (std::size_t j = 0; j < hidden_; ++j) {
    double z = b1[j];
    const double* row = w1 + j * lookback_;
    for (std::size_t l = 0; l < lookback_; ++l) z += row[l] * window[l];
    act[j] = std::tanh(z);
  }
  std::vector<double> out(horizon_);
  const double* w2 = params_.data() + w2_offset();
  const double* b2 = params_.data() + b2_offset();
  for (std::size_t h = 0; h < horizon_; ++h) {
    double y = b2[h];
    const double* row = w2 + h * hidden_;
    for (std::size_t j = 0; j < hidden_; ++j) y += row[j] * act[j];
    out[h] = y;
  }
  return out;
}

std::vector<double> MlpForecaster::predict(std::span<const double> window) const {
  std::vector<double> act;
  return forward(window, act);
}

double MlpForecaster::loss_and_gradient(std::span<const double> window,
                                        std::span<const double> truth,
                                        std::vector<double>& grad) const {
  check_truth(truth);
  std::vector<double> act;
  const auto forecast = forward(window, act);
  grad.assign(params_.size(), 0.0);

  const double scale = 2.0 / static_cast<double>(horizon_);
  const double* w2 = params_.data() + w2_offset();
  std::vector<double> d_act(hidden_, 0.0);
  double loss = 0.0;
  for (std::size_t h = 0; h < horizon_; ++h) {
    const double e = forecast[h] - truth[h];
    loss += e * e;
    const double g = scale * e;
    grad[b2_offset() + h] = g;
    double* gw2 = grad.data() + w2_offset() + h * hidden_;
    const double* row = w2 + h * hidden_;
    for (std::size_t j = 0; j < hidden_; ++j) {
      gw2[j] = g * act[j];
      d_act[j] += g * row[j];
    }
  }
  for (std::size_t j = 0; j < hidden_; ++j) {
    const double dz = d_act[j] * (1.0 - act[j] * act[j]);
    grad[b1_offset() + j] = dz;
    double* gw1 = grad.data() + w1_offset() + j * lookback_;
    for (std::size_t l = 0; l < lookback_; ++l) gw1[l] = dz * window[l];
  }
  return loss / static_cast<double>(horizon_);
}

double MlpForecaster::train_step(std::span<const double> window, std::span<const double> truth,
                                 double lr) {
  check_lr(lr);
  std::vector<double> grad;
  const double loss = finite_loss(loss_and_gradient(window, truth, grad));
  apply_sgd(params_, grad, lr);
  return loss;
}

std::unique_ptr<Forecaster> MlpForecaster::clone() const {
  return std::make_unique<MlpForecaster>(*this);
}

void MlpForecaster::set_parameters(std::span<const double> params) {
  if (params.size() != params_.size()) {
    throw Error(ErrorKind::Shape, "mlp forecaster: parameter count mismatch");
  }
  params_.assign(params.begin(), params.end());
}

std::vector<double> MlpForecaster::gradient(std::span<const double> window,
                                            std::span<const double> truth) const {
  std::vector<double> grad;
  loss_and_gradient(window, truth, grad);
  return grad;
}

// ---- factory ----

std::string_view to_string(ForecasterKind kind) noexcept {
  switch (kind) {
    case ForecasterKind::Naive: return "naive";
    case ForecasterKind::Linear: return "linear";
    case ForecasterKind::Mlp: return "mlp";
  }
  return "unknown";
}

ForecasterKind parse_forecaster_kind(std::string_view name) {
  if (name == "naive") return ForecasterKind::Naive;
  if (name == "linear") return ForecasterKind::Linear;
  if (name == "mlp") return ForecasterKind::Mlp;
  throw Error(ErrorKind::Validation,
              "forecaster: expected one of naive|linear|mlp, got '" + std::string(name) + "'");
}

std::unique_ptr<Forecaster> make_forecaster(ForecasterKind kind, std::size_t lookback,
                                            std::size_t horizon, std::size_t hidden,
                                            std::uint64_t seed) {
  switch (kind) {
    case ForecasterKind::Naive: return std::make_unique<NaiveForecaster>(lookback, horizon);
    case ForecasterKind::Linear: return std::make_unique<LinearForecaster>(lookback, horizon);
    case ForecasterKind::Mlp: return std::make_unique<MlpForecaster>(lookback, horizon, hidden, seed);
  }
  throw Error(ErrorKind::Validation, "unknown forecaster kind");
}

}  // namespace driftpool
