#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

namespace driftpool {

/// Mean squared error between two equal-length sequences.
double mse(std::span<const double> forecast, std::span<const double> truth);

/// Contract shared by every model the pool can hold. Models map a look-back
/// window of length lookback() to a forecast of length horizon() and are
/// trained one instance at a time with plain SGD on MSE.
class Forecaster {
 public:
  virtual ~Forecaster() = default;

  virtual std::string_view kind() const noexcept = 0;
  virtual std::size_t lookback() const noexcept = 0;
  virtual std::size_t horizon() const noexcept = 0;

  virtual std::vector<double> predict(std::span<const double> window) const = 0;

  /// One SGD step on the MSE of (predict(window), truth). Returns the loss
  /// evaluated before the update.
  virtual double train_step(std::span<const double> window, std::span<const double> truth,
                            double lr) = 0;

  virtual std::unique_ptr<Forecaster> clone() const = 0;

  /// Flat parameter vector; empty for parameter-free models.
  virtual std::vector<double> parameters() const = 0;
  virtual void set_parameters(std::span<const double> params) = 0;

  /// Analytic gradient of the MSE with respect to parameters(), same layout.
  virtual std::vector<double> gradient(std::span<const double> window,
                                       std::span<const double> truth) const = 0;

  /// FNV-1a digest of the parameter bytes.
  std::uint64_t parameter_checksum() const;

 protected:
  void check_window(std::span<const double> window) const;
  void check_truth(std::span<const double> truth) const;
};

/// Repeats the last observed value over the horizon. Nothing to train.
class NaiveForecaster final : public Forecaster {
 public:
  NaiveForecaster(std::size_t lookback, std::size_t horizon);

  std::string_view kind() const noexcept override { return "naive"; }
  std::size_t lookback() const noexcept override { return lookback_; }
  std::size_t horizon() const noexcept override { return horizon_; }

  std::vector<double> predict(std::span<const double> window) const override;
  double train_step(std::span<const double> window, std::span<const double> truth,
                    double lr) override;
  std::unique_ptr<Forecaster> clone() const override;
  std::vector<double> parameters() const override { return {}; }
  void set_parameters(std::span<const double> params) override;
  std::vector<double> gradient(std::span<const double> window,
                               std::span<const double> truth) const override;

 private:
  std::size_t lookback_;
  std::size_t horizon_;
};

/// forecast = W * window + b with W of shape horizon x lookback.
/// Parameter layout: W row-major, then b.
class LinearForecaster final : public Forecaster {
 public:
  /// Zero-initialized.
  LinearForecaster(std::size_t lookback, std::size_t horizon);
  LinearForecaster(std::size_t lookback, std::size_t horizon, std::vector<double> weights,
                   std::vector<double> bias);

  std::string_view kind() const noexcept override { return "linear"; }
  std::size_t lookback() const noexcept override { return lookback_; }
  std::size_t horizon() const noexcept override { return horizon_; }

  std::vector<double> predict(std::span<const double> window) const override;
  double train_step(std::span<const double> window, std::span<const double> truth,
                    double lr) override;
  std::unique_ptr<Forecaster> clone() const override;
  std::vector<double> parameters() const override { return params_; }
  void set_parameters(std::span<const double> params) override;
  std::vector<double> gradient(std::span<const double> window,
                               std::span<const double> truth) const override;

 private:
  double loss_and_gradient(std::span<const double> window, std::span<const double> truth,
                           std::vector<double>& grad) const;

  std::size_t lookback_;
  std::size_t horizon_;
  std::vector<double> params_;
};

/// One hidden tanh layer: forecast = W2 * tanh(W1 * window + b1) + b2.
/// Parameter layout: W1 (hidden x lookback, row-major), b1, W2 (horizon x
/// hidden, row-major), b2. Initialized uniformly in +-1/sqrt(fan_in).
class MlpForecaster final : public Forecaster {
 public:
  MlpForecaster(std::size_t lookback, std::size_t horizon, std::size_t hidden,
                std::uint64_t seed);

  std::string_view kind() const noexcept override { return "mlp"; }
  std::size_t lookback() const noexcept override { return lookback_; }
  std::size_t horizon() const noexcept override { return horizon_; }
  std::size_t hidden() const noexcept { return hidden_; }

  std::vector<double> predict(std::span<const double> window) const override;
  double train_step(std::span<const double> window, std::span<const double> truth,
                    double lr) override;
  std::unique_ptr<Forecaster> clone() const override;
  std::vector<double> parameters() const override { return params_; }
  void set_parameters(std::span<const double> params) override;
  std::vector<double> gradient(std::span<const double> window,
                               std::span<const double> truth) const override;

 private:
  double loss_and_gradient(std::span<const double> window, std::span<const double> truth,
                           std::vector<double>& grad) const;
  std::vector<double> forward(std::span<const double> window, std::vector<double>& act) const;

  std::size_t w1_offset() const noexcept { return 0; }
  std::size_t b1_offset() const noexcept { return hidden_ * lookback_; }
  std::size_t w2_offset() const noexcept { return b1_offset() + hidden_; }
  std::size_t b2_offset() const noexcept { return w2_offset() + horizon_ * hidden_; }

  std::size_t lookback_;
  std::size_t horizon_;
  std::size_t hidden_;
  std::vector<double> params_;
};

enum class ForecasterKind { Naive, Linear, Mlp };

std::string_view to_string(ForecasterKind kind) noexcept;
ForecasterKind parse_forecaster_kind(std::string_view name);

std::unique_ptr<Forecaster> make_forecaster(ForecasterKind kind, std::size_t lookback,
                                            std::size_t horizon, std::size_t hidden,
                                            std::uint64_t seed);

}  // namespace driftpool
