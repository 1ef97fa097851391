#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace driftpool {

struct FileOrigin {
  std::filesystem::path path;
  std::string column;
};

struct SyntheticOrigin {
  std::uint64_t seed = 0;
};

struct SeriesSource {
  std::vector<double> values;
  std::string name;
  std::variant<FileOrigin, SyntheticOrigin> origin;
};

/// Reads one column of a comma-separated file. `column` is matched against
/// the header names first and otherwise read as a zero-based index. Row
/// numbers in errors are 1-based file line numbers.
SeriesSource load_csv(const std::filesystem::path& path, const std::string& column,
                      bool has_header = true);

/// Writes `columns` side by side with a header row; all columns must have the
/// same length. Values use 17 significant digits.
void write_csv(const std::filesystem::path& path, std::span<const std::string> header,
               std::span<const std::vector<double>> columns);

struct Concept {
  double level = 0.0;
  double amplitude = 0.0;
  std::size_t period = 1;
  double noise_sigma = 0.0;
};

struct Segment {
  std::size_t concept_index = 0;
  std::size_t duration = 0;
};

struct SyntheticSpec {
  std::vector<Concept> concepts;
  std::vector<Segment> schedule;
  std::uint64_t seed = 0;

  void validate() const;
  std::size_t length() const noexcept;

  /// Levels {0, 8, -8}, amplitude 1, period 24, noise 0.25, schedule
  /// A-B-A-C-B-A with 3000 points per segment.
  static SyntheticSpec default_acceptance();

  std::string to_json() const;
  static SyntheticSpec from_json(const std::string& text);
};

struct LabeledStream {
  std::vector<double> values;
  std::vector<std::size_t> labels;
};

/// value[i] = level + amplitude * sin(2 pi i / period) + N(0, noise_sigma),
/// with i the global stream index and one shared seeded generator.
LabeledStream generate(const SyntheticSpec& spec);

enum class NormalizeFrom { WarmSegment, Whole };

/// Fraction of the series used for the warm-up stage.
inline constexpr double kWarmFraction = 0.25;

/// Number of leading points in the warm-up segment of a series of length n.
std::size_t warm_length(std::size_t n) noexcept;

struct Normalized {
  std::vector<double> values;
  double mean = 0.0;
  double std = 1.0;
};

/// z-normalizes with population statistics of the warm segment or the whole
/// series.
Normalized normalize(std::span<const double> series, NormalizeFrom from);
std::vector<double> denormalize(std::span<const double> values, double mean, double std);

}  // namespace driftpool
