#include "driftpool/data.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "driftpool/error.hpp"
#include "driftpool/rng.hpp"

namespace driftpool {

namespace {

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n\"";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

bool parse_index(std::string_view s, std::size_t& out) {
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

}  // namespace

SeriesSource load_csv(const std::filesystem::path& path, const std::string& column,
                      bool has_header) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open data file '" + path.string() + "'");

  std::string line;
  std::size_t row = 0;
  std::size_t col = 0;
  std::string name = column;

  if (has_header) {
    if (!std::getline(in, line)) throw Error(ErrorKind::Parse, path.string() + ": empty file");
    ++row;
    const auto names = split(line);
    bool found = false;
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (names[i] == column) {
        col = i;
        found = true;
        break;
      }
    }
    if (!found && parse_index(column, col) && col < names.size()) {
      name = std::string(names[col]);
      found = true;
    }
    if (!found) {
      std::string available;
      for (std::size_t i = 0; i < names.size(); ++i) {
        if (i) available += ", ";
        available += names[i];
      }
      throw Error(ErrorKind::ColumnNotFound, path.string() + ": column '" + column +
                                                 "' not found; available columns: " + available);
    }
  } else if (!parse_index(column, col)) {
    throw Error(ErrorKind::ColumnNotFound, path.string() + ": column '" + column +
                                               "' must be a zero-based index without a header");
  }

  SeriesSource source;
  source.name = name;
  source.origin = FileOrigin{path, column};
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const auto fields = split(line);
    if (col >= fields.size()) {
      throw Error(ErrorKind::ColumnNotFound, path.string() + ": row " + std::to_string(row) +
                                                 " has no column " + std::to_string(col));
    }
    const auto field = fields[col];
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc{} || ptr != field.data() + field.size() || !std::isfinite(v)) {
      throw Error(ErrorKind::Parse, path.string() + ": row " + std::to_string(row) +
                                        ": cannot parse '" + std::string(field) + "' as a real");
    }
    source.values.push_back(v);
  }
  return source;
}

void write_csv(const std::filesystem::path& path, std::span<const std::string> header,
               std::span<const std::vector<double>> columns) {
  if (header.size() != columns.size()) {
    throw Error(ErrorKind::State, "write_csv: header/column count mismatch");
  }
  const std::size_t rows = columns.empty() ? 0 : columns.front().size();
  for (const auto& c : columns) {
    if (c.size() != rows) throw Error(ErrorKind::State, "write_csv: ragged columns");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write '" + path.string() + "'");
  out << std::setprecision(17);
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c) out << (c ? "," : "") << columns[c][r];
    out << '\n';
  }
  if (!out) throw Error(ErrorKind::Io, "failed writing '" + path.string() + "'");
}

// ---- synthetic ----

void SyntheticSpec::validate() const {
  if (concepts.empty()) throw Error(ErrorKind::Validation, "synthetic spec: no concepts");
  if (schedule.empty()) throw Error(ErrorKind::Validation, "synthetic spec: empty schedule");
  for (std::size_t i = 0; i < concepts.size(); ++i) {
    const auto& c = concepts[i];
    const auto where = "synthetic spec: concepts[" + std::to_string(i) + "]";
    if (c.period < 1) throw Error(ErrorKind::Validation, where + ".period must be >= 1");
    if (!(c.noise_sigma >= 0.0)) throw Error(ErrorKind::Validation, where + ".noise_sigma must be >= 0");
    if (!std::isfinite(c.level) || !std::isfinite(c.amplitude) || !std::isfinite(c.noise_sigma)) {
      throw Error(ErrorKind::Validation, where + " has non-finite fields");
    }
  }
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    const auto where = "synthetic spec: schedule[" + std::to_string(i) + "]";
    if (schedule[i].duration == 0) throw Error(ErrorKind::Validation, where + ".duration must be > 0");
    if (schedule[i].concept_index >= concepts.size()) {
      throw Error(ErrorKind::Validation, where + ".concept is not a valid concept index");
    }
  }
}

std::size_t SyntheticSpec::length() const noexcept {
  std::size_t n = 0;
  for (const auto& s : schedule) n += s.duration;
  return n;
}

SyntheticSpec SyntheticSpec::default_acceptance() {
  SyntheticSpec spec;
  spec.concepts = {{0.0, 1.0, 24, 0.25}, {8.0, 1.0, 24, 0.25}, {-8.0, 1.0, 24, 0.25}};
  for (std::size_t c : {0, 1, 0, 2, 1, 0}) spec.schedule.push_back({c, 3000});
  spec.seed = 0;
  return spec;
}

std::string SyntheticSpec::to_json() const {
  nlohmann::ordered_json j;
  j["seed"] = seed;
  j["concepts"] = nlohmann::ordered_json::array();
  for (const auto& c : concepts) {
    j["concepts"].push_back({{"level", c.level},
                             {"amplitude", c.amplitude},
                             {"period", c.period},
                             {"noise_sigma", c.noise_sigma}});
  }
  j["schedule"] = nlohmann::ordered_json::array();
  for (const auto& s : schedule) {
    j["schedule"].push_back({{"concept", s.concept_index}, {"duration", s.duration}});
  }
  return j.dump(2);
}

SyntheticSpec SyntheticSpec::from_json(const std::string& text) {
  SyntheticSpec spec;
  try {
    const auto j = nlohmann::json::parse(text);
    spec.seed = j.value("seed", std::uint64_t{0});
    for (const auto& c : j.at("concepts")) {
      spec.concepts.push_back({c.value("level", 0.0), c.value("amplitude", 0.0),
                               c.value("period", std::size_t{1}), c.value("noise_sigma", 0.0)});
    }
    for (const auto& s : j.at("schedule")) {
      spec.schedule.push_back({s.at("concept").get<std::size_t>(), s.at("duration").get<std::size_t>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Validation, std::string("synthetic spec: ") + e.what());
  }
  spec.validate();
  return spec;
}

LabeledStream generate(const SyntheticSpec& spec) {
  spec.validate();
  LabeledStream out;
  out.values.reserve(spec.length());
  out.labels.reserve(spec.length());
  Rng rng(spec.seed);
  std::size_t i = 0;
  for (const auto& seg : spec.schedule) {
    const Concept& c = spec.concepts[seg.concept_index];
    for (std::size_t k = 0; k < seg.duration; ++k, ++i) {
      const double phase = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(c.period);
      // Always draw, so the noise sequence does not depend on which concepts are noisy.
      const double noise = rng.normal(0.0, 1.0) * c.noise_sigma;
      out.values.push_back(c.level + c.amplitude * std::sin(phase) + noise);
      out.labels.push_back(seg.concept_index);
    }
  }
  return out;
}

// ---- normalization ----

std::size_t warm_length(std::size_t n) noexcept {
  return static_cast<std::size_t>(std::floor(static_cast<double>(n) * kWarmFraction));
}

Normalized normalize(std::span<const double> series, NormalizeFrom from) {
  const auto stats = from == NormalizeFrom::Whole ? series : series.first(warm_length(series.size()));
  if (stats.empty()) throw Error(ErrorKind::Numeric, "normalize: empty statistics segment");
  double sum = 0.0;
  for (double v : stats) sum += v;
  const double mean = sum / static_cast<double>(stats.size());
  double sq = 0.0;
  for (double v : stats) sq += (v - mean) * (v - mean);
  const double std = std::sqrt(sq / static_cast<double>(stats.size()));
  if (!(std > 0.0)) throw Error(ErrorKind::Numeric, "normalize: zero-variance segment");

  Normalized out{{}, mean, std};
  out.values.reserve(series.size());
  for (double v : series) out.values.push_back((v - mean) / std);
  return out;
}

std::vector<double> denormalize(std::span<const double> values, double mean, double std) {
  std::vector<double> out;
  out.reserve(values.size());
  for (double v : values) out.push_back(v * std + mean);
  return out;
}

}  // namespace driftpool
