#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "drsafe/bench.hpp"
#include "drsafe/dro.hpp"
#include "drsafe/feasibility.hpp"
#include "drsafe/sim.hpp"

namespace drsafe::cli {

enum class ModelKind { Unicycle, Explicit };

struct SampleSource {
  std::optional<Eigen::MatrixXd> rows;
  std::optional<std::filesystem::path> file;
  std::optional<int> draw;
};

struct RandomSuite {
  int m = 2;
  int k = 2;
  int M = 1;
  int instances = 1;
};

struct RunConfig {
  ModelKind model = ModelKind::Unicycle;

  // Unicycle model: the scenario carries model, certificate, ambiguity and
  // simulation settings.
  sim::ScenarioConfig scenario;

  // Explicit model: constant constraint data and nominal input.
  std::vector<model::ConstraintData> constraints;
  Eigen::VectorXd nominal;

  dro::AmbiguityConfig ambiguity;
  SampleSource samples;
  std::optional<feasibility::SlackCertificate> slack;

  bench::SweepConfig sweep;
  std::optional<RandomSuite> random_suite;

  std::vector<double> lipschitz_radii{1e-2, 1e-3, 1e-4, 1e-5};
  int lipschitz_directions = 16;

  std::filesystem::path out_dir = ".";
  std::filesystem::path base_dir;  // directory of the config file
  std::uint64_t seed = 1;

  int k() const { return model == ModelKind::Unicycle ? 3 : ambiguity.k; }
  void set_seed(std::uint64_t s);

  dro::SampleSet load_samples() const;
  dro::SynthesisProblem problem() const;
  dro::SynthesisProblem problem(std::shared_ptr<const dro::SampleSet> samples) const;
  bench::SampleDraw sample_draw() const;
};

/// JSON text plus the source line of every value, addressed by JSON pointer.
class ConfigDocument {
 public:
  // Throws ConfigError with "line L, column C" for syntax errors.
  static ConfigDocument parse(const std::string& text);

  const nlohmann::json& root() const { return root_; }
  // Line of the value at `pointer`, or of its nearest recorded ancestor.
  int line_of(const std::string& pointer) const;

 private:
  nlohmann::json root_;
  std::map<std::string, int> lines_;
};

/// Validates the document against the schema (unknown keys rejected) and
/// builds the run configuration. Throws ConfigError naming the line and
/// the JSON pointer of the offending value.
RunConfig read_config(const ConfigDocument& doc, const std::filesystem::path& base_dir);

// Reads and parses a file; IoError when it cannot be opened.
RunConfig load_config(const std::filesystem::path& path);

}  // namespace drsafe::cli
