#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "gwg/model.hpp"
#include "gwg/models/potts.hpp"
#include "gwg/relax.hpp"
#include "gwg/samplers.hpp"

namespace gwg {

// Configuration problems: parse failures, unknown keys, unresolvable model
// or sampler specs, missing inputs. The CLI maps this to exit code 2;
// every other exception maps to 3 (numerical fault).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::uint64_t fnv1a64(const std::string& text);

// Hash of the canonical re-serialized config (keys sorted by the JSON
// container); stamped into the header of every output file.
std::string config_hash(const nlohmann::json& config);

// Read + parse a config file; throws ConfigError on I/O or JSON errors.
nlohmann::json load_config_file(const std::string& path);

// Structural validation: schema_version, kind, and per-kind key sets.
// Unknown keys fail fast. Model/sampler tables are validated on use.
void validate_config(const nlohmann::json& config);

// Bundled desk-scale experiment presets.
nlohmann::json preset_config(const std::string& name);
std::vector<std::string> preset_names();

// Builds a model from its config table ("family" tag dispatch).
std::unique_ptr<EnergyModel> make_model(const nlohmann::json& spec);

// Display/file tag for a model spec ("tag" key, else the family name).
std::string model_tag(const nlohmann::json& spec, int index, int count);

// A sampler spec resolves to a discrete kernel or a continuous-relaxation
// kernel; exactly one pointer is set.
struct SamplerSpec {
  std::unique_ptr<DiscreteSampler> discrete;
  std::unique_ptr<RelaxedSampler> relaxed;
  std::string label() const;
};
SamplerSpec make_sampler(const nlohmann::json& spec);

// Sparse ground-truth Potts instance with a known contact map: n_contacts
// random position pairs get dense N(0, scale^2) blocks, everything else 0.
struct PlantedPotts {
  PottsModel model;
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> contacts;
};
PlantedPotts planted_potts(int positions, int categories, int n_contacts,
                           double coupling_scale, std::uint64_t seed);

// log Z by exhaustive enumeration (small state spaces only).
double enumerate_log_z(const EnergyModel& model);

// Lipschitz constant of grad f for any bundled model family.
double model_lipschitz(const EnergyModel& model);

struct RunSummary {
  int files_written = 0;
  bool pass = true;  // verification-style runs flip this on failed checks
};

// Experiment runners. Each writes CSV/JSON outputs under out_dir; every
// file starts with "# config_hash=..." and a column-header row.
RunSummary run_sample(const nlohmann::json& config, const std::string& out_dir,
                      int workers);
RunSummary run_train(const nlohmann::json& config, const std::string& out_dir);
RunSummary run_ais(const nlohmann::json& config, const std::string& out_dir);
RunSummary run_verify(const nlohmann::json& config,
                      const std::string& out_dir);

// Aggregates a results directory into per-figure plot tables (ESS bars,
// log-MMD series, RMSE history, recall curves). Errors if the directory
// holds no recognizable inputs; never leaves a partial file.
RunSummary emit_plotdata(const std::string& results_dir,
                         const std::string& out_dir);

}  // namespace gwg
