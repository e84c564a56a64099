#pragma once

#include <memory>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "gwg/models/base.hpp"
#include "gwg/models/cubic.hpp"
#include "gwg/models/fhmm.hpp"
#include "gwg/models/ising.hpp"
#include "gwg/models/potts.hpp"
#include "gwg/models/rbm.hpp"

namespace gwg {

// Structured-text (JSON) serialization: named arrays plus scalar metadata,
// keyed by a "family" tag. Round-trips all bundled model families.
std::string model_to_json(const EnergyModel& model);
std::unique_ptr<EnergyModel> model_from_json(const std::string& text);

void save_model(const EnergyModel& model, const std::string& path);
std::unique_ptr<EnergyModel> load_model(const std::string& path);

// Integer matrix file: one row per sequence, comma-separated category
// indices. Used for Potts training data.
std::vector<DiscreteState> load_sequence_matrix(const std::string& path,
                                                std::int32_t arity);
void save_sequence_matrix(const std::vector<DiscreteState>& data,
                          const std::string& path);

// Real-vector file: one value per line. Used for FHMM observed series.
Eigen::VectorXd load_real_series(const std::string& path);
void save_real_series(const Eigen::VectorXd& y, const std::string& path);

}  // namespace gwg
