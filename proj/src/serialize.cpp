#include "gwg/models/serialize.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace gwg {

namespace {

using nlohmann::json;

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty())
    throw std::invalid_argument("model_from_json: expected matrix");
  const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
  const Eigen::Index cols = static_cast<Eigen::Index>(j.at(0).size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& row = j.at(static_cast<std::size_t>(i));
    if (static_cast<Eigen::Index>(row.size()) != cols)
      throw std::invalid_argument("model_from_json: ragged matrix");
    for (Eigen::Index c = 0; c < cols; ++c)
      m(i, c) = row.at(static_cast<std::size_t>(c)).get<double>();
  }
  return m;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Eigen::VectorXd vector_from_json(const json& j) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i)
    v[i] = j.at(static_cast<std::size_t>(i)).get<double>();
  return v;
}

}  // namespace

std::string model_to_json(const EnergyModel& model) {
  json j;
  if (const auto* m = dynamic_cast<const IsingModel*>(&model)) {
    j["family"] = "ising";
    j["J"] = matrix_to_json(m->coupling());
    j["theta"] = m->theta();
    j["b"] = vector_to_json(m->bias());
  } else if (const auto* m = dynamic_cast<const RbmModel*>(&model)) {
    j["family"] = "rbm";
    j["W"] = matrix_to_json(m->weights());
    j["b"] = vector_to_json(m->visible_bias());
    j["c"] = vector_to_json(m->hidden_bias());
  } else if (const auto* m = dynamic_cast<const PottsModel*>(&model)) {
    j["family"] = "potts";
    j["positions"] = m->dim();
    j["categories"] = m->arity();
    j["M"] = matrix_to_json(m->coupling_matrix());
    j["h"] = vector_to_json(m->fields());
  } else if (const auto* m = dynamic_cast<const FhmmPosterior*>(&model)) {
    j["family"] = "fhmm";
    j["w"] = vector_to_json(m->emission_weights());
    j["bias"] = m->emission_bias();
    j["sigma2"] = m->noise_variance();
    j["alpha"] = vector_to_json(m->alpha());
    j["beta"] = vector_to_json(m->beta());
    j["y"] = vector_to_json(m->observations());
  } else if (const auto* m = dynamic_cast<const CubicModel*>(&model)) {
    j["family"] = "cubic";
    j["A"] = matrix_to_json(m->quad());
    j["b"] = vector_to_json(m->linear());
    j["w"] = vector_to_json(m->cubic_direction());
    j["gamma"] = m->gamma();
  } else if (const auto* m = dynamic_cast<const FactorizedBase*>(&model)) {
    j["family"] = "factorized-base";
    j["logp"] = matrix_to_json(m->log_probs());
  } else {
    throw std::invalid_argument("model_to_json: unsupported model family " +
                                model.name());
  }
  return j.dump(2);
}

std::unique_ptr<EnergyModel> model_from_json(const std::string& text) {
  json j = json::parse(text);
  const std::string family = j.at("family").get<std::string>();
  if (family == "ising") {
    return std::make_unique<IsingModel>(matrix_from_json(j.at("J")),
                                        j.at("theta").get<double>(),
                                        vector_from_json(j.at("b")));
  }
  if (family == "rbm") {
    return std::make_unique<RbmModel>(matrix_from_json(j.at("W")),
                                      vector_from_json(j.at("b")),
                                      vector_from_json(j.at("c")));
  }
  if (family == "potts") {
    return std::make_unique<PottsModel>(matrix_from_json(j.at("M")),
                                        vector_from_json(j.at("h")),
                                        j.at("positions").get<int>(),
                                        j.at("categories").get<int>());
  }
  if (family == "fhmm") {
    return std::make_unique<FhmmPosterior>(
        vector_from_json(j.at("w")), j.at("bias").get<double>(),
        j.at("sigma2").get<double>(), vector_from_json(j.at("alpha")),
        vector_from_json(j.at("beta")), vector_from_json(j.at("y")));
  }
  if (family == "cubic") {
    return std::make_unique<CubicModel>(
        matrix_from_json(j.at("A")), vector_from_json(j.at("b")),
        vector_from_json(j.at("w")), j.at("gamma").get<double>());
  }
  if (family == "factorized-base") {
    return std::make_unique<FactorizedBase>(matrix_from_json(j.at("logp")));
  }
  throw std::invalid_argument("model_from_json: unknown family " + family);
}

void save_model(const EnergyModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_model: cannot open " + path);
  out << model_to_json(model) << '\n';
}

std::unique_ptr<EnergyModel> load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_model: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return model_from_json(ss.str());
}

std::vector<DiscreteState> load_sequence_matrix(const std::string& path,
                                                std::int32_t arity) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_sequence_matrix: cannot open " + path);
  std::vector<DiscreteState> data;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    DiscreteState x(0, arity);
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      const int v = std::stoi(cell);
      if (v < 0 || v >= arity)
        throw std::runtime_error("load_sequence_matrix: category out of range");
      x.values.push_back(v);
    }
    if (!data.empty() && x.dim() != data.front().dim())
      throw std::runtime_error("load_sequence_matrix: ragged rows");
    data.push_back(std::move(x));
  }
  if (data.empty()) throw std::runtime_error("load_sequence_matrix: no rows");
  return data;
}

void save_sequence_matrix(const std::vector<DiscreteState>& data,
                          const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_sequence_matrix: cannot open " + path);
  for (const auto& x : data) {
    for (int i = 0; i < x.dim(); ++i) {
      if (i) out << ',';
      out << x.values[static_cast<std::size_t>(i)];
    }
    out << '\n';
  }
}

Eigen::VectorXd load_real_series(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_real_series: cannot open " + path);
  std::vector<double> vals;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    vals.push_back(std::stod(line));
  }
  Eigen::VectorXd y(static_cast<Eigen::Index>(vals.size()));
  for (std::size_t i = 0; i < vals.size(); ++i)
    y[static_cast<Eigen::Index>(i)] = vals[i];
  return y;
}

void save_real_series(const Eigen::VectorXd& y, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_real_series: cannot open " + path);
  out.precision(17);
  for (Eigen::Index i = 0; i < y.size(); ++i) out << y[i] << '\n';
}

}  // namespace gwg
