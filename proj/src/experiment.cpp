#include "gwg/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "gwg/ais.hpp"
#include "gwg/analysis.hpp"
#include "gwg/diagnostics.hpp"
#include "gwg/models/base.hpp"
#include "gwg/models/cubic.hpp"
#include "gwg/models/fhmm.hpp"
#include "gwg/models/ising.hpp"
#include "gwg/models/rbm.hpp"
#include "gwg/models/serialize.hpp"
#include "gwg/numerics.hpp"
#include "gwg/training.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace gwg {

namespace {

std::string g17(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string sanitize(const std::string& s) {
  std::string out = s;
  for (char& c : out) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '.' || c == '_' || c == '-';
    if (!ok) c = '_';
  }
  return out;
}

void write_file(const std::string& path, const std::string& content) {
  fs::create_directories(fs::path(path).parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

// Fails on keys outside `allowed`; `required` must all be present.
void check_keys(const json& obj, const std::set<std::string>& allowed,
                const std::set<std::string>& required,
                const std::string& ctx) {
  if (!obj.is_object()) throw ConfigError(ctx + ": expected a table");
  for (const auto& item : obj.items()) {
    if (allowed.find(item.key()) == allowed.end())
      throw ConfigError(ctx + ": unknown key \"" + item.key() + "\"");
  }
  for (const auto& k : required) {
    if (!obj.contains(k))
      throw ConfigError(ctx + ": missing required key \"" + k + "\"");
  }
}

template <typename T>
T get_as(const json& obj, const std::string& key, const std::string& ctx) {
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(ctx + ": bad value for \"" + key + "\": " + e.what());
  }
}

template <typename T>
T get_or(const json& obj, const std::string& key, T fallback,
         const std::string& ctx) {
  if (!obj.contains(key)) return fallback;
  return get_as<T>(obj, key, ctx);
}

double quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  const double pos = q * static_cast<double>(v.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return v[lo] * (1.0 - frac) + v[hi] * frac;
}

double sample_std(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  double mean = 0.0;
  for (const double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double acc = 0.0;
  for (const double x : v) acc += (x - mean) * (x - mean);
  return std::sqrt(acc / static_cast<double>(v.size() - 1));
}

}  // namespace

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const unsigned char c : text) {
    h ^= static_cast<std::uint64_t>(c);
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string config_hash(const json& config) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(config.dump())));
  return buf;
}

json load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file: " + path);
  try {
    json config;
    in >> config;
    return config;
  } catch (const json::exception& e) {
    throw ConfigError("config parse error in " + path + ": " + e.what());
  }
}

// --------------------------------------------------------- validation

namespace {

void validate_model_spec(const json& spec);
void validate_sampler_spec(const json& spec);

void validate_sample_config(const json& c) {
  check_keys(c,
             {"schema_version", "kind", "model", "models", "samplers", "seeds",
              "steps", "stat", "checkpoint_every", "record_energy",
              "reference"},
             {"samplers", "seeds", "steps"}, "config");
  if (c.contains("model") == c.contains("models"))
    throw ConfigError("config: exactly one of \"model\"/\"models\" required");
  if (c.contains("models")) {
    if (!c.at("models").is_array() || c.at("models").empty())
      throw ConfigError("config: \"models\" must be a non-empty list");
    for (const auto& m : c.at("models")) validate_model_spec(m);
  } else {
    validate_model_spec(c.at("model"));
  }
  if (!c.at("samplers").is_array() || c.at("samplers").empty())
    throw ConfigError("config: \"samplers\" must be a non-empty list");
  for (const auto& s : c.at("samplers")) validate_sampler_spec(s);
  if (!c.at("seeds").is_array() || c.at("seeds").empty())
    throw ConfigError("config: \"seeds\" must be a non-empty list");
  const std::string stat = get_or<std::string>(c, "stat", "hamming", "config");
  if (stat != "hamming" && stat != "energy")
    throw ConfigError("config: \"stat\" must be hamming or energy");
  if (c.contains("reference")) {
    const json& r = c.at("reference");
    check_keys(r, {"sampler", "chains", "steps"},
               {"sampler", "chains", "steps"}, "reference");
    validate_sampler_spec(r.at("sampler"));
    if (get_as<std::int64_t>(c, "checkpoint_every", "config") <= 0 &&
        get_as<std::int64_t>(c, "steps", "config") > 0)
      throw ConfigError(
          "config: a reference sampler needs checkpoint_every > 0");
  }
}

void validate_train_config(const json& c) {
  check_keys(c, {"schema_version", "kind", "method", "model", "data", "train",
                 "seed"},
             {"method", "model", "data", "train", "seed"}, "config");
  const std::string method = get_as<std::string>(c, "method", "config");
  if (method != "pcd" && method != "plm")
    throw ConfigError("config: \"method\" must be pcd or plm");
  validate_model_spec(c.at("model"));
  const json& d = c.at("data");
  check_keys(d, {"n", "method", "seed", "burnin", "thin", "sampler"},
             {"n", "method", "seed"}, "data");
  const std::string dm = get_as<std::string>(d, "method", "data");
  if (dm != "exact" && dm != "chain")
    throw ConfigError("data: \"method\" must be exact or chain");
  if (dm == "chain") {
    if (!d.contains("sampler"))
      throw ConfigError("data: chain generation needs a \"sampler\"");
    validate_sampler_spec(d.at("sampler"));
  }
  const json& t = c.at("train");
  check_keys(t,
             {"learning_rate", "batch_size", "buffer_size", "mcmc_steps", "l1",
              "iterations", "checkpoint_every", "warmup", "sampler"},
             {"iterations"}, "train");
  if (t.contains("sampler")) validate_sampler_spec(t.at("sampler"));
}

void validate_ais_config(const json& c) {
  check_keys(c,
             {"schema_version", "kind", "model", "base", "schedule", "t_grid",
              "chains", "transitions_per_temp", "sampler", "seed",
              "compare_enumeration"},
             {"model", "t_grid", "chains", "seed"}, "config");
  validate_model_spec(c.at("model"));
  if (!c.at("t_grid").is_array() || c.at("t_grid").empty())
    throw ConfigError("config: \"t_grid\" must be a non-empty list");
  const std::string sched =
      get_or<std::string>(c, "schedule", "linear", "config");
  if (sched != "linear" && sched != "sigmoid")
    throw ConfigError("config: \"schedule\" must be linear or sigmoid");
  if (c.contains("base")) {
    check_keys(c.at("base"), {"type", "path"}, {"type"}, "base");
    const std::string type = get_as<std::string>(c.at("base"), "type", "base");
    if (type != "uniform" && type != "file")
      throw ConfigError("base: \"type\" must be uniform or file");
  }
  if (c.contains("sampler")) validate_sampler_spec(c.at("sampler"));
}

void validate_verify_config(const json& c) {
  check_keys(c, {"schema_version", "kind", "models", "radius", "seed"},
             {"models"}, "config");
  if (!c.at("models").is_array() || c.at("models").empty())
    throw ConfigError("config: \"models\" must be a non-empty list");
  for (const auto& m : c.at("models")) validate_model_spec(m);
}

}  // namespace

void validate_config(const json& config) {
  if (!config.is_object()) throw ConfigError("config: expected a table");
  if (!config.contains("schema_version"))
    throw ConfigError("config: missing \"schema_version\"");
  if (get_as<std::int64_t>(config, "schema_version", "config") != 1)
    throw ConfigError("config: unsupported schema_version");
  const std::string kind = get_as<std::string>(config, "kind", "config");
  if (kind == "sample")
    validate_sample_config(config);
  else if (kind == "train")
    validate_train_config(config);
  else if (kind == "ais")
    validate_ais_config(config);
  else if (kind == "verify")
    validate_verify_config(config);
  else
    throw ConfigError("config: unknown kind \"" + kind + "\"");
}

// ----------------------------------------------------------- factories

namespace {

void validate_model_spec(const json& spec) {
  if (!spec.is_object() || !spec.contains("family"))
    throw ConfigError("model: missing \"family\"");
  const std::string family = get_as<std::string>(spec, "family", "model");
  if (family == "ising") {
    if (spec.contains("path")) {
      check_keys(spec, {"family", "tag", "path"}, {"path"}, "model");
      return;
    }
    const std::string structure =
        get_as<std::string>(spec, "structure", "model(ising)");
    if (structure == "lattice") {
      check_keys(spec, {"family", "tag", "structure", "rows", "cols", "theta"},
                 {"rows", "cols", "theta"}, "model(ising)");
    } else if (structure == "er") {
      check_keys(
          spec,
          {"family", "tag", "structure", "dim", "mean_degree", "theta", "seed"},
          {"dim", "mean_degree", "theta", "seed"}, "model(ising)");
    } else {
      throw ConfigError("model(ising): structure must be lattice or er");
    }
  } else if (family == "rbm") {
    if (spec.contains("path")) {
      check_keys(spec, {"family", "tag", "path"}, {"path"}, "model");
      return;
    }
    check_keys(spec, {"family", "tag", "visible", "hidden", "seed"},
               {"visible", "hidden", "seed"}, "model(rbm)");
  } else if (family == "fhmm") {
    check_keys(spec,
               {"family", "tag", "horizon", "factors", "seed", "sigma2",
                "alpha", "beta"},
               {"horizon", "factors", "seed"}, "model(fhmm)");
  } else if (family == "potts") {
    if (spec.contains("path")) {
      check_keys(spec, {"family", "tag", "path"}, {"path"}, "model");
      return;
    }
    check_keys(
        spec,
        {"family", "tag", "positions", "categories", "coupling_scale", "seed"},
        {"positions", "categories", "coupling_scale", "seed"}, "model(potts)");
  } else if (family == "potts-planted") {
    check_keys(spec,
               {"family", "tag", "positions", "categories", "n_contacts",
                "coupling_scale", "seed"},
               {"positions", "categories", "n_contacts", "coupling_scale",
                "seed"},
               "model(potts-planted)");
  } else if (family == "cubic") {
    check_keys(spec, {"family", "tag", "dim", "seed", "quad_scale", "gamma"},
               {"dim", "seed"}, "model(cubic)");
  } else if (family == "factorized-base") {
    if (spec.contains("path")) {
      check_keys(spec, {"family", "tag", "path"}, {"path"}, "model");
      return;
    }
    check_keys(spec, {"family", "tag", "dim", "arity"}, {"dim", "arity"},
               "model(factorized-base)");
  } else {
    throw ConfigError("model: unknown family \"" + family + "\"");
  }
}

void validate_sampler_spec(const json& spec) {
  if (!spec.is_object() || !spec.contains("name"))
    throw ConfigError("sampler: missing \"name\"");
  const std::string name = get_as<std::string>(spec, "name", "sampler");
  if (name == "gwg" || name == "rbm-block-gibbs") {
    check_keys(spec, {"name"}, {}, "sampler(" + name + ")");
  } else if (name == "gwg-multi") {
    check_keys(spec, {"name", "samples"}, {"samples"}, "sampler(gwg-multi)");
  } else if (name == "lb") {
    check_keys(spec, {"name", "tau", "radius"}, {"tau", "radius"},
               "sampler(lb)");
  } else if (name == "gibbs") {
    check_keys(spec, {"name", "scan"}, {}, "sampler(gibbs)");
    const std::string scan =
        get_or<std::string>(spec, "scan", "systematic", "sampler(gibbs)");
    if (scan != "systematic" && scan != "random")
      throw ConfigError("sampler(gibbs): scan must be systematic or random");
  } else if (name == "block-gibbs") {
    check_keys(spec, {"name", "block"}, {"block"}, "sampler(block-gibbs)");
  } else if (name == "hb") {
    check_keys(spec, {"name", "block", "radius", "mode"}, {"block", "radius"},
               "sampler(hb)");
    const std::string mode =
        get_or<std::string>(spec, "mode", "random", "sampler(hb)");
    if (mode != "random" && mode != "time")
      throw ConfigError("sampler(hb): mode must be random or time");
  } else if (name == "rmala") {
    check_keys(spec, {"name", "epsilon", "lambda"}, {"epsilon", "lambda"},
               "sampler(rmala)");
  } else if (name == "rhmc") {
    check_keys(spec, {"name", "epsilon", "lambda", "leapfrog"},
               {"epsilon", "lambda"}, "sampler(rhmc)");
  } else {
    throw ConfigError("sampler: unknown name \"" + name + "\"");
  }
}

}  // namespace

std::unique_ptr<EnergyModel> make_model(const json& spec) {
  validate_model_spec(spec);
  const std::string family = get_as<std::string>(spec, "family", "model");
  if (spec.contains("path")) {
    auto model = load_model(get_as<std::string>(spec, "path", "model"));
    if (model->name() != family)
      throw ConfigError("model: file at \"path\" holds family " +
                        model->name() + ", spec says " + family);
    return model;
  }
  if (family == "ising") {
    const std::string structure =
        get_as<std::string>(spec, "structure", "model");
    if (structure == "lattice") {
      return std::make_unique<IsingModel>(
          lattice_ising(get_as<int>(spec, "rows", "model"),
                        get_as<int>(spec, "cols", "model"),
                        get_as<double>(spec, "theta", "model")));
    }
    RngStream rng(get_as<std::uint64_t>(spec, "seed", "model"), 0x15171);
    return std::make_unique<IsingModel>(
        er_ising(get_as<int>(spec, "dim", "model"),
                 get_as<double>(spec, "mean_degree", "model"),
                 get_as<double>(spec, "theta", "model"), rng));
  }
  if (family == "rbm") {
    RngStream rng(get_as<std::uint64_t>(spec, "seed", "model"), 0x4B4B);
    return std::make_unique<RbmModel>(
        random_rbm(get_as<int>(spec, "visible", "model"),
                   get_as<int>(spec, "hidden", "model"), rng));
  }
  if (family == "fhmm") {
    RngStream rng(get_as<std::uint64_t>(spec, "seed", "model"), 0xF477);
    return std::make_unique<FhmmPosterior>(random_fhmm(
        get_as<int>(spec, "horizon", "model"),
        get_as<int>(spec, "factors", "model"), rng,
        get_or<double>(spec, "sigma2", 0.5, "model"),
        get_or<double>(spec, "alpha", 0.1, "model"),
        get_or<double>(spec, "beta", 0.95, "model")));
  }
  if (family == "potts") {
    RngStream rng(get_as<std::uint64_t>(spec, "seed", "model"), 0x9077);
    return std::make_unique<PottsModel>(
        random_potts(get_as<int>(spec, "positions", "model"),
                     get_as<int>(spec, "categories", "model"),
                     get_as<double>(spec, "coupling_scale", "model"), rng));
  }
  if (family == "potts-planted") {
    return std::make_unique<PottsModel>(
        planted_potts(get_as<int>(spec, "positions", "model"),
                      get_as<int>(spec, "categories", "model"),
                      get_as<int>(spec, "n_contacts", "model"),
                      get_as<double>(spec, "coupling_scale", "model"),
                      get_as<std::uint64_t>(spec, "seed", "model"))
            .model);
  }
  if (family == "cubic") {
    RngStream rng(get_as<std::uint64_t>(spec, "seed", "model"), 0xCB1C);
    return std::make_unique<CubicModel>(
        random_cubic(get_as<int>(spec, "dim", "model"), rng,
                     get_or<double>(spec, "quad_scale", 0.3, "model"),
                     get_or<double>(spec, "gamma", 0.3, "model")));
  }
  // factorized-base (uniform construction)
  return std::make_unique<FactorizedBase>(FactorizedBase::uniform(
      get_as<int>(spec, "dim", "model"),
      static_cast<std::int32_t>(get_as<int>(spec, "arity", "model"))));
}

std::string model_tag(const json& spec, int index, int count) {
  if (spec.contains("tag"))
    return sanitize(get_as<std::string>(spec, "tag", "model"));
  std::string tag = get_as<std::string>(spec, "family", "model");
  if (count > 1) tag += "-" + std::to_string(index);
  return sanitize(tag);
}

std::string SamplerSpec::label() const {
  return discrete ? discrete->label() : relaxed->label();
}

SamplerSpec make_sampler(const json& spec) {
  validate_sampler_spec(spec);
  const std::string name = get_as<std::string>(spec, "name", "sampler");
  SamplerSpec out;
  if (name == "gwg") {
    out.discrete = std::make_unique<GwgSampler>();
  } else if (name == "gwg-multi") {
    out.discrete = std::make_unique<GwgMultiSampler>(
        get_as<int>(spec, "samples", "sampler"));
  } else if (name == "lb") {
    double tau;
    if (spec.at("tau").is_string()) {
      if (spec.at("tau").get<std::string>() != "inf")
        throw ConfigError("sampler(lb): tau must be a number or \"inf\"");
      tau = std::numeric_limits<double>::infinity();
    } else {
      tau = get_as<double>(spec, "tau", "sampler");
    }
    out.discrete = std::make_unique<LocallyBalancedSampler>(
        tau, get_as<int>(spec, "radius", "sampler"));
  } else if (name == "gibbs") {
    const std::string scan =
        get_or<std::string>(spec, "scan", "systematic", "sampler");
    out.discrete = std::make_unique<GibbsSampler>(
        scan == "random" ? GibbsScan::kRandom : GibbsScan::kSystematic);
  } else if (name == "block-gibbs") {
    out.discrete = std::make_unique<BlockGibbsSampler>(
        get_as<int>(spec, "block", "sampler"));
  } else if (name == "hb") {
    const std::string mode =
        get_or<std::string>(spec, "mode", "random", "sampler");
    out.discrete = std::make_unique<HammingBallSampler>(
        get_as<int>(spec, "block", "sampler"),
        get_as<int>(spec, "radius", "sampler"),
        mode == "time" ? HbBlockMode::kTimeBlock : HbBlockMode::kRandomDims);
  } else if (name == "rbm-block-gibbs") {
    out.discrete = std::make_unique<RbmBlockGibbsSampler>();
  } else if (name == "rmala" || name == "rhmc") {
    RelaxConfig cfg;
    cfg.epsilon = get_as<double>(spec, "epsilon", "sampler");
    cfg.lambda = get_as<double>(spec, "lambda", "sampler");
    cfg.leapfrog_steps = get_or<int>(spec, "leapfrog", 5, "sampler");
    if (name == "rmala")
      out.relaxed = std::make_unique<RmalaSampler>(cfg);
    else
      out.relaxed = std::make_unique<RhmcSampler>(cfg);
  }
  return out;
}

PlantedPotts planted_potts(int positions, int categories, int n_contacts,
                           double coupling_scale, std::uint64_t seed) {
  const int max_pairs = positions * (positions - 1) / 2;
  if (n_contacts < 0 || n_contacts > max_pairs)
    throw std::invalid_argument("planted_potts: bad contact count");
  RngStream rng(seed, 0x9C0947AC);
  PlantedPotts out{PottsModel(positions, categories),
                   Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>::
                       Constant(positions, positions, false)};

  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(static_cast<std::size_t>(max_pairs));
  for (int i = 0; i < positions; ++i)
    for (int j = i + 1; j < positions; ++j) pairs.emplace_back(i, j);
  const std::vector<int> chosen =
      sample_distinct_dims(max_pairs, n_contacts, rng);

  Eigen::MatrixXd blk(categories, categories);
  for (const int idx : chosen) {
    const auto [i, j] = pairs[static_cast<std::size_t>(idx)];
    for (int a = 0; a < categories; ++a)
      for (int b = 0; b < categories; ++b)
        blk(a, b) = coupling_scale * rng.normal();
    out.model.set_block(i, j, blk);
    out.contacts(i, j) = out.contacts(j, i) = true;
  }
  for (int i = 0; i < positions; ++i) {
    Eigen::VectorXd h(categories);
    for (int a = 0; a < categories; ++a) h[a] = 0.1 * rng.normal();
    out.model.set_field(i, h);
  }
  return out;
}

double enumerate_log_z(const EnergyModel& model) {
  const std::uint64_t n = state_space_size(model.dim(), model.arity());
  if (n > kEnumerationCap)
    throw std::invalid_argument("enumerate_log_z: state space too large");
  Eigen::VectorXd f(static_cast<Eigen::Index>(n));
  for (std::uint64_t i = 0; i < n; ++i)
    f[static_cast<Eigen::Index>(i)] =
        model.energy_state(state_from_index(i, model.dim(), model.arity()));
  return logsumexp(f);
}

double model_lipschitz(const EnergyModel& model) {
  if (const auto* m = dynamic_cast<const IsingModel*>(&model))
    return m->lipschitz_bound();
  if (const auto* m = dynamic_cast<const RbmModel*>(&model))
    return m->lipschitz_bound();
  if (const auto* m = dynamic_cast<const PottsModel*>(&model))
    return m->lipschitz_bound();
  if (const auto* m = dynamic_cast<const FhmmPosterior*>(&model))
    return m->lipschitz_bound();
  if (const auto* m = dynamic_cast<const CubicModel*>(&model))
    return m->lipschitz_bound();
  if (dynamic_cast<const FactorizedBase*>(&model) != nullptr)
    return 0.0;  // gradient is constant
  throw std::invalid_argument("model_lipschitz: unsupported family " +
                              model.name());
}

// ------------------------------------------------------------ run_sample

namespace {

struct SampleJob {
  int model_idx = 0;
  int sampler_idx = 0;
  int seed_idx = 0;
};

struct JobResult {
  double ess_value = std::numeric_limits<double>::quiet_NaN();
  std::vector<DiscreteState> checkpoints;
};

void run_pool(std::size_t n_jobs, int workers,
              const std::function<void(std::size_t)>& body) {
  const int n_workers =
      std::max(1, std::min<int>(workers, static_cast<int>(n_jobs)));
  std::atomic<std::size_t> next{0};
  std::mutex err_mx;
  std::exception_ptr err;
  auto loop = [&] {
    for (;;) {
      const std::size_t j = next.fetch_add(1);
      if (j >= n_jobs) return;
      try {
        body(j);
      } catch (...) {
        const std::lock_guard<std::mutex> lock(err_mx);
        if (!err) err = std::current_exception();
        return;
      }
    }
  };
  if (n_workers == 1) {
    loop();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_workers));
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(loop);
    for (auto& t : pool) t.join();
  }
  if (err) std::rethrow_exception(err);
}

}  // namespace

RunSummary run_sample(const json& config, const std::string& out_dir,
                      int workers) {
  validate_config(config);
  if (config.at("kind") != "sample")
    throw ConfigError("run_sample: config kind is not sample");
  const std::string hash = config_hash(config);
  fs::create_directories(out_dir);

  std::vector<json> model_specs;
  if (config.contains("models"))
    for (const auto& m : config.at("models")) model_specs.push_back(m);
  else
    model_specs.push_back(config.at("model"));

  std::vector<std::unique_ptr<EnergyModel>> models;
  std::vector<std::string> tags;
  for (std::size_t i = 0; i < model_specs.size(); ++i) {
    models.push_back(make_model(model_specs[i]));
    tags.push_back(model_tag(model_specs[i], static_cast<int>(i),
                             static_cast<int>(model_specs.size())));
  }

  std::vector<SamplerSpec> samplers;
  for (const auto& s : config.at("samplers")) samplers.push_back(make_sampler(s));

  std::vector<std::uint64_t> seeds;
  for (const auto& s : config.at("seeds")) seeds.push_back(s.get<std::uint64_t>());

  const std::uint64_t steps = get_as<std::uint64_t>(config, "steps", "config");
  const std::string stat_name =
      get_or<std::string>(config, "stat", "hamming", "config");
  const std::uint64_t checkpoint_every =
      get_or<std::uint64_t>(config, "checkpoint_every", 0, "config");
  const bool record_energy =
      get_or<bool>(config, "record_energy", true, "config");

  // Reference sample sets (one per model) for MMD-vs-step series.
  std::vector<SampleSet> reference_sets(models.size());
  if (config.contains("reference")) {
    const json& r = config.at("reference");
    const SamplerSpec ref_sampler = make_sampler(r.at("sampler"));
    if (!ref_sampler.discrete)
      throw ConfigError("reference: sampler must be a discrete kernel");
    const int ref_chains = get_as<int>(r, "chains", "reference");
    const std::uint64_t ref_steps =
        get_as<std::uint64_t>(r, "steps", "reference");
    for (std::size_t mi = 0; mi < models.size(); ++mi) {
      const std::uint64_t ref_seed = fnv1a64(tags[mi] + "/reference");
      reference_sets[mi].reserve(static_cast<std::size_t>(ref_chains));
      ChainOptions opts;
      opts.steps = ref_steps;
      opts.record_energy = false;
      for (int c = 0; c < ref_chains; ++c) {
        RngStream rng(ref_seed, static_cast<std::uint64_t>(c));
        DiscreteState x0 = uniform_random_state(models[mi]->dim(),
                                                models[mi]->arity(), rng);
        const ChainTrace trace =
            run_chain(*models[mi], *ref_sampler.discrete, std::move(x0), rng, opts);
        reference_sets[mi].push_back(trace.final_state);
      }
    }
  }

  std::vector<SampleJob> jobs;
  for (int mi = 0; mi < static_cast<int>(models.size()); ++mi)
    for (int si = 0; si < static_cast<int>(samplers.size()); ++si)
      for (int ci = 0; ci < static_cast<int>(seeds.size()); ++ci)
        jobs.push_back({mi, si, ci});
  std::vector<JobResult> results(jobs.size());
  std::atomic<int> files{0};

  run_pool(jobs.size(), workers, [&](std::size_t j) {
    const SampleJob& job = jobs[j];
    const EnergyModel& model = *models[static_cast<std::size_t>(job.model_idx)];
    const SamplerSpec& sampler =
        samplers[static_cast<std::size_t>(job.sampler_idx)];
    const std::string& tag = tags[static_cast<std::size_t>(job.model_idx)];
    const std::string label = sanitize(sampler.label());
    const std::uint64_t seed = seeds[static_cast<std::size_t>(job.seed_idx)];

    // The stream is derived from the (model, sampler) identity so a chain is
    // reproducible regardless of list order or worker count.
    RngStream rng(seed, fnv1a64(tag + "/" + label));

    ChainOptions opts;
    opts.steps = steps;
    opts.stat = stat_name == "energy" ? ChainStat::kEnergy
                                      : ChainStat::kHammingToRef;
    opts.record_energy = record_energy;
    opts.checkpoint_every = checkpoint_every;

    ChainTrace trace;
    if (sampler.discrete) {
      DiscreteState x0 =
          uniform_random_state(model.dim(), model.arity(), rng);
      trace = run_chain(model, *sampler.discrete, std::move(x0), rng, opts);
    } else {
      if (model.arity() != 2)
        throw std::invalid_argument(
            "relaxed samplers require a binary model");
      Eigen::VectorXd z0 = rng.normal_vector(model.dim());
      trace = run_relaxed_chain(model, *sampler.relaxed, std::move(z0), rng,
                                opts);
    }

    const std::string path = out_dir + "/trace_" + tag + "_" + label + "_s" +
                             std::to_string(seed) + ".csv";
    write_trace_csv(trace, path, hash);
    files.fetch_add(1);

    JobResult& res = results[j];
    res.checkpoints = std::move(trace.checkpoints);
    if (trace.stat.size() >= 10) {
      try {
        res.ess_value = ess(trace.stat);
      } catch (const std::invalid_argument&) {
        // constant series: leave NaN
      }
    }
  });

  // ESS box-plot data: every chain value, then per-sampler aggregates.
  std::string values_csv = "# config_hash=" + hash + "\n";
  values_csv += "model,sampler,seed,ess\n";
  std::string summary_csv = "# config_hash=" + hash + "\n";
  summary_csv += "model,sampler,n,median_ess,std_ess,outlier_count\n";
  for (std::size_t mi = 0; mi < models.size(); ++mi) {
    for (std::size_t si = 0; si < samplers.size(); ++si) {
      std::vector<double> vals;
      for (std::size_t ci = 0; ci < seeds.size(); ++ci) {
        const std::size_t j =
            (mi * samplers.size() + si) * seeds.size() + ci;
        const double v = results[j].ess_value;
        values_csv += tags[mi] + "," + sanitize(samplers[si].label()) + "," +
                      std::to_string(seeds[ci]) + "," + g17(v) + "\n";
        if (std::isfinite(v)) vals.push_back(v);
      }
      if (vals.empty()) continue;
      const double med = quantile(vals, 0.5);
      const double q1 = quantile(vals, 0.25);
      const double q3 = quantile(vals, 0.75);
      const double iqr = q3 - q1;
      int outliers = 0;
      for (const double v : vals)
        if (v < q1 - 1.5 * iqr || v > q3 + 1.5 * iqr) ++outliers;
      summary_csv += tags[mi] + "," + sanitize(samplers[si].label()) + "," +
                     std::to_string(vals.size()) + "," + g17(med) + "," +
                     g17(sample_std(vals)) + "," + std::to_string(outliers) +
                     "\n";
    }
  }
  write_file(out_dir + "/ess_values.csv", values_csv);
  write_file(out_dir + "/ess_summary.csv", summary_csv);
  files.fetch_add(2);

  // MMD of each sampler's checkpoint sets against the reference set.
  if (config.contains("reference") && checkpoint_every > 0) {
    for (std::size_t mi = 0; mi < models.size(); ++mi) {
      // Split-half self-MMD of the reference gives the attainable floor.
      const SampleSet& ref = reference_sets[mi];
      SampleSet half_a, half_b;
      for (std::size_t i = 0; i < ref.size(); ++i)
        (i % 2 == 0 ? half_a : half_b).push_back(ref[i]);
      std::string self_csv = "# config_hash=" + hash + "\n";
      self_csv += "model,self_mmd\n";
      self_csv += tags[mi] + "," + g17(mmd(half_a, half_b)) + "\n";
      write_file(out_dir + "/mmd_self_" + tags[mi] + ".csv", self_csv);
      files.fetch_add(1);

      for (std::size_t si = 0; si < samplers.size(); ++si) {
        const std::size_t j0 = (mi * samplers.size() + si) * seeds.size();
        const std::size_t n_checkpoints = results[j0].checkpoints.size();
        std::string csv = "# config_hash=" + hash + "\n";
        csv += "step,mmd\n";
        for (std::size_t k = 0; k < n_checkpoints; ++k) {
          SampleSet set;
          set.reserve(seeds.size());
          for (std::size_t ci = 0; ci < seeds.size(); ++ci)
            set.push_back(results[j0 + ci].checkpoints[k]);
          csv += std::to_string((k + 1) * checkpoint_every) + "," +
                 g17(mmd(set, ref)) + "\n";
        }
        write_file(out_dir + "/mmd_" + tags[mi] + "_" +
                       sanitize(samplers[si].label()) + ".csv",
                   csv);
        files.fetch_add(1);
      }
    }
  }

  RunSummary summary;
  summary.files_written = files.load();
  return summary;
}

// ------------------------------------------------------------- run_train

namespace {

std::vector<DiscreteState> generate_training_data(const EnergyModel& truth,
                                                  const json& data_cfg) {
  const int n = get_as<int>(data_cfg, "n", "data");
  if (n <= 0) throw ConfigError("data: n must be positive");
  const std::string method = get_as<std::string>(data_cfg, "method", "data");
  const std::uint64_t seed = get_as<std::uint64_t>(data_cfg, "seed", "data");
  std::vector<DiscreteState> data;
  data.reserve(static_cast<std::size_t>(n));

  if (method == "exact") {
    const auto [states, probs] = enumerate_distribution(truth);
    Eigen::VectorXd cdf(probs.size());
    double acc = 0.0;
    for (Eigen::Index i = 0; i < probs.size(); ++i) {
      acc += probs[i];
      cdf[i] = acc;
    }
    RngStream rng(seed, 0xDA7AE9AC);
    for (int i = 0; i < n; ++i) {
      const double u = rng.uniform01() * cdf[cdf.size() - 1];
      const double* begin = cdf.data();
      const double* it = std::upper_bound(begin, begin + cdf.size(), u);
      Eigen::Index idx = it - begin;
      if (idx >= cdf.size()) idx = cdf.size() - 1;
      data.push_back(states[static_cast<std::size_t>(idx)]);
    }
    return data;
  }

  // Long-chain generation: burn in, then keep every `thin`-th state.
  const SamplerSpec sampler = make_sampler(data_cfg.at("sampler"));
  if (!sampler.discrete)
    throw ConfigError("data: chain generation needs a discrete sampler");
  const std::uint64_t burnin =
      get_or<std::uint64_t>(data_cfg, "burnin", 1000, "data");
  const std::uint64_t thin = get_or<std::uint64_t>(data_cfg, "thin", 10, "data");
  if (thin == 0) throw ConfigError("data: thin must be positive");
  RngStream rng(seed, 0xC4A19);
  DiscreteState x = uniform_random_state(truth.dim(), truth.arity(), rng);
  std::uint64_t t = 0;
  for (std::uint64_t s = 0; s < burnin; ++s, ++t)
    sampler.discrete->step(truth, x, rng, t);
  for (int i = 0; i < n; ++i) {
    for (std::uint64_t s = 0; s < thin; ++s, ++t)
      sampler.discrete->step(truth, x, rng, t);
    data.push_back(x);
  }
  return data;
}

std::string history_csv(const TrainHistory& hist, const std::string& hash) {
  std::string csv = "# config_hash=" + hash + "\n";
  csv += "iteration,loss_proxy,grad_norm,rmse\n";
  for (std::size_t i = 0; i < hist.iteration.size(); ++i) {
    csv += std::to_string(hist.iteration[i]) + "," + g17(hist.loss_proxy[i]) +
           "," + g17(hist.grad_norm[i]) + "," + g17(hist.rmse[i]) + "\n";
  }
  return csv;
}

}  // namespace

RunSummary run_train(const json& config, const std::string& out_dir) {
  validate_config(config);
  if (config.at("kind") != "train")
    throw ConfigError("run_train: config kind is not train");
  const std::string hash = config_hash(config);
  fs::create_directories(out_dir);

  const std::string method = get_as<std::string>(config, "method", "config");
  const std::uint64_t seed = get_as<std::uint64_t>(config, "seed", "config");
  const json& model_spec = config.at("model");
  const std::string family = get_as<std::string>(model_spec, "family", "model");

  // Ground truth (with the contact map when it is planted).
  std::unique_ptr<EnergyModel> truth;
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> contacts;
  bool have_contacts = false;
  if (family == "potts-planted") {
    PlantedPotts planted = planted_potts(
        get_as<int>(model_spec, "positions", "model"),
        get_as<int>(model_spec, "categories", "model"),
        get_as<int>(model_spec, "n_contacts", "model"),
        get_as<double>(model_spec, "coupling_scale", "model"),
        get_as<std::uint64_t>(model_spec, "seed", "model"));
    truth = std::make_unique<PottsModel>(std::move(planted.model));
    contacts = std::move(planted.contacts);
    have_contacts = true;
  } else {
    truth = make_model(model_spec);
  }

  const std::vector<DiscreteState> data =
      generate_training_data(*truth, config.at("data"));

  const json& t = config.at("train");
  TrainConfig cfg;
  cfg.learning_rate = get_or<double>(t, "learning_rate", cfg.learning_rate, "train");
  cfg.batch_size = get_or<int>(t, "batch_size", cfg.batch_size, "train");
  cfg.buffer_size = get_or<int>(t, "buffer_size", cfg.buffer_size, "train");
  cfg.mcmc_steps = get_or<int>(t, "mcmc_steps", cfg.mcmc_steps, "train");
  cfg.l1 = get_or<double>(t, "l1", cfg.l1, "train");
  cfg.iterations = get_as<int>(t, "iterations", "train");
  cfg.checkpoint_every =
      get_or<int>(t, "checkpoint_every", cfg.checkpoint_every, "train");
  cfg.warmup = get_or<int>(t, "warmup", cfg.warmup, "train");

  TrainHistory hist;
  std::unique_ptr<ParamFamily> fitted;
  const auto* truth_ising = dynamic_cast<const IsingModel*>(truth.get());
  const auto* truth_potts = dynamic_cast<const PottsModel*>(truth.get());

  if (method == "plm") {
    if (truth_potts == nullptr)
      throw ConfigError("run_train: plm requires a potts ground truth");
    auto fam = std::make_unique<PottsFamily>(truth_potts->dim(),
                                             truth_potts->arity());
    hist = plm_train(*fam, data, cfg);
    fitted = std::move(fam);
  } else {
    const SamplerSpec sampler =
        make_sampler(t.contains("sampler") ? t.at("sampler")
                                           : json{{"name", "gwg"}});
    if (!sampler.discrete)
      throw ConfigError("train: sampler must be a discrete kernel");
    RngStream rng(seed, 0x7BA1D);
    if (truth_ising != nullptr) {
      auto fam = std::make_unique<IsingFamily>(truth_ising->dim());
      const Eigen::MatrixXd j_true =
          truth_ising->theta() * truth_ising->coupling();
      hist = pcd_train(*fam, data, *sampler.discrete, cfg, rng, &j_true);
      fitted = std::move(fam);
    } else if (truth_potts != nullptr) {
      auto fam = std::make_unique<PottsFamily>(truth_potts->dim(),
                                               truth_potts->arity());
      hist = pcd_train(*fam, data, *sampler.discrete, cfg, rng, nullptr);
      fitted = std::move(fam);
    } else {
      throw ConfigError("run_train: pcd supports ising or potts truth");
    }
  }

  RunSummary summary;
  write_file(out_dir + "/train_history.csv", history_csv(hist, hash));
  ++summary.files_written;

  json model_json = json::parse(model_to_json(fitted->model()));
  model_json["config_hash"] = hash;
  write_file(out_dir + "/model_final.json", model_json.dump(2) + "\n");
  ++summary.files_written;

  if (const auto* potts_fam = dynamic_cast<const PottsFamily*>(fitted.get());
      potts_fam != nullptr && have_contacts) {
    const Eigen::MatrixXd strengths = coupling_strength(potts_fam->potts());
    const auto curve = recall_curve(strengths, contacts, 0);
    std::string csv = "# config_hash=" + hash + "\n";
    csv += "rank,recall\n";
    for (const auto& [rank, recall] : curve)
      csv += std::to_string(rank) + "," + g17(recall) + "\n";
    write_file(out_dir + "/recall.csv", csv);
    ++summary.files_written;
  }
  return summary;
}

// --------------------------------------------------------------- run_ais

RunSummary run_ais(const json& config, const std::string& out_dir) {
  validate_config(config);
  if (config.at("kind") != "ais")
    throw ConfigError("run_ais: config kind is not ais");
  const std::string hash = config_hash(config);
  fs::create_directories(out_dir);

  const std::unique_ptr<EnergyModel> model = make_model(config.at("model"));
  std::unique_ptr<FactorizedBase> base;
  if (config.contains("base") &&
      get_as<std::string>(config.at("base"), "type", "base") == "file") {
    auto loaded = load_model(
        get_as<std::string>(config.at("base"), "path", "base"));
    auto* fb = dynamic_cast<FactorizedBase*>(loaded.get());
    if (fb == nullptr)
      throw ConfigError("base: file does not hold a factorized base");
    base = std::make_unique<FactorizedBase>(*fb);
  } else {
    base = std::make_unique<FactorizedBase>(
        FactorizedBase::uniform(model->dim(), model->arity()));
  }

  const SamplerSpec sampler = make_sampler(
      config.contains("sampler") ? config.at("sampler") : json{{"name", "gwg"}});
  if (!sampler.discrete)
    throw ConfigError("ais: sampler must be a discrete kernel");

  const int chains = get_as<int>(config, "chains", "config");
  const int per_temp =
      get_or<int>(config, "transitions_per_temp", 1, "config");
  const std::string sched_name =
      get_or<std::string>(config, "schedule", "linear", "config");
  const std::uint64_t seed = get_as<std::uint64_t>(config, "seed", "config");
  const bool compare =
      get_or<bool>(config, "compare_enumeration", false, "config");

  double enum_log_z = std::numeric_limits<double>::quiet_NaN();
  if (compare) enum_log_z = enumerate_log_z(*model);

  RunSummary summary;
  std::string summary_csv = "# config_hash=" + hash + "\n";
  summary_csv += "T,chains,log_z,enum_log_z,abs_error\n";
  for (const auto& t_entry : config.at("t_grid")) {
    const int T = t_entry.get<int>();
    const AnnealSchedule schedule = sched_name == "sigmoid"
                                        ? AnnealSchedule::sigmoid_schedule(T)
                                        : AnnealSchedule::linear(T);
    RngStream rng(seed, static_cast<std::uint64_t>(T));
    const AisResult result = ais_log_z(*model, *base, schedule,
                                       *sampler.discrete, chains, rng, per_temp);

    std::string weights_csv = "# config_hash=" + hash + "\n";
    weights_csv += "chain,log_weight\n";
    for (int c = 0; c < chains; ++c)
      weights_csv += std::to_string(c) + "," + g17(result.log_weights[c]) + "\n";
    write_file(out_dir + "/ais_weights_T" + std::to_string(T) + ".csv",
               weights_csv);
    ++summary.files_written;

    summary_csv += std::to_string(T) + "," + std::to_string(chains) + "," +
                   g17(result.log_z) + "," + g17(enum_log_z) + "," +
                   g17(std::isfinite(enum_log_z)
                           ? std::abs(result.log_z - enum_log_z)
                           : std::numeric_limits<double>::quiet_NaN()) +
                   "\n";
  }
  write_file(out_dir + "/ais_summary.csv", summary_csv);
  ++summary.files_written;
  return summary;
}

// ------------------------------------------------------------ run_verify

RunSummary run_verify(const json& config, const std::string& out_dir) {
  validate_config(config);
  if (config.at("kind") != "verify")
    throw ConfigError("run_verify: config kind is not verify");
  const std::string hash = config_hash(config);
  fs::create_directories(out_dir);
  const int radius = get_or<int>(config, "radius", 1, "config");

  std::string csv = "# config_hash=" + hash + "\n";
  csv += "model,lipschitz,c,gap_gwg,gap_balanced,var_gwg,var_balanced,"
         "gap_bound_holds,variance_bound_holds,normalizer_holds,"
         "balancing_holds,pass\n";
  std::string report = "# config_hash=" + hash + "\n";

  RunSummary summary;
  const auto& model_list = config.at("models");
  int index = 0;
  for (const auto& spec : model_list) {
    const std::unique_ptr<EnergyModel> model = make_model(spec);
    const std::string tag =
        model_tag(spec, index, static_cast<int>(model_list.size()));
    ++index;
    const double lipschitz = model_lipschitz(*model);

    const Theorem1Report t1 = verify_theorem1(*model, lipschitz, radius);
    const NormalizerBoundsReport nb =
        verify_normalizer_bounds(*model, lipschitz, radius);
    const BalancingReport bal = verify_balancing(*model, 2.0, radius);
    const bool pass = t1.gap_bound_holds && t1.variance_bound_holds &&
                      nb.holds && bal.holds;
    summary.pass = summary.pass && pass;

    csv += tag + "," + g17(t1.lipschitz) + "," + g17(t1.c) + "," +
           g17(t1.gap_gwg) + "," + g17(t1.gap_balanced) + "," +
           g17(t1.var_gwg) + "," + g17(t1.var_balanced) + "," +
           std::to_string(t1.gap_bound_holds ? 1 : 0) + "," +
           std::to_string(t1.variance_bound_holds ? 1 : 0) + "," +
           std::to_string(nb.holds ? 1 : 0) + "," +
           std::to_string(bal.holds ? 1 : 0) + "," +
           std::to_string(pass ? 1 : 0) + "\n";

    report += "== " + tag + " ==\n";
    report += t1.to_text();
    report += nb.to_text();
    report += bal.to_text();
    report += "\n";
  }
  write_file(out_dir + "/verify_summary.csv", csv);
  write_file(out_dir + "/verify_report.txt", report);
  summary.files_written = 2;
  return summary;
}

// --------------------------------------------------------- emit_plotdata

namespace {

struct CsvFile {
  std::string hash;  // from the "# config_hash=..." line, if present
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (const char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

CsvFile read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path);
  CsvFile file;
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const std::string prefix = "# config_hash=";
      if (line.rfind(prefix, 0) == 0) file.hash = line.substr(prefix.size());
      continue;
    }
    if (!have_header) {
      file.columns = split_csv_line(line);
      have_header = true;
    } else {
      file.rows.push_back(split_csv_line(line));
    }
  }
  return file;
}

int column_index(const CsvFile& file, const std::string& name,
                 const std::string& path) {
  for (std::size_t i = 0; i < file.columns.size(); ++i)
    if (file.columns[i] == name) return static_cast<int>(i);
  throw ConfigError(path + ": missing column " + name);
}

}  // namespace

RunSummary emit_plotdata(const std::string& results_dir,
                         const std::string& out_dir) {
  if (!fs::is_directory(results_dir))
    throw ConfigError("plotdata: not a directory: " + results_dir);

  std::vector<std::string> names;
  for (const auto& entry : fs::directory_iterator(results_dir)) {
    if (entry.is_regular_file())
      names.push_back(entry.path().filename().string());
  }
  std::sort(names.begin(), names.end());

  // Everything is staged in memory so a failure never leaves partial files.
  std::vector<std::pair<std::string, std::string>> outputs;

  // --- ESS bars recomputed from the traces themselves.
  struct EssGroup {
    std::vector<double> values;
    std::string hash;
  };
  std::map<std::string, EssGroup> ess_groups;
  for (const std::string& name : names) {
    if (name.rfind("trace_", 0) != 0 || name.size() < 10 ||
        name.substr(name.size() - 4) != ".csv")
      continue;
    const std::size_t spos = name.rfind("_s");
    if (spos == std::string::npos) continue;
    const std::string series = name.substr(6, spos - 6);
    const CsvFile file = read_csv(results_dir + "/" + name);
    if (file.rows.empty()) continue;
    const int stat_col =
        column_index(file, "stat", results_dir + "/" + name);
    std::vector<double> stat;
    stat.reserve(file.rows.size());
    for (const auto& row : file.rows)
      stat.push_back(std::stod(row[static_cast<std::size_t>(stat_col)]));
    EssGroup& group = ess_groups[series];
    if (group.hash.empty()) group.hash = file.hash;
    if (stat.size() >= 10) {
      try {
        group.values.push_back(ess(stat));
      } catch (const std::invalid_argument&) {
        // constant trace contributes nothing
      }
    }
  }
  if (!ess_groups.empty()) {
    std::string csv =
        "# config_hash=" + ess_groups.begin()->second.hash + "\n";
    csv += "series,n,median_ess,std_ess,median_log10_ess\n";
    for (const auto& [series, group] : ess_groups) {
      if (group.values.empty()) continue;
      const double med = quantile(group.values, 0.5);
      csv += series + "," + std::to_string(group.values.size()) + "," +
             g17(med) + "," + g17(sample_std(group.values)) + "," +
             g17(std::log10(med)) + "\n";
    }
    outputs.emplace_back(out_dir + "/plot_ess.csv", csv);
  }

  // --- log-MMD series pass through with a log10 column added.
  for (const std::string& name : names) {
    if (name.rfind("mmd_", 0) != 0 || name.rfind("mmd_self_", 0) == 0 ||
        name.substr(name.size() - 4) != ".csv")
      continue;
    const CsvFile file = read_csv(results_dir + "/" + name);
    const int step_col = column_index(file, "step", name);
    const int mmd_col = column_index(file, "mmd", name);
    std::string csv = "# config_hash=" + file.hash + "\n";
    csv += "step,mmd,log10_mmd\n";
    for (const auto& row : file.rows) {
      const double value = std::stod(row[static_cast<std::size_t>(mmd_col)]);
      csv += row[static_cast<std::size_t>(step_col)] + "," + g17(value) + "," +
             g17(std::log10(value)) + "\n";
    }
    outputs.emplace_back(out_dir + "/plot_" + name, csv);
  }

  // --- RMSE history (only when the run tracked a ground truth).
  for (const std::string& name : names) {
    if (name != "train_history.csv") continue;
    const CsvFile file = read_csv(results_dir + "/" + name);
    const int it_col = column_index(file, "iteration", name);
    const int rmse_col = column_index(file, "rmse", name);
    std::string csv = "# config_hash=" + file.hash + "\n";
    csv += "iteration,rmse,log10_rmse\n";
    bool any = false;
    for (const auto& row : file.rows) {
      const double value = std::stod(row[static_cast<std::size_t>(rmse_col)]);
      if (!std::isfinite(value)) continue;
      any = true;
      csv += row[static_cast<std::size_t>(it_col)] + "," + g17(value) + "," +
             g17(std::log10(value)) + "\n";
    }
    if (any) outputs.emplace_back(out_dir + "/plot_rmse.csv", csv);
  }

  // --- Recall curve: verbatim copy.
  for (const std::string& name : names) {
    if (name != "recall.csv") continue;
    std::ifstream in(results_dir + "/" + name, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    outputs.emplace_back(out_dir + "/plot_recall.csv", buf.str());
  }

  if (outputs.empty())
    throw ConfigError("plotdata: no recognizable inputs in " + results_dir);
  for (const auto& [path, content] : outputs) write_file(path, content);

  RunSummary summary;
  summary.files_written = static_cast<int>(outputs.size());
  return summary;
}

// --------------------------------------------------------------- presets

namespace {

json seeds_upto(int n) {
  json out = json::array();
  for (int i = 0; i < n; ++i) out.push_back(i);
  return out;
}

json ising_sample_preset() {
  json models = json::array();
  for (const double theta : {0.1, 0.2, 0.3, 0.4, 0.5}) {
    char tag[32];
    std::snprintf(tag, sizeof tag, "ising-theta%g", theta);
    models.push_back({{"family", "ising"},
                      {"structure", "lattice"},
                      {"rows", 10},
                      {"cols", 10},
                      {"theta", theta},
                      {"tag", tag}});
  }
  return {{"schema_version", 1},
          {"kind", "sample"},
          {"models", models},
          {"samplers", json::array({{{"name", "gwg"}},
                                    {{"name", "gibbs"}},
                                    {{"name", "hb"}, {"block", 10}, {"radius", 1}},
                                    {{"name", "lb"}, {"tau", 2.0}, {"radius", 1}}})},
          {"seeds", seeds_upto(32)},
          {"steps", 50000},
          {"stat", "hamming"}};
}

json rbm_sample_preset() {
  json models = json::array();
  int seed = 11;
  for (const int visible : {25, 50, 100}) {
    models.push_back({{"family", "rbm"},
                      {"visible", visible},
                      {"hidden", 16},
                      {"seed", seed++},
                      {"tag", "rbm-" + std::to_string(visible)}});
  }
  json samplers = json::array();
  samplers.push_back({{"name", "gwg"}});
  samplers.push_back({{"name", "gibbs"}});
  for (const double eps : {0.1, 0.01, 0.001}) {
    for (const double lam : {0.5, 1.0, 2.0}) {
      samplers.push_back({{"name", "rmala"}, {"epsilon", eps}, {"lambda", lam}});
      samplers.push_back({{"name", "rhmc"},
                          {"epsilon", eps},
                          {"lambda", lam},
                          {"leapfrog", 5}});
    }
  }
  return {{"schema_version", 1},
          {"kind", "sample"},
          {"models", models},
          {"samplers", samplers},
          {"seeds", seeds_upto(32)},
          {"steps", 20000},
          {"stat", "hamming"},
          {"record_energy", false},
          {"checkpoint_every", 1000},
          {"reference",
           {{"sampler", {{"name", "rbm-block-gibbs"}}},
            {"chains", 256},
            {"steps", 2000}}}};
}

json fhmm_sample_preset() {
  return {{"schema_version", 1},
          {"kind", "sample"},
          {"model",
           {{"family", "fhmm"},
            {"horizon", 100},
            {"factors", 10},
            {"seed", 21},
            {"tag", "fhmm-100-10"}}},
          {"samplers",
           json::array({{{"name", "gwg"}},
                        {{"name", "gibbs"}},
                        {{"name", "hb"},
                         {"block", 10},
                         {"radius", 1},
                         {"mode", "time"}}})},
          {"seeds", seeds_upto(8)},
          {"steps", 10000},
          {"stat", "energy"}};
}

json ising_train_preset() {
  return {{"schema_version", 1},
          {"kind", "train"},
          {"method", "pcd"},
          {"seed", 0},
          {"model",
           {{"family", "ising"},
            {"structure", "lattice"},
            {"rows", 15},
            {"cols", 15},
            {"theta", 0.25},
            {"tag", "lattice15"}}},
          {"data",
           {{"n", 20000},
            {"method", "chain"},
            {"burnin", 20000},
            {"thin", 120},
            {"seed", 101},
            {"sampler", {{"name", "block-gibbs"}, {"block", 2}}}}},
          // Desk-scale calibration: at 15x15 the paper's settings put the
          // training loop in a relay limit cycle (replay buffer lagging the
          // collective coupling mode), so the preset uses a smaller rate
          // with warm-up, a light l1, a small buffer, and a full-data batch.
          {"train",
           {{"learning_rate", 0.0005},
            {"batch_size", 20000},
            {"buffer_size", 8},
            {"mcmc_steps", 25},
            {"l1", 0.004},
            {"warmup", 200},
            {"iterations", 3000},
            {"checkpoint_every", 100},
            {"sampler", {{"name", "gwg"}}}}}};
}

json potts_train_preset() {
  return {{"schema_version", 1},
          {"kind", "train"},
          {"method", "plm"},
          {"seed", 0},
          {"model",
           {{"family", "potts-planted"},
            {"positions", 10},
            {"categories", 3},
            {"n_contacts", 8},
            {"coupling_scale", 0.8},
            {"seed", 33},
            {"tag", "potts-planted"}}},
          {"data", {{"n", 3000}, {"method", "exact"}, {"seed", 102}}},
          {"train",
           {{"learning_rate", 0.01},
            {"l1", 0.01},
            {"iterations", 300},
            {"checkpoint_every", 10}}}};
}

json ais_ising10_preset() {
  return {{"schema_version", 1},
          {"kind", "ais"},
          {"seed", 0},
          {"model",
           {{"family", "ising"},
            {"structure", "er"},
            {"dim", 10},
            {"mean_degree", 4.0},
            {"theta", 0.2},
            {"seed", 42},
            {"tag", "ising10"}}},
          {"base", {{"type", "uniform"}}},
          {"schedule", "linear"},
          {"t_grid", json::array({100, 1000, 10000})},
          {"chains", 64},
          {"transitions_per_temp", 1},
          {"sampler", {{"name", "gwg"}}},
          {"compare_enumeration", true}};
}

json verify_theorem1_preset() {
  return {{"schema_version", 1},
          {"kind", "verify"},
          {"seed", 0},
          {"radius", 1},
          {"models",
           json::array(
               {{{"family", "ising"},
                 {"structure", "er"},
                 {"dim", 8},
                 {"mean_degree", 4.0},
                 {"theta", 0.1},
                 {"seed", 1},
                 {"tag", "er8-theta0.1"}},
                {{"family", "ising"},
                 {"structure", "er"},
                 {"dim", 8},
                 {"mean_degree", 4.0},
                 {"theta", 0.25},
                 {"seed", 2},
                 {"tag", "er8-theta0.25"}},
                {{"family", "rbm"},
                 {"visible", 8},
                 {"hidden", 4},
                 {"seed", 3},
                 {"tag", "rbm8"}},
                {{"family", "cubic"}, {"dim", 8}, {"seed", 4}, {"tag", "cubic8"}},
                {{"family", "fhmm"},
                 {"horizon", 4},
                 {"factors", 2},
                 {"seed", 5},
                 {"tag", "fhmm4x2"}}})}};
}

}  // namespace

std::vector<std::string> preset_names() {
  return {"ising-sample",   "rbm-sample", "fhmm-sample",          "ising-train",
          "potts-train-synthetic", "ais-ising10", "verify-theorem1"};
}

json preset_config(const std::string& name) {
  if (name == "ising-sample") return ising_sample_preset();
  if (name == "rbm-sample") return rbm_sample_preset();
  if (name == "fhmm-sample") return fhmm_sample_preset();
  if (name == "ising-train" || name == "lattice-ising-small")
    return ising_train_preset();
  if (name == "potts-train-synthetic") return potts_train_preset();
  if (name == "ais-ising10" || name == "ising10") return ais_ising10_preset();
  if (name == "verify-theorem1") return verify_theorem1_preset();
  throw ConfigError("unknown preset: " + name);
}

}  // namespace gwg
