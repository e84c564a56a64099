#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "gwg/models/base.hpp"
#include "gwg/models/cubic.hpp"
#include "gwg/models/fhmm.hpp"
#include "gwg/models/ising.hpp"
#include "gwg/models/potts.hpp"
#include "gwg/models/rbm.hpp"
#include "gwg/numerics.hpp"

namespace gwg {

namespace {

// Largest |eigenvalue| of a symmetric matrix = its spectral norm.
double symmetric_spectral_norm(const Eigen::MatrixXd& S) {
  if (S.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S,
                                                    Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  return std::max(std::abs(ev[0]), std::abs(ev[ev.size() - 1]));
}

void require_symmetric_zero_diag(const Eigen::MatrixXd& M, const char* what) {
  if (M.rows() != M.cols())
    throw std::invalid_argument(std::string(what) + ": matrix not square");
  const double asym = (M - M.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12)
    throw std::invalid_argument(std::string(what) + ": matrix not symmetric");
  if (M.diagonal().cwiseAbs().maxCoeff() > 0.0)
    throw std::invalid_argument(std::string(what) + ": nonzero diagonal");
}

void require_length(const Eigen::VectorXd& v, Eigen::Index n,
                    const char* what) {
  if (v.size() != n)
    throw std::invalid_argument(std::string(what) + ": dimension mismatch");
}

}  // namespace

// ---------------------------------------------------------------- Ising

IsingModel::IsingModel(Eigen::MatrixXd J, double theta, Eigen::VectorXd b)
    : J_(std::move(J)), theta_(theta), b_(std::move(b)) {
  require_symmetric_zero_diag(J_, "IsingModel");
  require_length(b_, J_.rows(), "IsingModel bias");
}

double IsingModel::energy(const Eigen::VectorXd& v) const {
  require_length(v, J_.rows(), "ising_energy");
  return theta_ * v.dot(J_ * v) + b_.dot(v);
}

Eigen::VectorXd IsingModel::gradient(const Eigen::VectorXd& v) const {
  require_length(v, J_.rows(), "ising_gradient");
  return 2.0 * theta_ * (J_ * v) + b_;
}

double IsingModel::energy_and_gradient(const Eigen::VectorXd& v,
                                       Eigen::VectorXd& grad_out) const {
  require_length(v, J_.rows(), "ising_energy");
  Eigen::VectorXd s = J_ * v;
  grad_out = 2.0 * theta_ * s + b_;
  return theta_ * v.dot(s) + b_.dot(v);
}

double IsingModel::lipschitz_bound() const {
  if (sigma_max_ < 0.0) sigma_max_ = symmetric_spectral_norm(J_);
  return 2.0 * theta_ * sigma_max_;
}

IsingModel lattice_ising(int rows, int cols, double theta) {
  return lattice_ising(rows, cols, theta,
                       Eigen::VectorXd::Zero(static_cast<Eigen::Index>(rows) *
                                             cols));
}

IsingModel lattice_ising(int rows, int cols, double theta, Eigen::VectorXd b) {
  if (rows < 3 || cols < 3)
    throw std::invalid_argument(
        "lattice_ising: needs rows, cols >= 3 for distinct wrap edges");
  const int d = rows * cols;
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(d, d);
  auto node = [cols](int r, int c) { return r * cols + c; };
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const int u = node(r, c);
      const int right = node(r, (c + 1) % cols);
      const int down = node((r + 1) % rows, c);
      J(u, right) = J(right, u) = 1.0;
      J(u, down) = J(down, u) = 1.0;
    }
  }
  return IsingModel(std::move(J), theta, std::move(b));
}

IsingModel er_ising(int dim, double mean_degree, double theta,
                    RngStream& rng) {
  if (dim < 2) throw std::invalid_argument("er_ising: dim < 2");
  const double p = mean_degree / static_cast<double>(dim - 1);
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = i + 1; j < dim; ++j) {
      if (rng.bernoulli(p)) J(i, j) = J(j, i) = 1.0;
    }
  }
  return IsingModel(std::move(J), theta, Eigen::VectorXd::Zero(dim));
}

// ------------------------------------------------------------------ RBM

RbmModel::RbmModel(Eigen::MatrixXd W, Eigen::VectorXd b, Eigen::VectorXd c)
    : W_(std::move(W)), b_(std::move(b)), c_(std::move(c)) {
  if (W_.rows() < 1 || W_.cols() < 1)
    throw std::invalid_argument("RbmModel: empty weight matrix");
  require_length(b_, W_.cols(), "RbmModel visible bias");
  require_length(c_, W_.rows(), "RbmModel hidden bias");
  if (!W_.allFinite() || !b_.allFinite() || !c_.allFinite())
    throw std::invalid_argument("RbmModel: non-finite parameters");
}

double RbmModel::energy(const Eigen::VectorXd& v) const {
  require_length(v, W_.cols(), "rbm_energy");
  Eigen::VectorXd a = W_ * v + c_;
  double total = b_.dot(v);
  for (Eigen::Index i = 0; i < a.size(); ++i) total += softplus(a[i]);
  return total;
}

Eigen::VectorXd RbmModel::gradient(const Eigen::VectorXd& v) const {
  require_length(v, W_.cols(), "rbm_gradient");
  Eigen::VectorXd a = W_ * v + c_;
  for (Eigen::Index i = 0; i < a.size(); ++i) a[i] = sigmoid(a[i]);
  return W_.transpose() * a + b_;
}

double RbmModel::energy_and_gradient(const Eigen::VectorXd& v,
                                     Eigen::VectorXd& grad_out) const {
  require_length(v, W_.cols(), "rbm_energy");
  Eigen::VectorXd a = W_ * v + c_;
  double total = b_.dot(v);
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    total += softplus(a[i]);
    a[i] = sigmoid(a[i]);
  }
  grad_out = W_.transpose() * a + b_;
  return total;
}

Eigen::VectorXd RbmModel::hidden_probs(const Eigen::VectorXd& x) const {
  require_length(x, W_.cols(), "rbm hidden_probs");
  Eigen::VectorXd a = W_ * x + c_;
  for (Eigen::Index i = 0; i < a.size(); ++i) a[i] = sigmoid(a[i]);
  return a;
}

Eigen::VectorXd RbmModel::visible_probs(const Eigen::VectorXd& h) const {
  require_length(h, W_.rows(), "rbm visible_probs");
  Eigen::VectorXd a = W_.transpose() * h + b_;
  for (Eigen::Index i = 0; i < a.size(); ++i) a[i] = sigmoid(a[i]);
  return a;
}

double RbmModel::lipschitz_bound() const {
  if (sigma_max_ < 0.0)
    sigma_max_ = std::sqrt(symmetric_spectral_norm(W_.transpose() * W_));
  return 0.25 * sigma_max_ * sigma_max_;
}

RbmModel random_rbm(int visible, int hidden, RngStream& rng) {
  Eigen::MatrixXd W(hidden, visible);
  const double std_w = std::sqrt(0.05);
  for (int i = 0; i < hidden; ++i)
    for (int j = 0; j < visible; ++j) W(i, j) = std_w * rng.normal();
  Eigen::VectorXd b = rng.normal_vector(visible);
  Eigen::VectorXd c = rng.normal_vector(hidden);
  return RbmModel(std::move(W), std::move(b), std::move(c));
}

// ---------------------------------------------------------------- Potts

PottsModel::PottsModel(int positions, int categories)
    : D_(positions),
      K_(categories),
      M_(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(positions) *
                                   categories,
                               static_cast<Eigen::Index>(positions) *
                                   categories)),
      h_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(positions) *
                               categories)) {
  if (positions < 1 || categories < 2)
    throw std::invalid_argument("PottsModel: bad shape");
}

PottsModel::PottsModel(Eigen::MatrixXd M, Eigen::VectorXd h, int positions,
                       int categories)
    : D_(positions), K_(categories), M_(std::move(M)), h_(std::move(h)) {
  if (positions < 1 || categories < 2)
    throw std::invalid_argument("PottsModel: bad shape");
  const Eigen::Index n = static_cast<Eigen::Index>(D_) * K_;
  if (M_.rows() != n || M_.cols() != n || h_.size() != n)
    throw std::invalid_argument("PottsModel: parameter shape mismatch");
  validate();
}

void PottsModel::validate() const {
  // Block symmetry J_{ij} = J_{ji}' is exactly symmetry of the big matrix.
  if ((M_ - M_.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw std::invalid_argument("PottsModel: couplings violate pair symmetry");
  for (int i = 0; i < D_; ++i) {
    if (block(i, i).cwiseAbs().maxCoeff() > 0.0)
      throw std::invalid_argument("PottsModel: nonzero self-coupling block");
  }
}

void PottsModel::set_block(int i, int j, const Eigen::MatrixXd& B) {
  if (i == j) throw std::invalid_argument("PottsModel: self-coupling block");
  if (B.rows() != K_ || B.cols() != K_)
    throw std::invalid_argument("PottsModel: block shape mismatch");
  M_.block(static_cast<Eigen::Index>(i) * K_,
           static_cast<Eigen::Index>(j) * K_, K_, K_) = B;
  M_.block(static_cast<Eigen::Index>(j) * K_,
           static_cast<Eigen::Index>(i) * K_, K_, K_) = B.transpose();
  sigma_max_ = -1.0;
}

void PottsModel::set_field(int i, const Eigen::VectorXd& h) {
  require_length(h, K_, "PottsModel field");
  h_.segment(static_cast<Eigen::Index>(i) * K_, K_) = h;
}

double PottsModel::energy(const Eigen::VectorXd& v) const {
  require_length(v, M_.rows(), "potts_energy");
  return h_.dot(v) + v.dot(M_ * v);
}

Eigen::VectorXd PottsModel::gradient(const Eigen::VectorXd& v) const {
  require_length(v, M_.rows(), "potts_gradient");
  return h_ + 2.0 * (M_ * v);
}

double PottsModel::energy_and_gradient(const Eigen::VectorXd& v,
                                       Eigen::VectorXd& grad_out) const {
  require_length(v, M_.rows(), "potts_energy");
  Eigen::VectorXd s = M_ * v;
  grad_out = h_ + 2.0 * s;
  return h_.dot(v) + v.dot(s);
}

double PottsModel::lipschitz_bound() const {
  if (sigma_max_ < 0.0) sigma_max_ = symmetric_spectral_norm(M_);
  return 2.0 * sigma_max_;
}

PottsModel random_potts(int positions, int categories, double coupling_scale,
                        RngStream& rng) {
  PottsModel m(positions, categories);
  Eigen::MatrixXd B(categories, categories);
  for (int i = 0; i < positions; ++i) {
    for (int j = i + 1; j < positions; ++j) {
      for (int a = 0; a < categories; ++a)
        for (int b = 0; b < categories; ++b)
          B(a, b) = coupling_scale * rng.normal();
      m.set_block(i, j, B);
    }
  }
  for (int i = 0; i < positions; ++i)
    m.set_field(i, rng.normal_vector(categories));
  return m;
}

PottsModel potts_from_ising(const IsingModel& ising) {
  const int d = ising.dim();
  PottsModel m(d, 2);
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(2, 2);
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      const double w = ising.theta() * ising.coupling()(i, j);
      if (w == 0.0) continue;
      B(1, 1) = w;
      m.set_block(i, j, B);
    }
  }
  Eigen::VectorXd h(2);
  for (int i = 0; i < d; ++i) {
    h << 0.0, ising.bias()[i];
    m.set_field(i, h);
  }
  return m;
}

// ----------------------------------------------------------------- FHMM

FhmmPosterior::FhmmPosterior(Eigen::VectorXd w, double bias, double sigma2,
                             Eigen::VectorXd alpha, Eigen::VectorXd beta,
                             Eigen::VectorXd y)
    : L_(static_cast<int>(y.size())),
      K_(static_cast<int>(w.size())),
      w_(std::move(w)),
      bias_(bias),
      sigma2_(sigma2),
      alpha_(std::move(alpha)),
      beta_(std::move(beta)),
      y_(std::move(y)) {
  if (L_ < 1 || K_ < 1) throw std::invalid_argument("FhmmPosterior: empty");
  if (sigma2_ <= 0.0)
    throw std::invalid_argument("FhmmPosterior: sigma2 must be positive");
  require_length(alpha_, K_, "FhmmPosterior alpha");
  require_length(beta_, K_, "FhmmPosterior beta");
  for (int k = 0; k < K_; ++k) {
    if (!(alpha_[k] > 0.0 && alpha_[k] < 1.0 && beta_[k] > 0.0 &&
          beta_[k] < 1.0))
      throw std::invalid_argument("FhmmPosterior: alpha, beta must be in (0,1)");
  }
  // Multilinear extension of log p(v|u): corners (0,0)->log b, (0,1)->log(1-b),
  // (1,0)->log(1-b), (1,1)->log b give d = log b, lin = log(1-b) - log b,
  // quad = 2(log b - log(1-b)).
  a_.resize(K_);
  bc_.resize(K_);
  d_.resize(K_);
  for (int k = 0; k < K_; ++k) {
    const double lb = std::log(beta_[k]);
    const double lnb = std::log1p(-beta_[k]);
    d_[k] = lb;
    bc_[k] = lnb - lb;
    a_[k] = 2.0 * (lb - lnb);
  }
}

double FhmmPosterior::energy(const Eigen::VectorXd& v) const {
  Eigen::VectorXd g;
  // The fused path below costs the same as energy alone to within noise.
  return energy_and_gradient(v, g);
}

Eigen::VectorXd FhmmPosterior::gradient(const Eigen::VectorXd& v) const {
  Eigen::VectorXd g;
  energy_and_gradient(v, g);
  return g;
}

double FhmmPosterior::energy_and_gradient(const Eigen::VectorXd& v,
                                          Eigen::VectorXd& grad_out) const {
  require_length(v, static_cast<Eigen::Index>(L_) * K_, "fhmm_log_joint");
  grad_out = Eigen::VectorXd::Zero(v.size());
  const double log_norm = -0.5 * std::log(2.0 * M_PI * sigma2_);
  double total = 0.0;
  for (int t = 0; t < L_; ++t) {
    const auto vt = v.segment(static_cast<Eigen::Index>(t) * K_, K_);
    const double resid = y_[t] - w_.dot(vt) - bias_;
    total += -resid * resid / (2.0 * sigma2_) + log_norm;
    grad_out.segment(static_cast<Eigen::Index>(t) * K_, K_) +=
        (resid / sigma2_) * w_;
  }
  for (int k = 0; k < K_; ++k) {
    const double u1 = v[k];
    const double la = std::log(alpha_[k]);
    const double lna = std::log1p(-alpha_[k]);
    total += u1 * la + (1.0 - u1) * lna;
    grad_out[k] += la - lna;
  }
  for (int t = 0; t + 1 < L_; ++t) {
    for (int k = 0; k < K_; ++k) {
      const Eigen::Index iu = static_cast<Eigen::Index>(t) * K_ + k;
      const Eigen::Index iv = iu + K_;
      const double u = v[iu];
      const double q = v[iv];
      total += a_[k] * u * q + bc_[k] * (u + q) + d_[k];
      grad_out[iu] += a_[k] * q + bc_[k];
      grad_out[iv] += a_[k] * u + bc_[k];
    }
  }
  return total;
}

double FhmmPosterior::lipschitz_bound() const {
  if (hess_norm_ >= 0.0) return hess_norm_;
  const Eigen::Index n = static_cast<Eigen::Index>(L_) * K_;
  const Eigen::MatrixXd emis = w_ * w_.transpose() / sigma2_;
  if (n <= 1024) {
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(n, n);
    for (int t = 0; t < L_; ++t) {
      H.block(static_cast<Eigen::Index>(t) * K_,
              static_cast<Eigen::Index>(t) * K_, K_, K_) = -emis;
    }
    for (int t = 0; t + 1 < L_; ++t) {
      for (int k = 0; k < K_; ++k) {
        const Eigen::Index iu = static_cast<Eigen::Index>(t) * K_ + k;
        H(iu, iu + K_) = a_[k];
        H(iu + K_, iu) = a_[k];
      }
    }
    hess_norm_ = symmetric_spectral_norm(H);
  } else {
    // Block Gershgorin bound for very long chains.
    hess_norm_ = symmetric_spectral_norm(emis) +
                 2.0 * a_.cwiseAbs().maxCoeff();
  }
  return hess_norm_;
}

FhmmPosterior random_fhmm(int horizon, int factors, RngStream& rng,
                          double sigma2, double alpha, double beta) {
  Eigen::VectorXd w = rng.normal_vector(factors);
  const double bias = rng.normal();
  // Latent trajectory from the chain prior, then noisy emissions.
  std::vector<int> x(static_cast<std::size_t>(factors), 0);
  Eigen::VectorXd y(horizon);
  for (int k = 0; k < factors; ++k) x[static_cast<std::size_t>(k)] = rng.bernoulli(alpha) ? 1 : 0;
  for (int t = 0; t < horizon; ++t) {
    if (t > 0) {
      for (int k = 0; k < factors; ++k) {
        const bool stay = rng.bernoulli(beta);
        if (!stay) x[static_cast<std::size_t>(k)] ^= 1;
      }
    }
    double mean = bias;
    for (int k = 0; k < factors; ++k)
      mean += w[k] * static_cast<double>(x[static_cast<std::size_t>(k)]);
    y[t] = mean + std::sqrt(sigma2) * rng.normal();
  }
  return FhmmPosterior(std::move(w), bias, sigma2,
                       Eigen::VectorXd::Constant(factors, alpha),
                       Eigen::VectorXd::Constant(factors, beta), std::move(y));
}

// ------------------------------------------------------- FactorizedBase

FactorizedBase::FactorizedBase(Eigen::MatrixXd logp) : logp_(std::move(logp)) {
  if (logp_.rows() < 1 || logp_.cols() < 2)
    throw std::invalid_argument("FactorizedBase: bad shape");
  for (Eigen::Index i = 0; i < logp_.rows(); ++i) {
    const double total = logp_.row(i).array().exp().sum();
    if (std::abs(total - 1.0) > 1e-9)
      throw std::invalid_argument("FactorizedBase: row not normalized");
  }
}

FactorizedBase FactorizedBase::fit(const std::vector<DiscreteState>& data) {
  if (data.empty()) throw std::invalid_argument("base_fit: empty data");
  const int d = data.front().dim();
  const std::int32_t k = data.front().arity;
  Eigen::MatrixXd counts = Eigen::MatrixXd::Ones(d, k);  // add-one smoothing
  for (const auto& x : data) {
    if (x.dim() != d || x.arity != k)
      throw std::invalid_argument("base_fit: inconsistent data shapes");
    for (int i = 0; i < d; ++i)
      counts(i, x.values[static_cast<std::size_t>(i)]) += 1.0;
  }
  const double denom = static_cast<double>(data.size()) + k;
  return FactorizedBase((counts / denom).array().log().matrix());
}

FactorizedBase FactorizedBase::uniform(int dim, std::int32_t arity) {
  return FactorizedBase(Eigen::MatrixXd::Constant(
      dim, arity, -std::log(static_cast<double>(arity))));
}

double FactorizedBase::energy(const Eigen::VectorXd& v) const {
  const int d = dim();
  if (arity() == 2) {
    require_length(v, d, "base_logp");
    double total = 0.0;
    for (int i = 0; i < d; ++i)
      total += logp_(i, 0) + v[i] * (logp_(i, 1) - logp_(i, 0));
    return total;
  }
  return gradient(v).dot(v);  // linear in the one-hot embedding
}

Eigen::VectorXd FactorizedBase::gradient(const Eigen::VectorXd& v) const {
  const int d = dim();
  if (arity() == 2) {
    require_length(v, d, "base_logp");
    Eigen::VectorXd g(d);
    for (int i = 0; i < d; ++i) g[i] = logp_(i, 1) - logp_(i, 0);
    return g;
  }
  require_length(v, static_cast<Eigen::Index>(d) * arity(), "base_logp");
  Eigen::VectorXd g(v.size());
  for (int i = 0; i < d; ++i)
    for (int k = 0; k < arity(); ++k)
      g[static_cast<Eigen::Index>(i) * arity() + k] = logp_(i, k);
  return g;
}

double FactorizedBase::log_prob(const DiscreteState& x) const {
  if (x.dim() != dim() || x.arity != arity())
    throw std::invalid_argument("base_logp: shape mismatch");
  double total = 0.0;
  for (int i = 0; i < dim(); ++i)
    total += logp_(i, x.values[static_cast<std::size_t>(i)]);
  return total;
}

DiscreteState FactorizedBase::sample(RngStream& rng) const {
  DiscreteState x(dim(), arity());
  for (int i = 0; i < dim(); ++i) {
    x.values[static_cast<std::size_t>(i)] = static_cast<std::int32_t>(
        rng.categorical_from_logits(logp_.row(i).transpose()));
  }
  return x;
}

// ---------------------------------------------------------------- Cubic

CubicModel::CubicModel(Eigen::MatrixXd A, Eigen::VectorXd b, Eigen::VectorXd w,
                       double gamma)
    : A_(std::move(A)), b_(std::move(b)), w_(std::move(w)), gamma_(gamma) {
  if (A_.rows() != A_.cols())
    throw std::invalid_argument("CubicModel: A not square");
  if ((A_ - A_.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw std::invalid_argument("CubicModel: A not symmetric");
  require_length(b_, A_.rows(), "CubicModel b");
  require_length(w_, A_.rows(), "CubicModel w");
}

double CubicModel::energy(const Eigen::VectorXd& v) const {
  require_length(v, A_.rows(), "cubic energy");
  const double s = w_.dot(v);
  return 0.5 * v.dot(A_ * v) + b_.dot(v) + gamma_ / 3.0 * s * s * s;
}

Eigen::VectorXd CubicModel::gradient(const Eigen::VectorXd& v) const {
  require_length(v, A_.rows(), "cubic gradient");
  const double s = w_.dot(v);
  return A_ * v + b_ + gamma_ * s * s * w_;
}

double CubicModel::energy_and_gradient(const Eigen::VectorXd& v,
                                       Eigen::VectorXd& grad_out) const {
  require_length(v, A_.rows(), "cubic energy");
  const double s = w_.dot(v);
  Eigen::VectorXd av = A_ * v;
  grad_out = av + b_ + gamma_ * s * s * w_;
  return 0.5 * v.dot(av) + b_.dot(v) + gamma_ / 3.0 * s * s * s;
}

double CubicModel::lipschitz_bound() const {
  if (sigma_max_a_ < 0.0) sigma_max_a_ = symmetric_spectral_norm(A_);
  double pos = 0.0, neg = 0.0;
  for (Eigen::Index i = 0; i < w_.size(); ++i) {
    if (w_[i] > 0.0) pos += w_[i];
    else neg -= w_[i];
  }
  return sigma_max_a_ +
         2.0 * std::abs(gamma_) * std::max(pos, neg) * w_.squaredNorm();
}

CubicModel random_cubic(int dim, RngStream& rng, double quad_scale,
                        double gamma) {
  Eigen::MatrixXd A(dim, dim);
  for (int i = 0; i < dim; ++i) {
    A(i, i) = quad_scale * rng.normal();
    for (int j = i + 1; j < dim; ++j) {
      A(i, j) = A(j, i) = quad_scale * rng.normal();
    }
  }
  Eigen::VectorXd b = rng.normal_vector(dim);
  Eigen::VectorXd w = rng.normal_vector(dim) / std::sqrt(dim);
  return CubicModel(std::move(A), std::move(b), std::move(w), gamma);
}

}  // namespace gwg
