// SPDX-License-Identifier: Apache-2.0
// Lifted RIS-phase problem solved in factored form Psi = V V^H. Rows of V
// are kept on the unit sphere, which makes diag(Psi) = 1 and Psi >= 0 hold
// by construction; the remaining cuts are handled by a log barrier. A dual
// certificate on the dense Psi decides between Optimal and Inaccurate.
#include "risfp/convex_solver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace risfp {

double ris_sdp_objective(const RisCoeffs& coeffs, const Eigen::MatrixXcd& lifted) {
  double s = 0.0;
  for (int k = 0; k < coeffs.users(); ++k) {
    const double tr = std::real(lifted.transpose().cwiseProduct(coeffs.objective[static_cast<std::size_t>(k)]).sum());
    s += std::log2(1.0 - coeffs.offset(k) + tr);
  }
  return s;
}

namespace {

constexpr double kLn2 = std::numbers::ln2;

class Factored {
 public:
  explicit Factored(const RisCoeffs& c) : c_(c), n_(c.elements() + 1) {
    const int users = c.users();
    cascade_.resize(n_ - 1, users);
    for (int k = 0; k < users; ++k) cascade_.col(k) = c.cascade[static_cast<std::size_t>(k)];
    for (int k = 0; k < users; ++k)
      if (c.cut_active[static_cast<std::size_t>(k)]) cuts_.push_back(k);
  }

  int size() const { return n_; }
  int users() const { return c_.users(); }
  const std::vector<int>& cuts() const { return cuts_; }

  // tr(Psi C_k) and tr(Psi D_k) for every user.
  void traces(const Eigen::MatrixXcd& v, Eigen::VectorXd& obj, Eigen::VectorXd& rate) const {
    proj_ = cascade_.adjoint() * v.topRows(n_ - 1);
    last_ = v.row(n_ - 1);
    obj.resize(users());
    rate.resize(users());
    for (int k = 0; k < users(); ++k) {
      const double s2 = proj_.row(k).squaredNorm();
      const cplx mix = (last_.array() * proj_.row(k).array().conjugate()).sum();
      rate(k) = s2;
      obj(k) = c_.quad_weight[static_cast<std::size_t>(k)] * s2 +
               2.0 * std::real(c_.cross_weight[static_cast<std::size_t>(k)] * mix);
    }
  }

  // Euclidean gradient of sum_k w_k tr(Psi C_k) + omega_k tr(Psi D_k), using
  // the projections cached by the last traces() call.
  Eigen::MatrixXcd gradient(const Eigen::VectorXd& w, const Eigen::VectorXd& omega) const {
    const int users = this->users();
    Eigen::MatrixXcd r(users, proj_.cols());
    Eigen::RowVectorXcd last = Eigen::RowVectorXcd::Zero(proj_.cols());
    for (int k = 0; k < users; ++k) {
      const auto ks = static_cast<std::size_t>(k);
      r.row(k) = (w(k) * c_.quad_weight[ks] + omega(k)) * proj_.row(k) + w(k) * c_.cross_weight[ks] * last_;
      last += w(k) * std::conj(c_.cross_weight[ks]) * proj_.row(k);
    }
    Eigen::MatrixXcd g(n_, proj_.cols());
    g.topRows(n_ - 1) = 2.0 * cascade_ * r;
    g.row(n_ - 1) = 2.0 * last;
    return g;
  }

  Eigen::MatrixXcd dense_gradient(const Eigen::VectorXd& w, const Eigen::VectorXd& omega) const {
    Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(n_, n_);
    for (int k = 0; k < users(); ++k) {
      const auto ks = static_cast<std::size_t>(k);
      g += w(k) * c_.objective[ks] + omega(k) * c_.min_rate[ks];
    }
    return g;
  }

 private:
  const RisCoeffs& c_;
  int n_;
  Eigen::MatrixXcd cascade_;
  std::vector<int> cuts_;
  mutable Eigen::MatrixXcd proj_;
  mutable Eigen::RowVectorXcd last_;
};

void normalize_rows(Eigen::MatrixXcd& v) {
  for (Eigen::Index i = 0; i < v.rows(); ++i) {
    const double nrm = v.row(i).norm();
    if (nrm > 0.0) {
      v.row(i) /= nrm;
    } else {
      v.row(i).setZero();
      v(i, 0) = 1.0;
    }
  }
}

// Tangent projection on the product of spheres.
Eigen::MatrixXcd tangent(const Eigen::MatrixXcd& v, const Eigen::MatrixXcd& g) {
  Eigen::MatrixXcd r = g;
  for (Eigen::Index i = 0; i < v.rows(); ++i) {
    const double along = std::real(v.row(i).dot(g.row(i)));
    r.row(i) -= along * v.row(i);
  }
  return r;
}

double real_inner(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  return std::real(a.cwiseProduct(b.conjugate()).sum());
}

// Value and Euclidean gradient of a smooth function of V; false outside its
// domain.
using Merit = std::function<bool(const Eigen::MatrixXcd& v, double& value, Eigen::MatrixXcd* grad)>;

struct AscentResult {
  int iterations = 0;
  double value = 0.0;
  double grad_norm = 0.0;
};

// Riemannian gradient ascent with Barzilai-Borwein steps and Armijo
// backtracking. `done` is checked every iteration.
AscentResult ascend(const Merit& merit, Eigen::MatrixXcd& v, int max_iters, double rel_tol,
                    const std::function<bool(const Eigen::MatrixXcd&)>& done = {}) {
  AscentResult res;
  Eigen::MatrixXcd grad;
  double value = 0.0;
  merit(v, value, &grad);
  Eigen::MatrixXcd r = tangent(v, grad);
  double step = 1.0 / std::max(r.norm(), 1e-12);
  Eigen::MatrixXcd prev_v;
  Eigen::MatrixXcd prev_r;
  int stalled = 0;
  for (; res.iterations < max_iters; ++res.iterations) {
    const double rn2 = r.squaredNorm();
    if (std::sqrt(rn2) <= rel_tol * std::max(1.0, grad.norm())) break;
    if (done && done(v)) break;
    if (res.iterations > 0) {
      const Eigen::MatrixXcd s = v - prev_v;
      const Eigen::MatrixXcd y = r - prev_r;
      const double sy = std::abs(real_inner(s, y));
      if (sy > 0.0) step = std::clamp(s.squaredNorm() / sy, 1e-12, 1e12);
    }
    bool moved = false;
    double next_value = value;
    Eigen::MatrixXcd cand;
    for (int ls = 0; ls < 50; ++ls, step *= 0.5) {
      cand = v + step * r;
      normalize_rows(cand);
      if (merit(cand, next_value, nullptr) && next_value >= value + 1e-4 * step * rn2) {
        moved = true;
        break;
      }
    }
    if (!moved) break;
    const double gain = next_value - value;
    stalled = gain <= 1e-15 * std::max(1.0, std::abs(value)) ? stalled + 1 : 0;
    prev_v = v;
    prev_r = r;
    v = cand;
    merit(v, value, &grad);
    r = tangent(v, grad);
    if (stalled >= 10) break;
  }
  res.value = value;
  res.grad_norm = r.norm();
  return res;
}

}  // namespace

SolveOutcome solve_ris_sdp(const RisCoeffs& coeffs, const SolverSettings& settings,
                           const std::optional<Eigen::VectorXcd>& warm_start) {
  const Factored f(coeffs);
  const int n = f.size();
  const int users = f.users();
  const int rank = std::min(n, static_cast<int>(std::ceil(std::sqrt(2.0 * n))) + 1);

  // Fixed generator: same inputs, same answer.
  std::mt19937_64 rng(0x9e3779b97f4a7c15ULL);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXcd v(n, rank);
  const double spread = warm_start ? 1e-2 : 1.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < rank; ++j) v(i, j) = spread * cplx(normal(rng), normal(rng));
  if (warm_start) {
    if (warm_start->size() != n - 1) throw std::invalid_argument("solve_ris_sdp: warm start has wrong length");
    v.col(0).head(n - 1) = *warm_start;
    v(n - 1, 0) = 1.0;
  }
  normalize_rows(v);

  Eigen::VectorXd threshold(users);
  for (int k = 0; k < users; ++k) threshold(k) = coeffs.cut_active[static_cast<std::size_t>(k)] ? coeffs.threshold(k) : 0.0;
  Eigen::VectorXd domain_scale = (1.0 + coeffs.offset.array().abs()).matrix();
  Eigen::VectorXd cut_scale = threshold.cwiseMax(1e-12);

  Eigen::VectorXd obj;
  Eigen::VectorXd rate;
  auto slacks = [&](const Eigen::MatrixXcd& x) {
    f.traces(x, obj, rate);
    Eigen::VectorXd s(users + static_cast<Eigen::Index>(f.cuts().size()));
    for (int k = 0; k < users; ++k) s(k) = (1.0 - coeffs.offset(k) + obj(k)) / domain_scale(k);
    for (std::size_t j = 0; j < f.cuts().size(); ++j) {
      const int k = f.cuts()[j];
      s(users + static_cast<Eigen::Index>(j)) = (rate(k) - threshold(k)) / cut_scale(k);
    }
    return s;
  };

  SolveOutcome out;
  int iterations = 0;

  // Phase I: raise the soft minimum of the normalised slacks above zero.
  if (slacks(v).minCoeff() <= 0.0) {
    const double beta = 50.0;
    Merit softmin = [&](const Eigen::MatrixXcd& x, double& value, Eigen::MatrixXcd* grad) {
      const Eigen::VectorXd s = slacks(x);
      const double lo = s.minCoeff();
      const Eigen::VectorXd e = (-beta * (s.array() - lo)).exp().matrix();
      value = lo - std::log(e.sum()) / beta;
      if (grad) {
        const Eigen::VectorXd pi = e / e.sum();
        Eigen::VectorXd w = pi.head(users).cwiseQuotient(domain_scale);
        Eigen::VectorXd omega = Eigen::VectorXd::Zero(users);
        for (std::size_t j = 0; j < f.cuts().size(); ++j) {
          const int k = f.cuts()[j];
          omega(k) = pi(users + static_cast<Eigen::Index>(j)) / cut_scale(k);
        }
        *grad = f.gradient(w, omega);
      }
      return true;
    };
    const AscentResult res =
        ascend(softmin, v, settings.max_iters, 1e-10, [&](const Eigen::MatrixXcd& x) { return slacks(x).minCoeff() > 1e-2; });
    iterations += res.iterations;
    const Eigen::VectorXd s = slacks(v);
    if (s.head(users).minCoeff() <= 0.0)
      throw DomainError("solve_ris_sdp: log domain unreachable");
    if (s.minCoeff() <= 0.0) {
      out.status = SolveStatus::Infeasible;
      out.factor = v;
      out.lifted = v * v.adjoint();
      out.iterations = iterations;
      out.residual = -s.minCoeff();
      return out;
    }
  }

  // Barrier stages.
  const auto cut_count = static_cast<double>(f.cuts().size());
  double t = 1.0;
  Eigen::VectorXd w(users);
  Eigen::VectorXd omega(users);
  auto weights = [&](double tt) {
    for (int k = 0; k < users; ++k) w(k) = tt / ((1.0 - coeffs.offset(k) + obj(k)) * kLn2);
    omega.setZero();
    for (int k : f.cuts()) omega(k) = 1.0 / (rate(k) - threshold(k));
  };
  Merit barrier = [&](const Eigen::MatrixXcd& x, double& value, Eigen::MatrixXcd* grad) {
    f.traces(x, obj, rate);
    value = 0.0;
    for (int k = 0; k < users; ++k) {
      const double d = 1.0 - coeffs.offset(k) + obj(k);
      if (!(d > 0.0)) return false;
      value += t * std::log2(d);
    }
    for (int k : f.cuts()) {
      const double d = rate(k) - threshold(k);
      if (!(d > 0.0)) return false;
      value += std::log(d);
    }
    if (grad) {
      weights(t);
      *grad = f.gradient(w, omega);
    }
    return true;
  };

  const double gap_target = std::max(settings.abs_tol * 1e-1, 1e-12);
  bool certified = false;
  int escapes = 0;
  while (true) {
    const int budget = std::min(std::max(settings.max_iters - iterations, 0), 2000);
    iterations += ascend(barrier, v, budget, 1e-9).iterations;

    // Dual certificate: S = Diag(Re(G Psi)_ii) - G must be PSD.
    f.traces(v, obj, rate);
    weights(1.0);
    const Eigen::MatrixXcd psi = v * v.adjoint();
    Eigen::MatrixXcd g = f.dense_gradient(w, omega / t);
    Eigen::MatrixXcd gp = g * psi;
    Eigen::MatrixXcd s = -g;
    for (int i = 0; i < n; ++i) s(i, i) += std::real(gp(i, i));
    s = 0.5 * (s + s.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(s);
    const double scale = std::max(1.0, g.cwiseAbs().maxCoeff());
    const double lam = eig.eigenvalues()(0);
    const bool last_stage = cut_count == 0.0 || cut_count / t <= gap_target;
    certified = lam >= -1e-5 * scale;
    if (!certified && escapes < 3 && iterations < settings.max_iters) {
      // Saddle of the factored problem: open a new column along the
      // offending eigenvector.
      ++escapes;
      Eigen::MatrixXcd grown(n, v.cols() + 1);
      grown << v, 1e-2 * eig.eigenvectors().col(0);
      v = grown;
      normalize_rows(v);
      continue;
    }
    if (last_stage || iterations >= settings.max_iters) break;
    t *= 10.0;
  }

  out.factor = v;
  out.lifted = v * v.adjoint();
  out.iterations = iterations;
  f.traces(v, obj, rate);
  out.objective = 0.0;
  for (int k = 0; k < users; ++k) out.objective += std::log2(1.0 - coeffs.offset(k) + obj(k));
  double resid = (out.lifted.diagonal().real().array() - 1.0).abs().maxCoeff();
  for (int k : f.cuts()) resid = std::max(resid, threshold(k) - rate(k));
  out.residual = std::max(resid, 0.0);
  if (iterations >= settings.max_iters)
    out.status = SolveStatus::IterLimit;
  else
    out.status = certified && out.residual <= settings.feasibility_tol ? SolveStatus::Optimal : SolveStatus::Inaccurate;
  return out;
}

}  // namespace risfp
