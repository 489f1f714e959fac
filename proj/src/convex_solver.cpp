// SPDX-License-Identifier: Apache-2.0
#include "risfp/convex_solver.hpp"

#include "risfp/barrier.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace risfp {

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Inaccurate: return "inaccurate";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::IterLimit: return "iter-limit";
  }
  return "unknown";
}

namespace {

constexpr double kLn2 = std::numbers::ln2;

BarrierOptions barrier_options(const SolverSettings& s) {
  BarrierOptions o;
  o.gap_tol = std::min(s.abs_tol, s.rel_tol) * 1e-2;
  o.max_newton = s.max_iters;
  return o;
}

// Hermitian A -> real symmetric [[Ar, -Ai], [Ai, Ar]] so f^H A f = z^T Q z.
Eigen::MatrixXd realify(const Eigen::MatrixXcd& a) {
  const Eigen::Index m = a.rows();
  Eigen::MatrixXd q(2 * m, 2 * m);
  q.topLeftCorner(m, m) = a.real();
  q.topRightCorner(m, m) = -a.imag();
  q.bottomLeftCorner(m, m) = a.imag();
  q.bottomRightCorner(m, m) = a.real();
  return 0.5 * (q + q.transpose());
}

// Re{c f} = l^T z
Eigen::VectorXd realify_row(const Eigen::RowVectorXcd& c) {
  Eigen::VectorXd l(2 * c.size());
  l << c.real().transpose(), -c.imag().transpose();
  return l;
}

Eigen::VectorXd stack(const Eigen::VectorXcd& f) {
  Eigen::VectorXd z(2 * f.size());
  z << f.real(), f.imag();
  return z;
}

Eigen::VectorXcd unstack(const Eigen::VectorXd& z) {
  const Eigen::Index m = z.size() / 2;
  Eigen::VectorXcd f(m);
  for (Eigen::Index i = 0; i < m; ++i) f(i) = cplx(z(i), z(m + i));
  return f;
}

double cut_residual(const std::vector<LinearCut>& cuts, const Eigen::VectorXcd& f) {
  double worst = 0.0;
  for (const auto& c : cuts) worst = std::max(worst, c.rhs - std::real(c.normal.dot(f)));
  return worst;
}

double beam_residual(const std::vector<LinearCut>& cuts, const Eigen::VectorXcd& f) {
  double worst = std::max(0.0, f.squaredNorm() - 1.0);
  worst = std::max(worst, f.cwiseAbs().maxCoeff() - 2.0);
  return std::max(worst, cut_residual(cuts, f));
}

}  // namespace

// ---------------------------------------------------------------------------
// Beamformer

double beamformer_objective(const BeamformerCoeffs& coeffs, const Eigen::VectorXcd& aux,
                            const Eigen::VectorXcd& beam) {
  const Eigen::VectorXd g = beamformer_qt_sinr(coeffs, aux, beam);
  double s = 0.0;
  for (Eigen::Index k = 0; k < g.size(); ++k) s += std::log2(1.0 + g(k));
  return s;
}

SolveOutcome solve_beamformer(const BeamformerCoeffs& coeffs, const Eigen::VectorXcd& aux,
                              const std::vector<LinearCut>& cuts, const Eigen::VectorXcd& expansion,
                              const SolverSettings& settings) {
  const int users = coeffs.users();
  const int m = static_cast<int>(expansion.size());
  const int dim = 2 * m;

  // Gamma_k(z) = 2 l_k^T z - w_k (sigma^2 + z^T Q_k z)
  std::vector<Eigen::VectorXd> lin;
  std::vector<Eigen::MatrixXd> quad;
  std::vector<double> weight;
  for (int k = 0; k < users; ++k) {
    const auto ks = static_cast<std::size_t>(k);
    lin.push_back(realify_row(std::conj(aux(k)) * coeffs.signal[ks]));
    quad.push_back(realify(coeffs.interference[ks]));
    weight.push_back(std::norm(aux(k)));
  }
  const double s2 = coeffs.noise_power;
  auto qt = [&, s2](int k, const Eigen::VectorXd& z, Eigen::VectorXd* g, Eigen::MatrixXd* h) {
    const auto ks = static_cast<std::size_t>(k);
    const Eigen::VectorXd qz = quad[ks] * z;
    if (g) *g = 2.0 * lin[ks] - 2.0 * weight[ks] * qz;
    if (h) *h = -2.0 * weight[ks] * quad[ks];
    return 2.0 * lin[ks].dot(z) - weight[ks] * (s2 + z.dot(qz));
  };

  BarrierProblem prob;
  prob.dim = dim;
  prob.objective = [&, users, dim](const Eigen::VectorXd& z, double& v, Eigen::VectorXd* g,
                                   Eigen::MatrixXd* h) {
    v = 0.0;
    Eigen::VectorXd gk(dim);
    Eigen::MatrixXd hk(dim, dim);
    for (int k = 0; k < users; ++k) {
      const double val = 1.0 + qt(k, z, g ? &gk : nullptr, h ? &hk : nullptr);
      if (!(val > 0.0)) return false;
      v += std::log(val) / kLn2;
      if (g) *g += gk / (val * kLn2);
      if (h) {
        *h += hk / (val * kLn2);
        h->noalias() -= gk * gk.transpose() / (val * val * kLn2);
      }
    }
    return true;
  };
  // Log domain of each term, so phase I lands inside it.
  for (int k = 0; k < users; ++k) {
    prob.constraints.push_back([&, k](const Eigen::VectorXd& z, double& v, Eigen::VectorXd* g,
                                      Eigen::MatrixXd* h) {
      v = 1.0 + qt(k, z, g, h);
      return true;
    });
  }
  prob.constraints.push_back([](const Eigen::VectorXd& z, double& v, Eigen::VectorXd* g,
                                Eigen::MatrixXd* h) {
    v = 1.0 - z.squaredNorm();
    if (g) *g = -2.0 * z;
    if (h) h->diagonal().setConstant(-2.0);
    return true;
  });
  for (int i = 0; i < m; ++i) {
    prob.constraints.push_back([i, m](const Eigen::VectorXd& z, double& v, Eigen::VectorXd* g,
                                      Eigen::MatrixXd* h) {
      v = 4.0 - z(i) * z(i) - z(m + i) * z(m + i);
      if (g) {
        (*g)(i) = -2.0 * z(i);
        (*g)(m + i) = -2.0 * z(m + i);
      }
      if (h) {
        (*h)(i, i) = -2.0;
        (*h)(m + i, m + i) = -2.0;
      }
      return true;
    });
  }
  // Re{n^H f} >= rhs  <=>  -[Re n; Im n]^T z <= -rhs
  prob.lin_a.resize(static_cast<Eigen::Index>(cuts.size()), dim);
  prob.lin_b.resize(static_cast<Eigen::Index>(cuts.size()));
  for (std::size_t c = 0; c < cuts.size(); ++c) {
    const auto row = static_cast<Eigen::Index>(c);
    prob.lin_a.row(row) << -cuts[c].normal.real().transpose(), -cuts[c].normal.imag().transpose();
    prob.lin_b(row) = -cuts[c].rhs;
  }

  SolveOutcome out;
  const BarrierOptions opts = barrier_options(settings);
  Eigen::VectorXd start = stack(expansion);
  if (start.norm() >= 1.0) start *= (1.0 - 1e-6) / start.norm();
  const auto interior = barrier_find_interior(prob, start, opts);
  if (!interior) {
    out.status = SolveStatus::Infeasible;
    out.beam = expansion;
    out.residual = beam_residual(cuts, expansion);
    return out;
  }
  const BarrierResult res = barrier_maximize(prob, *interior, opts);
  out.iterations = res.newton_steps;
  out.beam = unstack(res.z);
  const double norm = out.beam.norm();
  if (norm > 0.0 && norm < 1.0) {
    const Eigen::VectorXcd sphere = out.beam / norm;
    if (cut_residual(cuts, sphere) <= 0.0 && sphere.cwiseAbs().maxCoeff() <= 2.0 &&
        std::isfinite(beamformer_objective(coeffs, aux, sphere))) {
      out.beam = sphere;
      out.rescaled = true;
    }
  }
  out.objective = beamformer_objective(coeffs, aux, out.beam);
  out.residual = beam_residual(cuts, out.beam);
  out.status = res.converged ? SolveStatus::Optimal : SolveStatus::IterLimit;
  if (out.residual > settings.feasibility_tol) out.status = SolveStatus::Inaccurate;
  return out;
}

// ---------------------------------------------------------------------------
// Power allocation

namespace {

// Strictly-after indicator: U(k, i) = 1 if user i is decoded after user k.
Eigen::MatrixXd after_matrix(const std::vector<int>& order) {
  const auto k = static_cast<Eigen::Index>(order.size());
  Eigen::MatrixXd u = Eigen::MatrixXd::Zero(k, k);
  for (std::size_t a = 0; a < order.size(); ++a)
    for (std::size_t b = a + 1; b < order.size(); ++b) u(order[a], order[b]) = 1.0;
  return u;
}

// B = diag(eta) (U + b 1^T); min-rate cuts read (I - B) p >= eta .* a.
Eigen::MatrixXd coupling(const PaCoeffs& c) {
  const Eigen::Index k = c.users();
  Eigen::MatrixXd b = after_matrix(c.order) + c.error * Eigen::RowVectorXd::Ones(k);
  return c.eta.asDiagonal() * b;
}

struct PaInterior {
  Eigen::VectorXd min_power;
  Eigen::VectorXd interior;
};

std::optional<PaInterior> pa_interior(const PaCoeffs& c) {
  const Eigen::Index k = c.users();
  const Eigen::MatrixXd system = Eigen::MatrixXd::Identity(k, k) - coupling(c);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(system);
  if (!lu.isInvertible()) return std::nullopt;
  const Eigen::VectorXd pmin = lu.solve(c.eta.cwiseProduct(c.noise));
  const Eigen::VectorXd dir = lu.solve(Eigen::VectorXd::Ones(k));
  if ((pmin.array() < 0.0).any() || (dir.array() <= 0.0).any()) return std::nullopt;
  const double spare = c.power_budget - pmin.sum();
  if (spare < -1e-12 * c.power_budget) return std::nullopt;
  PaInterior r;
  r.min_power = pmin;
  r.interior = pmin + (0.5 * std::max(spare, 0.0) / dir.sum()) * dir;
  return r;
}

BarrierProblem pa_feasible_set(const PaCoeffs& c) {
  const Eigen::Index k = c.users();
  BarrierProblem prob;
  prob.dim = static_cast<int>(k);
  const Eigen::MatrixXd b = coupling(c);
  std::vector<Eigen::Index> rated;
  for (Eigen::Index i = 0; i < k; ++i)
    if (c.eta(i) > 0.0) rated.push_back(i);
  const auto rows = static_cast<Eigen::Index>(k + 1 + static_cast<Eigen::Index>(rated.size()));
  prob.lin_a = Eigen::MatrixXd::Zero(rows, k);
  prob.lin_b = Eigen::VectorXd::Zero(rows);
  prob.lin_a.topRows(k) = -Eigen::MatrixXd::Identity(k, k);
  prob.lin_a.row(k).setOnes();
  prob.lin_b(k) = c.power_budget;
  for (std::size_t r = 0; r < rated.size(); ++r) {
    const Eigen::Index i = rated[r];
    const Eigen::Index row = k + 1 + static_cast<Eigen::Index>(r);
    prob.lin_a.row(row) = b.row(i);
    prob.lin_a(row, i) -= 1.0;
    prob.lin_b(row) = -c.eta(i) * c.noise(i);
  }
  return prob;
}

// Gamma_bar_k(p) with gradient / Hessian.
double pa_term(const PaCoeffs& c, const Eigen::MatrixXd& after, const Eigen::VectorXd& x, Eigen::Index k,
               const Eigen::VectorXd& p, Eigen::VectorXd* g, Eigen::MatrixXd* h) {
  const double root = std::sqrt(p(k));
  const Eigen::VectorXd lin = after.row(k).transpose() + c.error(k) * Eigen::VectorXd::Ones(p.size());
  if (g) {
    *g = -x(k) * x(k) * lin;
    (*g)(k) += x(k) / root;
  }
  if (h) {
    h->setZero();
    (*h)(k, k) = -0.5 * x(k) / (root * p(k));
  }
  return 2.0 * x(k) * root - x(k) * x(k) * (c.noise(k) + lin.dot(p));
}

bool degenerate_objective(const Eigen::VectorXd& aux) { return aux.cwiseAbs().maxCoeff() == 0.0; }

SolveOutcome min_power_outcome(const PaCoeffs& c, const Eigen::VectorXd& pmin) {
  SolveOutcome out;
  out.status = SolveStatus::Optimal;
  out.power = pmin;
  out.residual = pa_residual(c, pmin);
  return out;
}

}  // namespace

std::optional<Eigen::VectorXd> pa_min_power(const PaCoeffs& coeffs) {
  const auto r = pa_interior(coeffs);
  if (!r) return std::nullopt;
  return r->min_power;
}

double pa_residual(const PaCoeffs& coeffs, const Eigen::VectorXd& power) {
  double worst = std::max(0.0, -power.minCoeff());
  worst = std::max(worst, power.sum() - coeffs.power_budget);
  const Eigen::VectorXd cut = coupling(coeffs) * power + coeffs.eta.cwiseProduct(coeffs.noise) - power;
  for (Eigen::Index k = 0; k < power.size(); ++k)
    if (coeffs.eta(k) > 0.0) worst = std::max(worst, cut(k));
  return worst;
}

SolveOutcome solve_pa_sr(const PaCoeffs& coeffs, const Eigen::VectorXd& aux, const SolverSettings& settings) {
  const auto start = pa_interior(coeffs);
  if (!start) {
    SolveOutcome out;
    out.status = SolveStatus::Infeasible;
    return out;
  }
  if (degenerate_objective(aux)) return min_power_outcome(coeffs, start->min_power);

  const Eigen::Index k = coeffs.users();
  const Eigen::MatrixXd after = after_matrix(coeffs.order);
  BarrierProblem prob = pa_feasible_set(coeffs);
  prob.objective = [&](const Eigen::VectorXd& p, double& v, Eigen::VectorXd* g, Eigen::MatrixXd* h) {
    if ((p.array() <= 0.0).any()) return false;
    v = 0.0;
    Eigen::VectorXd gk(k);
    Eigen::MatrixXd hk(k, k);
    for (Eigen::Index i = 0; i < k; ++i) {
      const double val = 1.0 + pa_term(coeffs, after, aux, i, p, g ? &gk : nullptr, h ? &hk : nullptr);
      if (!(val > 0.0)) return false;
      v += std::log(val) / kLn2;
      if (g) *g += gk / (val * kLn2);
      if (h) {
        *h += hk / (val * kLn2);
        h->noalias() -= gk * gk.transpose() / (val * val * kLn2);
      }
    }
    return true;
  };
  for (Eigen::Index i = 0; i < k; ++i) {
    prob.constraints.push_back([&, i](const Eigen::VectorXd& p, double& v, Eigen::VectorXd* g,
                                      Eigen::MatrixXd* h) {
      if ((p.array() <= 0.0).any()) return false;
      v = 1.0 + pa_term(coeffs, after, aux, i, p, g, h);
      return true;
    });
  }

  SolveOutcome out;
  const BarrierOptions opts = barrier_options(settings);
  const auto interior = barrier_find_interior(prob, start->interior, opts);
  if (!interior) {
    // Feasible set non-empty but the log domain is not reachable.
    out = min_power_outcome(coeffs, start->min_power);
    out.objective = pa_qt_rate_sum(coeffs, out.power, aux);
    return out;
  }
  const BarrierResult res = barrier_maximize(prob, *interior, opts);
  out.power = res.z;
  out.iterations = res.newton_steps;
  out.objective = pa_qt_rate_sum(coeffs, out.power, aux);
  out.residual = pa_residual(coeffs, out.power);
  out.status = res.converged ? SolveStatus::Optimal : SolveStatus::IterLimit;
  if (out.residual > settings.feasibility_tol) out.status = SolveStatus::Inaccurate;
  return out;
}

SolveOutcome solve_pa_ee(const PaCoeffs& coeffs, const Eigen::VectorXd& aux, double z,
                         const SolverSettings& settings) {
  const auto start = pa_interior(coeffs);
  if (!start) {
    SolveOutcome out;
    out.status = SolveStatus::Infeasible;
    return out;
  }
  if (z == 0.0 || degenerate_objective(aux)) {
    SolveOutcome out = min_power_outcome(coeffs, start->min_power);
    out.objective = ee_qt_objective(coeffs, out.power, aux, z);
    return out;
  }
  // A point with a positive QT rate sum seeds the sqrt domain.
  const SolveOutcome sr = solve_pa_sr(coeffs, aux, settings);
  if (!sr.ok() || !(sr.objective > 1e-12)) {
    SolveOutcome out = min_power_outcome(coeffs, start->min_power);
    out.objective = ee_qt_objective(coeffs, out.power, aux, z);
    return out;
  }

  const Eigen::Index k = coeffs.users();
  const Eigen::MatrixXd after = after_matrix(coeffs.order);
  BarrierProblem prob = pa_feasible_set(coeffs);
  prob.objective = [&, z](const Eigen::VectorXd& p, double& v, Eigen::VectorXd* g, Eigen::MatrixXd* h) {
    if ((p.array() <= 0.0).any()) return false;
    double s = 0.0;
    Eigen::VectorXd gs = Eigen::VectorXd::Zero(k);
    Eigen::MatrixXd hs = Eigen::MatrixXd::Zero(k, k);
    Eigen::VectorXd gk(k);
    Eigen::MatrixXd hk(k, k);
    for (Eigen::Index i = 0; i < k; ++i) {
      const double val = 1.0 + pa_term(coeffs, after, aux, i, p, g ? &gk : nullptr, h ? &hk : nullptr);
      if (!(val > 0.0)) return false;
      s += std::log(val) / kLn2;
      if (g) gs += gk / (val * kLn2);
      if (h) hs += hk / (val * kLn2) - gk * gk.transpose() / (val * val * kLn2);
    }
    if (!(s > 0.0)) return false;
    const double root = std::sqrt(s);
    v = 2.0 * z * root - z * z * (p.sum() + coeffs.circuit_power);
    if (g) *g = z * gs / root - z * z * Eigen::VectorXd::Ones(k);
    if (h) *h = z * hs / root - 0.5 * z * gs * gs.transpose() / (root * s);
    return true;
  };
  for (Eigen::Index i = 0; i < k; ++i) {
    prob.constraints.push_back([&, i](const Eigen::VectorXd& p, double& v, Eigen::VectorXd* g,
                                      Eigen::MatrixXd* h) {
      if ((p.array() <= 0.0).any()) return false;
      v = 1.0 + pa_term(coeffs, after, aux, i, p, g, h);
      return true;
    });
  }

  SolveOutcome out;
  if (!strictly_feasible(prob, sr.power)) {
    out = min_power_outcome(coeffs, start->min_power);
    out.objective = ee_qt_objective(coeffs, out.power, aux, z);
    return out;
  }
  const BarrierResult res = barrier_maximize(prob, sr.power, barrier_options(settings));
  out.power = res.z;
  out.iterations = res.newton_steps + sr.iterations;
  out.objective = ee_qt_objective(coeffs, out.power, aux, z);
  out.residual = pa_residual(coeffs, out.power);
  out.status = res.converged ? SolveStatus::Optimal : SolveStatus::IterLimit;
  if (out.residual > settings.feasibility_tol) out.status = SolveStatus::Inaccurate;
  return out;
}

}  // namespace risfp
