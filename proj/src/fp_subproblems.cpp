// SPDX-License-Identifier: Apache-2.0
#include "risfp/fp_subproblems.hpp"

#include "risfp/channel.hpp"
#include "risfp/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace risfp {

cplx qt_opt_aux(cplx numerator, double denominator) {
  if (!(denominator > 0.0)) throw DomainError("qt_opt_aux: denominator must be positive");
  return numerator / denominator;
}

double qt_value(cplx aux, cplx numerator, double denominator) {
  return 2.0 * std::real(std::conj(aux) * numerator) - std::norm(aux) * denominator;
}

Eigen::MatrixXcd hermitian_part(const Eigen::MatrixXcd& x) {
  return 0.5 * (x + x.adjoint());
}

// ---------------------------------------------------------------------------
// Beamformer

BeamformerCoeffs build_beamformer_coeffs(const ChannelSet& chs, const Eigen::VectorXcd& psi,
                                         const Eigen::VectorXd& power, const std::vector<int>& order,
                                         const SystemConfig& cfg) {
  const int users = chs.users();
  const int m = chs.antennas();
  const double s2 = cfg.error_variance;
  const double total = power.sum();
  const Eigen::VectorXd after = power_after(power, order);
  const Eigen::MatrixXcd gram = chs.bs_ris.adjoint() * chs.bs_ris;
  const Eigen::MatrixXcd identity = Eigen::MatrixXcd::Identity(m, m);
  const double n = static_cast<double>(chs.elements());

  BeamformerCoeffs c;
  c.noise_power = cfg.noise_power;
  c.eta = cfg.min_sinr();
  for (int k = 0; k < users; ++k) {
    const Eigen::RowVectorXcd g = effective_channel(chs, psi, k);
    const double hk2 = chs.ris_user[static_cast<std::size_t>(k)].squaredNorm();
    Eigen::MatrixXcd z = hermitian_part(s2 * hk2 * identity + s2 * gram + s2 * s2 * n * identity);
    Eigen::RowVectorXcd a = g * std::sqrt(std::max(power(k), 0.0));
    Eigen::MatrixXcd big_a = hermitian_part(g.adjoint() * g * after(k) + z * total);
    Eigen::MatrixXcd b = hermitian_part(a.adjoint() * a - c.eta(k) * big_a);
    c.signal.push_back(std::move(a));
    c.interference.push_back(std::move(big_a));
    c.error_cov.push_back(std::move(z));
    c.min_rate.push_back(std::move(b));
  }
  return c;
}

namespace {

double quad_form(const Eigen::MatrixXcd& a, const Eigen::VectorXcd& f) {
  return std::real(f.dot(a * f));
}

}  // namespace

Eigen::VectorXd beamformer_sinr(const BeamformerCoeffs& coeffs, const Eigen::VectorXcd& beam) {
  Eigen::VectorXd gamma(coeffs.users());
  for (int k = 0; k < coeffs.users(); ++k) {
    const auto ks = static_cast<std::size_t>(k);
    const double num = std::norm((coeffs.signal[ks] * beam).value());
    gamma(k) = num == 0.0 ? 0.0 : num / (coeffs.noise_power + quad_form(coeffs.interference[ks], beam));
  }
  return gamma;
}

Eigen::VectorXcd aux_update_f(const BeamformerCoeffs& coeffs, const Eigen::VectorXcd& beam) {
  Eigen::VectorXcd y(coeffs.users());
  for (int k = 0; k < coeffs.users(); ++k) {
    const auto ks = static_cast<std::size_t>(k);
    y(k) = qt_opt_aux((coeffs.signal[ks] * beam).value(),
                      coeffs.noise_power + quad_form(coeffs.interference[ks], beam));
  }
  return y;
}

Eigen::VectorXd beamformer_qt_sinr(const BeamformerCoeffs& coeffs, const Eigen::VectorXcd& aux,
                                   const Eigen::VectorXcd& beam) {
  Eigen::VectorXd out(coeffs.users());
  for (int k = 0; k < coeffs.users(); ++k) {
    const auto ks = static_cast<std::size_t>(k);
    out(k) = qt_value(aux(k), (coeffs.signal[ks] * beam).value(),
                      coeffs.noise_power + quad_form(coeffs.interference[ks], beam));
  }
  return out;
}

std::vector<LinearCut> sca_linearize_minrate(const BeamformerCoeffs& coeffs,
                                             const Eigen::VectorXcd& expansion) {
  std::vector<LinearCut> cuts;
  cuts.reserve(static_cast<std::size_t>(coeffs.users()));
  for (int k = 0; k < coeffs.users(); ++k) {
    const auto& b = coeffs.min_rate[static_cast<std::size_t>(k)];
    cuts.push_back({2.0 * (b * expansion), quad_form(b, expansion) + coeffs.eta(k) * coeffs.noise_power});
  }
  return cuts;
}

// ---------------------------------------------------------------------------
// RIS phases

RisCoeffs build_ris_coeffs(const ChannelSet& chs, const Eigen::VectorXcd& beam,
                           const Eigen::VectorXd& power, const std::vector<int>& order,
                           const Eigen::VectorXcd& nu, const SystemConfig& cfg, bool min_rate_cuts) {
  const int users = chs.users();
  const int n = chs.elements();
  const Eigen::VectorXd after = power_after(power, order);
  const Eigen::VectorXd r = residual_coeff(chs, beam, cfg);
  const double total = power.sum();
  const Eigen::VectorXcd hf = chs.bs_ris * beam;

  RisCoeffs c;
  c.nu = nu;
  c.after = after;
  c.signal_amp = power.cwiseMax(0.0).cwiseSqrt();
  c.noise_plus_error = (cfg.noise_power + (r * total).array()).matrix();
  c.offset.resize(users);
  c.threshold = Eigen::VectorXd::Zero(users);
  for (int k = 0; k < users; ++k) {
    // u_k = conj(E_k f) = h_k .* conj(H f)
    Eigen::VectorXcd u = chs.ris_user[static_cast<std::size_t>(k)].cwiseProduct(hf.conjugate());
    const double quad = -std::norm(nu(k)) * after(k);
    const cplx cross = nu(k) * c.signal_amp(k);

    Eigen::MatrixXcd obj = Eigen::MatrixXcd::Zero(n + 1, n + 1);
    obj.topLeftCorner(n, n) = quad * (u * u.adjoint());
    obj.topRightCorner(n, 1) = cross * u;
    obj.bottomLeftCorner(1, n) = (cross * u).adjoint();
    Eigen::MatrixXcd rate = Eigen::MatrixXcd::Zero(n + 1, n + 1);
    rate.topLeftCorner(n, n) = u * u.adjoint();

    c.offset(k) = std::norm(nu(k)) * c.noise_plus_error(k);
    const double eta = cfg.min_sinr(k);
    bool active = false;
    if (min_rate_cuts && eta > 0.0) {
      const double margin = power(k) - eta * after(k);
      if (!(margin > 0.0)) throw MinRateDegenerate(k);
      c.threshold(k) = eta * c.noise_plus_error(k) / margin;
      active = true;
    }
    c.cascade.push_back(std::move(u));
    c.quad_weight.push_back(quad);
    c.cross_weight.push_back(cross);
    c.objective.push_back(hermitian_part(obj));
    c.min_rate.push_back(hermitian_part(rate));
    c.cut_active.push_back(active);
  }
  return c;
}

Eigen::VectorXd ris_qt_sinr(const RisCoeffs& coeffs, const Eigen::VectorXcd& psi) {
  Eigen::VectorXd out(coeffs.users());
  for (int k = 0; k < coeffs.users(); ++k) {
    const auto ks = static_cast<std::size_t>(k);
    const cplx gain = std::conj(psi.dot(coeffs.cascade[ks]));  // g_k f
    const double den = coeffs.noise_plus_error(k) + std::norm(gain) * coeffs.after(k);
    out(k) = qt_value(coeffs.nu(k), gain * coeffs.signal_amp(k), den);
  }
  return out;
}

Eigen::VectorXd ris_lifted_qt_sinr(const RisCoeffs& coeffs, const Eigen::VectorXcd& psi) {
  Eigen::VectorXcd lifted(psi.size() + 1);
  lifted << psi, cplx(1.0, 0.0);
  Eigen::VectorXd out(coeffs.users());
  for (int k = 0; k < coeffs.users(); ++k)
    out(k) = std::real(lifted.dot(coeffs.objective[static_cast<std::size_t>(k)] * lifted)) - coeffs.offset(k);
  return out;
}

Eigen::VectorXcd aux_update_psi(const ChannelSet& chs, const Eigen::VectorXcd& beam,
                                const Eigen::VectorXcd& psi, const Eigen::VectorXd& power,
                                const std::vector<int>& order, const SystemConfig& cfg) {
  const Eigen::VectorXd after = power_after(power, order);
  const Eigen::VectorXd r = residual_coeff(chs, beam, cfg);
  const double total = power.sum();
  Eigen::VectorXcd nu(chs.users());
  for (int k = 0; k < chs.users(); ++k) {
    const cplx gain = effective_gain(chs, psi, beam, k);
    const double den = cfg.noise_power + std::norm(gain) * after(k) + r(k) * total;
    nu(k) = qt_opt_aux(gain * std::sqrt(std::max(power(k), 0.0)), den);
  }
  return nu;
}

// ---------------------------------------------------------------------------
// Power allocation

PaCoeffs build_pa_coeffs(const ChannelSet& chs, const Eigen::VectorXcd& beam,
                         const Eigen::VectorXcd& psi, const std::vector<int>& order,
                         const SystemConfig& cfg) {
  const Eigen::VectorXd r = residual_coeff(chs, beam, cfg);
  PaCoeffs c;
  c.noise.resize(chs.users());
  c.error.resize(chs.users());
  for (int k = 0; k < chs.users(); ++k) {
    const double gain2 = std::norm(effective_gain(chs, psi, beam, k));
    if (!(gain2 > 0.0)) throw ZeroGainChannel(k);
    c.noise(k) = cfg.noise_power / gain2;
    c.error(k) = r(k) / gain2;
  }
  c.eta = cfg.min_sinr();
  c.power_budget = cfg.power_budget;
  c.circuit_power = circuit_power(cfg, Architecture::analog_ris);
  c.order = order;
  return c;
}

Eigen::VectorXd pa_sinr(const PaCoeffs& coeffs, const Eigen::VectorXd& power) {
  const Eigen::VectorXd after = power_after(power, coeffs.order);
  const double total = power.sum();
  Eigen::VectorXd gamma(coeffs.users());
  for (int k = 0; k < coeffs.users(); ++k)
    gamma(k) = power(k) == 0.0 ? 0.0
                               : power(k) / (coeffs.noise(k) + after(k) + coeffs.error(k) * total);
  return gamma;
}

Eigen::VectorXd aux_update_p(const PaCoeffs& coeffs, const Eigen::VectorXd& power, PowerAuxForm form) {
  const Eigen::VectorXd after = power_after(power, coeffs.order);
  const double total = form == PowerAuxForm::consistent ? power.sum() : 1.0;
  Eigen::VectorXd x(coeffs.users());
  for (int k = 0; k < coeffs.users(); ++k) {
    const double den = coeffs.noise(k) + after(k) + coeffs.error(k) * total;
    x(k) = std::real(qt_opt_aux(std::sqrt(std::max(power(k), 0.0)), den));
  }
  return x;
}

Eigen::VectorXd pa_qt_sinr(const PaCoeffs& coeffs, const Eigen::VectorXd& power,
                           const Eigen::VectorXd& aux) {
  const Eigen::VectorXd after = power_after(power, coeffs.order);
  const double total = power.sum();
  Eigen::VectorXd out(coeffs.users());
  for (int k = 0; k < coeffs.users(); ++k)
    out(k) = 2.0 * aux(k) * std::sqrt(std::max(power(k), 0.0)) -
             aux(k) * aux(k) * (coeffs.noise(k) + after(k) + coeffs.error(k) * total);
  return out;
}

double pa_qt_rate_sum(const PaCoeffs& coeffs, const Eigen::VectorXd& power, const Eigen::VectorXd& aux) {
  const Eigen::VectorXd g = pa_qt_sinr(coeffs, power, aux);
  double s = 0.0;
  for (Eigen::Index k = 0; k < g.size(); ++k) s += std::log2(std::max(1.0 + g(k), 1e-12));
  return s;
}

double aux_update_z(const PaCoeffs& coeffs, const Eigen::VectorXd& power, const Eigen::VectorXd& aux) {
  const double s = pa_qt_rate_sum(coeffs, power, aux);
  if (s < 0.0) throw DomainError("aux_update_z: negative rate sum");
  const double den = power.sum() + coeffs.circuit_power;
  if (!(den > 0.0)) throw DomainError("aux_update_z: non-positive total power");
  return std::sqrt(s) / den;
}

double ee_qt_objective(const PaCoeffs& coeffs, const Eigen::VectorXd& power,
                       const Eigen::VectorXd& aux, double z) {
  const double s = std::max(pa_qt_rate_sum(coeffs, power, aux), 0.0);
  return 2.0 * z * std::sqrt(s) - z * z * (power.sum() + coeffs.circuit_power);
}

}  // namespace risfp
