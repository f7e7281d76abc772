#include "polab/objectives.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "polab/errors.hpp"

namespace polab {
namespace {

constexpr double kLog2 = std::numbers::ln2;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void check_ddro_domain(double zt_l) {
  if (zt_l >= kLog2 - kDdroDomainEps) throw DdroDomainError(zt_l);
}

double sigma_prime(double x) {
  const double s = sigmoid(x);
  return s * (1.0 - s);
}

}  // namespace

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double softplus(double x) {
  return (x > 0.0 ? x : 0.0) + std::log1p(std::exp(-std::abs(x)));
}

double loss(const ObjectiveSpec& spec, const LossInputs& in) {
  return std::visit(
      Overloaded{
          [&](const Dpo& o) { return softplus(-o.beta * in.eff_margin()); },
          [&](const TiDpo& o) { return softplus(-o.beta * in.eff_margin()); },
          [&](const Ipo& o) {
            const double d = in.eff_margin() - o.lambda;
            return d * d;
          },
          [&](const RDpo& o) {
            const double dlen = static_cast<double>(in.len_w - in.len_l);
            return softplus(-(o.beta * in.eff_margin() + o.alpha * dlen));
          },
          [&](const SimPo& o) {
            const double m_norm =
                o.beta / in.len_w * in.z_w - o.beta / in.len_l * in.z_l;
            return softplus(-(m_norm - o.gamma));
          },
          [&](const Cpo& o) {
            return softplus(-o.beta * in.margin()) - o.lambda * in.z_w;
          },
          [&](const Rrhf& o) {
            return std::max(0.0, -in.margin()) - o.lambda * in.z_w;
          },
          [&](const SlicHf& o) {
            return std::max(0.0, o.gamma - in.margin()) - o.lambda * in.z_w;
          },
          [&](const Kto& o) {
            return o.lambda_w * sigmoid(-in.zt_w()) + o.lambda_l * sigmoid(in.zt_l());
          },
          [&](const Ddro&) {
            check_ddro_domain(in.zt_l());
            return kLog2 - in.zt_w() + kLog2 - std::log(2.0 - std::exp(in.zt_l()));
          },
          [&](const DilBce&) {
            return softplus(-in.zt_w()) + softplus(in.zt_l());
          },
          [&](const DilUkl&) { return std::exp(in.zt_l()) - in.zt_w(); },
          [&](const DilLsif&) {
            return 0.5 * std::exp(2.0 * in.zt_l()) - std::exp(in.zt_w());
          },
      },
      spec);
}

IncentivePair incentives(const ObjectiveSpec& spec, const LossInputs& in) {
  return std::visit(
      Overloaded{
          [&](const Dpo& o) {
            const double d = o.beta * sigmoid(-o.beta * in.eff_margin());
            return IncentivePair{d, d};
          },
          [&](const TiDpo& o) {
            const double d = o.beta * sigmoid(-o.beta * in.eff_margin());
            return IncentivePair{d, d};
          },
          [&](const Ipo& o) {
            const double d = 2.0 * (o.lambda - in.eff_margin());
            return IncentivePair{d, d};
          },
          [&](const RDpo& o) {
            const double dlen = static_cast<double>(in.len_w - in.len_l);
            const double d = o.beta * sigmoid(-o.beta * in.eff_margin() - o.alpha * dlen);
            return IncentivePair{d, d};
          },
          [&](const SimPo& o) {
            const double m_norm =
                o.beta / in.len_w * in.z_w - o.beta / in.len_l * in.z_l;
            const double s = sigmoid(o.gamma - m_norm);
            return IncentivePair{o.beta / in.len_w * s, o.beta / in.len_l * s};
          },
          [&](const Cpo& o) {
            const double s = o.beta * sigmoid(-o.beta * in.margin());
            return IncentivePair{s + o.lambda, s};
          },
          [&](const Rrhf& o) {
            // Strict indicator: the measure-zero kink takes the inactive branch.
            const double ind = in.margin() < 0.0 ? 1.0 : 0.0;
            return IncentivePair{ind + o.lambda, ind};
          },
          [&](const SlicHf& o) {
            const double ind = in.margin() < o.gamma ? 1.0 : 0.0;
            return IncentivePair{ind + o.lambda, ind};
          },
          [&](const Kto& o) {
            return IncentivePair{o.lambda_w * sigma_prime(-in.zt_w()),
                                 o.lambda_l * sigma_prime(in.zt_l())};
          },
          [&](const Ddro&) {
            check_ddro_domain(in.zt_l());
            const double e = std::exp(in.zt_l());
            return IncentivePair{1.0, e / (2.0 - e)};
          },
          [&](const DilBce&) {
            return IncentivePair{sigmoid(-in.zt_w()), sigmoid(in.zt_l())};
          },
          [&](const DilUkl&) { return IncentivePair{1.0, std::exp(in.zt_l())}; },
          [&](const DilLsif&) {
            return IncentivePair{std::exp(in.zt_w()), std::exp(2.0 * in.zt_l())};
          },
      },
      spec);
}

bool check_entanglement(const ObjectiveSpec& spec) {
  return std::holds_alternative<Dpo>(spec) || std::holds_alternative<TiDpo>(spec) ||
         std::holds_alternative<Ipo>(spec) || std::holds_alternative<RDpo>(spec);
}

bool uses_reference(const ObjectiveSpec& spec) {
  return !(std::holds_alternative<SimPo>(spec) || std::holds_alternative<Cpo>(spec) ||
           std::holds_alternative<Rrhf>(spec) || std::holds_alternative<SlicHf>(spec));
}

bool uses_token_weights(const ObjectiveSpec& spec) {
  return std::holds_alternative<TiDpo>(spec);
}

std::string objective_name(const ObjectiveSpec& spec) {
  return std::visit(Overloaded{[](const Dpo&) { return "dpo"; },
                               [](const TiDpo&) { return "ti_dpo"; },
                               [](const Ipo&) { return "ipo"; },
                               [](const RDpo&) { return "r_dpo"; },
                               [](const SimPo&) { return "simpo"; },
                               [](const Cpo&) { return "cpo"; },
                               [](const Rrhf&) { return "rrhf"; },
                               [](const SlicHf&) { return "slic_hf"; },
                               [](const Kto&) { return "kto"; },
                               [](const Ddro&) { return "ddro"; },
                               [](const DilBce&) { return "dil_bce"; },
                               [](const DilUkl&) { return "dil_ukl"; },
                               [](const DilLsif&) { return "dil_lsif"; }},
                    spec);
}

std::string objective_describe(const ObjectiveSpec& spec) {
  std::ostringstream os;
  os << objective_name(spec);
  std::visit(Overloaded{[&](const Dpo& o) { os << "(beta=" << o.beta << ")"; },
                        [&](const TiDpo& o) { os << "(beta=" << o.beta << ")"; },
                        [&](const Ipo& o) { os << "(lambda=" << o.lambda << ")"; },
                        [&](const RDpo& o) {
                          os << "(beta=" << o.beta << ",alpha=" << o.alpha << ")";
                        },
                        [&](const SimPo& o) {
                          os << "(beta=" << o.beta << ",gamma=" << o.gamma << ")";
                        },
                        [&](const Cpo& o) {
                          os << "(beta=" << o.beta << ",lambda=" << o.lambda << ")";
                        },
                        [&](const Rrhf& o) { os << "(lambda=" << o.lambda << ")"; },
                        [&](const SlicHf& o) {
                          os << "(gamma=" << o.gamma << ",lambda=" << o.lambda << ")";
                        },
                        [&](const Kto& o) {
                          os << "(lambda_w=" << o.lambda_w
                             << ",lambda_l=" << o.lambda_l << ")";
                        },
                        [&](const Ddro&) {}, [&](const DilBce&) {},
                        [&](const DilUkl&) {}, [&](const DilLsif&) {}},
             spec);
  return os.str();
}

void validate(const ObjectiveSpec& spec) {
  const auto positive = [](double v, const char* what) {
    if (!(v > 0.0)) throw DomainError(std::string(what) + " must be positive");
  };
  const auto nonneg = [](double v, const char* what) {
    if (!(v >= 0.0)) throw DomainError(std::string(what) + " must be nonnegative");
  };
  std::visit(Overloaded{[&](const Dpo& o) { positive(o.beta, "dpo beta"); },
                        [&](const TiDpo& o) { positive(o.beta, "ti_dpo beta"); },
                        [&](const Ipo&) {},
                        [&](const RDpo& o) {
                          positive(o.beta, "r_dpo beta");
                          nonneg(o.alpha, "r_dpo alpha");
                        },
                        [&](const SimPo& o) { positive(o.beta, "simpo beta"); },
                        [&](const Cpo& o) {
                          positive(o.beta, "cpo beta");
                          nonneg(o.lambda, "cpo lambda");
                        },
                        [&](const Rrhf& o) { nonneg(o.lambda, "rrhf lambda"); },
                        [&](const SlicHf& o) { nonneg(o.lambda, "slic_hf lambda"); },
                        [&](const Kto& o) {
                          positive(o.lambda_w, "kto lambda_w");
                          positive(o.lambda_l, "kto lambda_l");
                        },
                        [&](const Ddro&) {}, [&](const DilBce&) {},
                        [&](const DilUkl&) {}, [&](const DilLsif&) {}},
             spec);
}

}  // namespace polab
