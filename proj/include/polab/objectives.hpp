#pragma once

/**
 * The objective zoo: loss values and incentive coefficients (d_w, d_l)
 * for margin-based and density-ratio-based preference objectives, all
 * evaluated on the sequence log-prob scalars.
 *
 * Conventions: z_w, z_l are the policy log-probs (token-weighted for
 * ti_dpo); zt = z - z_ref; m = z_w - z_l; mt = m - m_ref. Incentives are
 * d_w = -dL/dz_w and d_l = +dL/dz_l, so the negative gradient decomposes
 * as d_w * s_w - d_l * s_l.
 */

#include <string>
#include <variant>

namespace polab {

struct Dpo {
  double beta = 1.0;
};
struct TiDpo {
  double beta = 1.0;
};
struct Ipo {
  double lambda = 0.5;
};
struct RDpo {
  double beta = 1.0;
  double alpha = 0.05;
};
struct SimPo {
  double beta = 2.0;
  double gamma = 0.3;
};
struct Cpo {
  double beta = 1.0;
  double lambda = 0.1;
};
struct Rrhf {
  double lambda = 0.05;
};
struct SlicHf {
  double gamma = 1.0;
  double lambda = 0.05;
};
struct Kto {
  double lambda_w = 1.0;
  double lambda_l = 1.0;
};
struct Ddro {};
struct DilBce {};
struct DilUkl {};
struct DilLsif {};

using ObjectiveSpec = std::variant<Dpo, TiDpo, Ipo, RDpo, SimPo, Cpo, Rrhf,
                                   SlicHf, Kto, Ddro, DilBce, DilUkl, DilLsif>;

struct LossInputs {
  double z_w = 0.0;
  double z_l = 0.0;
  double z_w_ref = 0.0;
  double z_l_ref = 0.0;
  int len_w = 1;
  int len_l = 1;

  double margin() const { return z_w - z_l; }
  double ref_margin() const { return z_w_ref - z_l_ref; }
  double eff_margin() const { return margin() - ref_margin(); }
  double zt_w() const { return z_w - z_w_ref; }
  double zt_l() const { return z_l - z_l_ref; }
};

struct IncentivePair {
  double d_w = 0.0;
  double d_l = 0.0;
};

// Guard width at the DDRO domain edge zt_l < log 2.
inline constexpr double kDdroDomainEps = 1e-9;

// Exact scalar loss. Throws DdroDomainError when zt_l >= log2 - kDdroDomainEps.
double loss(const ObjectiveSpec& spec, const LossInputs& in);

// The incentive row evaluated at the inputs. Symmetric objectives compute
// the shared coefficient once, so d_w == d_l bitwise.
IncentivePair incentives(const ObjectiveSpec& spec, const LossInputs& in);

// True iff the objective has symmetric incentives by construction
// (dpo, ti_dpo, ipo, r_dpo).
bool check_entanglement(const ObjectiveSpec& spec);

// True iff the objective reads the reference log-probs at all.
bool uses_reference(const ObjectiveSpec& spec);

// True iff the objective consumes per-token weights (ti_dpo).
bool uses_token_weights(const ObjectiveSpec& spec);

// Config / CSV identifiers: dpo, ti_dpo, ipo, r_dpo, simpo, cpo, rrhf,
// slic_hf, kto, ddro, dil_bce, dil_ukl, dil_lsif.
std::string objective_name(const ObjectiveSpec& spec);

// One-line description with hyperparameters, for summaries and fingerprints.
std::string objective_describe(const ObjectiveSpec& spec);

// Throws DomainError on hyperparameters outside their annotated ranges.
void validate(const ObjectiveSpec& spec);

// Numerically stable helpers shared by the closed forms.
double sigmoid(double x);
double softplus(double x);  // log(1 + e^x)

}  // namespace polab
