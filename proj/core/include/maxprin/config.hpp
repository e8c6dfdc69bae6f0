#pragma once

// Experiment configs in a line-oriented format:
//
//   # comment
//   [section]
//   key = value
//
// Values are numbers, words, comma-separated number lists, or `auto` for fields whose
// default depends on other fields. Every key belongs to a fixed section; unknown sections
// and keys are rejected. See README.md for the full key table.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "maxprin/discrete_operator.hpp"
#include "maxprin/geometry.hpp"
#include "maxprin/symmetry_lab.hpp"

namespace maxprin {

enum class Command { Spectrum, Barrier, Parabolic, Exhaust, MpCheck, Abp, Symmetry };

std::string to_string(Command command);
/// Throws ValidationError("experiment.command") for unknown names.
Command parse_command(std::string_view name);

/// Verdicts a command can be asked to expect; the first is the default hypothesis.
std::vector<std::string> expect_values(Command command);

enum class DomainKind { HalfStrip, Strip, Sector, CapStrip, PlaneRadial, SpaceRadial, Disk };

std::string to_string(DomainKind kind);

enum class ProfileFamily { Constant, Linear, AffinePower, ExpDecay, ShiftedTanh };

std::string to_string(ProfileFamily family);

enum class NonlinearityKind { Zero, Linear, AllenCahn };

std::string to_string(NonlinearityKind kind);

struct ExperimentSection {
  std::optional<Command> command;
  std::optional<std::string> expect;  // hypothesized verdict; auto = the command's default
  std::uint64_t seed = 1;
  bool operator==(const ExperimentSection&) const = default;
};

struct ProfileSection {
  std::optional<ProfileFamily> family;  // auto = implied by the domain kind
  std::optional<double> param;          // auto = 1 (a), 1/3 (beta) or unused
  bool operator==(const ProfileSection&) const = default;
};

struct DomainSection {
  std::optional<DomainKind> kind;  // required
  std::optional<double> theta;     // arc angle or cap polar angle; auto = pi or pi/2
  std::optional<double> r_min;     // auto = 0 for half_strip and disk, 1 otherwise
  std::optional<double> r_max;     // auto = 1 for disk, inf otherwise
  bool operator==(const DomainSection&) const = default;
};

struct OperatorSection {
  double a = 1.0;          // constant diffusion
  double c = 0.0;          // constant zero-order term in L = Delta_eta + c
  double eta_slope = 0.0;  // eta = eta_slope * r
  bool operator==(const OperatorSection&) const = default;
};

struct SpectrumSection {
  std::vector<int> n_grid{128, 256, 512};
  bool operator==(const SpectrumSection&) const = default;
};

struct BarrierSection {
  std::optional<double> lambda1;  // auto = lambda1 of the fiber
  double window_start = 1.0;
  double window_width = 20.0;
  int classify_samples = 64;
  std::optional<double> tail_length;  // auto = up to 1e4, halved while sigma < 1e-200 at the end
  int tail_samples = 2000;
  std::optional<double> beta;  // declared Case3 exponent
  bool operator==(const BarrierSection&) const = default;
};

struct ExhaustSection {
  std::vector<double> R_list{4.0, 8.0, 16.0};
  double density = 16.0;
  int xi_intervals = 0;
  std::optional<double> margin;
  bool operator==(const ExhaustSection&) const = default;
};

struct ParabolicSection {
  std::vector<double> R_list{8.0, 20.0, 50.0, 100.0};
  double density = 32.0;
  int xi_intervals = 0;
  std::optional<double> probe_r;   // auto = r_min + 1
  std::optional<double> probe_xi;  // auto = middle of the fiber
  bool operator==(const ParabolicSection&) const = default;
};

struct MpCheckSection {
  std::vector<double> R_list{4.0, 8.0, 16.0};
  double density = 16.0;
  int xi_intervals = 0;
  int trials = 100;
  double shift = 0.0;  // added to c for the counterexample search
  bool operator==(const MpCheckSection&) const = default;
};

struct AbpSection {
  int n = 2;
  double r_h = 1.0;
  double vol_omega = 1.0;
  std::optional<double> vol_omega_r;  // auto = vol_omega
  double theta = 0.5;
  double p = 1.0;
  double C1 = 1.0;
  double rhs = -1.0;
  std::optional<double> R;  // truncation for the empirical check; auto = r_max
  double density = 64.0;
  bool operator==(const AbpSection&) const = default;
};

struct SymmetrySection {
  NonlinearityKind nonlinearity = NonlinearityKind::AllenCahn;
  double r1 = 1.0;
  double r2 = 2.0;
  double c1 = 0.5;
  double c2 = 0.5;
  int r_intervals = 256;
  int xi_nodes = 16;
  double phi_slope = 0.0;        // Phi = phi_slope * r
  double gamma_amplitude = 0.0;  // Gamma = gamma_amplitude * cos xi
  double perturbation = 0.0;     // outer data c2 + perturbation * sin xi
  int quadrature_n = 1024;
  bool operator==(const SymmetrySection&) const = default;
};

struct ExperimentConfig {
  ExperimentSection experiment;
  ProfileSection profile;
  DomainSection domain;
  OperatorSection op;
  SpectrumSection spectrum;
  BarrierSection barrier;
  ExhaustSection exhaust;
  ParabolicSection parabolic;
  MpCheckSection mp_check;
  AbpSection abp;
  SymmetrySection symmetry;
  bool operator==(const ExperimentConfig&) const = default;
};

/// Parses and validates. Throws ParseError ("line N: ...") for syntax, unknown sections or
/// keys and malformed values; ValidationError naming the field ("domain.kind") otherwise.
ExperimentConfig parse_config(std::string_view text);

/// Range and consistency checks; throws ValidationError naming the first bad field.
/// Command sections are checked only for experiment.command (all of them when unset).
void validate(const ExperimentConfig& config);

/// Every field of every section, in a fixed order, with shortest round-trip numbers.
std::string serialize(const ExperimentConfig& config);

/// Resolved model objects.
WarpProfile make_profile(const ExperimentConfig& config);
StripDomain make_domain(const ExperimentConfig& config);
OperatorSpec make_operator_spec(const ExperimentConfig& config);

/// Shortest decimal that parses back to the same double; "inf" and "-inf" for infinities.
std::string format_number(double value);

}  // namespace maxprin
