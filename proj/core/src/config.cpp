#include "maxprin/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "maxprin/error.hpp"

namespace maxprin {

namespace {

constexpr double kPi = std::numbers::pi;

template <typename E>
struct Names {
  E value;
  std::string_view name;
};

constexpr Names<Command> kCommands[] = {
    {Command::Spectrum, "spectrum"}, {Command::Barrier, "barrier"},
    {Command::Parabolic, "parabolic"}, {Command::Exhaust, "exhaust"},
    {Command::MpCheck, "mp-check"},  {Command::Abp, "abp"},
    {Command::Symmetry, "symmetry"}};

constexpr Names<DomainKind> kDomains[] = {
    {DomainKind::HalfStrip, "half_strip"},     {DomainKind::Strip, "strip"},
    {DomainKind::Sector, "sector"},            {DomainKind::CapStrip, "cap_strip"},
    {DomainKind::PlaneRadial, "plane_radial"}, {DomainKind::SpaceRadial, "space_radial"},
    {DomainKind::Disk, "disk"}};

constexpr Names<ProfileFamily> kFamilies[] = {
    {ProfileFamily::Constant, "constant"},        {ProfileFamily::Linear, "linear"},
    {ProfileFamily::AffinePower, "affine_power"}, {ProfileFamily::ExpDecay, "exp_decay"},
    {ProfileFamily::ShiftedTanh, "shifted_tanh"}};

constexpr Names<NonlinearityKind> kNonlinearities[] = {{NonlinearityKind::Zero, "zero"},
                                                       {NonlinearityKind::Linear, "linear"},
                                                       {NonlinearityKind::AllenCahn, "allen_cahn"}};

template <typename E, std::size_t N>
std::string name_of(const Names<E> (&table)[N], E value) {
  for (const auto& entry : table)
    if (entry.value == value) return std::string(entry.name);
  return "?";
}

template <typename E, std::size_t N>
std::optional<E> lookup(const Names<E> (&table)[N], std::string_view name) {
  for (const auto& entry : table)
    if (entry.name == name) return entry.value;
  return std::nullopt;
}

template <typename E, std::size_t N>
std::string choices(const Names<E> (&table)[N]) {
  std::string out;
  for (const auto& entry : table) {
    if (!out.empty()) out += ", ";
    out += entry.name;
  }
  return out;
}

// Thrown by value readers; the parser adds the line number.
struct BadValue {
  std::string message;
};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double read_double(std::string_view s) {
  s = trim(s);
  if (s == "inf" || s == "+inf") return kInfinity;
  if (s == "-inf") return -kInfinity;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size() || std::isnan(v) || s.empty())
    throw BadValue{"expected a number, got '" + std::string(s) + "'"};
  return v;
}

template <typename Int>
Int read_integer(std::string_view s) {
  s = trim(s);
  Int v = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size() || s.empty())
    throw BadValue{"expected an integer, got '" + std::string(s) + "'"};
  return v;
}

template <typename T, typename Read>
std::vector<T> read_list(std::string_view s, Read read) {
  std::vector<T> out;
  s = trim(s);
  if (s.empty()) throw BadValue{"expected a comma-separated list"};
  while (true) {
    const auto comma = s.find(',');
    out.push_back(read(s.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return out;
}

template <typename T, typename Write>
std::string write_list(const std::vector<T>& v, Write write) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += write(v[i]);
  }
  return out;
}

struct KeyField {
  std::string_view section;
  std::string_view key;
  std::function<void(ExperimentConfig&, std::string_view)> read;
  std::function<std::string(const ExperimentConfig&)> write;
};

template <typename Get>
KeyField real(std::string_view section, std::string_view key, Get get) {
  return {section, key, [get](ExperimentConfig& c, std::string_view v) { get(c) = read_double(v); },
          [get](const ExperimentConfig& c) {
            return format_number(get(const_cast<ExperimentConfig&>(c)));
          }};
}

template <typename Get>
KeyField optional_real(std::string_view section, std::string_view key, Get get) {
  return {section, key,
          [get](ExperimentConfig& c, std::string_view v) {
            if (trim(v) == "auto")
              get(c).reset();
            else
              get(c) = read_double(v);
          },
          [get](const ExperimentConfig& c) {
            const auto& o = get(const_cast<ExperimentConfig&>(c));
            return o ? format_number(*o) : std::string("auto");
          }};
}

template <typename Get>
KeyField integer(std::string_view section, std::string_view key, Get get) {
  return {section, key,
          [get](ExperimentConfig& c, std::string_view v) {
            auto& slot = get(c);
            slot = read_integer<std::remove_reference_t<decltype(slot)>>(v);
          },
          [get](const ExperimentConfig& c) {
            return std::to_string(get(const_cast<ExperimentConfig&>(c)));
          }};
}

template <typename Get>
KeyField real_list(std::string_view section, std::string_view key, Get get) {
  return {section, key,
          [get](ExperimentConfig& c, std::string_view v) { get(c) = read_list<double>(v, read_double); },
          [get](const ExperimentConfig& c) {
            return write_list(get(const_cast<ExperimentConfig&>(c)), format_number);
          }};
}

template <typename Get>
KeyField int_list(std::string_view section, std::string_view key, Get get) {
  return {section, key,
          [get](ExperimentConfig& c, std::string_view v) {
            get(c) = read_list<int>(v, read_integer<int>);
          },
          [get](const ExperimentConfig& c) {
            return write_list(get(const_cast<ExperimentConfig&>(c)),
                              [](int x) { return std::to_string(x); });
          }};
}

template <typename E, std::size_t N, typename Get>
KeyField word(std::string_view section, std::string_view key, const Names<E> (&table)[N], Get get) {
  return {section, key,
          [&table, get](ExperimentConfig& c, std::string_view v) {
            v = trim(v);
            if constexpr (requires { get(c).reset(); }) {
              if (v == "auto") {
                get(c).reset();
                return;
              }
            }
            const auto e = lookup(table, v);
            if (!e) throw BadValue{"unknown value '" + std::string(v) + "' (one of " + choices(table) + ")"};
            get(c) = *e;
          },
          [&table, get](const ExperimentConfig& c) {
            const auto& slot = get(const_cast<ExperimentConfig&>(c));
            if constexpr (requires { slot.has_value(); }) {
              return slot ? name_of(table, *slot) : std::string("auto");
            } else {
              return name_of(table, slot);
            }
          }};
}

#define MAXPRIN_REF(expr) [](ExperimentConfig& c) -> auto& { return c.expr; }

const std::vector<KeyField>& fields() {
  static const std::vector<KeyField> table = [] {
    std::vector<KeyField> f;
    f.push_back(word("experiment", "command", kCommands, MAXPRIN_REF(experiment.command)));
    f.push_back({"experiment", "expect",
                 [](ExperimentConfig& c, std::string_view v) {
                   v = trim(v);
                   if (v.empty()) throw BadValue{"empty value"};
                   if (v == "auto")
                     c.experiment.expect.reset();
                   else
                     c.experiment.expect = std::string(v);
                 },
                 [](const ExperimentConfig& c) {
                   return c.experiment.expect ? *c.experiment.expect : std::string("auto");
                 }});
    f.push_back(integer("experiment", "seed", MAXPRIN_REF(experiment.seed)));

    f.push_back(word("profile", "family", kFamilies, MAXPRIN_REF(profile.family)));
    f.push_back(optional_real("profile", "param", MAXPRIN_REF(profile.param)));

    f.push_back(word("domain", "kind", kDomains, MAXPRIN_REF(domain.kind)));
    f.push_back(optional_real("domain", "theta", MAXPRIN_REF(domain.theta)));
    f.push_back(optional_real("domain", "r_min", MAXPRIN_REF(domain.r_min)));
    f.push_back(optional_real("domain", "r_max", MAXPRIN_REF(domain.r_max)));

    f.push_back(real("operator", "a", MAXPRIN_REF(op.a)));
    f.push_back(real("operator", "c", MAXPRIN_REF(op.c)));
    f.push_back(real("operator", "eta_slope", MAXPRIN_REF(op.eta_slope)));

    f.push_back(int_list("spectrum", "n_grid", MAXPRIN_REF(spectrum.n_grid)));

    f.push_back(optional_real("barrier", "lambda1", MAXPRIN_REF(barrier.lambda1)));
    f.push_back(real("barrier", "window_start", MAXPRIN_REF(barrier.window_start)));
    f.push_back(real("barrier", "window_width", MAXPRIN_REF(barrier.window_width)));
    f.push_back(integer("barrier", "classify_samples", MAXPRIN_REF(barrier.classify_samples)));
    f.push_back(optional_real("barrier", "tail_length", MAXPRIN_REF(barrier.tail_length)));
    f.push_back(integer("barrier", "tail_samples", MAXPRIN_REF(barrier.tail_samples)));
    f.push_back(optional_real("barrier", "beta", MAXPRIN_REF(barrier.beta)));

    f.push_back(real_list("exhaust", "R_list", MAXPRIN_REF(exhaust.R_list)));
    f.push_back(real("exhaust", "density", MAXPRIN_REF(exhaust.density)));
    f.push_back(integer("exhaust", "xi_intervals", MAXPRIN_REF(exhaust.xi_intervals)));
    f.push_back(optional_real("exhaust", "margin", MAXPRIN_REF(exhaust.margin)));

    f.push_back(real_list("parabolic", "R_list", MAXPRIN_REF(parabolic.R_list)));
    f.push_back(real("parabolic", "density", MAXPRIN_REF(parabolic.density)));
    f.push_back(integer("parabolic", "xi_intervals", MAXPRIN_REF(parabolic.xi_intervals)));
    f.push_back(optional_real("parabolic", "probe_r", MAXPRIN_REF(parabolic.probe_r)));
    f.push_back(optional_real("parabolic", "probe_xi", MAXPRIN_REF(parabolic.probe_xi)));

    f.push_back(real_list("mp_check", "R_list", MAXPRIN_REF(mp_check.R_list)));
    f.push_back(real("mp_check", "density", MAXPRIN_REF(mp_check.density)));
    f.push_back(integer("mp_check", "xi_intervals", MAXPRIN_REF(mp_check.xi_intervals)));
    f.push_back(integer("mp_check", "trials", MAXPRIN_REF(mp_check.trials)));
    f.push_back(real("mp_check", "shift", MAXPRIN_REF(mp_check.shift)));

    f.push_back(integer("abp", "n", MAXPRIN_REF(abp.n)));
    f.push_back(real("abp", "r_h", MAXPRIN_REF(abp.r_h)));
    f.push_back(real("abp", "vol_omega", MAXPRIN_REF(abp.vol_omega)));
    f.push_back(optional_real("abp", "vol_omega_r", MAXPRIN_REF(abp.vol_omega_r)));
    f.push_back(real("abp", "theta", MAXPRIN_REF(abp.theta)));
    f.push_back(real("abp", "p", MAXPRIN_REF(abp.p)));
    f.push_back(real("abp", "C1", MAXPRIN_REF(abp.C1)));
    f.push_back(real("abp", "rhs", MAXPRIN_REF(abp.rhs)));
    f.push_back(optional_real("abp", "R", MAXPRIN_REF(abp.R)));
    f.push_back(real("abp", "density", MAXPRIN_REF(abp.density)));

    f.push_back(word("symmetry", "nonlinearity", kNonlinearities,
                     MAXPRIN_REF(symmetry.nonlinearity)));
    f.push_back(real("symmetry", "r1", MAXPRIN_REF(symmetry.r1)));
    f.push_back(real("symmetry", "r2", MAXPRIN_REF(symmetry.r2)));
    f.push_back(real("symmetry", "c1", MAXPRIN_REF(symmetry.c1)));
    f.push_back(real("symmetry", "c2", MAXPRIN_REF(symmetry.c2)));
    f.push_back(integer("symmetry", "r_intervals", MAXPRIN_REF(symmetry.r_intervals)));
    f.push_back(integer("symmetry", "xi_nodes", MAXPRIN_REF(symmetry.xi_nodes)));
    f.push_back(real("symmetry", "phi_slope", MAXPRIN_REF(symmetry.phi_slope)));
    f.push_back(real("symmetry", "gamma_amplitude", MAXPRIN_REF(symmetry.gamma_amplitude)));
    f.push_back(real("symmetry", "perturbation", MAXPRIN_REF(symmetry.perturbation)));
    f.push_back(integer("symmetry", "quadrature_n", MAXPRIN_REF(symmetry.quadrature_n)));
    return f;
  }();
  return table;
}

#undef MAXPRIN_REF

[[noreturn]] void invalid(std::string_view field, const std::string& why) {
  throw Error(ErrorKind::ValidationError, std::string(field) + ": " + why);
}

void require(bool ok, std::string_view field, const std::string& why) {
  if (!ok) invalid(field, why);
}

bool finite(double x) { return std::isfinite(x); }

void check_radii(const std::vector<double>& R, double r_min, std::string_view field,
                 std::size_t min_count) {
  require(R.size() >= min_count, field, "needs at least " + std::to_string(min_count) + " radii");
  for (std::size_t i = 0; i < R.size(); ++i) {
    require(finite(R[i]) && R[i] > r_min, field, "radii must be finite and exceed r_min");
    if (i) require(R[i] > R[i - 1], field, "radii must be strictly increasing");
  }
}

ProfileFamily implied_family(DomainKind kind) {
  switch (kind) {
    case DomainKind::HalfStrip:
    case DomainKind::Strip:
    case DomainKind::CapStrip:
      return ProfileFamily::Constant;
    default:
      return ProfileFamily::Linear;
  }
}

bool family_is_fixed(DomainKind kind) {
  return kind != DomainKind::Strip && kind != DomainKind::CapStrip;
}

bool is_arc(DomainKind kind) {
  return kind == DomainKind::HalfStrip || kind == DomainKind::Strip || kind == DomainKind::Sector;
}

double resolved_theta(const ExperimentConfig& c) {
  if (c.domain.theta) return *c.domain.theta;
  return *c.domain.kind == DomainKind::CapStrip ? kPi / 2.0 : kPi;
}

double resolved_r_min(const ExperimentConfig& c) {
  if (c.domain.r_min) return *c.domain.r_min;
  const DomainKind k = *c.domain.kind;
  return (k == DomainKind::HalfStrip || k == DomainKind::Disk) ? 0.0 : 1.0;
}

double resolved_r_max(const ExperimentConfig& c) {
  if (c.domain.r_max) return *c.domain.r_max;
  return *c.domain.kind == DomainKind::Disk ? 1.0 : kInfinity;
}

}  // namespace

std::string to_string(Command command) { return name_of(kCommands, command); }
std::string to_string(DomainKind kind) { return name_of(kDomains, kind); }
std::string to_string(ProfileFamily family) { return name_of(kFamilies, family); }
std::string to_string(NonlinearityKind kind) { return name_of(kNonlinearities, kind); }

Command parse_command(std::string_view name) {
  const auto c = lookup(kCommands, name);
  if (!c) invalid("experiment.command", "unknown command '" + std::string(name) + "'");
  return *c;
}

std::vector<std::string> expect_values(Command command) {
  switch (command) {
    case Command::Spectrum: return {"computed"};
    case Command::Barrier: return {"certified", "no_certificate"};
    case Command::Parabolic: return {"d_parabolic", "not_d_parabolic"};
    case Command::Exhaust: return {"positive", "nonpositive"};
    case Command::MpCheck: return {"holds", "violated"};
    case Command::Abp: return {"within", "exceeded"};
    case Command::Symmetry: return {"symmetric", "asymmetric"};
  }
  return {};
}

std::string format_number(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  (void)ec;
  return std::string(buf, end);
}

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig config;
  std::set<std::string_view> sections;
  for (const KeyField& f : fields()) sections.insert(f.section);
  std::set<std::pair<std::string, std::string>> seen;

  std::string section;
  int line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    const auto hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    auto fail = [line_no](const std::string& why) -> void {
      throw Error(ErrorKind::ParseError, "line " + std::to_string(line_no) + ": " + why);
    };
    if (line.front() == '[') {
      if (line.back() != ']') fail("unterminated section header");
      const std::string_view name = trim(line.substr(1, line.size() - 2));
      if (!sections.count(name)) fail("unknown section [" + std::string(name) + "]");
      section = std::string(name);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) fail("expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    if (section.empty()) fail("key '" + key + "' outside a section");
    if (key.empty()) fail("empty key");
    if (value.empty()) fail("empty value for '" + key + "'");
    const auto it = std::find_if(fields().begin(), fields().end(), [&](const KeyField& f) {
      return f.section == section && f.key == key;
    });
    if (it == fields().end()) fail("unknown key '" + key + "' in [" + section + "]");
    if (!seen.insert({section, key}).second) fail("duplicate key '" + section + "." + key + "'");
    try {
      it->read(config, value);
    } catch (const BadValue& e) {
      fail(section + "." + key + ": " + e.message);
    }
  }
  validate(config);
  return config;
}

void validate(const ExperimentConfig& c) {
  if (c.experiment.command && c.experiment.expect) {
    const auto allowed = expect_values(*c.experiment.command);
    if (std::find(allowed.begin(), allowed.end(), *c.experiment.expect) == allowed.end())
      invalid("experiment.expect", "'" + *c.experiment.expect + "' is not a verdict of " +
                                       to_string(*c.experiment.command));
  }

  require(c.domain.kind.has_value(), "domain.kind", "missing required key");
  const DomainKind kind = *c.domain.kind;
  if (c.domain.theta) {
    const double t = *c.domain.theta;
    const double upper = kind == DomainKind::CapStrip ? kPi : 2.0 * kPi;
    require(finite(t) && t > 0.0 && t < upper, "domain.theta",
            "must lie in (0, " + format_number(upper) + ")");
  }
  const double r_min = resolved_r_min(c);
  const double r_max = resolved_r_max(c);
  require(finite(r_min) && r_min >= 0.0, "domain.r_min", "must be finite and >= 0");
  require(r_max > r_min, "domain.r_max", "must exceed r_min");

  if (c.profile.family && family_is_fixed(kind))
    require(*c.profile.family == implied_family(kind), "profile.family",
            to_string(kind) + " requires " + to_string(implied_family(kind)));
  if (c.profile.param) require(finite(*c.profile.param), "profile.param", "must be finite");
  WarpProfile profile = WarpProfile::constant(1.0);
  try {
    profile = make_profile(c);
  } catch (const Error& e) {
    invalid("profile.param", e.what());
  }
  try {
    make_domain(c).validate(profile);
  } catch (const Error& e) {
    invalid("domain.r_min", e.what());
  }

  require(finite(c.op.a) && c.op.a > 0.0, "operator.a", "must be positive");
  require(finite(c.op.c), "operator.c", "must be finite");
  require(finite(c.op.eta_slope), "operator.eta_slope", "must be finite");

  // Command sections are checked only for the selected command (all when it is unset).
  auto active = [&](Command cmd) { return !c.experiment.command || *c.experiment.command == cmd; };

  if (active(Command::Spectrum)) {
  require(!c.spectrum.n_grid.empty(), "spectrum.n_grid", "must not be empty");
  for (int n : c.spectrum.n_grid)
    require(n >= 8 && n <= (1 << 20), "spectrum.n_grid", "entries must lie in [8, 2^20]");

  }

  if (active(Command::Barrier)) {
  const BarrierSection& b = c.barrier;
  if (b.lambda1) require(finite(*b.lambda1) && *b.lambda1 > 0.0, "barrier.lambda1", "must be positive");
  require(finite(b.window_start) && b.window_start >= 0.0, "barrier.window_start", "must be >= 0");
  require(finite(b.window_width) && b.window_width > 0.0, "barrier.window_width", "must be positive");
  require(b.classify_samples >= 16, "barrier.classify_samples", "must be >= 16");
  if (b.tail_length) require(finite(*b.tail_length) && *b.tail_length > 0.0, "barrier.tail_length", "must be positive");
  require(b.tail_samples >= 2, "barrier.tail_samples", "must be >= 2");
  if (b.beta) require(finite(*b.beta) && *b.beta > 0.0, "barrier.beta", "must be positive");

  }

  if (active(Command::Exhaust)) {
  check_radii(c.exhaust.R_list, r_min, "exhaust.R_list", 3);
  require(finite(c.exhaust.density) && c.exhaust.density > 0.0, "exhaust.density", "must be positive");
  require(c.exhaust.xi_intervals >= 0, "exhaust.xi_intervals", "must be >= 0");
  if (c.exhaust.margin) require(finite(*c.exhaust.margin) && *c.exhaust.margin >= 0.0, "exhaust.margin", "must be >= 0");

  }

  if (active(Command::Parabolic)) {
  check_radii(c.parabolic.R_list, std::max(r_min, 1.0), "parabolic.R_list", 4);
  require(finite(c.parabolic.density) && c.parabolic.density > 0.0, "parabolic.density", "must be positive");
  require(c.parabolic.xi_intervals >= 0, "parabolic.xi_intervals", "must be >= 0");
  if (c.parabolic.probe_r)
    require(finite(*c.parabolic.probe_r) && *c.parabolic.probe_r >= r_min &&
                *c.parabolic.probe_r < c.parabolic.R_list.front(),
            "parabolic.probe_r", "must lie in [r_min, first radius)");
  if (c.parabolic.probe_xi) require(finite(*c.parabolic.probe_xi) && *c.parabolic.probe_xi >= 0.0, "parabolic.probe_xi", "must be >= 0");

  }

  if (active(Command::MpCheck)) {
  check_radii(c.mp_check.R_list, r_min, "mp_check.R_list", 3);
  require(finite(c.mp_check.density) && c.mp_check.density > 0.0, "mp_check.density", "must be positive");
  require(c.mp_check.xi_intervals >= 0, "mp_check.xi_intervals", "must be >= 0");
  require(c.mp_check.trials >= 1 && c.mp_check.trials <= 100000, "mp_check.trials", "must lie in [1, 100000]");
  require(finite(c.mp_check.shift), "mp_check.shift", "must be finite");

  }

  if (active(Command::Abp)) {
  const AbpSection& a = c.abp;
  require(a.n >= 1 && a.n <= 64, "abp.n", "must lie in [1, 64]");
  require(finite(a.r_h) && a.r_h > 0.0, "abp.r_h", "must be positive");
  require(finite(a.vol_omega) && a.vol_omega > 0.0, "abp.vol_omega", "must be positive");
  if (a.vol_omega_r) require(finite(*a.vol_omega_r) && *a.vol_omega_r > 0.0, "abp.vol_omega_r", "must be positive");
  require(finite(a.theta) && a.theta > 0.0 && a.theta < 1.0, "abp.theta", "must lie in (0, 1)");
  require(finite(a.p) && a.p > 0.0, "abp.p", "must be positive");
  require(finite(a.C1) && a.C1 > 0.0, "abp.C1", "must be positive");
  require(finite(a.rhs), "abp.rhs", "must be finite");
  if (a.R) require(finite(*a.R) && *a.R > r_min && *a.R <= r_max, "abp.R", "must lie in (r_min, r_max]");
  require(finite(a.density) && a.density > 0.0, "abp.density", "must be positive");

  }

  if (active(Command::Symmetry)) {
  const SymmetrySection& s = c.symmetry;
  require(finite(s.r1) && s.r1 > 0.0, "symmetry.r1", "must be positive");
  require(finite(s.r2) && s.r2 > s.r1, "symmetry.r2", "must exceed r1");
  require(finite(s.c1), "symmetry.c1", "must be finite");
  require(finite(s.c2), "symmetry.c2", "must be finite");
  require(s.r_intervals >= 4, "symmetry.r_intervals", "must be >= 4");
  require(s.xi_nodes >= 3, "symmetry.xi_nodes", "must be >= 3");
  require(finite(s.phi_slope), "symmetry.phi_slope", "must be finite");
  require(finite(s.gamma_amplitude), "symmetry.gamma_amplitude", "must be finite");
  require(finite(s.perturbation), "symmetry.perturbation", "must be finite");
  require(s.quadrature_n >= 64 && s.quadrature_n % 2 == 0, "symmetry.quadrature_n", "must be even and >= 64");
  }
}

std::string serialize(const ExperimentConfig& config) {
  std::ostringstream out;
  std::string_view section;
  for (const KeyField& f : fields()) {
    if (f.section != section) {
      if (!section.empty()) out << '\n';
      section = f.section;
      out << '[' << section << "]\n";
    }
    out << f.key << " = " << f.write(config) << '\n';
  }
  return out.str();
}

WarpProfile make_profile(const ExperimentConfig& c) {
  if (!c.domain.kind) invalid("domain.kind", "missing required key");
  const ProfileFamily family = c.profile.family.value_or(implied_family(*c.domain.kind));
  switch (family) {
    case ProfileFamily::Constant: return WarpProfile::constant(c.profile.param.value_or(1.0));
    case ProfileFamily::Linear: return WarpProfile::linear();
    case ProfileFamily::AffinePower: return WarpProfile::affine_power(c.profile.param.value_or(1.0 / 3.0));
    case ProfileFamily::ExpDecay: return WarpProfile::exp_decay();
    case ProfileFamily::ShiftedTanh: return WarpProfile::shifted_tanh(c.profile.param.value_or(2.0));
  }
  return WarpProfile::constant(1.0);
}

StripDomain make_domain(const ExperimentConfig& c) {
  if (!c.domain.kind) invalid("domain.kind", "missing required key");
  const DomainKind kind = *c.domain.kind;
  StripDomain d;
  d.r_min = resolved_r_min(c);
  d.r_max = resolved_r_max(c);
  try {
    if (is_arc(kind)) {
      d.cross_section = CrossSection::circle_arc(resolved_theta(c));
    } else if (kind == DomainKind::CapStrip) {
      d.cross_section = CrossSection::sphere_cap(resolved_theta(c));
      d.m = 3;
    } else if (kind == DomainKind::SpaceRadial) {
      d.cross_section = CrossSection::full_sphere();
      d.m = 3;
    } else {
      d.cross_section = CrossSection::full_circle();
    }
  } catch (const Error& e) {
    invalid("domain.theta", e.what());
  }
  if (kind == DomainKind::Disk) d.inner = EndCondition::Natural;
  return d;
}

OperatorSpec make_operator_spec(const ExperimentConfig& c) {
  OperatorSpec spec;
  const double a = c.op.a, cc = c.op.c, k = c.op.eta_slope;
  spec.a = [a](double, double) { return a; };
  spec.c = [cc](double, double) { return cc; };
  spec.eta = [k](double r, double) { return k * r; };
  return spec;
}

}  // namespace maxprin
