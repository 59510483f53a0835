#include "fracfem/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#ifndef FRACFEM_PRESET_DIR
#define FRACFEM_PRESET_DIR "presets"
#endif

namespace fracfem {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, sep))
    if (!trim(item).empty()) parts.push_back(trim(item));
  return parts;
}

[[noreturn]] void bad(const std::string& key, const std::string& value) {
  throw std::invalid_argument("config: bad value '" + value + "' for " + key);
}

long long to_int(const std::string& key, const std::string& value) {
  std::size_t pos = 0;
  long long v = 0;
  try {
    v = std::stoll(value, &pos);
  } catch (const std::exception&) {
    bad(key, value);
  }
  if (pos != value.size()) bad(key, value);
  return v;
}

std::uint64_t to_uint(const std::string& key, const std::string& value) {
  std::size_t pos = 0;
  std::uint64_t v = 0;
  try {
    v = std::stoull(value, &pos);
  } catch (const std::exception&) {
    bad(key, value);
  }
  if (pos != value.size() || value.front() == '-') bad(key, value);
  return v;
}

double to_double(const std::string& key, const std::string& value) {
  // a/b fractions are accepted for omega-like values
  if (const auto slash = value.find('/'); slash != std::string::npos) {
    const double num = to_double(key, trim(value.substr(0, slash)));
    const double den = to_double(key, trim(value.substr(slash + 1)));
    if (den == 0.0) bad(key, value);
    return num / den;
  }
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &pos);
  } catch (const std::exception&) {
    bad(key, value);
  }
  if (pos != value.size()) bad(key, value);
  return v;
}

bool to_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  bad(key, value);
}

std::string number(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

// "a,b" after a "diag:" style prefix
std::vector<double> mode_args(const std::string& mode, const std::string& prefix, const std::string& key) {
  std::vector<double> args;
  for (const auto& part : split(mode.substr(prefix.size()), ',')) args.push_back(to_double(key, part));
  return args;
}

}  // namespace

std::string to_string(StudyKind study) {
  switch (study) {
    case StudyKind::twolevel: return "twolevel";
    case StudyKind::lod: return "lod";
    case StudyKind::projections: return "projections";
  }
  return "twolevel";
}

std::string to_string(CellOrder order) { return order == CellOrder::ascending ? "ascending" : "descending"; }

std::vector<int> ExperimentConfig::K_values() const {
  std::vector<int> values;
  for (int K = K_first; K <= K_last; ++K) values.push_back(K);
  return values;
}

std::filesystem::path ExperimentConfig::cache_path() const {
  return cache_dir.empty() ? std::filesystem::path(out_dir) / "cache" : std::filesystem::path(cache_dir);
}

void apply_setting(ExperimentConfig& c, const std::string& key, const std::string& raw) {
  const std::string value = trim(raw);
  if (key == "network.kind") {
    try {
      c.network = network_kind_from_string(value);
    } catch (const std::exception&) {
      bad(key, value);
    }
  } else if (key == "network.seed") {
    c.seed = to_uint(key, value);
  } else if (key == "network.k_max") {
    c.k_max = static_cast<int>(to_int(key, value));
  } else if (key == "network.c") {
    c.c_frak = to_double(key, value);
  } else if (key == "network.constants") {
    if (value == "power_of_two") c.localized_constants = LocalizedConstants::power_of_two;
    else if (value == "shifted") c.localized_constants = LocalizedConstants::shifted;
    else bad(key, value);
  } else if (key == "network.chord_lines") {
    c.chord_lines = static_cast<int>(to_int(key, value));
  } else if (key == "coefficients.A") {
    c.a_mode = value;
  } else if (key == "coefficients.B") {
    c.b_mode = value;
  } else if (key == "coefficients.f") {
    c.f_mode = value;
  } else if (key == "study") {
    if (value == "twolevel") c.study = StudyKind::twolevel;
    else if (value == "lod") c.study = StudyKind::lod;
    else if (value == "projections") c.study = StudyKind::projections;
    else bad(key, value);
  } else if (key == "K_range") {
    const auto dots = value.find("..");
    if (dots == std::string::npos) {
      c.K_first = c.K_last = static_cast<int>(to_int(key, value));
    } else {
      c.K_first = static_cast<int>(to_int(key, trim(value.substr(0, dots))));
      c.K_last = static_cast<int>(to_int(key, trim(value.substr(dots + 2))));
    }
  } else if (key == "twolevel.coarse_scale") {
    c.coarse_scale = static_cast<int>(to_int(key, value));
  } else if (key == "twolevel.sweeps") {
    c.sweeps = static_cast<int>(to_int(key, value));
  } else if (key == "twolevel.order") {
    if (value == "ascending") c.order = CellOrder::ascending;
    else if (value == "descending") c.order = CellOrder::descending;
    else bad(key, value);
  } else if (key == "twolevel.symmetric") {
    c.symmetric = to_bool(key, value);
  } else if (key == "twolevel.reference_tol") {
    c.reference_tol = to_double(key, value);
  } else if (key == "lod.K") {
    c.lod_K = static_cast<int>(to_int(key, value));
  } else if (key == "lod.k") {
    c.lod_k.clear();
    for (const auto& part : split(value, ',')) c.lod_k.push_back(static_cast<int>(to_int(key, part)));
  } else if (key == "lod.nu") {
    c.lod_nu.clear();
    for (const auto& part : split(value, ','))
      c.lod_nu.push_back(part == "ideal" ? -1 : static_cast<int>(to_int(key, part)));
  } else if (key == "lod.omega") {
    c.omega = to_double(key, value);
  } else if (key == "projections.pairs") {
    c.projection_pairs.clear();
    for (const auto& part : split(value, ',')) {
      const auto colon = part.find(':');
      if (colon == std::string::npos) bad(key, value);
      c.projection_pairs.emplace_back(static_cast<int>(to_int(key, trim(part.substr(0, colon)))),
                                      static_cast<int>(to_int(key, trim(part.substr(colon + 1)))));
    }
  } else if (key == "projections.trials") {
    c.projection_trials = static_cast<int>(to_int(key, value));
  } else if (key == "output.dir") {
    c.out_dir = value;
  } else if (key == "output.cache") {
    c.cache_dir = value;
  } else if (key == "run.threads") {
    c.threads = static_cast<int>(to_int(key, value));
  } else {
    throw std::invalid_argument("config: unknown key '" + key + "'");
  }
}

ExperimentConfig parse_config(std::istream& in, ExperimentConfig base) {
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": expected key = value");
    apply_setting(base, trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  return base;
}

ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config " + path.string());
  return parse_config(in, std::move(base));
}

std::filesystem::path preset_directory() {
  if (const char* env = std::getenv("FRACFEM_PRESETS")) return env;
  return FRACFEM_PRESET_DIR;
}

std::filesystem::path find_preset(const std::string& name) {
  for (const auto& dir : {std::filesystem::path("presets"), preset_directory()}) {
    const auto path = dir / (name + ".conf");
    if (std::filesystem::exists(path)) return path;
  }
  throw std::invalid_argument("unknown preset '" + name + "' (looked in presets/ and " +
                              preset_directory().string() + ")");
}

void validate(const ExperimentConfig& c) {
  auto fail = [](const std::string& what) { throw std::invalid_argument("config: " + what); };
  const int depth_limit = c.network == NetworkKind::geological ? kMaxGeologicalDepth : kMaxLocalizedDepth;
  if (c.network == NetworkKind::custom) fail("network.kind custom is only available through the library");
  if (c.k_max < 1 || c.k_max > depth_limit) fail("network.k_max must lie in 1.." + std::to_string(depth_limit));
  if (!(c.c_frak > 0.0)) fail("network.c must be positive");
  if (c.chord_lines < 1) fail("network.chord_lines must be positive");
  if (c.a_mode != "identity" && c.a_mode.rfind("diag:", 0) != 0) fail("coefficients.A must be identity or diag:a,b");
  if (c.b_mode != "one" && c.b_mode.rfind("const:", 0) != 0) fail("coefficients.B must be one or const:b");
  if (c.f_mode != "one" && c.f_mode != "zero" && c.f_mode != "sine" && c.f_mode != "linear")
    fail("coefficients.f must be one, zero, sine or linear");
  make_coefficients(c);
  if (c.threads < 1) fail("run.threads must be positive");
  switch (c.study) {
    case StudyKind::twolevel:
      if (c.coarse_scale < 1) fail("twolevel.coarse_scale must be at least 1");
      if (c.K_first <= c.coarse_scale) fail("K_range must start above twolevel.coarse_scale");
      if (c.K_last < c.K_first || c.K_last > c.k_max) fail("K_range must be ascending and within network.k_max");
      if (c.sweeps < 1) fail("twolevel.sweeps must be positive");
      if (!(c.reference_tol > 0.0 && c.reference_tol < 1e-6)) fail("twolevel.reference_tol must lie in (0, 1e-6)");
      break;
    case StudyKind::lod:
      if (c.lod_K < 2 || c.lod_K > c.k_max) fail("lod.K must lie in 2..network.k_max");
      if (c.lod_k.empty()) fail("lod.k is empty");
      for (int k : c.lod_k)
        if (k < 1 || k >= c.lod_K) fail("lod.k entries must lie in 1..lod.K-1");
      if (c.lod_nu.empty()) fail("lod.nu is empty");
      for (int nu : c.lod_nu)
        if (nu < -1) fail("lod.nu entries must be >= 0 or ideal");
      if (!(c.omega > 0.0 && c.omega <= 1.0)) fail("lod.omega must lie in (0, 1]");
      break;
    case StudyKind::projections:
      if (c.projection_pairs.empty()) fail("projections.pairs is empty");
      for (auto [K, k] : c.projection_pairs)
        if (k < 1 || k >= K || K > c.k_max) fail("projections.pairs need 1 <= k < K <= network.k_max");
      if (c.projection_trials < 1) fail("projections.trials must be positive");
      break;
  }
}

namespace {

std::string serialize_numerics(const ExperimentConfig& c) {
  std::ostringstream out;
  out << "network.kind = " << to_string(c.network) << "\n";
  out << "network.seed = " << c.seed << "\n";
  out << "network.k_max = " << c.k_max << "\n";
  out << "network.c = " << number(c.c_frak) << "\n";
  out << "network.constants = "
      << (c.localized_constants == LocalizedConstants::shifted ? "shifted" : "power_of_two") << "\n";
  out << "network.chord_lines = " << c.chord_lines << "\n";
  out << "coefficients.A = " << c.a_mode << "\n";
  out << "coefficients.B = " << c.b_mode << "\n";
  out << "coefficients.f = " << c.f_mode << "\n";
  out << "study = " << to_string(c.study) << "\n";
  out << "K_range = " << c.K_first << ".." << c.K_last << "\n";
  out << "twolevel.coarse_scale = " << c.coarse_scale << "\n";
  out << "twolevel.sweeps = " << c.sweeps << "\n";
  out << "twolevel.order = " << to_string(c.order) << "\n";
  out << "twolevel.symmetric = " << (c.symmetric ? "true" : "false") << "\n";
  out << "twolevel.reference_tol = " << number(c.reference_tol) << "\n";
  out << "lod.K = " << c.lod_K << "\n";
  out << "lod.k = ";
  for (std::size_t i = 0; i < c.lod_k.size(); ++i) out << (i ? "," : "") << c.lod_k[i];
  out << "\nlod.nu = ";
  for (std::size_t i = 0; i < c.lod_nu.size(); ++i)
    out << (i ? "," : "") << (c.lod_nu[i] < 0 ? std::string("ideal") : std::to_string(c.lod_nu[i]));
  out << "\nlod.omega = " << number(c.omega) << "\n";
  out << "projections.pairs = ";
  for (std::size_t i = 0; i < c.projection_pairs.size(); ++i)
    out << (i ? "," : "") << c.projection_pairs[i].first << ":" << c.projection_pairs[i].second;
  out << "\nprojections.trials = " << c.projection_trials << "\n";
  return out.str();
}

}  // namespace

std::string serialize(const ExperimentConfig& c) {
  std::ostringstream out;
  out << serialize_numerics(c);
  out << "output.dir = " << c.out_dir << "\n";
  if (!c.cache_dir.empty()) out << "output.cache = " << c.cache_dir << "\n";
  out << "run.threads = " << c.threads << "\n";
  return out.str();
}

std::uint64_t config_hash(const ExperimentConfig& c) { return fnv1a(serialize_numerics(c)); }

std::string hex(std::uint64_t value) {
  std::ostringstream out;
  out << std::hex;
  out.width(16);
  out.fill('0');
  out << value;
  return out.str();
}

Coefficients make_coefficients(const ExperimentConfig& c) {
  Coefficients coeff = Coefficients::unit();
  coeff.is_unit = c.a_mode == "identity" && c.b_mode == "one";
  if (c.a_mode.rfind("diag:", 0) == 0) {
    const auto args = mode_args(c.a_mode, "diag:", "coefficients.A");
    if (args.size() != 2 || !(args[0] > 0.0) || !(args[1] > 0.0))
      throw std::invalid_argument("config: coefficients.A diag needs two positive entries");
    coeff.A = [a = args[0], b = args[1]](Point) { return Matrix2{{{a, 0.0}, {0.0, b}}}; };
  }
  if (c.b_mode.rfind("const:", 0) == 0) {
    const auto args = mode_args(c.b_mode, "const:", "coefficients.B");
    if (args.size() != 1 || !(args[0] > 0.0))
      throw std::invalid_argument("config: coefficients.B const needs one positive value");
    coeff.B = [b = args[0]](Point) { return b; };
  }
  if (c.f_mode == "zero") coeff.f = [](Point) { return 0.0; };
  if (c.f_mode == "sine")
    coeff.f = [](Point p) { return std::sin(std::numbers::pi * p.x) * std::sin(std::numbers::pi * p.y); };
  if (c.f_mode == "linear") coeff.f = [](Point p) { return p.x + p.y; };
  return coeff;
}

}  // namespace fracfem
