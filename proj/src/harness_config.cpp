#include <charconv>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "maxent/error.hpp"
#include "maxent/harness.hpp"

namespace maxent::harness {

namespace {

bool is_power_of_two(std::uint64_t v) { return v != 0 && (v & (v - 1)) == 0; }

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct Value {
  std::string text;
  std::vector<std::string> items;  // for arrays
  bool is_array = false;
  int line = 0;
};

[[noreturn]] void bad(const std::string& key, const Value& v, const std::string& why) {
  throw InvalidArgument("config line " + std::to_string(v.line) + ": " + key + ": " + why);
}

std::uint64_t parse_uint(const std::string& key, const Value& v, std::string_view s) {
  s = trim(s);
  // 2^k shorthand.
  if (const auto caret = s.find('^'); caret != std::string_view::npos) {
    if (trim(s.substr(0, caret)) != "2") bad(key, v, "only 2^k powers are supported");
    const std::uint64_t k = parse_uint(key, v, s.substr(caret + 1));
    if (k > 63) bad(key, v, "exponent too large");
    return std::uint64_t{1} << k;
  }
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    bad(key, v, "expected a nonnegative integer, got '" + std::string(s) + "'");
  return out;
}

double parse_double(const std::string& key, const Value& v) {
  const std::string_view s = trim(v.text);
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    bad(key, v, "expected a number, got '" + std::string(s) + "'");
  return out;
}

int parse_int(const std::string& key, const Value& v) {
  const std::uint64_t u = parse_uint(key, v, v.text);
  if (u > 1'000'000'000) bad(key, v, "value too large");
  return static_cast<int>(u);
}

template <class Enum>
Enum parse_enum(const std::string& key, const Value& v,
                std::initializer_list<std::pair<std::string_view, Enum>> options) {
  std::string allowed;
  for (const auto& [name, e] : options) {
    if (v.text == name) return e;
    allowed += (allowed.empty() ? "" : ", ") + std::string(name);
  }
  bad(key, v, "unknown value '" + v.text + "' (allowed: " + allowed + ")");
}

Sampler parse_sampler_value(const std::string& key, const Value& v) {
  return parse_enum<Sampler>(key, v,
                             {{"mc", Sampler::mc},
                              {"lattice", Sampler::lattice_plain},
                              {"lattice_plain", Sampler::lattice_plain},
                              {"tent", Sampler::lattice_tent},
                              {"lattice_tent", Sampler::lattice_tent}});
}

using Setter = std::function<void(ExperimentConfig&, const std::string&, const Value&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"experiment", [](ExperimentConfig&, const std::string&, const Value&) {}},
      {"model",
       [](ExperimentConfig& c, const std::string& k, const Value& v) {
         c.model = parse_enum<ModelKind>(k, v,
                                         {{"deconvolution", ModelKind::deconvolution},
                                          {"deconv", ModelKind::deconvolution},
                                          {"elliptic", ModelKind::elliptic}});
       }},
      {"prior",
       [](ExperimentConfig& c, const std::string& k, const Value& v) {
         c.prior = parse_enum<Prior>(
             k, v, {{"std_gaussian", Prior::std_gaussian}, {"uniform_cube", Prior::uniform_cube}});
       }},
      {"sampler",
       [](ExperimentConfig& c, const std::string& k, const Value& v) {
         c.sampler = parse_sampler_value(k, v);
       }},
      {"m_grid",
       [](ExperimentConfig& c, const std::string& k, const Value& v) {
         if (!v.is_array) bad(k, v, "expected an array like [16, 32, 64]");
         c.m_grid.clear();
         for (const auto& item : v.items) c.m_grid.push_back(parse_uint(k, v, item));
       }},
      {"realizations",
       [](ExperimentConfig& c, const std::string& k, const Value& v) {
         c.realizations = parse_int(k, v);
       }},
      {"seed",
       [](ExperimentConfig& c, const std::string& k, const Value& v) {
         c.seed = parse_uint(k, v, v.text);
       }},
      {"deconvolution.k_dim",
       [](ExperimentConfig& c, const std::string& k, const Value& v) {
         c.deconvolution.k_dim = parse_int(k, v);
       }},
      {"deconvolution.gamma",
       [](ExperimentConfig& c, const std::string& k, const Value& v) {
         c.deconvolution.gamma = parse_double(k, v);
       }},
      {"deconvolution.sigma_x",
       [](ExperimentConfig& c, const std::string& k, const Value& v) {
         c.deconvolution.sigma_x = parse_double(k, v);
       }},
      {"deconvolution.sigma_eps",
       [](ExperimentConfig& c, const std::string& k, const Value& v) {
         c.deconvolution.sigma_eps = parse_double(k, v);
       }},
      {"elliptic.mesh_n",
       [](ExperimentConfig& c, const std::string& k, const Value& v) {
         c.elliptic.mesh_n = parse_int(k, v);
       }},
      {"elliptic.kl_terms",
       [](ExperimentConfig& c, const std::string& k, const Value& v) {
         c.elliptic.kl_terms = parse_int(k, v);
       }},
      {"elliptic.source_scale",
       [](ExperimentConfig& c, const std::string& k, const Value& v) {
         c.elliptic.source_scale = parse_double(k, v);
       }},
      {"elliptic.noise_variance",
       [](ExperimentConfig& c, const std::string& k, const Value& v) {
         c.elliptic_noise_variance = parse_double(k, v);
       }},
      {"entropy.method",
       [](ExperimentConfig& c, const std::string& k, const Value& v) {
         c.entropy_method = parse_enum<EntropyMethod>(k, v,
                                                      {{"mc", EntropyMethod::mc},
                                                       {"mc_cv", EntropyMethod::mc_cv},
                                                       {"mobius", EntropyMethod::mobius}});
       }},
      {"entropy.n_rule",
       [](ExperimentConfig& c, const std::string& k, const Value& v) {
         c.n_rule = parse_enum<NRule>(
             k, v, {{"fixed", NRule::fixed}, {"multiplier", NRule::multiplier}});
       }},
      {"entropy.n",
       [](ExperimentConfig& c, const std::string& k, const Value& v) {
         c.n_value = parse_uint(k, v, v.text);
       }},
      {"reference.kind",
       [](ExperimentConfig& c, const std::string& k, const Value& v) {
         c.reference = parse_enum<ReferenceKind>(k, v,
                                                 {{"analytic", ReferenceKind::analytic},
                                                  {"frozen", ReferenceKind::frozen},
                                                  {"self", ReferenceKind::self}});
       }},
      {"reference.value",
       [](ExperimentConfig& c, const std::string& k, const Value& v) {
         c.reference_value = parse_double(k, v);
       }},
      {"reference.m0",
       [](ExperimentConfig& c, const std::string& k, const Value& v) {
         c.reference_m0 = parse_uint(k, v, v.text);
       }},
      {"reference.n0",
       [](ExperimentConfig& c, const std::string& k, const Value& v) {
         c.reference_n0 = parse_uint(k, v, v.text);
       }},
      {"reference.sampler",
       [](ExperimentConfig& c, const std::string& k, const Value& v) {
         c.reference_sampler = parse_sampler_value(k, v);
       }},
      {"vectors.surrogate",
       [](ExperimentConfig& c, const std::string&, const Value& v) {
         c.surrogate_vector_file = v.text;
       }},
      {"vectors.cubature",
       [](ExperimentConfig& c, const std::string&, const Value& v) {
         c.cubature_vector_file = v.text;
       }},
  };
  return table;
}

std::string strip_comment(std::string_view line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return std::string(line.substr(0, i));
  }
  return std::string(line);
}

Value parse_value(std::string_view raw, int line) {
  Value v;
  v.line = line;
  raw = trim(raw);
  if (raw.size() >= 2 && raw.front() == '"' && raw.back() == '"') {
    v.text = std::string(raw.substr(1, raw.size() - 2));
  } else if (!raw.empty() && raw.front() == '[') {
    if (raw.back() != ']')
      throw InvalidArgument("config line " + std::to_string(line) + ": unterminated array");
    v.is_array = true;
    std::string_view body = raw.substr(1, raw.size() - 2);
    while (!trim(body).empty()) {
      const auto comma = body.find(',');
      const std::string_view item = trim(body.substr(0, comma));
      if (!item.empty()) v.items.emplace_back(item);
      if (comma == std::string_view::npos) break;
      body.remove_prefix(comma + 1);
    }
    v.text = std::string(raw);
  } else {
    v.text = std::string(raw);
  }
  return v;
}

}  // namespace

std::uint64_t ExperimentConfig::n_for(std::uint64_t m) const {
  return n_rule == NRule::fixed ? n_value : n_value * m;
}

void ExperimentConfig::validate() const {
  if (realizations < 2)
    throw InvalidArgument("realizations must be at least 2, got " + std::to_string(realizations));
  if (m_grid.empty()) throw InvalidArgument("m_grid is empty");
  for (std::size_t i = 0; i < m_grid.size(); ++i) {
    if (!is_power_of_two(m_grid[i]))
      throw InvalidArgument("m_grid entries must be powers of two, got " + std::to_string(m_grid[i]));
    if (i > 0 && m_grid[i] <= m_grid[i - 1])
      throw InvalidArgument("m_grid must be strictly increasing");
  }
  if (n_value == 0) throw InvalidArgument("entropy.n must be positive");
  if (entropy_method != EntropyMethod::mobius && n_for(m_grid.front()) < 2)
    throw InvalidArgument("sampling entropy estimators need N >= 2");
  if (!(elliptic_noise_variance > 0.0))
    throw InvalidArgument("elliptic.noise_variance must be positive");
  if (reference == ReferenceKind::analytic && model != ModelKind::deconvolution)
    throw InvalidArgument("reference.kind = analytic is only available for the deconvolution model");
  if (reference == ReferenceKind::self && (reference_m0 == 0 || reference_n0 < 2))
    throw InvalidArgument("reference.m0 must be positive and reference.n0 at least 2");
}

ExperimentConfig preset(const std::string& name) {
  ExperimentConfig c;
  c.experiment = name;
  if (name == "deconv") return c;
  if (name == "deconv_qmc") {
    c.sampler = Sampler::lattice_plain;
    return c;
  }
  if (name == "elliptic" || name == "elliptic_desk") {
    c.model = ModelKind::elliptic;
    c.prior = Prior::uniform_cube;
    c.sampler = Sampler::mc;
    c.entropy_method = EntropyMethod::mobius;
    c.n_rule = NRule::multiplier;
    c.n_value = 1024;
    c.reference = ReferenceKind::self;
    c.reference_sampler = Sampler::lattice_tent;
    c.reference_n0 = 1u << 20;
    if (name == "elliptic") {
      c.reference_m0 = 1u << 13;
    } else {
      c.elliptic.mesh_n = 32;
      c.realizations = 10;
      c.n_rule = NRule::fixed;
      c.n_value = 1u << 19;
      c.m_grid = {16, 32, 64, 128, 256, 512};
      c.reference_m0 = 1u << 11;
    }
    return c;
  }
  throw InvalidArgument("unknown experiment '" + name +
                        "' (known: deconv, deconv_qmc, elliptic, elliptic_desk)");
}

ExperimentConfig parse_config(std::istream& in) {
  std::vector<std::pair<std::string, Value>> entries;
  std::string section;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string stripped = strip_comment(raw);
    const std::string_view line = trim(stripped);
    if (line.empty()) continue;
    if (line.front() == '[' && line.find('=') == std::string_view::npos) {
      if (line.back() != ']')
        throw InvalidArgument("config line " + std::to_string(line_no) + ": bad section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw InvalidArgument("config line " + std::to_string(line_no) + ": expected key = value");
    std::string key(trim(line.substr(0, eq)));
    if (!section.empty()) key = section + "." + key;
    entries.emplace_back(std::move(key), parse_value(line.substr(eq + 1), line_no));
  }

  std::string base = "deconv";
  for (const auto& [key, value] : entries)
    if (key == "experiment") base = value.text;
  ExperimentConfig cfg = preset(base);
  const auto& table = setters();
  for (const auto& [key, value] : entries) {
    const auto it = table.find(key);
    if (it == table.end())
      throw InvalidArgument("config line " + std::to_string(value.line) + ": unknown key '" + key + "'");
    it->second(cfg, key, value);
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open config file: " + path.string());
  return parse_config(in);
}

}  // namespace maxent::harness
