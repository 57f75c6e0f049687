#include "uwfd/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <sstream>

namespace uwfd {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto t = trim(item);
    if (!t.empty()) out.push_back(t);
  }
  return out;
}

double to_double(const std::string& key, const std::string& value) {
  if (value == "-inf" || value == "-Inf") return -std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  double v;
  try {
    v = std::stod(value, &used);
  } catch (const std::exception&) {
    throw ConfigError(key, "expected a number, got '" + value + "'");
  }
  if (used != value.size()) throw ConfigError(key, "expected a number, got '" + value + "'");
  return v;
}

long long to_integer(const std::string& key, const std::string& value) {
  long long v = 0;
  const auto* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, v);
  if (ec != std::errc{} || ptr != end) {
    // Accept integral floating forms such as 2e5.
    const double d = to_double(key, value);
    if (d != std::floor(d) || std::abs(d) > 9e15)
      throw ConfigError(key, "expected an integer, got '" + value + "'");
    return static_cast<long long>(d);
  }
  return v;
}

int to_int(const std::string& key, const std::string& value) {
  const auto v = to_integer(key, value);
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
    throw ConfigError(key, "integer out of range");
  return static_cast<int>(v);
}

std::string fmt_double(double v) {
  if (std::isinf(v)) return v < 0 ? "-inf" : "inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

struct Field {
  std::function<void(ExperimentConfig&, const std::string&, const std::filesystem::path&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

template <typename Member>
Field number_field(const std::string& key, Member member) {
  return {[key, member](ExperimentConfig& c, const std::string& v, const std::filesystem::path&) {
            c.*member = to_double(key, v);
          },
          [member](const ExperimentConfig& c) { return fmt_double(c.*member); }};
}

template <typename Member>
Field int_field(const std::string& key, Member member) {
  return {[key, member](ExperimentConfig& c, const std::string& v, const std::filesystem::path&) {
            c.*member = to_int(key, v);
          },
          [member](const ExperimentConfig& c) { return std::to_string(c.*member); }};
}

Field path_field(std::string ExperimentConfig::*member) {
  return {[member](ExperimentConfig& c, const std::string& v, const std::filesystem::path& base) {
            std::filesystem::path p(v);
            if (!v.empty() && p.is_relative() && !base.empty()) p = base / p;
            c.*member = v.empty() ? std::string{} : p.string();
          },
          [member](const ExperimentConfig& c) { return c.*member; }};
}

Field fe_number(const std::string& key, double FrontEndConfig::*member) {
  return {[key, member](ExperimentConfig& c, const std::string& v, const std::filesystem::path&) {
            c.front_end.*member = to_double(key, v);
          },
          [member](const ExperimentConfig& c) { return fmt_double(c.front_end.*member); }};
}

Field fe_int(const std::string& key, int FrontEndConfig::*member) {
  return {[key, member](ExperimentConfig& c, const std::string& v, const std::filesystem::path&) {
            c.front_end.*member = to_int(key, v);
          },
          [member](const ExperimentConfig& c) { return std::to_string(c.front_end.*member); }};
}

Field pa_number(const std::string& key, double PaCoefficients::*member) {
  return {[key, member](ExperimentConfig& c, const std::string& v, const std::filesystem::path&) {
            c.front_end.pa.*member = to_double(key, v);
          },
          [member](const ExperimentConfig& c) { return fmt_double(c.front_end.pa.*member); }};
}

const std::vector<std::pair<std::string, Field>>& field_table() {
  static const std::vector<std::pair<std::string, Field>> table = [] {
    using C = ExperimentConfig;
    using F = FrontEndConfig;
    std::vector<std::pair<std::string, Field>> t;
    t.emplace_back("bandwidth_hz", fe_number("bandwidth_hz", &F::bandwidth_hz));
    t.emplace_back("carrier_hz", fe_number("carrier_hz", &F::carrier_hz));
    t.emplace_back("rolloff", fe_number("rolloff", &F::rolloff));
    t.emplace_back("filter_span_symbols", fe_int("filter_span_symbols", &F::filter_span_symbols));
    t.emplace_back("samples_per_symbol", fe_int("samples_per_symbol", &F::samples_per_symbol));
    t.emplace_back("pa_a1", pa_number("pa_a1", &PaCoefficients::a1));
    t.emplace_back("pa_a3", pa_number("pa_a3", &PaCoefficients::a3));
    t.emplace_back("pa_a5", pa_number("pa_a5", &PaCoefficients::a5));
    t.emplace_back("pa_noise_power_db", fe_number("pa_noise_power_db", &F::pa_noise_power_db));
    t.emplace_back("local_ref_power_db", fe_number("local_ref_power_db", &F::local_ref_power_db));
    t.emplace_back("remote_symbol_power_db",
                   fe_number("remote_symbol_power_db", &F::remote_symbol_power_db));
    t.emplace_back("si_taps", int_field("si_taps", &C::si_taps));
    t.emplace_back("si_coherence_ms", number_field("si_coherence_ms", &C::si_coherence_ms));
    t.emplace_back("si_pdp_file", path_field(&C::si_pdp_file));
    t.emplace_back("remote_taps", int_field("remote_taps", &C::remote_taps));
    t.emplace_back("remote_decay", number_field("remote_decay", &C::remote_decay));
    t.emplace_back("remote_coherence_ms", number_field("remote_coherence_ms", &C::remote_coherence_ms));
    t.emplace_back("remote_pdp_file", path_field(&C::remote_pdp_file));
    t.emplace_back("ps_db", number_field("ps_db", &C::ps_db));
    t.emplace_back("pr_db", number_field("pr_db", &C::pr_db));
    t.emplace_back("noise_db", number_field("noise_db", &C::noise_db));
    t.emplace_back("lambda", number_field("lambda", &C::lambda));
    t.emplace_back("delta", number_field("delta", &C::delta));
    t.emplace_back("mu", number_field("mu", &C::mu));
    t.emplace_back("ff_length", int_field("ff_length", &C::ff_length));
    t.emplace_back("fb_length", int_field("fb_length", &C::fb_length));
    t.emplace_back("training_symbols", int_field("training_symbols", &C::training_symbols));
    t.emplace_back("dfe_redesign_interval", int_field("dfe_redesign_interval", &C::dfe_redesign_interval));
    t.emplace_back("symbols", Field{[](C& c, const std::string& v, const std::filesystem::path&) {
                                      const auto n = to_integer("symbols", v);
                                      if (n < 1) throw ConfigError("symbols", "must be positive");
                                      c.symbols = static_cast<std::size_t>(n);
                                    },
                                    [](const C& c) { return std::to_string(c.symbols); }});
    t.emplace_back("trials", int_field("trials", &C::trials));
    t.emplace_back("seed", Field{[](C& c, const std::string& v, const std::filesystem::path&) {
                                   const auto n = to_integer("seed", v);
                                   if (n < 0) throw ConfigError("seed", "must be non-negative");
                                   c.seed = static_cast<std::uint64_t>(n);
                                 },
                                 [](const C& c) { return std::to_string(c.seed); }});
    t.emplace_back("sweep_axis", Field{[](C& c, const std::string& v, const std::filesystem::path&) {
                                         if (v == "none") c.sweep_axis = SweepAxis::None;
                                         else if (v == "snr") c.sweep_axis = SweepAxis::Snr;
                                         else if (v == "si") c.sweep_axis = SweepAxis::SiPower;
                                         else throw ConfigError("sweep_axis", "expected none, snr or si");
                                       },
                                       [](const C& c) { return std::string(to_string(c.sweep_axis)); }});
    t.emplace_back("sweep_grid", Field{[](C& c, const std::string& v, const std::filesystem::path&) {
                                         c.sweep_grid.clear();
                                         for (const auto& item : split_list(v))
                                           c.sweep_grid.push_back(to_double("sweep_grid", item));
                                       },
                                       [](const C& c) {
                                         std::string out;
                                         for (std::size_t i = 0; i < c.sweep_grid.size(); ++i)
                                           out += (i ? ", " : "") + fmt_double(c.sweep_grid[i]);
                                         return out;
                                       }});
    t.emplace_back("modes", Field{[](C& c, const std::string& v, const std::filesystem::path&) {
                                    c.modes.clear();
                                    for (const auto& item : split_list(v)) {
                                      try {
                                        c.modes.push_back(parse_mode(item));
                                      } catch (const InvalidArgument& e) {
                                        throw ConfigError("modes", e.what());
                                      }
                                    }
                                  },
                                  [](const C& c) {
                                    std::string out;
                                    for (std::size_t i = 0; i < c.modes.size(); ++i)
                                      out += (i ? ", " : "") + std::string(to_string(c.modes[i]));
                                    return out;
                                  }});
    t.emplace_back("capture_tap", int_field("capture_tap", &C::capture_tap));
    t.emplace_back("threads", int_field("threads", &C::threads));
    return t;
  }();
  return table;
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& [name, field] : field_table()) k.push_back(name);
    return k;
  }();
  return keys;
}

ExperimentConfig parse_config_text(std::string_view text, const std::filesystem::path& base_dir,
                                   std::vector<std::string>* defaulted) {
  std::map<std::string, const Field*> fields;
  for (const auto& [name, field] : field_table()) fields.emplace(name, &field);

  ExperimentConfig cfg;
  std::set<std::string> seen;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto content = trim(line);
    if (content.empty()) continue;
    const auto eq = content.find('=');
    if (eq == std::string::npos) throw ConfigError("", "expected 'key = value'", line_no);
    const auto key = trim(std::string_view(content).substr(0, eq));
    const auto value = trim(std::string_view(content).substr(eq + 1));
    if (key.empty()) throw ConfigError("", "missing key before '='", line_no);
    const auto it = fields.find(key);
    if (it == fields.end()) throw ConfigError(key, "unknown key", line_no);
    if (!seen.insert(key).second) throw ConfigError(key, "key given more than once", line_no);
    try {
      it->second->set(cfg, value, base_dir);
    } catch (const ConfigError& e) {
      throw ConfigError(e.field(), e.message(), line_no);
    }
  }
  if (defaulted != nullptr) {
    defaulted->clear();
    for (const auto& name : config_keys())
      if (!seen.count(name)) defaulted->push_back(name);
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig parse_config(const std::filesystem::path& path, std::vector<std::string>* defaulted) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot read configuration file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str(), path.parent_path(), defaulted);
}

std::string to_config_text(const ExperimentConfig& cfg) {
  std::string out;
  for (const auto& [name, field] : field_table()) out += name + " = " + field.get(cfg) + "\n";
  return out;
}

}  // namespace uwfd
