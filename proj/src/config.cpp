#include "mska/config.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <sstream>

namespace mska {

namespace {

struct KeyBinding {
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

std::string format_scalar(Scalar v) {
  std::ostringstream oss;
  oss.precision(17);
  oss << v;
  return oss.str();
}

Scalar parse_scalar(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const Scalar x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw UsageError("config: cannot parse numeric value '" + v + "' for key " + key);
  }
}

Index parse_index(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const long long x = std::stoll(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return static_cast<Index>(x);
  } catch (const std::exception&) {
    throw UsageError("config: cannot parse integer value '" + v + "' for key " + key);
  }
}

const std::map<std::string, KeyBinding>& bindings() {
  static const std::map<std::string, KeyBinding> map = [] {
    std::map<std::string, KeyBinding> b;
    auto scalar = [&b](const std::string& key, Scalar RunConfig::* field) {
      b[key] = {[key, field](RunConfig& c, const std::string& v) { c.*field = parse_scalar(key, v); },
                [field](const RunConfig& c) { return format_scalar(c.*field); }};
    };
    auto integer = [&b](const std::string& key, Index RunConfig::* field) {
      b[key] = {[key, field](RunConfig& c, const std::string& v) { c.*field = parse_index(key, v); },
                [field](const RunConfig& c) { return std::to_string(c.*field); }};
    };
    auto text = [&b](const std::string& key, std::string RunConfig::* field) {
      b[key] = {[field](RunConfig& c, const std::string& v) { c.*field = v; },
                [field](const RunConfig& c) { return c.*field; }};
    };

    text("input.path", &RunConfig::input_path);
    text("input.function", &RunConfig::input_function);
    integer("input.n", &RunConfig::input_n);
    integer("input.dim", &RunConfig::dim);
    b["seed"] = {[](RunConfig& c, const std::string& v) {
                   c.seed = static_cast<uint64_t>(parse_index("seed", v));
                 },
                 [](const RunConfig& c) { return std::to_string(c.seed); }};
    text("output.dir", &RunConfig::output_dir);
    integer("moments.q_plus_1", &RunConfig::q_plus_1);
    integer("tree.leaf_capacity", &RunConfig::leaf_capacity);
    text("tree.split", &RunConfig::split_rule);
    scalar("compression.rho", &RunConfig::rho);
    scalar("compression.kappa", &RunConfig::kappa);
    text("subsample.mode", &RunConfig::subsample_mode);
    scalar("subsample.eps2", &RunConfig::eps2);
    text("subsample.kernel.family", &RunConfig::sub_kernel_family);
    text("subsample.kernel.lengthscale", &RunConfig::sub_kernel_lengthscale);
    text("dictionary.family", &RunConfig::dict_family);
    integer("dictionary.L", &RunConfig::dict_count);
    text("dictionary.a", &RunConfig::dict_a);
    text("dictionary.b", &RunConfig::dict_b);
    text("solve.coordinates", &RunConfig::coordinates);
    b["solve.export_matrix"] = {
        [](RunConfig& c, const std::string& v) {
          if (v != "true" && v != "false")
            throw UsageError("config: solve.export_matrix expects true or false");
          c.export_matrix = v == "true";
        },
        [](const RunConfig& c) { return c.export_matrix ? std::string("true") : std::string("false"); }};
    scalar("solver.tol", &RunConfig::tol);
    integer("solver.maxit", &RunConfig::maxit);
    scalar("solver.eta1", &RunConfig::eta1);
    scalar("solver.eta2", &RunConfig::eta2);
    scalar("solver.delta0", &RunConfig::delta0);
    scalar("solver.delta_min", &RunConfig::delta_min);
    scalar("solver.delta_max", &RunConfig::delta_max);
    scalar("solver.c_tau", &RunConfig::c_tau);
    scalar("solver.c_nu", &RunConfig::c_nu);
    scalar("solver.p_tilde", &RunConfig::p_tilde);
    scalar("continuation.r0", &RunConfig::r0);
    scalar("continuation.gamma", &RunConfig::gamma);
    scalar("continuation.r_min", &RunConfig::r_min);
    integer("evaluate.n", &RunConfig::eval_n);
    integer("evaluate.grid", &RunConfig::eval_grid);
    return b;
  }();
  return map;
}

void set_key(RunConfig& cfg, const std::string& key, const std::string& value,
             const std::string& where) {
  auto it = bindings().find(key);
  if (it == bindings().end()) {
    std::ostringstream oss;
    oss << where << ": unknown config key '" << key << "'. Valid keys:";
    for (const auto& k : known_config_keys()) oss << "\n  " << k;
    throw UsageError(oss.str());
  }
  it->second.set(cfg, value);
}

}  // namespace

std::vector<std::string> known_config_keys() {
  std::vector<std::string> keys;
  for (const auto& [k, v] : bindings()) keys.push_back(k);
  return keys;
}

std::string RunConfig::echo() const {
  std::ostringstream oss;
  for (const auto& [k, v] : bindings()) oss << k << " = " << v.get(*this) << "\n";
  return oss.str();
}

RunConfig parse_config_text(const std::string& text, const std::string& origin) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  Index lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string trimmed = trim(line);
    if (trimmed.empty()) continue;
    const auto eq = trimmed.find('=');
    if (eq == std::string::npos)
      throw UsageError(origin + ":" + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(trimmed.substr(0, eq));
    const std::string value = trim(trimmed.substr(eq + 1));
    set_key(cfg, key, value, origin + ":" + std::to_string(lineno));
  }
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path);
}

void apply_override(RunConfig& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos)
    throw UsageError("override must look like key=value, got '" + assignment + "'");
  set_key(cfg, assignment.substr(0, eq), assignment.substr(eq + 1), "--set");
}

}  // namespace mska
