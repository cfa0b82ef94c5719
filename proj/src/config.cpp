#include "bcharge/config.hpp"

#include <charconv>
#include <sstream>

#include "bcharge/errors.hpp"

namespace bcharge {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool parse_bool(std::string_view v) {
  if (v == "true" || v == "1" || v == "on" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "off" || v == "no") return false;
  throw ConfigError("expected a boolean, got '" + std::string(v) + "'");
}

double parse_double(std::string_view v) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size())
    throw ConfigError("expected a number, got '" + std::string(v) + "'");
  return out;
}

}  // namespace

void apply_model_key(ModelSpec& spec, std::string_view key, std::string_view value) {
  if (key == "model" || key == "variant") spec.variant = parse_variant(value);
  else if (key == "boundary_on") spec.boundary_on = parse_bool(value);
  else if (key == "periodic") spec.periodic = parse_bool(value);
  else spec.set(key, parse_double(value));
}

void to_json(nlohmann::json& j, const ModelSpec& spec) {
  j = nlohmann::json::object();
  j["model"] = std::string(to_string(spec.variant));
  for (const auto& k : ModelSpec::keys()) {
    if (k == "L") j[k] = spec.L;
    else j[k] = spec.get(k);
  }
  j["boundary_on"] = spec.boundary_on;
  j["periodic"] = spec.periodic;
}

void from_json(const nlohmann::json& j, ModelSpec& spec) {
  if (!j.is_object()) throw ConfigError("model config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key == "model" || key == "variant") {
      if (!value.is_string()) throw ConfigError("model must be a string");
      spec.variant = parse_variant(value.get<std::string>());
    } else if (key == "boundary_on" || key == "periodic") {
      if (!value.is_boolean()) throw ConfigError(key + " must be a boolean");
      (key == "periodic" ? spec.periodic : spec.boundary_on) = value.get<bool>();
    } else {
      if (!value.is_number()) throw ConfigError("model key " + key + " must be a number");
      spec.set(key, value.get<double>());
    }
  }
}

std::string to_ini(const ModelSpec& spec) {
  std::ostringstream os;
  os.precision(17);
  os << "[model]\n";
  os << "model = " << to_string(spec.variant) << '\n';
  for (const auto& k : ModelSpec::keys()) {
    if (k == "L") os << "L = " << spec.L << '\n';
    else os << k << " = " << spec.get(k) << '\n';
  }
  os << "boundary_on = " << (spec.boundary_on ? "true" : "false") << '\n';
  os << "periodic = " << (spec.periodic ? "true" : "false") << '\n';
  return os.str();
}

ModelSpec model_from_ini(std::string_view text) {
  ModelSpec spec;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = trim(text.substr(0, nl));
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (line.empty() || line.front() == '#' || line.front() == ';') continue;
    if (line.front() == '[') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    apply_model_key(spec, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return spec;
}

}  // namespace bcharge
