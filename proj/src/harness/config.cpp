#include "qba/harness/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "qba/adversary/strategies.hpp"
#include "qba/hardy/hardy.hpp"

namespace qba::harness {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const char* first = value.data();
  const char* last = first + value.size();
  const auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last) {
    throw ConfigError("bad value '" + value + "' for " + key);
  }
  return out;
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string scalar_text(const Json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "1" : "0";
  if (v.is_number_integer() || v.is_number_unsigned()) return v.dump();
  if (v.is_number_float()) {
    std::ostringstream os;
    os.precision(17);
    os << v.get<double>();
    return os.str();
  }
  throw ConfigError("config values must be scalars or lists of scalars");
}

}  // namespace

void RunConfig::validate() const {
  (void)adversary::make_scenario(scenario);
  if (n < engine::kMinNParameter) {
    throw ConfigError("n must be at least " + std::to_string(engine::kMinNParameter));
  }
  if (!(alpha > hardy::kAlphaMargin && alpha < 1.0 - hardy::kAlphaMargin)) {
    throw ConfigError("alpha must lie strictly inside (0, 1)");
  }
  if (message_bit < -1 || message_bit > 1) throw ConfigError("message_bit must be 0, 1 or random");
  if (!(message_fraction > 0.0 && message_fraction < 1.0)) {
    throw ConfigError("message_fraction must lie in (0, 1)");
  }
  if (!(classical_flip_prob >= 0.0 && classical_flip_prob <= 1.0)) {
    throw ConfigError("classical_flip_prob must lie in [0, 1]");
  }
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw ConfigError("epsilon must lie in [0, 1]");
  if (k_min < 1) throw ConfigError("k_min must be at least 1");
  if (min_runs < 1) throw ConfigError("min_runs must be at least 1");
  if (!(cheat_fraction > 0.0 && cheat_fraction <= 1.0)) {
    throw ConfigError("cheat_fraction must lie in (0, 1]");
  }
  if (c_mixed_target != "A" && c_mixed_target != "B") throw ConfigError("c_mixed_target must be A or B");
  if (trials < 1) throw ConfigError("trials must be at least 1");
  if (threads < 0) throw ConfigError("threads must be non-negative");
  if (transcript_trial < 0 || transcript_trial >= trials) {
    throw ConfigError("transcript_trial must index an existing trial");
  }
}

KeyValues parse_config_text(const std::string& text) {
  KeyValues out;
  const auto start = text.find_first_not_of(" \t\r\n");
  if (start != std::string::npos && text[start] == '{') {
    Json j;
    try {
      j = Json::parse(text);
    } catch (const Json::exception& e) {
      throw ConfigError(std::string("config JSON: ") + e.what());
    }
    for (const auto& [key, value] : j.items()) {
      if (value.is_array()) {
        std::string joined;
        for (const auto& item : value) joined += (joined.empty() ? "" : ",") + scalar_text(item);
        out.emplace_back(key, joined);
      } else {
        out.emplace_back(key, scalar_text(value));
      }
    }
    return out;
  }
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(number) + " is not key=value");
    }
    out.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return out;
}

KeyValues read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

void apply_settings(RunConfig& c, const KeyValues& values, SweepGrid* grid) {
  for (const auto& [key, value] : values) {
    if (key == "scenario") {
      c.scenario = value;
    } else if (key == "n") {
      c.n = parse_number<int>(key, value);
    } else if (key == "alpha") {
      c.alpha = parse_number<double>(key, value);
    } else if (key == "message_bit") {
      c.message_bit = value == "random" ? -1 : parse_number<int>(key, value);
    } else if (key == "message_fraction") {
      c.message_fraction = parse_number<double>(key, value);
    } else if (key == "classical_flip_prob") {
      c.classical_flip_prob = parse_number<double>(key, value);
    } else if (key == "epsilon") {
      c.epsilon = parse_number<double>(key, value);
    } else if (key == "k_min") {
      c.k_min = parse_number<std::size_t>(key, value);
    } else if (key == "min_runs") {
      c.min_runs = parse_number<std::size_t>(key, value);
    } else if (key == "cheat_fraction") {
      c.cheat_fraction = parse_number<double>(key, value);
    } else if (key == "c_mixed_target") {
      c.c_mixed_target = value;
    } else if (key == "trials") {
      c.trials = parse_number<int>(key, value);
    } else if (key == "seed") {
      c.seed = parse_number<std::uint64_t>(key, value);
    } else if (key == "threads") {
      c.threads = parse_number<int>(key, value);
    } else if (key == "report") {
      c.report_path = value;
    } else if (key == "summary") {
      c.summary_path = value;
    } else if (key == "transcript") {
      c.transcript_path = value;
    } else if (key == "transcript_trial") {
      c.transcript_trial = parse_number<int>(key, value);
    } else if (grid && key == "n_values") {
      grid->n_values.clear();
      for (const auto& v : split_list(value)) grid->n_values.push_back(parse_number<int>(key, v));
    } else if (grid && key == "alpha_values") {
      grid->alpha_values.clear();
      for (const auto& v : split_list(value)) grid->alpha_values.push_back(parse_number<double>(key, v));
    } else if (grid && key == "scenarios") {
      grid->scenarios = split_list(value);
    } else if (grid && key == "output") {
      grid->output_path = value;
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
}

Json to_json(const RunConfig& c) {
  Json j;
  j["scenario"] = c.scenario;
  j["n"] = c.n;
  j["alpha"] = c.alpha;
  j["message_bit"] = c.message_bit < 0 ? Json("random") : Json(c.message_bit);
  j["message_fraction"] = c.message_fraction;
  j["classical_flip_prob"] = c.classical_flip_prob;
  j["epsilon"] = c.epsilon;
  j["k_min"] = c.k_min;
  j["min_runs"] = c.min_runs;
  j["cheat_fraction"] = c.cheat_fraction;
  j["c_mixed_target"] = c.c_mixed_target;
  j["trials"] = c.trials;
  j["seed"] = c.seed;
  return j;
}

RunConfig config_from_json(const Json& j) {
  RunConfig c;
  KeyValues values;
  for (const auto& [key, value] : j.items()) values.emplace_back(key, scalar_text(value));
  apply_settings(c, values);
  return c;
}

engine::ProtocolConfig protocol_config(const RunConfig& c, std::uint64_t seed, int message_bit) {
  engine::ProtocolConfig p;
  p.n = c.n;
  p.message_bit = message_bit;
  p.message_fraction = c.message_fraction;
  p.classical_flip_prob = c.classical_flip_prob;
  p.verify.k_min = c.k_min;
  p.verify.hardy.epsilon = c.epsilon;
  p.verify.hardy.min_runs = c.min_runs;
  p.verify.hardy.q_reference = hardy::q_value(hardy::ObservablePair::from_real_alpha(c.alpha),
                                              hardy::ObservablePair::from_real_alpha(c.alpha));
  p.seed = seed;
  return p;
}

}  // namespace qba::harness
