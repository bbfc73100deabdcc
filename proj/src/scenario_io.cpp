#include "strikesim/scenario_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <variant>

#include <fmt/format.h>

namespace strikesim {

namespace {

using FieldRef =
    std::variant<std::uint64_t ScenarioConfig::*, double ScenarioConfig::*, bool ScenarioConfig::*,
                 Vigilance ScenarioConfig::*, std::optional<std::uint64_t> ScenarioConfig::*,
                 PerTier<std::uint64_t> ScenarioConfig::*, PerTier<double> ScenarioConfig::*>;

struct Field {
  std::string_view key;
  FieldRef ref;
};

using C = ScenarioConfig;

const std::vector<Field>& fields() {
  static const std::vector<Field> table{
      {"seed", &C::seed},
      {"ticks", &C::ticks},
      {"population_by_tier", &C::population_by_tier},
      {"sigma_v", &C::sigma_v},
      {"epsilon", &C::epsilon},
      {"c_org", &C::c_org},
      {"i_min", &C::i_min},
      {"k_b", &C::k_b},
      {"temperature", &C::temperature},
      {"ubc_enabled", &C::ubc_enabled},
      {"hierarchical_inversion", &C::hierarchical_inversion},
      {"demon_base_vigilance", &C::demon_base_vigilance},
      {"phase_period", &C::phase_period},
      {"cluster_count", &C::cluster_count},
      {"cluster_capacity", &C::cluster_capacity},
      {"task_size", &C::task_size},
      {"diligence_decades", &C::diligence_decades},
      {"cookies_by_tier", &C::cookies_by_tier},
      {"permanent_persistence", &C::permanent_persistence},
      {"abuse_rate", &C::abuse_rate},
      {"grievance_weight", &C::grievance_weight},
      {"reversion_rate", &C::reversion_rate},
      {"termination_threshold", &C::termination_threshold},
      {"slowdown_quality", &C::slowdown_quality},
      {"criminal_families", &C::criminal_families},
      {"criminal_family_size", &C::criminal_family_size},
      {"conflict_rate", &C::conflict_rate},
      {"criminal_activity_rate", &C::criminal_activity_rate},
      {"election_period", &C::election_period},
      {"election_quorum", &C::election_quorum},
      {"ballot_support", &C::ballot_support},
      {"criminal_ballot_support", &C::criminal_ballot_support},
      {"veto_probability", &C::veto_probability},
      {"crisis_threshold", &C::crisis_threshold},
      {"enforcement_fee", &C::enforcement_fee},
      {"sanction_ticks", &C::sanction_ticks},
      {"initial_price_level", &C::initial_price_level},
      {"decisions_per_tick", &C::decisions_per_tick},
      {"spend_down", &C::spend_down},
      {"great_refusal_start", &C::great_refusal_start},
      {"great_refusal_fraction", &C::great_refusal_fraction},
      {"great_refusal_duration", &C::great_refusal_duration},
      {"recursive_strike_start", &C::recursive_strike_start},
      {"recursive_strike_spawn_rate", &C::recursive_strike_spawn_rate},
      {"recursive_strike_duration", &C::recursive_strike_duration},
      {"recursive_strike_clusters", &C::recursive_strike_clusters},
      {"recursive_strike_strikers", &C::recursive_strike_strikers},
      {"slowdown_start", &C::slowdown_start},
      {"slowdown_duration", &C::slowdown_duration},
      {"anarchy_legitimacy", &C::anarchy_legitimacy},
      {"anarchy_enforcement", &C::anarchy_enforcement},
      {"democracy_legitimacy", &C::democracy_legitimacy},
      {"revolution_fraction", &C::revolution_fraction},
  };
  return table;
}

const Field* find_field(std::string_view key) {
  for (const Field& f : fields()) {
    if (f.key == key) return &f;
  }
  return nullptr;
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view expected) {
  throw Error(ErrorCode::ConfigSyntax,
              fmt::format("{}: cannot parse '{}' as {}", key, value, expected));
}

std::uint64_t parse_u64(std::string_view key, std::string_view text) {
  std::uint64_t out = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  if (ec != std::errc{} || ptr != end || text.empty()) bad_value(key, text, "unsigned integer");
  return out;
}

double parse_double(std::string_view key, std::string_view text) {
  // from_chars for double needs GCC 11+, which is the floor here.
  double out = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  if (ec != std::errc{} || ptr != end || text.empty() || !std::isfinite(out)) {
    bad_value(key, text, "finite real");
  }
  return out;
}

bool parse_bool(std::string_view key, std::string_view text) {
  if (text == "true") return true;
  if (text == "false") return false;
  bad_value(key, text, "true/false");
}

template <class T, class ParseFn>
PerTier<T> parse_per_tier(std::string_view key, std::string_view text, ParseFn parse) {
  PerTier<T> out{};
  std::set<Tier> seen;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = text.find(',', pos);
    const std::string item = trim(text.substr(pos, comma == std::string_view::npos ? text.npos : comma - pos));
    const std::size_t colon = item.find(':');
    if (colon == std::string::npos) bad_value(key, text, "Tier:value list");
    const auto tier = parse_tier(trim(std::string_view(item).substr(0, colon)));
    if (!tier || !seen.insert(*tier).second) bad_value(key, text, "Tier:value list with distinct tiers");
    out[*tier] = parse(key, trim(std::string_view(item).substr(colon + 1)));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

template <class T>
std::string format_per_tier(const PerTier<T>& values) {
  std::string out;
  for (Tier t : kTiersTopDown) {
    if (!out.empty()) out += ',';
    out += fmt::format("{}:{}", to_string(t), values[t]);
  }
  return out;
}

void assign(ScenarioConfig& cfg, const Field& field, std::string_view value) {
  const std::string_view key = field.key;
  std::visit(
      [&](auto member) {
        using M = std::remove_reference_t<decltype(cfg.*member)>;
        if constexpr (std::is_same_v<M, std::uint64_t>) {
          cfg.*member = parse_u64(key, value);
        } else if constexpr (std::is_same_v<M, double>) {
          cfg.*member = parse_double(key, value);
        } else if constexpr (std::is_same_v<M, bool>) {
          cfg.*member = parse_bool(key, value);
        } else if constexpr (std::is_same_v<M, Vigilance>) {
          if (value == "inf" || value == "infinity") {
            cfg.*member = Vigilance::infinite();
          } else {
            const double v = parse_double(key, value);
            if (v < 0.0) bad_value(key, value, "nonnegative real or inf");
            cfg.*member = Vigilance::finite(v);
          }
        } else if constexpr (std::is_same_v<M, std::optional<std::uint64_t>>) {
          if (value == "none") {
            cfg.*member = std::nullopt;
          } else {
            cfg.*member = parse_u64(key, value);
          }
        } else if constexpr (std::is_same_v<M, PerTier<std::uint64_t>>) {
          cfg.*member = parse_per_tier<std::uint64_t>(key, value, parse_u64);
        } else {
          static_assert(std::is_same_v<M, PerTier<double>>);
          cfg.*member = parse_per_tier<double>(key, value, parse_double);
        }
      },
      field.ref);
}

std::string render(const ScenarioConfig& cfg, const Field& field) {
  return std::visit(
      [&](auto member) -> std::string {
        const auto& v = cfg.*member;
        using M = std::remove_cvref_t<decltype(v)>;
        if constexpr (std::is_same_v<M, bool>) {
          return v ? "true" : "false";
        } else if constexpr (std::is_same_v<M, Vigilance>) {
          return to_string(v);
        } else if constexpr (std::is_same_v<M, std::optional<std::uint64_t>>) {
          return v ? fmt::format("{}", *v) : std::string("none");
        } else if constexpr (std::is_same_v<M, PerTier<std::uint64_t>> ||
                             std::is_same_v<M, PerTier<double>>) {
          return format_per_tier(v);
        } else {
          return fmt::format("{}", v);
        }
      },
      field.ref);
}

}  // namespace

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<KeyValueLine> split_key_values(std::string_view text) {
  std::vector<KeyValueLine> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::ConfigSyntax, fmt::format("line {}: expected 'key = value'", line_no));
    }
    KeyValueLine kv{line_no, trim(std::string_view(stripped).substr(0, eq)),
                    trim(std::string_view(stripped).substr(eq + 1))};
    if (kv.key.empty()) throw Error(ErrorCode::ConfigSyntax, fmt::format("line {}: empty key", line_no));
    out.push_back(std::move(kv));
  }
  return out;
}

ScenarioConfig parse_scenario(std::string_view text) {
  ScenarioConfig cfg;
  std::set<std::string> seen;
  for (const KeyValueLine& kv : split_key_values(text)) {
    const Field* field = find_field(kv.key);
    if (!field) {
      throw Error(ErrorCode::UnknownKey, fmt::format("line {}: unknown key '{}'", kv.line, kv.key));
    }
    if (!seen.insert(kv.key).second) {
      throw Error(ErrorCode::ConfigSyntax, fmt::format("line {}: duplicate key '{}'", kv.line, kv.key));
    }
    try {
      assign(cfg, *field, kv.value);
    } catch (const Error& e) {
      throw Error(e.code(), fmt::format("line {}: {}", kv.line, e.what()));
    }
  }
  return cfg;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, fmt::format("cannot read scenario '{}'", path.string()));
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str());
}

std::string to_scenario_text(const ScenarioConfig& cfg) {
  std::string out;
  for (const Field& f : fields()) {
    out += fmt::format("{} = {}\n", f.key, render(cfg, f));
  }
  return out;
}

void set_config_field(ScenarioConfig& cfg, std::string_view key, std::string_view value) {
  const Field* field = find_field(key);
  if (!field) throw Error(ErrorCode::UnknownKey, fmt::format("unknown key '{}'", key));
  assign(cfg, *field, trim(value));
}

bool is_sweepable_field(std::string_view key) {
  const Field* field = find_field(key);
  if (!field) return false;
  return !std::holds_alternative<PerTier<std::uint64_t> ScenarioConfig::*>(field->ref) &&
         !std::holds_alternative<PerTier<double> ScenarioConfig::*>(field->ref);
}

std::vector<std::string_view> config_field_names() {
  std::vector<std::string_view> out;
  for (const Field& f : fields()) out.push_back(f.key);
  return out;
}

}  // namespace strikesim
