#include "safe/core/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include "safe/core/error.hpp"
#include "safe/core/text.hpp"

namespace safe {
namespace {

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
  value = trim(value);
  T out{};
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size()) {
    throw ConfigError(std::string(key), "cannot parse '" + std::string(value) + "' as a number");
  }
  return out;
}

struct Field {
  std::string name;
  std::function<void(PipelineConfig&, std::string_view)> set;
  std::function<std::string(const PipelineConfig&)> get;
};

template <typename T>
Field numeric_field(std::string name, T PipelineConfig::*member) {
  return Field{
      name,
      [name, member](PipelineConfig& c, std::string_view v) { c.*member = parse_number<T>(name, v); },
      [member](const PipelineConfig& c) {
        if constexpr (std::is_floating_point_v<T>) {
          return format_double(c.*member);
        } else {
          return std::to_string(c.*member);
        }
      }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    std::vector<Field> f;
    f.push_back(numeric_field("n_generations", &PipelineConfig::n_generations));
    f.push_back(numeric_field("entropy_threshold", &PipelineConfig::entropy_threshold));
    f.push_back(numeric_field("density_threshold", &PipelineConfig::density_threshold));
    f.push_back(numeric_field("cluster_distance_threshold", &PipelineConfig::cluster_distance_threshold));
    f.push_back(numeric_field("max_enrichment_iters", &PipelineConfig::max_enrichment_iters));
    f.push_back(numeric_field("top_k_features", &PipelineConfig::top_k_features));
    f.push_back(numeric_field("emphasize_count", &PipelineConfig::emphasize_count));
    f.push_back(Field{
        "quartile_scheme",
        [](PipelineConfig& c, std::string_view v) { c.quartile_scheme = parse_quartile_scheme(trim(v)); },
        [](const PipelineConfig& c) { return std::string(to_string(c.quartile_scheme)); }});
    f.push_back(Field{"mode", [](PipelineConfig& c, std::string_view v) { c.mode = parse_mode(trim(v)); },
                      [](const PipelineConfig& c) { return std::string(to_string(c.mode)); }});
    f.push_back(numeric_field("seed", &PipelineConfig::seed));
    f.push_back(numeric_field("temperature", &PipelineConfig::temperature));
    f.push_back(numeric_field("max_tokens", &PipelineConfig::max_tokens));
    f.push_back(numeric_field("generation_parallelism", &PipelineConfig::generation_parallelism));
    f.push_back(numeric_field("retry_budget", &PipelineConfig::retry_budget));
    f.push_back(Field{
        "token_aggregation",
        [](PipelineConfig& c, std::string_view v) { c.token_aggregation = parse_token_aggregation(trim(v)); },
        [](const PipelineConfig& c) { return std::string(to_string(c.token_aggregation)); }});
    return f;
  }();
  return table;
}

const Field& find_field(std::string_view key) {
  for (const auto& f : fields()) {
    if (f.name == key) return f;
  }
  throw ConfigError(std::string(key), "unknown configuration key");
}

}  // namespace

void validate(const PipelineConfig& c) {
  if (c.n_generations < 2) throw ConfigError("n_generations", "must be >= 2");
  if (!(c.entropy_threshold > 0.0)) throw ConfigError("entropy_threshold", "must be > 0");
  if (!(c.density_threshold > 0.0 && c.density_threshold <= 1.0)) {
    throw ConfigError("density_threshold", "must lie in (0, 1]");
  }
  if (!(c.cluster_distance_threshold >= 0.0)) throw ConfigError("cluster_distance_threshold", "must be >= 0");
  if (c.max_enrichment_iters < 1) throw ConfigError("max_enrichment_iters", "must be >= 1");
  if (c.top_k_features < 1) throw ConfigError("top_k_features", "must be >= 1");
  if (c.emphasize_count < 1) throw ConfigError("emphasize_count", "must be >= 1");
  if (!(c.temperature >= 0.0)) throw ConfigError("temperature", "must be >= 0");
  if (c.max_tokens < 1) throw ConfigError("max_tokens", "must be >= 1");
  if (c.generation_parallelism < 1) throw ConfigError("generation_parallelism", "must be >= 1");
  if (c.retry_budget < 0) throw ConfigError("retry_budget", "must be >= 0");
}

void apply_override(PipelineConfig& config, std::string_view key, std::string_view value) {
  find_field(trim(key)).set(config, value);
}

PipelineConfig parse_config(std::string_view text, const ConfigOverrides& overrides) {
  PipelineConfig config;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    std::string_view line = trim(text.substr(pos, end - pos));
    pos = end + 1;
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("", "line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    apply_override(config, line.substr(0, eq), line.substr(eq + 1));
  }
  for (const auto& [k, v] : overrides) apply_override(config, k, v);
  validate(config);
  return config;
}

PipelineConfig load_config(const std::filesystem::path& path, const ConfigOverrides& overrides) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("", "cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), overrides);
}

std::string serialize_config(const PipelineConfig& config) {
  std::string out;
  for (const auto& f : fields()) {
    out += f.name;
    out += " = ";
    out += f.get(config);
    out += '\n';
  }
  return out;
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& f : fields()) k.push_back(f.name);
    return k;
  }();
  return keys;
}

}  // namespace safe
