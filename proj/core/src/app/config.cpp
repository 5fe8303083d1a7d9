#include "folio/app/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "folio/error.hpp"

namespace folio::app {
namespace {

namespace pt = boost::property_tree;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <typename T>
T parse_value(const std::string& key, const std::string& text) {
  std::istringstream in(trim(text));
  T v{};
  in >> v;
  require(!in.fail() && in.eof(), ErrorKind::kConfig,
          "config key '" + key + "' has malformed value '" + text + "'");
  return v;
}

template <>
bool parse_value<bool>(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t == "true" || t == "1" || t == "yes") return true;
  if (t == "false" || t == "0" || t == "no") return false;
  fail(ErrorKind::kConfig, "config key '" + key + "' expects true/false, got '" + text + "'");
}

template <typename T>
std::vector<T> parse_list(const std::string& key, const std::string& text) {
  std::vector<T> out;
  for (const auto& item : split_list(text)) out.push_back(parse_value<T>(key, item));
  return out;
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t k = 0; k < items.size(); ++k) out += (k ? "," : "") + items[k];
  return out;
}

template <typename T>
std::string join_numbers(const std::vector<T>& items) {
  std::ostringstream out;
  out << std::setprecision(17);
  for (std::size_t k = 0; k < items.size(); ++k) out << (k ? "," : "") << items[k];
  return out.str();
}

void apply(RunConfig& c, const std::string& section, const std::string& key,
           const std::string& value) {
  const std::string full = section + "." + key;
  auto num = [&]<typename T>(T& target) { target = parse_value<T>(full, value); };
  if (section == "data") {
    if (key == "path") c.data.path = trim(value);
    else if (key == "features") c.data.features = split_list(value);
    else if (key == "split_mode") c.data.split_mode = data::parse_split_mode(trim(value));
    else if (key == "embargo_days") {
      if (trim(value).empty() || trim(value) == "auto") c.data.embargo_days.reset();
      else c.data.embargo_days = parse_value<std::size_t>(full, value);
    }
    else if (key == "train_dates") c.data.train_dates = trim(value);
    else if (key == "validation_dates") c.data.validation_dates = trim(value);
    else if (key == "test_dates") c.data.test_dates = trim(value);
    else goto unknown;
  } else if (section == "env") {
    if (key == "window") num(c.env.window);
    else if (key == "kappa") num(c.env.kappa);
    else if (key == "lambda_risk") num(c.env.lambda_risk);
    else if (key == "cov_window") num(c.env.cov_window);
    else if (key == "include_cash") num(c.env.include_cash);
    else if (key == "name_cap") {
      if (trim(value).empty() || trim(value) == "none") c.env.name_cap.reset();
      else c.env.name_cap = parse_value<double>(full, value);
    } else goto unknown;
  } else if (section == "policy") {
    if (key == "width") num(c.policy.width);
    else if (key == "encoder") c.policy.encoder = policy::parse_temporal_encoder(trim(value));
    else if (key == "time_layers") num(c.policy.time_layers);
    else if (key == "cross_layers") num(c.policy.cross_layers);
    else if (key == "heads") num(c.policy.heads);
    else if (key == "pool") c.policy.pool = policy::parse_pool(trim(value));
    else if (key == "epsilon_alpha") num(c.policy.epsilon_alpha);
    else if (key == "asset_chunk") num(c.policy.asset_chunk);
    else goto unknown;
  } else if (section == "train") {
    auto& t = c.train;
    if (key == "algo") t.algo = rl::parse_algo(trim(value));
    else if (key == "lr") num(t.lr);
    else if (key == "gamma") num(t.gamma);
    else if (key == "gae_lambda") num(t.gae_lambda);
    else if (key == "clip_eps") num(t.clip_eps);
    else if (key == "kl_coef") num(t.kl_coef);
    else if (key == "value_coef") num(t.value_coef);
    else if (key == "entropy_coef") num(t.entropy_coef);
    else if (key == "rollout_days") num(t.rollout_days);
    else if (key == "updates_per_epoch") num(t.updates_per_epoch);
    else if (key == "minibatch") num(t.minibatch);
    else if (key == "microbatch") num(t.microbatch);
    else if (key == "epochs_per_update") num(t.epochs_per_update);
    else if (key == "seed") num(t.seed);
    else if (key == "clip_norm") num(t.clip_norm);
    else if (key == "epochs") num(t.epochs);
    else if (key == "checkpoint_every") num(t.checkpoint_every);
    else if (key == "normalize_advantages") num(t.normalize_advantages);
    else goto unknown;
  } else if (section == "eval") {
    if (key == "range") c.eval.range = trim(value);
    else if (key == "baselines") c.eval.baselines = split_list(value);
    else goto unknown;
  } else if (section == "finetune") {
    auto& g = c.grid;
    if (key == "learning_rates") g.learning_rates = parse_list<double>(full, value);
    else if (key == "epochs") g.epochs = parse_list<std::size_t>(full, value);
    else if (key == "minibatches") g.minibatches = parse_list<std::size_t>(full, value);
    else if (key == "microbatch") num(g.microbatch);
    else if (key == "extra_updates") num(g.extra_updates);
    else if (key == "metric") g.metric = rl::parse_eval_metric(trim(value));
    else goto unknown;
  } else if (section == "synthetic") {
    auto& s = c.synthetic;
    if (key == "assets") num(s.assets);
    else if (key == "days") num(s.days);
    else if (key == "variant") s.variant = trim(value);
    else if (key == "ic") num(s.ic);
    else if (key == "noise_vol") num(s.noise_vol);
    else if (key == "drift") num(s.drift);
    else if (key == "halt_prob") num(s.halt_prob);
    else if (key == "max_halt_days") num(s.max_halt_days);
    else if (key == "seed") num(s.seed);
    else if (key == "start_date") s.start_date = trim(value);
    else goto unknown;
  } else if (section == "output") {
    if (key == "dir") c.output_dir = trim(value);
    else goto unknown;
  } else {
    fail(ErrorKind::kConfig, "unknown config section [" + section + "]");
  }
  return;
unknown:
  fail(ErrorKind::kConfig, "unknown config key '" + full + "'");
}

}  // namespace

void SyntheticSpec::validate() const {
  require(assets >= 2, ErrorKind::kConfig, "synthetic: need at least 2 assets");
  require(days >= 3, ErrorKind::kConfig, "synthetic: need at least 3 days");
  require(ic >= 0.0 && ic < 1.0, ErrorKind::kConfig, "synthetic: ic must lie in [0, 1)");
  require(noise_vol > 0.0 && noise_vol < 0.2, ErrorKind::kConfig,
          "synthetic: noise_vol must lie in (0, 0.2)");
  require(halt_prob >= 0.0 && halt_prob < 1.0, ErrorKind::kConfig,
          "synthetic: halt_prob must lie in [0, 1)");
  require(max_halt_days >= 1, ErrorKind::kConfig, "synthetic: max_halt_days must be >= 1");
  require(variant == "planted" || variant == "cross_sectional", ErrorKind::kConfig,
          "synthetic: variant must be planted or cross_sectional");
  require(variant != "cross_sectional" || assets >= 4, ErrorKind::kConfig,
          "synthetic: cross_sectional needs at least 4 assets");
  require(data::parse_date(start_date).has_value(), ErrorKind::kConfig,
          "synthetic: bad start_date '" + start_date + "'");
}

void RunConfig::validate() const {
  env.validate();
  policy.validate();
  train.validate();
  require(grid.microbatch > 0, ErrorKind::kConfig, "finetune: microbatch must be positive");
  for (std::size_t mb : grid.minibatches) {
    require(mb % grid.microbatch == 0, ErrorKind::kConfig,
            "finetune: minibatch " + std::to_string(mb) + " is not divisible by the microbatch");
  }
}

RunConfig parse_config(const std::string& text, const std::string& origin) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    fail(ErrorKind::kConfig, origin + ": " + e.message() + " (line " +
                                 std::to_string(e.line()) + ")");
  }
  RunConfig c;
  for (const auto& [section, body] : tree) {
    require(!body.empty() || body.data().empty(), ErrorKind::kConfig,
            origin + ": key '" + section + "' outside any section");
    for (const auto& [key, node] : body) apply(c, section, key, node.data());
  }
  c.validate();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(in.good(), ErrorKind::kIo, "cannot open config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.string());
}

std::string to_ini(const RunConfig& c) {
  std::ostringstream o;
  o << std::setprecision(17) << std::boolalpha;
  o << "[data]\n"
    << "path=" << c.data.path.string() << '\n'
    << "features=" << join(c.data.features) << '\n'
    << "split_mode=" << data::to_string(c.data.split_mode) << '\n'
    << "embargo_days=" << (c.data.embargo_days ? std::to_string(*c.data.embargo_days) : "auto")
    << '\n'
    << "train_dates=" << c.data.train_dates << '\n'
    << "validation_dates=" << c.data.validation_dates << '\n'
    << "test_dates=" << c.data.test_dates << "\n\n";
  o << "[env]\n"
    << "window=" << c.env.window << '\n'
    << "kappa=" << c.env.kappa << '\n'
    << "lambda_risk=" << c.env.lambda_risk << '\n'
    << "cov_window=" << c.env.cov_window << '\n'
    << "include_cash=" << c.env.include_cash << '\n'
    << "name_cap=";
  if (c.env.name_cap) o << *c.env.name_cap;
  else o << "none";
  o << "\n\n";
  o << "[policy]\n"
    << "width=" << c.policy.width << '\n'
    << "encoder=" << policy::to_string(c.policy.encoder) << '\n'
    << "time_layers=" << c.policy.time_layers << '\n'
    << "cross_layers=" << c.policy.cross_layers << '\n'
    << "heads=" << c.policy.heads << '\n'
    << "pool=" << policy::to_string(c.policy.pool) << '\n'
    << "epsilon_alpha=" << c.policy.epsilon_alpha << '\n'
    << "asset_chunk=" << c.policy.asset_chunk << "\n\n";
  const auto& t = c.train;
  o << "[train]\n"
    << "algo=" << rl::to_string(t.algo) << '\n'
    << "lr=" << t.lr << '\n'
    << "gamma=" << t.gamma << '\n'
    << "gae_lambda=" << t.gae_lambda << '\n'
    << "clip_eps=" << t.clip_eps << '\n'
    << "kl_coef=" << t.kl_coef << '\n'
    << "value_coef=" << t.value_coef << '\n'
    << "entropy_coef=" << t.entropy_coef << '\n'
    << "rollout_days=" << t.rollout_days << '\n'
    << "updates_per_epoch=" << t.updates_per_epoch << '\n'
    << "minibatch=" << t.minibatch << '\n'
    << "microbatch=" << t.microbatch << '\n'
    << "epochs_per_update=" << t.epochs_per_update << '\n'
    << "seed=" << t.seed << '\n'
    << "clip_norm=" << t.clip_norm << '\n'
    << "epochs=" << t.epochs << '\n'
    << "checkpoint_every=" << t.checkpoint_every << '\n'
    << "normalize_advantages=" << t.normalize_advantages << "\n\n";
  o << "[eval]\n"
    << "range=" << c.eval.range << '\n'
    << "baselines=" << join(c.eval.baselines) << "\n\n";
  o << "[finetune]\n"
    << "learning_rates=" << join_numbers(c.grid.learning_rates) << '\n'
    << "epochs=" << join_numbers(c.grid.epochs) << '\n'
    << "minibatches=" << join_numbers(c.grid.minibatches) << '\n'
    << "microbatch=" << c.grid.microbatch << '\n'
    << "extra_updates=" << c.grid.extra_updates << '\n'
    << "metric=" << rl::to_string(c.grid.metric) << "\n\n";
  const auto& s = c.synthetic;
  o << "[synthetic]\n"
    << "assets=" << s.assets << '\n'
    << "days=" << s.days << '\n'
    << "variant=" << s.variant << '\n'
    << "ic=" << s.ic << '\n'
    << "noise_vol=" << s.noise_vol << '\n'
    << "drift=" << s.drift << '\n'
    << "halt_prob=" << s.halt_prob << '\n'
    << "max_halt_days=" << s.max_halt_days << '\n'
    << "seed=" << s.seed << '\n'
    << "start_date=" << s.start_date << "\n\n";
  o << "[output]\n"
    << "dir=" << c.output_dir.string() << '\n';
  return o.str();
}

}  // namespace folio::app
