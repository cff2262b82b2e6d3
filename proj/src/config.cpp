#include "hpcids/config.hpp"

#include <fstream>
#include <map>
#include <set>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include "hpcids/rng.hpp"
#include "text_util.hpp"

namespace hpcids {

void RunConfig::derive_seeds() {
  traffic.rng_seed = stage_seed(seed, "traffic");
  dos.payload_seed = stage_seed(seed, "dos");
  sweep.seed = stage_seed(seed, "sweep");
}

void validate(const RunConfig& config) {
  validate(config.traffic);
  validate(config.dos);
  if (config.timing.bitrate == 0) throw Error(ErrorKind::Config, "bitrate must be positive");
  validate(config.receiver.policy);
  validate(config.receiver.cache);
  validate(config.sweep);
}

namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>> kKnownKeys = {
    {"traffic", {"duration", "bitrate", "stuffing", "ids"}},
    {"dos", {"start", "stop", "period", "payload"}},
    {"ecu", {"window", "key", "l1i_size", "l1i_assoc", "l1d_size", "l1d_assoc", "l2_size", "l2_assoc", "line_size"}},
    {"features", {"prune_mode", "threshold"}},
    {"ocsvm", {"nu", "gamma", "tolerance", "max_iterations"}},
    {"sweep", {"fractions", "holdout"}},
};

Error bad_value(std::string_view key, std::string_view value) {
  return Error(ErrorKind::Config, fmt::format("bad value '{}' for '{}'", value, key));
}

double to_double(std::string_view key, std::string_view text) {
  const auto v = detail::parse_double(detail::trim(text));
  if (!v) throw bad_value(key, text);
  return *v;
}

template <typename T>
T to_uint(std::string_view key, std::string_view text) {
  text = detail::trim(text);
  std::optional<T> v;
  if (text.starts_with("0x") || text.starts_with("0X"))
    v = detail::parse_hex<T>(text.substr(2));
  else
    v = detail::parse_int<T>(text);
  if (!v) throw bad_value(key, text);
  return *v;
}

bool to_bool(std::string_view key, std::string_view text) {
  text = detail::trim(text);
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw bad_value(key, text);
}

std::vector<double> to_double_list(std::string_view key, std::string_view text) {
  std::vector<double> out;
  for (auto item : detail::split(text, ',')) out.push_back(to_double(key, item));
  return out;
}

// "0x316:0.01:8" -> id, period, optional dlc (default 8)
std::vector<PeriodicId> to_id_list(std::string_view text) {
  std::vector<PeriodicId> out;
  for (auto item : detail::split(text, ',')) {
    item = detail::trim(item);
    if (item.empty()) continue;
    const auto parts = detail::split(item, ':');
    if (parts.size() < 2 || parts.size() > 3) throw bad_value("ids", item);
    PeriodicId spec;
    auto id_text = detail::trim(parts[0]);
    if (id_text.starts_with("0x") || id_text.starts_with("0X")) id_text.remove_prefix(2);
    const auto id = detail::parse_hex<std::uint32_t>(id_text);
    if (!id || *id > kMaxStandardId) throw bad_value("ids", item);
    spec.id = static_cast<std::uint16_t>(*id);
    spec.period = to_double("ids", parts[1]);
    if (parts.size() == 3) {
      const auto dlc = to_uint<unsigned>("ids", parts[2]);
      if (dlc > kMaxDlc) throw bad_value("ids", item);
      spec.dlc = static_cast<std::uint8_t>(dlc);
    }
    out.push_back(spec);
  }
  return out;
}

WindowPolicy to_window(std::string_view text) {
  text = detail::trim(text);
  if (text == "frame") return PerFrame{};
  if (text.starts_with("frames:")) return PerNFrames{to_uint<std::uint64_t>("window", text.substr(7))};
  if (text.starts_with("time:")) return PerTime{to_double("window", text.substr(5))};
  throw bad_value("window", text);
}

aes::Key to_key(std::string_view text) {
  text = detail::trim(text);
  if (text.size() != 32) throw bad_value("key", text);
  aes::Key key{};
  for (std::size_t i = 0; i < 16; ++i) {
    const auto b = detail::parse_hex<std::uint32_t>(text.substr(2 * i, 2));
    if (!b) throw bad_value("key", text);
    key[i] = static_cast<std::uint8_t>(*b);
  }
  return key;
}

void apply(RunConfig& c, const std::string& section, const std::string& key, const std::string& value) {
  auto d = [&] { return to_double(key, value); };
  if (section == "traffic") {
    if (key == "duration") c.traffic.duration = d();
    if (key == "bitrate") c.timing.bitrate = to_uint<std::uint32_t>(key, value);
    if (key == "stuffing") c.timing.worst_case_stuffing = to_bool(key, value);
    if (key == "ids") c.traffic.ids = to_id_list(value);
  } else if (section == "dos") {
    if (key == "start") c.dos.start = d();
    if (key == "stop") c.dos.stop = d();
    if (key == "period") c.dos.period = d();
    if (key == "payload") {
      const auto v = detail::trim(value);
      if (v == "zeros")
        c.dos.payload = DosPayload::Zeros;
      else if (v == "random")
        c.dos.payload = DosPayload::RandomSeeded;
      else
        throw bad_value(key, value);
    }
  } else if (section == "ecu") {
    auto& cache = c.receiver.cache;
    if (key == "window") c.receiver.policy = to_window(value);
    if (key == "key") c.receiver.key = to_key(value);
    if (key == "l1i_size") cache.l1i.capacity = to_uint<std::uint32_t>(key, value);
    if (key == "l1i_assoc") cache.l1i.associativity = to_uint<std::uint32_t>(key, value);
    if (key == "l1d_size") cache.l1d.capacity = to_uint<std::uint32_t>(key, value);
    if (key == "l1d_assoc") cache.l1d.associativity = to_uint<std::uint32_t>(key, value);
    if (key == "l2_size") cache.l2.capacity = to_uint<std::uint32_t>(key, value);
    if (key == "l2_assoc") cache.l2.associativity = to_uint<std::uint32_t>(key, value);
    if (key == "line_size") {
      const auto line = to_uint<std::uint32_t>(key, value);
      cache.l1i.line_size = cache.l1d.line_size = cache.l2.line_size = line;
    }
  } else if (section == "features") {
    if (key == "prune_mode") c.sweep.detector.prune_mode = parse_prune_mode(detail::trim(value));
    if (key == "threshold") c.sweep.detector.prune_threshold = d();
  } else if (section == "ocsvm") {
    auto& o = c.sweep.detector.ocsvm;
    if (key == "nu") o.nu = d();
    if (key == "gamma") {
      if (detail::trim(value) == "auto")
        o.gamma.reset();
      else
        o.gamma = d();
    }
    if (key == "tolerance") o.tolerance = d();
    if (key == "max_iterations") o.max_iterations = to_uint<std::uint64_t>(key, value);
  } else if (section == "sweep") {
    if (key == "fractions") c.sweep.fractions = to_double_list(key, value);
    if (key == "holdout") c.sweep.holdout = d();
  }
}

}  // namespace

RunConfig load_config(std::istream& in) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw Error(ErrorKind::Config, e.what());
  }

  RunConfig config;
  for (const auto& [name, node] : tree) {
    if (node.empty() && !kKnownKeys.contains(name)) {
      if (name != "seed") throw Error(ErrorKind::Config, fmt::format("unknown top-level key '{}'", name));
      config.seed = to_uint<std::uint64_t>("seed", node.data());
      continue;
    }
    const auto known = kKnownKeys.find(name);
    if (known == kKnownKeys.end()) throw Error(ErrorKind::Config, fmt::format("unknown section [{}]", name));
    for (const auto& [key, leaf] : node) {
      if (!known->second.contains(key))
        throw Error(ErrorKind::Config, fmt::format("unknown key '{}' in [{}]", key, name));
      apply(config, name, key, leaf.data());
    }
  }
  config.derive_seeds();
  validate(config);
  return config;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, fmt::format("cannot open config '{}'", path.string()));
  return load_config(in);
}

}  // namespace hpcids
