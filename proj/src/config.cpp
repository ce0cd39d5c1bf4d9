#include "shapelab/config.hpp"

#include "shapelab/errors.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace shapelab {

namespace pt = boost::property_tree;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& text, const std::string& where) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
    throw ValidationError(where + ": expected a number, got '" + text + "'");
  return v;
}

long long to_integer(const std::string& text, const std::string& where) {
  const std::string t = trim(text);
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
    throw ValidationError(where + ": expected an integer, got '" + text + "'");
  return v;
}

std::string g17(double x) { return fmt::format("{:.17g}", x); }

// Reads the keys of one section, rejecting anything not listed.
class Section {
 public:
  Section(const pt::ptree& tree, std::string name, std::set<std::string> known)
      : tree_(tree), name_(std::move(name)) {
    for (const auto& [key, value] : tree_) {
      if (!value.empty()) throw ValidationError("config: nested key in [" + name_ + "]");
      if (!known.count(key)) throw ValidationError("config: unknown key '" + key + "' in [" + name_ + "]");
    }
  }

  template <class T>
  void read(const std::string& key, T& target) const {
    const auto v = tree_.get_optional<std::string>(key);
    if (!v) return;
    const std::string where = "[" + name_ + "] " + key;
    if constexpr (std::is_same_v<T, double>)
      target = to_double(*v, where);
    else if constexpr (std::is_same_v<T, std::string>)
      target = trim(*v);
    else
      target = static_cast<T>(to_integer(*v, where));
  }

  std::optional<std::string> raw(const std::string& key) const {
    const auto v = tree_.get_optional<std::string>(key);
    return v ? std::optional<std::string>(*v) : std::nullopt;
  }

 private:
  const pt::ptree& tree_;
  std::string name_;
};

std::set<std::string> domain_keys() {
  std::set<std::string> keys = {"center_x", "center_y", "r0"};
  for (int k = 1; k <= kMaxMode; ++k) {
    keys.insert("a" + std::to_string(k));
    keys.insert("b" + std::to_string(k));
  }
  return keys;
}

StarDomain read_domain(const pt::ptree& tree) {
  const Section s(tree, "domain", domain_keys());
  double cx = 0.0, cy = 0.0, r0 = 1.0;
  s.read("center_x", cx);
  s.read("center_y", cy);
  s.read("r0", r0);
  std::vector<FourierMode> modes;
  for (int k = 1; k <= kMaxMode; ++k) {
    FourierMode m{k, 0.0, 0.0};
    s.read("a" + std::to_string(k), m.a);
    s.read("b" + std::to_string(k), m.b);
    if (m.a != 0.0 || m.b != 0.0) modes.push_back(m);
  }
  return StarDomain(Point(cx, cy), r0, std::move(modes));
}

pt::ptree read_ini(std::istream& in, const std::string& origin) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ValidationError(origin + ": " + e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  for (const auto& [key, value] : tree)
    if (value.empty()) throw ValidationError(origin + ": key '" + key + "' outside of a section");
  return tree;
}

}  // namespace

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(static_cast<int>(to_integer(item, "integer list")));
  if (out.empty()) throw ValidationError("empty integer list");
  return out;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double(item, "number list"));
  if (out.empty()) throw ValidationError("empty number list");
  return out;
}

ExperimentConfig parse_config(std::istream& in, const std::string& origin) {
  const pt::ptree tree = read_ini(in, origin);
  ExperimentConfig cfg;
  for (const auto& [name, section] : tree) {
    if (name == "domain") {
      cfg.domain = read_domain(section);
    } else if (name == "energy") {
      const Section s(section, name, {"v", "vmax", "eta", "torsion", "tau", "c_nl", "c0", "h_norm"});
      EnergyParams& p = cfg.energy;
      s.read("v", p.v);
      s.read("vmax", p.vmax);
      s.read("eta", p.eta);
      s.read("torsion", p.torsion_coeff);
      s.read("tau", p.tau);
      s.read("c_nl", p.c_nl);
      s.read("c0", p.c0);
      s.read("h_norm", p.h_norm);
      p.validate();
    } else if (name == "mesh") {
      const Section s(section, name, {"h", "rings", "grid"});
      s.read("h", cfg.mesh.h);
      s.read("rings", cfg.mesh.rings);
      s.read("grid", cfg.mesh.grid);
      if (!(cfg.mesh.h > 0.0) || cfg.mesh.rings < 0 || cfg.mesh.grid < 0.0)
        throw ValidationError(origin + ": [mesh] values out of range");
    } else if (name == "optimizer") {
      const Section s(section, name,
                      {"max_modes", "initial_step", "armijo_factor", "sufficient_decrease", "max_backtracks", "max_iter",
                       "grad_tol", "volume", "h_coarse", "h_fine", "fine_iterations", "fd_step"});
      OptimizerConfig& o = cfg.optimizer;
      s.read("max_modes", o.max_modes);
      s.read("initial_step", o.initial_step);
      s.read("armijo_factor", o.armijo_factor);
      s.read("sufficient_decrease", o.sufficient_decrease);
      s.read("max_backtracks", o.max_backtracks);
      s.read("max_iter", o.max_iter);
      s.read("grad_tol", o.grad_tol);
      s.read("h_coarse", o.h_coarse);
      s.read("h_fine", o.h_fine);
      s.read("fine_iterations", o.fine_iterations);
      s.read("fd_step", o.fd_step);
      if (const auto v = s.raw("volume")) {
        const std::string mode = trim(*v);
        if (mode == "renormalize")
          o.volume = VolumeMode::renormalize;
        else if (mode == "penalized")
          o.volume = VolumeMode::penalized;
        else
          throw ValidationError(origin + ": [optimizer] volume must be renormalize or penalized");
      }
      o.validate();
    } else if (name == "sweep") {
      const Section s(section, name, {"modes", "amplitudes"});
      if (const auto v = s.raw("modes")) cfg.sweep.modes = parse_int_list(*v);
      if (const auto v = s.raw("amplitudes")) cfg.sweep.amplitudes = parse_double_list(*v);
    } else if (name == "run") {
      const Section s(section, name, {"seed", "jobs", "output_dir"});
      if (const auto v = s.raw("seed")) {
        const long long seed = to_integer(*v, "[run] seed");
        if (seed < 0) throw ValidationError(origin + ": [run] seed must be nonnegative");
        cfg.run.seed = static_cast<std::uint64_t>(seed);
      }
      s.read("jobs", cfg.run.jobs);
      s.read("output_dir", cfg.run.output_dir);
      if (cfg.run.jobs < 1) throw ValidationError(origin + ": [run] jobs must be positive");
    } else {
      throw ValidationError(origin + ": unknown section [" + name + "]");
    }
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file '" + path + "'");
  return parse_config(in, path);
}

StarDomain load_domain(const std::string& path) {
  const ExperimentConfig cfg = load_config(path);
  if (!cfg.domain) throw ValidationError(path + ": no [domain] section");
  return *cfg.domain;
}

void write_domain(std::ostream& out, const StarDomain& d) { out << domain_text(d); }

std::string domain_text(const StarDomain& d) {
  std::string s = "[domain]\n";
  s += "center_x = " + g17(d.center().x()) + "\n";
  s += "center_y = " + g17(d.center().y()) + "\n";
  s += "r0 = " + g17(d.r0()) + "\n";
  for (const auto& m : d.modes()) {
    if (m.a != 0.0) s += fmt::format("a{} = {}\n", m.k, g17(m.a));
    if (m.b != 0.0) s += fmt::format("b{} = {}\n", m.k, g17(m.b));
  }
  return s;
}

std::string canonical_text(const ExperimentConfig& cfg) {
  std::string s;
  if (cfg.domain) s += domain_text(*cfg.domain);
  const EnergyParams& p = cfg.energy;
  s += fmt::format("[energy]\nv = {}\nvmax = {}\neta = {}\ntorsion = {}\ntau = {}\nc_nl = {}\nc0 = {}\nh_norm = {}\n",
                   g17(p.v), g17(p.vmax), g17(p.eta), g17(p.torsion_coeff), g17(p.tau), g17(p.c_nl), g17(p.c0),
                   g17(p.h_norm));
  s += fmt::format("[mesh]\nh = {}\nrings = {}\ngrid = {}\n", g17(cfg.mesh.h), cfg.mesh.rings, g17(cfg.mesh.grid));
  const OptimizerConfig& o = cfg.optimizer;
  s += fmt::format(
      "[optimizer]\nmax_modes = {}\ninitial_step = {}\narmijo_factor = {}\nsufficient_decrease = {}\n"
      "max_backtracks = {}\nmax_iter = {}\ngrad_tol = {}\nvolume = {}\nh_coarse = {}\nh_fine = {}\n"
      "fine_iterations = {}\nfd_step = {}\n",
      o.max_modes, g17(o.initial_step), g17(o.armijo_factor), g17(o.sufficient_decrease), o.max_backtracks, o.max_iter,
      g17(o.grad_tol), o.volume == VolumeMode::renormalize ? "renormalize" : "penalized", g17(o.h_coarse),
      g17(o.h_fine), o.fine_iterations, g17(o.fd_step));
  s += "[sweep]\nmodes = ";
  for (std::size_t i = 0; i < cfg.sweep.modes.size(); ++i) s += (i ? "," : "") + std::to_string(cfg.sweep.modes[i]);
  s += "\namplitudes = ";
  for (std::size_t i = 0; i < cfg.sweep.amplitudes.size(); ++i) s += (i ? "," : "") + g17(cfg.sweep.amplitudes[i]);
  // jobs and output_dir do not change results
  s += fmt::format("\n[run]\nseed = {}\n", cfg.run.seed);
  return s;
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace shapelab
