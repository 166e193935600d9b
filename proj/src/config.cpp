#include "frost/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace frost {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

[[noreturn]] void fail(int line, const std::string& msg) {
  throw std::runtime_error("config line " + std::to_string(line) + ": " + msg);
}

double to_double(const std::string& v, int line) {
  try {
    size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) fail(line, "trailing characters in number '" + v + "'");
    return x;
  } catch (const std::runtime_error&) {
    throw;
  } catch (const std::exception&) {
    fail(line, "expected a number, got '" + v + "'");
  }
}

int to_int(const std::string& v, int line) {
  try {
    size_t pos = 0;
    const int x = std::stoi(v, &pos);
    if (pos != v.size()) fail(line, "trailing characters in integer '" + v + "'");
    return x;
  } catch (const std::runtime_error&) {
    throw;
  } catch (const std::exception&) {
    fail(line, "expected an integer, got '" + v + "'");
  }
}

bool to_bool(const std::string& v, int line) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  fail(line, "expected a boolean, got '" + v + "'");
}

std::vector<std::string> split(const std::string& v, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<double> to_double_list(const std::string& v, int line) {
  std::vector<double> out;
  for (const auto& item : split(v, ',')) out.push_back(to_double(item, line));
  return out;
}

std::vector<int> to_int_list(const std::string& v, int line) {
  std::vector<int> out;
  for (const auto& item : split(v, ',')) out.push_back(to_int(item, line));
  return out;
}

// "x,y; x,y; ..." pairs
std::vector<Vec2> to_centers(const std::string& v, int line) {
  std::vector<Vec2> out;
  for (const auto& pair : split(v, ';')) {
    const auto xy = to_double_list(pair, line);
    if (xy.size() != 2) fail(line, "pipe center needs exactly x,y");
    out.push_back({xy[0], xy[1]});
  }
  return out;
}

// layer0_k_liquid and friends
bool set_layer_key(SimulationConfig& cfg, const std::string& key,
                   const std::string& value, int line) {
  if (key.rfind("layer", 0) != 0) return false;
  const auto us = key.find('_');
  if (us == std::string::npos || us < 6) return false;
  int idx = 0;
  try {
    idx = std::stoi(key.substr(5, us - 5));
  } catch (const std::exception&) {
    return false;
  }
  if (idx < 0 || idx > 63) fail(line, "layer index out of range in '" + key + "'");
  if (static_cast<size_t>(idx) >= cfg.layers.size())
    cfg.layers.resize(idx + 1, LayerProperties{});
  LayerProperties& lay = cfg.layers[idx];
  const std::string field = key.substr(us + 1);
  const double x = to_double(value, line);
  if (field == "k_liquid")
    lay.k_liquid = x;
  else if (field == "k_frozen")
    lay.k_frozen = x;
  else if (field == "c_rho_liquid")
    lay.c_rho_liquid = x;
  else if (field == "c_rho_frozen")
    lay.c_rho_frozen = x;
  else if (field == "latent_heat")
    lay.latent_heat = x;
  else if (field == "mobility")
    lay.mobility = x;
  else
    fail(line, "unknown layer field '" + field + "'");
  return true;
}

std::vector<Vec2> resolved_centers(const SimulationConfig& cfg) {
  return cfg.pipe_centers.empty() ? default_pipe_centers() : cfg.pipe_centers;
}

double resolved_radius(const SimulationConfig& cfg) {
  if (cfg.pipe_radius > 0.0) return cfg.pipe_radius;
  const double hx = cfg.lx / cfg.nx;
  const double hy = cfg.ly / cfg.ny;
  return std::sqrt(hx * hx + hy * hy);
}

}  // namespace

SimulationConfig parse_config_text(const std::string& text) {
  SimulationConfig cfg;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line = 0;

  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string s = trim(raw);
    if (s.empty()) continue;

    if (s.front() == '[') {
      if (s.back() != ']') fail(line, "unterminated section header");
      section = trim(s.substr(1, s.size() - 2));
      continue;
    }

    const auto eq = s.find('=');
    if (eq == std::string::npos) fail(line, "expected 'key = value'");
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (key.empty()) fail(line, "empty key");

    if (section == "geometry") {
      if (key == "nx")
        cfg.nx = to_int(value, line);
      else if (key == "ny")
        cfg.ny = to_int(value, line);
      else if (key == "lx")
        cfg.lx = to_double(value, line);
      else if (key == "ly")
        cfg.ly = to_double(value, line);
      else if (key == "coarse_nx")
        cfg.coarse_nx = to_int(value, line);
      else if (key == "coarse_ny")
        cfg.coarse_ny = to_int(value, line);
      else if (key == "pipe_centers")
        cfg.pipe_centers = to_centers(value, line);
      else if (key == "pipe_radius")
        cfg.pipe_radius = to_double(value, line);
      else if (key == "stripe_bounds")
        cfg.stripe_bounds = to_double_list(value, line);
      else if (key == "stripe_layers")
        cfg.stripe_layers = to_int_list(value, line);
      else
        fail(line, "unknown key geometry." + key);
    } else if (section == "materials") {
      if (key == "t_star")
        cfg.phase.t_star = to_double(value, line);
      else if (key == "delta")
        cfg.phase.delta = to_double(value, line);
      else if (key == "epsilon")
        cfg.phase.epsilon = to_double(value, line);
      else if (set_layer_key(cfg, key, value, line)) {
        // explicit layer keys override the built-in table in place
      } else
        fail(line, "unknown key materials." + key);
    } else if (section == "time") {
      if (key == "t_max_days")
        cfg.t_max_days = to_double(value, line);
      else if (key == "n_steps")
        cfg.n_steps = to_int(value, line);
      else
        fail(line, "unknown key time." + key);
    } else if (section == "boundary") {
      if (key == "test")
        cfg.test_case = to_int(value, line);
      else if (key == "t_pipe")
        cfg.t_pipe = to_double(value, line);
      else if (key == "t_initial")
        cfg.t_initial = to_double(value, line);
      else
        fail(line, "unknown key boundary." + key);
    } else if (section == "multiscale") {
      if (key == "offline_bases")
        cfg.offline_bases = to_int(value, line);
      else if (key == "online_bases")
        cfg.online_bases = to_int(value, line);
      else if (key == "period")
        cfg.period = to_int(value, line);
      else if (key == "accumulate_online")
        cfg.accumulate_online = to_bool(value, line);
      else if (key == "use_lagged_pressure")
        cfg.use_lagged_pressure = to_bool(value, line);
      else if (key == "velocity_sign")
        cfg.velocity_sign = to_double(value, line);
      else
        fail(line, "unknown key multiscale." + key);
    } else if (section == "output") {
      if (key == "directory")
        cfg.output_dir = value;
      else if (key == "snapshot_layers")
        cfg.snapshot_layers = to_int_list(value, line);
      else
        fail(line, "unknown key output." + key);
    } else if (section.empty()) {
      fail(line, "key '" + key + "' before any [section]");
    } else {
      fail(line, "unknown section [" + section + "]");
    }
  }

  cfg.validate();
  return cfg;
}

SimulationConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

void SimulationConfig::validate() const {
  auto require = [](bool ok, const std::string& msg) {
    if (!ok) throw std::invalid_argument("config: " + msg);
  };
  require(nx >= 1 && ny >= 1, "nx and ny must be >= 1");
  require(lx > 0.0 && ly > 0.0, "lx and ly must be positive");
  require(coarse_nx >= 1 && coarse_ny >= 1, "coarse grid must be >= 1x1");
  require(nx % coarse_nx == 0 && ny % coarse_ny == 0,
          "fine cells must divide evenly into coarse cells");
  require(pipe_radius >= 0.0, "pipe_radius must be >= 0 (0 = auto)");
  for (const auto& c : resolved_centers(*this))
    require(c.x >= 0.0 && c.x <= lx && c.y >= 0.0 && c.y <= ly,
            "pipe center outside the domain");
  require(!stripe_layers.empty(), "need at least one material stripe");
  require(stripe_bounds.size() + 1 == stripe_layers.size(),
          "stripe_bounds must have one fewer entry than stripe_layers");
  require(std::is_sorted(stripe_bounds.begin(), stripe_bounds.end()),
          "stripe_bounds must ascend");
  require(!layers.empty(), "no material layers defined");
  for (int id : stripe_layers)
    require(id >= 0 && id < static_cast<int>(layers.size()),
            "stripe references undefined layer " + std::to_string(id));
  for (size_t i = 0; i < layers.size(); ++i) {
    const auto& lay = layers[i];
    require(lay.k_liquid > 0.0 && lay.k_frozen > 0.0,
            "layer " + std::to_string(i) + " conductivities must be positive");
    require(lay.c_rho_liquid > 0.0 && lay.c_rho_frozen > 0.0,
            "layer " + std::to_string(i) + " capacities must be positive");
    require(lay.latent_heat >= 0.0 && lay.mobility >= 0.0,
            "layer " + std::to_string(i) + " latent heat and mobility must be >= 0");
  }
  require(phase.delta > 0.0, "delta must be positive");
  require(phase.epsilon > 0.0 && phase.epsilon <= 1.0, "epsilon must lie in (0, 1]");
  require(t_max_days > 0.0, "t_max_days must be positive");
  require(n_steps >= 1, "n_steps must be >= 1");
  require(test_case >= 0 && test_case <= 2, "test must be 0, 1 or 2");
  require(offline_bases >= 1, "offline_bases must be >= 1");
  require(online_bases >= 0, "online_bases must be >= 0");
  require(period >= 1, "period must be >= 1");
  require(velocity_sign == -1.0 || velocity_sign == 1.0,
          "velocity_sign must be -1 or 1");
  for (int l : snapshot_layers)
    require(l >= 0 && l <= n_steps, "snapshot layer outside run");
}

std::uint64_t SimulationConfig::offline_fingerprint() const {
  std::string buf;
  auto put = [&buf](const void* p, size_t n) {
    buf.append(static_cast<const char*>(p), n);
  };
  auto put_i = [&](int v) { put(&v, sizeof v); };
  auto put_d = [&](double v) { put(&v, sizeof v); };

  put_i(nx);
  put_i(ny);
  put_d(lx);
  put_d(ly);
  put_i(coarse_nx);
  put_i(coarse_ny);
  for (const auto& c : resolved_centers(*this)) {
    put_d(c.x);
    put_d(c.y);
  }
  put_d(resolved_radius(*this));
  for (double b : stripe_bounds) put_d(b);
  for (int s : stripe_layers) put_i(s);
  for (const auto& lay : layers) {
    put_d(lay.k_liquid);
    put_d(lay.k_frozen);
    put_d(lay.c_rho_liquid);
    put_d(lay.c_rho_frozen);
    put_d(lay.latent_heat);
    put_d(lay.mobility);
  }
  put_d(phase.t_star);
  put_d(phase.delta);
  put_d(phase.epsilon);
  put_d(t_pipe);

  // FNV-1a 64
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : buf) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::unique_ptr<Problem> build_problem(const SimulationConfig& config) {
  config.validate();
  auto p = std::make_unique<Problem>();
  p->config = config;
  p->mesh = build_fine_mesh(config.nx, config.ny, config.lx, config.ly);
  p->coarse = build_coarse_grid(p->mesh, config.coarse_nx, config.coarse_ny);
  p->neighborhoods = build_neighborhoods(p->mesh, p->coarse);
  p->pou = build_pou(p->mesh, p->coarse, p->neighborhoods);
  p->pipes = locate_pipe_nodes(p->mesh, resolved_centers(config),
                               resolved_radius(config));
  tag_pipe_neighborhoods(p->neighborhoods, p->mesh, p->pipes);
  p->materials.cell_layer =
      build_layer_raster(p->mesh, config.stripe_bounds, config.stripe_layers);
  p->materials.layers = config.layers;
  p->materials.phase = config.phase;
  p->materials.validate(p->mesh.n_cells());
  p->time.t_max = config.t_max_seconds();
  p->time.n_steps = config.n_steps;
  return p;
}

StepContext Problem::context() const {
  StepContext ctx;
  ctx.mesh = &mesh;
  ctx.materials = &materials;
  for (int g : pipes.nodes) ctx.temperature_bc.emplace_back(g, config.t_pipe);
  if (config.test_case == 1) {
    for (int g : mesh.side_nodes(0)) ctx.pressure_bc.emplace_back(g, 1.0);
    for (int g : mesh.side_nodes(1)) ctx.pressure_bc.emplace_back(g, 0.0);
  } else if (config.test_case == 2) {
    for (int g : mesh.side_nodes(3)) ctx.pressure_bc.emplace_back(g, 1.0);
    for (int g : mesh.side_nodes(2)) ctx.pressure_bc.emplace_back(g, 0.0);
  }
  ctx.velocity_sign = config.velocity_sign;
  ctx.use_lagged_pressure = config.use_lagged_pressure;
  ctx.prepare();
  return ctx;
}

Eigen::VectorXd Problem::initial_temperature() const {
  return Eigen::VectorXd::Constant(mesh.n_nodes(), config.t_initial);
}

MultiscaleSpace Problem::offline_space(int m) const {
  return build_offline_space(mesh, coarse, neighborhoods, pou, materials,
                             config.t_pipe, m);
}

}  // namespace frost
