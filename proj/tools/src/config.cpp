#include "config.hpp"

#include "bhd/error.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

namespace bhd::cli {

using nlohmann::json;

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw InvalidArgument("config: " + what);
}

bool finite_all(const std::vector<double>& v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

// Rejects keys of `j` outside `allowed`.
void check_keys(const json& j, const std::string& section, std::initializer_list<const char*> allowed) {
  require(j.is_object(), section + " must be an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, _] : j.items()) {
    require(ok.count(key) != 0, "unknown key '" + key + "' in " + section);
  }
}

template <class T>
void read(const json& j, const char* key, T& out) {
  if (auto it = j.find(key); it != j.end()) {
    try {
      out = it->get<T>();
    } catch (const json::exception& e) {
      throw InvalidArgument(std::string("config: bad value for '") + key + "': " + e.what());
    }
  }
}

json centre_json(const FotocCentre& c) {
  return {{"label", c.label}, {"z", c.z}, {"phi", c.phi}, {"omega", c.omega}, {"n", c.n}, {"t_max", c.t_max}};
}

FotocCentre centre_from(const json& j) {
  check_keys(j, "fotoc.centres[]", {"label", "z", "phi", "omega", "n", "t_max"});
  FotocCentre c;
  read(j, "label", c.label);
  read(j, "z", c.z);
  read(j, "phi", c.phi);
  read(j, "omega", c.omega);
  read(j, "n", c.n);
  read(j, "t_max", c.t_max);
  return c;
}

}  // namespace

void RunConfig::validate() const {
  require(drive.n >= 1, "drive.n must be >= 1");
  require(std::isfinite(drive.nu) && std::isfinite(drive.j0) && std::isfinite(drive.mu), "drive parameters must be finite");
  require(finite_all(drive.omegas), "drive.omegas must be finite");
  for (double w : drive.omegas) {
    require(w > 0.0, "drive.omegas must be > 0");
  }
  require(grid.n_phi >= 1 && grid.n_z >= 1, "grid dimensions must be >= 1");
  require(poincare.initial_conditions >= 1, "poincare.initial_conditions must be >= 1");
  require(poincare.n_periods >= 0, "poincare.n_periods must be >= 0");
  require(poincare.tol > 0.0, "poincare.tol must be > 0");
  require(propagation.tol > 0.0 && propagation.unitarity_tol > 0.0, "propagation tolerances must be > 0");
  require(spectrum.magnus_order == 0 || spectrum.magnus_order == 2, "spectrum.magnus_order must be 0 or 2");
  require(spectrum.spacing_bins >= 1 && spectrum.entropy_bins >= 1, "histogram bins must be >= 1");
  require(spectrum.spacing_hi > 0.0, "spectrum.spacing_hi must be > 0");
  require(spectrum.coe_draws >= 0, "spectrum.coe_draws must be >= 0");
  require(spectrum.entropy_basis == "floquet_in_effective" || spectrum.entropy_basis == "effective_in_floquet",
          "spectrum.entropy_basis must be 'floquet_in_effective' or 'effective_in_floquet'");
  require(fotoc.delta > 0.0 && std::isfinite(fotoc.delta), "fotoc.delta must be > 0");
  require(fotoc.t_max > 0.0 && fotoc.dt > 0.0, "fotoc.t_max and fotoc.dt must be > 0");
  require(fotoc.form == "variance" || fotoc.form == "echo", "fotoc.form must be 'variance' or 'echo'");
  require(fotoc.saturation_fraction > 0.0 && fotoc.saturation_fraction <= 1.0,
          "fotoc.saturation_fraction must be in (0, 1]");
  for (const auto& c : fotoc.centres) {
    require(!c.label.empty(), "fotoc centre without label");
    require(std::abs(c.z) <= 1.0 && std::isfinite(c.phi), "fotoc centre '" + c.label + "' outside phase space");
    require(c.omega > 0.0, "fotoc centre '" + c.label + "' needs omega > 0");
    require(c.t_max >= 0.0, "fotoc centre '" + c.label + "' has negative t_max");
    for (int n : c.n) require(n >= 1, "fotoc centre '" + c.label + "' has n < 1");
  }
  require(!fotoc_grid.t_eval.empty() && finite_all(fotoc_grid.t_eval), "fotoc_grid.t_eval must be non-empty");
  for (double t : fotoc_grid.t_eval) require(t >= 0.0, "fotoc_grid.t_eval must be >= 0");
  require(fotoc_grid.histogram_bins >= 1 && fotoc_grid.histogram_hi > 0.0, "fotoc_grid histogram invalid");
  require(!output_dir.empty(), "output_dir must be set");
  require(workers >= 1, "workers must be >= 1");
}

json to_json(const RunConfig& c) {
  json centres = json::array();
  for (const auto& ce : c.fotoc.centres) centres.push_back(centre_json(ce));
  json fotoc = {{"delta", c.fotoc.delta},
                {"t_max", c.fotoc.t_max},
                {"dt", c.fotoc.dt},
                {"form", c.fotoc.form},
                {"centres", centres},
                {"saturation_fraction", c.fotoc.saturation_fraction},
                {"fit_t_lo", c.fotoc.fit_t_lo ? json(*c.fotoc.fit_t_lo) : json(nullptr)},
                {"fit_t_hi", c.fotoc.fit_t_hi ? json(*c.fotoc.fit_t_hi) : json(nullptr)}};
  return {
      {"name", c.name},
      {"drive", {{"n", c.drive.n}, {"nu", c.drive.nu}, {"j0", c.drive.j0}, {"mu", c.drive.mu}, {"omegas", c.drive.omegas}}},
      {"grid", {{"n_phi", c.grid.n_phi}, {"n_z", c.grid.n_z}}},
      {"poincare",
       {{"initial_conditions", c.poincare.initial_conditions}, {"n_periods", c.poincare.n_periods}, {"tol", c.poincare.tol}}},
      {"propagation", {{"tol", c.propagation.tol}, {"unitarity_tol", c.propagation.unitarity_tol}}},
      {"spectrum",
       {{"magnus_order", c.spectrum.magnus_order},
        {"spacing_bins", c.spectrum.spacing_bins},
        {"spacing_hi", c.spectrum.spacing_hi},
        {"entropy_bins", c.spectrum.entropy_bins},
        {"coe_draws", c.spectrum.coe_draws},
        {"entropy_basis", c.spectrum.entropy_basis}}},
      {"fotoc", fotoc},
      {"fotoc_grid",
       {{"t_eval", c.fotoc_grid.t_eval},
        {"histogram_bins", c.fotoc_grid.histogram_bins},
        {"histogram_hi", c.fotoc_grid.histogram_hi}}},
      {"output_dir", c.output_dir},
      {"workers", c.workers},
      {"seed", c.seed},
  };
}

RunConfig from_json(const json& j) {
  check_keys(j, "config",
             {"name", "drive", "grid", "poincare", "propagation", "spectrum", "fotoc", "fotoc_grid", "output_dir", "workers",
              "seed"});
  RunConfig c;
  read(j, "name", c.name);
  if (auto it = j.find("drive"); it != j.end()) {
    check_keys(*it, "drive", {"n", "nu", "j0", "mu", "omegas"});
    read(*it, "n", c.drive.n);
    read(*it, "nu", c.drive.nu);
    read(*it, "j0", c.drive.j0);
    read(*it, "mu", c.drive.mu);
    read(*it, "omegas", c.drive.omegas);
  }
  if (auto it = j.find("grid"); it != j.end()) {
    check_keys(*it, "grid", {"n_phi", "n_z"});
    read(*it, "n_phi", c.grid.n_phi);
    read(*it, "n_z", c.grid.n_z);
  }
  if (auto it = j.find("poincare"); it != j.end()) {
    check_keys(*it, "poincare", {"initial_conditions", "n_periods", "tol"});
    read(*it, "initial_conditions", c.poincare.initial_conditions);
    read(*it, "n_periods", c.poincare.n_periods);
    read(*it, "tol", c.poincare.tol);
  }
  if (auto it = j.find("propagation"); it != j.end()) {
    check_keys(*it, "propagation", {"tol", "unitarity_tol"});
    read(*it, "tol", c.propagation.tol);
    read(*it, "unitarity_tol", c.propagation.unitarity_tol);
  }
  if (auto it = j.find("spectrum"); it != j.end()) {
    check_keys(*it, "spectrum", {"magnus_order", "spacing_bins", "spacing_hi", "entropy_bins", "coe_draws", "entropy_basis"});
    read(*it, "magnus_order", c.spectrum.magnus_order);
    read(*it, "spacing_bins", c.spectrum.spacing_bins);
    read(*it, "spacing_hi", c.spectrum.spacing_hi);
    read(*it, "entropy_bins", c.spectrum.entropy_bins);
    read(*it, "coe_draws", c.spectrum.coe_draws);
    read(*it, "entropy_basis", c.spectrum.entropy_basis);
  }
  if (auto it = j.find("fotoc"); it != j.end()) {
    check_keys(*it, "fotoc", {"delta", "t_max", "dt", "form", "centres", "saturation_fraction", "fit_t_lo", "fit_t_hi"});
    read(*it, "delta", c.fotoc.delta);
    read(*it, "t_max", c.fotoc.t_max);
    read(*it, "dt", c.fotoc.dt);
    read(*it, "form", c.fotoc.form);
    read(*it, "saturation_fraction", c.fotoc.saturation_fraction);
    for (const char* key : {"fit_t_lo", "fit_t_hi"}) {
      auto e = it->find(key);
      if (e == it->end() || e->is_null()) continue;
      double v = 0.0;
      read(*it, key, v);
      (std::string(key) == "fit_t_lo" ? c.fotoc.fit_t_lo : c.fotoc.fit_t_hi) = v;
    }
    if (auto cs = it->find("centres"); cs != it->end()) {
      require(cs->is_array(), "fotoc.centres must be an array");
      for (const auto& e : *cs) c.fotoc.centres.push_back(centre_from(e));
    }
  }
  if (auto it = j.find("fotoc_grid"); it != j.end()) {
    check_keys(*it, "fotoc_grid", {"t_eval", "histogram_bins", "histogram_hi"});
    read(*it, "t_eval", c.fotoc_grid.t_eval);
    read(*it, "histogram_bins", c.fotoc_grid.histogram_bins);
    read(*it, "histogram_hi", c.fotoc_grid.histogram_hi);
  }
  read(j, "output_dir", c.output_dir);
  read(j, "workers", c.workers);
  read(j, "seed", c.seed);
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("config: cannot open " + path);
  json j;
  try {
    j = json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw InvalidArgument("config: " + path + ": " + e.what());
  }
  return from_json(j);
}

std::vector<std::string> preset_names() { return {"fig1", "fig2", "fig3"}; }

RunConfig preset(const std::string& name) {
  RunConfig c;
  c.name = name;
  c.drive.nu = -1.0;
  c.drive.j0 = 1.0;
  c.drive.mu = 1.5;
  if (name == "fig1") {
    c.drive.n = 1000;
    c.drive.omegas = {0.5, 3.0, 5.0, 7.0};
    c.poincare = {20, 1000, 1e-12};
    return c;
  }
  if (name == "fig2") {
    c.drive.n = 1000;
    c.drive.omegas = {0.5, 5.0, 7.0};
    c.fotoc.delta = 1e-2;
    c.fotoc.dt = 0.02;
    c.fotoc.t_max = 30.0;
    const double pi = std::numbers::pi;
    c.fotoc.centres = {
        {"chaotic", 0.0, pi, 0.5, {100, 300, 1000}, 0.0},
        {"fixed_point", 0.0, 0.0, 7.0, {1000}, 100.0},
        {"regular", 0.0, 1.4, 7.0, {1000}, 200.0},
        {"mixed_a", 0.2, 0.7, 5.0, {1000}, 100.0},
        {"mixed_b", -0.6, 3.0, 5.0, {1000}, 100.0},
    };
    return c;
  }
  if (name == "fig3") {
    c.drive.n = 300;
    c.drive.omegas = {0.5, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0};
    c.fotoc.delta = 1e-2;
    c.fotoc_grid.t_eval = {30.0};
    return c;
  }
  throw InvalidArgument("unknown preset '" + name + "' (expected fig1, fig2 or fig3)");
}

std::string config_hash(const RunConfig& c) {
  auto j = to_json(c);
  j.erase("output_dir");
  j.erase("workers");
  const std::string text = j.dump();
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(text.data(), text.size(), digest, &len, EVP_sha256(), nullptr);
  std::ostringstream out;
  out << std::hex;
  for (unsigned int i = 0; i < len; ++i) {
    out.width(2);
    out.fill('0');
    out << static_cast<int>(digest[i]);
  }
  return out.str();
}

}  // namespace bhd::cli
