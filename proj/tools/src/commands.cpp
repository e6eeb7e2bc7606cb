#include "commands.hpp"

#include "bhd/delocalization.hpp"
#include "bhd/error.hpp"
#include "bhd/floquet.hpp"
#include "bhd/level_statistics.hpp"
#include "bhd/magnus.hpp"
#include "bhd/parallel.hpp"
#include "bhd/scrambling.hpp"
#include "bhd/semiclassical.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <ostream>

namespace bhd::cli {

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string tag(double x) { return format_double(x); }

struct Context {
  const RunConfig& cfg;
  std::string hash;
  std::filesystem::path dir;
  std::ostream* log;

  FileRecord write(const std::string& name, const Table& t) const { return write_table(dir, name, t, hash); }
};

// Runs `body` as one manifest task, turning exceptions into a failed record.
void run_task(const Context& ctx, Manifest& m, const std::string& name, const std::function<void(TaskRecord&)>& body) {
  TaskRecord rec;
  rec.name = name;
  const auto t0 = Clock::now();
  try {
    body(rec);
  } catch (const std::exception& e) {
    rec.status = "failed";
    rec.error = e.what();
  }
  rec.seconds = since(t0);
  if (ctx.log) {
    *ctx.log << "[bhd] " << name << ": " << rec.status;
    if (!rec.error.empty()) *ctx.log << " (" << rec.error << ")";
    *ctx.log << ", " << rec.seconds << " s\n";
  }
  m.tasks.push_back(std::move(rec));
}

std::vector<std::pair<std::string, std::string>> drive_meta(const DriveProtocol& d) {
  return {{"N", std::to_string(d.N)}, {"NU", tag(d.nu())}, {"J0", tag(d.J0)}, {"mu", tag(d.mu)}, {"omega", tag(d.omega)}};
}

Table histogram_table(const std::string& kind, const Histogram& h, const std::string& unit) {
  Table t;
  t.kind = kind;
  t.meta = {{"total", std::to_string(h.total)}};
  t.columns = {{"bin_lo", unit}, {"bin_hi", unit}, {"density", "1/" + unit}, {"count", "-"}};
  for (std::size_t b = 0; b < h.counts.size(); ++b) {
    const double lo = h.lo + static_cast<double>(b) * h.width();
    t.add({lo, lo + h.width(), h.density[b], static_cast<std::int64_t>(h.counts[b])});
  }
  return t;
}

struct Decomposed {
  SpinOperators ops;
  Parity parity;
  FloquetDecomposition decomp;
  PropagatorDiagnostics diag;
};

Decomposed decompose(const RunConfig& cfg, const DriveProtocol& drive) {
  SpinOperators ops(drive.N);
  Parity parity(drive.N);
  PropagatorOptions po;
  po.tol = cfg.propagation.tol;
  po.unitarity_tol = cfg.propagation.unitarity_tol;
  po.workers = cfg.workers;
  auto sp = one_period_propagator_sectors(drive, ops, parity, po);
  auto decomp = floquet_decompose(sp, drive.omega);
  return {std::move(ops), std::move(parity), std::move(decomp), sp.diagnostics};
}

json decomposition_json(const Decomposed& d) {
  return {{"steps_per_period", d.diag.steps_per_period},
          {"halving_defect", d.diag.halving_defect},
          {"unitarity_defect", d.diag.unitarity_defect},
          {"reorthonormalised", d.diag.reorthonormalised},
          {"floquet_residual", d.decomp.max_residual},
          {"gram_defect", d.decomp.gram_defect}};
}

// --- poincare -------------------------------------------------------------

void cmd_poincare(const Context& ctx, Manifest& m) {
  const auto initials = poincare_initials(ctx.cfg.poincare.initial_conditions);
  ClassicalOptions opt;
  opt.abs_tol = opt.rel_tol = ctx.cfg.poincare.tol;
  for (double omega : ctx.cfg.drive.omegas) {
    run_task(ctx, m, "poincare omega=" + tag(omega), [&](TaskRecord& rec) {
      const auto drive = ctx.cfg.drive.at(omega);
      const auto sec = poincare_section(initials, drive, ctx.cfg.poincare.n_periods, opt, ctx.cfg.workers);
      Table t;
      t.kind = "poincare";
      t.meta = drive_meta(drive);
      t.meta.emplace_back("n_periods", std::to_string(ctx.cfg.poincare.n_periods));
      t.columns = {{"orbit", "-"}, {"k", "-"}, {"t", "1/J0"}, {"z", "1"}, {"phi", "rad"}};
      const double period = drive.period();
      for (std::size_t i = 0; i < sec.orbits.size(); ++i) {
        for (std::size_t k = 0; k < sec.orbits[i].size(); ++k) {
          const auto& s = sec.orbits[i][k];
          t.add({static_cast<std::int64_t>(i), static_cast<std::int64_t>(k), static_cast<double>(k) * period, s.z, s.phi});
        }
      }
      rec.files.push_back(ctx.write("poincare_w" + tag(omega) + ".tsv", t));
      rec.diagnostics = {{"pole_events", sec.total_pole_events}};
    });
  }
}

// --- entropy-map ----------------------------------------------------------

void cmd_entropy_map(const Context& ctx, Manifest& m) {
  const auto points = ctx.cfg.grid.points();
  for (double omega : ctx.cfg.drive.omegas) {
    run_task(ctx, m, "entropy-map omega=" + tag(omega), [&](TaskRecord& rec) {
      const auto drive = ctx.cfg.drive.at(omega);
      const auto d = decompose(ctx.cfg, drive);
      const auto map = coherent_entropy_map(points, d.decomp, ctx.cfg.workers);
      Table t;
      t.kind = "entropy_map";
      t.meta = drive_meta(drive);
      t.meta.emplace_back("grid", std::to_string(ctx.cfg.grid.n_z) + "x" + std::to_string(ctx.cfg.grid.n_phi));
      t.meta.emplace_back("scale", "ln(N+1)");
      t.columns = {{"index", "-"}, {"iz", "-"}, {"iphi", "-"}, {"z", "1"}, {"phi", "rad"}, {"S_scaled", "1"}};
      const int nphi = ctx.cfg.grid.n_phi;
      for (std::size_t i = 0; i < points.size(); ++i) {
        t.add({static_cast<std::int64_t>(i), static_cast<std::int64_t>(static_cast<int>(i) / nphi),
               static_cast<std::int64_t>(static_cast<int>(i) % nphi), points[i].z, points[i].phi, map.scaled[i]});
      }
      rec.files.push_back(ctx.write("entropy_map_w" + tag(omega) + ".tsv", t));
      rec.diagnostics = decomposition_json(d);
      rec.diagnostics["max_weight_defect"] = map.max_weight_defect;
    });
  }
}

// --- spectrum -------------------------------------------------------------

void cmd_spectrum(const Context& ctx, Manifest& m) {
  const auto& cfg = ctx.cfg;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  Table summary;
  summary.kind = "spectrum_summary";
  summary.meta = {{"N", std::to_string(cfg.drive.n)},
                  {"NU", tag(cfg.drive.nu)},
                  {"J0", tag(cfg.drive.j0)},
                  {"mu", tag(cfg.drive.mu)},
                  {"magnus_order", std::to_string(cfg.spectrum.magnus_order)},
                  {"entropy_basis", cfg.spectrum.entropy_basis},
                  {"poisson_r", tag(poisson_mean_ratio())},
                  {"S_coe", tag(coe_entropy(cfg.drive.n + 1.0))}};
  summary.columns = {{"omega", "J0"},        {"mean_r", "1"},          {"r_std_error", "1"},   {"mean_r_sector0", "1"},
                     {"mean_r_sector1", "1"}, {"coe_sampled_r", "1"},   {"mean_S", "1"},        {"mean_S_scaled", "1"},
                     {"mean_S_over_S_coe", "1"}, {"low_entropy_fraction", "1"}};

  for (double omega : cfg.drive.omegas) {
    std::vector<Cell> row{omega, nan, nan, nan, nan, nan, nan, nan, nan, nan};
    run_task(ctx, m, "spectrum omega=" + tag(omega), [&](TaskRecord& rec) {
      const auto drive = cfg.drive.at(omega);
      const auto d = decompose(cfg, drive);
      const auto split = sort_by_parity(d.decomp, d.parity);
      const auto stats = spectrum_statistics(d.decomp, split);
      const auto effective = effective_hamiltonian(drive, d.ops, cfg.spectrum.magnus_order);
      const auto basis = cfg.spectrum.entropy_basis == "effective_in_floquet" ? DelocalizationBasis::EffectiveInFloquet
                                                                              : DelocalizationBasis::FloquetInEffective;
      const auto deloc = mode_delocalization(d.decomp, effective, d.parity, basis);
      const std::string w = tag(omega);

      auto spacings = histogram_table(
          "spacing_histogram",
          make_histogram(stats.pooled_normalized_spacings, cfg.spectrum.spacing_bins, 0.0, cfg.spectrum.spacing_hi), "1");
      spacings.meta.insert(spacings.meta.begin(), {{"omega", w}, {"N", std::to_string(cfg.drive.n)}});
      rec.files.push_back(ctx.write("spacings_w" + w + ".tsv", spacings));

      Table ratios;
      ratios.kind = "spacing_ratios";
      ratios.meta = drive_meta(drive);
      ratios.columns = {{"sector", "-"}, {"r", "1"}};
      for (int s = 0; s < 2; ++s) {
        for (double r : stats.sectors[s].ratios) ratios.add({static_cast<std::int64_t>(s), r});
      }
      rec.files.push_back(ctx.write("ratios_w" + w + ".tsv", ratios));

      Table modes;
      modes.kind = "mode_entropy";
      modes.meta = drive_meta(drive);
      modes.meta.emplace_back("basis", "floquet_in_effective");
      modes.meta.emplace_back("sector_sizes",
                              std::to_string(deloc.sector_sizes[0]) + "," + std::to_string(deloc.sector_sizes[1]));
      modes.columns = {{"sector", "-"}, {"S", "1"}, {"S_over_ln_d", "1"}};
      int low = 0;
      for (std::size_t i = 0; i < deloc.entropies.size(); ++i) {
        const double lnd = std::log(static_cast<double>(deloc.sector_sizes[deloc.sector[i]]));
        const double scaled = deloc.entropies[i] / lnd;
        if (scaled < 0.05) ++low;
        modes.add({static_cast<std::int64_t>(deloc.sector[i]), deloc.entropies[i], scaled});
      }
      rec.files.push_back(ctx.write("mode_entropy_w" + w + ".tsv", modes));

      double coe_r = nan;
      if (cfg.spectrum.coe_draws > 0) {
        coe_r = sampled_coe_mean_ratio(static_cast<int>(deloc.sector_sizes[0]), cfg.spectrum.coe_draws, cfg.seed);
      }
      const double s_coe = coe_entropy(cfg.drive.n + 1.0);
      row = {omega,
             stats.pooled_mean_ratio,
             stats.pooled_std_error,
             stats.sectors[0].mean_ratio,
             stats.sectors[1].mean_ratio,
             coe_r,
             deloc.mean,
             deloc.mean_scaled,
             deloc.mean / s_coe,
             static_cast<double>(low) / static_cast<double>(deloc.entropies.size())};
      rec.diagnostics = decomposition_json(d);
      rec.diagnostics["ambiguous_parity"] = split.ambiguous.size();
      rec.diagnostics["completeness_defect"] = deloc.completeness_defect;
    });
    summary.add(std::move(row));
  }
  run_task(ctx, m, "spectrum summary", [&](TaskRecord& rec) { rec.files.push_back(ctx.write("spectrum_summary.tsv", summary)); });
}

// --- fotoc ----------------------------------------------------------------

struct FotocJob {
  const FotocCentre* centre;
  int n;
};

struct FotocOutcome {
  FotocTrace trace;
  LyapunovFit fit;
  SaturationValue saturation;
  double c_diag = 0.0;
  std::string error;
  double seconds = 0.0;
};

void cmd_fotoc(const Context& ctx, Manifest& m) {
  const auto& cfg = ctx.cfg;
  std::vector<FotocJob> jobs;
  for (const auto& c : cfg.fotoc.centres) {
    if (c.n.empty()) {
      jobs.push_back({&c, cfg.drive.n});
    } else {
      for (int n : c.n) jobs.push_back({&c, n});
    }
  }
  const FotocForm form = cfg.fotoc.form == "echo" ? FotocForm::Echo : FotocForm::Variance;
  std::vector<FotocOutcome> out(jobs.size());
  parallel_for(jobs.size(), cfg.workers, [&](std::size_t i) {
    const auto t0 = Clock::now();
    const auto& job = jobs[i];
    try {
      const auto drive = cfg.drive.at(job.centre->omega, job.n);
      const auto angles = to_bloch({job.centre->z, job.centre->phi});
      const SpinOperators ops(job.n);
      const auto state = coherent_state(job.n, angles);
      const auto w = local_generator(angles, ops);
      const double t_max = job.centre->t_max > 0.0 ? job.centre->t_max : cfg.fotoc.t_max;
      const auto times = uniform_times(t_max, cfg.fotoc.dt);
      FotocOptions fo;
      fo.tol = cfg.propagation.tol;
      out[i].trace = form == FotocForm::Echo ? fotoc_echo(state, w, drive, cfg.fotoc.delta, times, fo)
                                             : fotoc_variance(state, w, drive, cfg.fotoc.delta, times, fo);
      out[i].c_diag = diagonal_ensemble_fotoc(job.n, cfg.fotoc.delta);
      LyapunovFitOptions lo;
      lo.t_lo = cfg.fotoc.fit_t_lo;
      lo.t_hi = cfg.fotoc.fit_t_hi;
      out[i].fit = fit_quantum_lyapunov(out[i].trace, out[i].c_diag, lo);
      out[i].saturation = saturation_mean(out[i].trace, cfg.fotoc.saturation_fraction);
    } catch (const std::exception& e) {
      out[i].error = e.what();
    }
    out[i].seconds = since(t0);
  });

  Table fits;
  fits.kind = "fotoc_fits";
  fits.meta = {{"NU", tag(cfg.drive.nu)}, {"J0", tag(cfg.drive.j0)}, {"mu", tag(cfg.drive.mu)},
               {"delta", tag(cfg.fotoc.delta)}, {"form", cfg.fotoc.form},
               {"saturation_fraction", tag(cfg.fotoc.saturation_fraction)}};
  fits.columns = {{"label", "-"},          {"N", "-"},          {"omega", "J0"},          {"z", "1"},
                  {"phi", "rad"},          {"c_diag", "1"},     {"accepted", "-"},        {"lambda_q", "J0"},
                  {"r_squared", "1"},      {"t_lo", "1/J0"},    {"t_hi", "1/J0"},         {"points", "-"},
                  {"floor", "1"},          {"ehrenfest_time", "1/J0"}, {"saturation", "1"}, {"saturation_over_c_diag", "1"},
                  {"saturation_t_from", "1/J0"}, {"reason", "-"}};
  const double nan = std::numeric_limits<double>::quiet_NaN();

  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const auto& job = jobs[i];
    const auto& o = out[i];
    const std::string name = "fotoc_" + job.centre->label + "_N" + std::to_string(job.n);
    TaskRecord rec;
    rec.name = "fotoc " + job.centre->label + " N=" + std::to_string(job.n);
    rec.seconds = o.seconds;
    if (!o.error.empty()) {
      rec.status = "failed";
      rec.error = o.error;
      fits.add({job.centre->label, static_cast<std::int64_t>(job.n), job.centre->omega, job.centre->z, job.centre->phi, nan,
                std::int64_t{0}, nan, nan, nan, nan, std::int64_t{0}, nan, nan, nan, nan, nan, std::string("error")});
    } else {
      try {
        Table t;
        t.kind = "fotoc_trace";
        t.meta = drive_meta(o.trace.drive);
        t.meta.insert(t.meta.begin(), {"label", job.centre->label});
        t.meta.emplace_back("z", tag(job.centre->z));
        t.meta.emplace_back("phi", tag(job.centre->phi));
        t.meta.emplace_back("delta", tag(cfg.fotoc.delta));
        t.meta.emplace_back("form", to_string(o.trace.form));
        t.meta.emplace_back("c_diag", tag(o.c_diag));
        t.columns = {{"t", "1/J0"}, {"C", "1"}, {"C_over_c_diag", "1"}};
        for (std::size_t k = 0; k < o.trace.times.size(); ++k) {
          t.add({o.trace.times[k], o.trace.values[k], o.trace.values[k] / o.c_diag});
        }
        rec.files.push_back(ctx.write(name + ".tsv", t));
      } catch (const std::exception& e) {
        rec.status = "failed";
        rec.error = e.what();
      }
      const auto& f = o.fit;
      fits.add({job.centre->label, static_cast<std::int64_t>(job.n), job.centre->omega, job.centre->z, job.centre->phi,
                o.c_diag, std::int64_t{f.accepted ? 1 : 0}, f.accepted ? f.lambda_q : nan, f.accepted ? f.r_squared : nan,
                f.t_lo, f.t_hi, std::int64_t{f.points}, f.floor, f.ehrenfest_time, o.saturation.mean,
                o.saturation.mean / o.c_diag, o.saturation.t_from, f.accepted ? std::string("-") : f.reason});
      rec.diagnostics = {{"steps_per_period", o.trace.steps_per_period},
                         {"norm_defect", o.trace.norm_defect},
                         {"fit_accepted", f.accepted}};
      if (!f.accepted) rec.diagnostics["fit_rejected"] = f.reason;
    }
    if (ctx.log) *ctx.log << "[bhd] " << rec.name << ": " << rec.status << ", " << rec.seconds << " s\n";
    m.tasks.push_back(std::move(rec));
  }
  run_task(ctx, m, "fotoc fits", [&](TaskRecord& rec) { rec.files.push_back(ctx.write("fotoc_fits.tsv", fits)); });
}

// --- fotoc-grid -----------------------------------------------------------

void cmd_fotoc_grid(const Context& ctx, Manifest& m) {
  const auto& cfg = ctx.cfg;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  Table summary;
  summary.kind = "fotoc_grid_summary";
  summary.meta = {{"N", std::to_string(cfg.drive.n)}, {"NU", tag(cfg.drive.nu)}, {"J0", tag(cfg.drive.j0)},
                  {"mu", tag(cfg.drive.mu)}, {"delta", tag(cfg.fotoc.delta)},
                  {"grid", std::to_string(cfg.grid.n_z) + "x" + std::to_string(cfg.grid.n_phi)}};
  summary.columns = {{"omega", "J0"}, {"t_eval", "1/J0"}, {"c_diag", "1"}, {"mean", "1"}, {"variance", "1"},
                     {"invalid", "-"}, {"steps_per_period", "-"}};
  const auto points = cfg.grid.points();
  const int nphi = cfg.grid.n_phi;

  for (double omega : cfg.drive.omegas) {
    for (double te : cfg.fotoc_grid.t_eval) {
      std::vector<Cell> row{omega, te, nan, nan, nan, std::int64_t{0}, std::int64_t{0}};
      run_task(ctx, m, "fotoc-grid omega=" + tag(omega) + " t=" + tag(te), [&](TaskRecord& rec) {
        const auto drive = cfg.drive.at(omega);
        FotocGridOptions go;
        go.propagation.tol = cfg.propagation.tol;
        go.histogram_bins = cfg.fotoc_grid.histogram_bins;
        go.histogram_hi = cfg.fotoc_grid.histogram_hi;
        go.workers = cfg.workers;
        const auto g = fotoc_grid(drive, cfg.grid, te, cfg.fotoc.delta, go);
        const std::string suffix = "_w" + tag(omega) + "_t" + tag(te) + ".tsv";

        Table field;
        field.kind = "fotoc_grid";
        field.meta = drive_meta(drive);
        field.meta.emplace_back("t_eval", tag(te));
        field.meta.emplace_back("delta", tag(cfg.fotoc.delta));
        field.meta.emplace_back("c_diag", tag(g.c_diag));
        field.meta.emplace_back("null_marker", "null");
        field.columns = {{"index", "-"}, {"iz", "-"}, {"iphi", "-"}, {"z", "1"}, {"phi", "rad"}, {"C_over_c_diag", "1"}};
        for (std::size_t i = 0; i < points.size(); ++i) {
          field.add({static_cast<std::int64_t>(i), static_cast<std::int64_t>(static_cast<int>(i) / nphi),
                     static_cast<std::int64_t>(static_cast<int>(i) % nphi), points[i].z, points[i].phi, g.scaled[i]});
        }
        rec.files.push_back(ctx.write("fotoc_grid" + suffix, field));

        auto hist = histogram_table("fotoc_grid_histogram", g.histogram, "1");
        hist.meta.insert(hist.meta.begin(), {{"omega", tag(omega)}, {"t_eval", tag(te)}, {"quantity", "C_over_c_diag"}});
        rec.files.push_back(ctx.write("fotoc_grid_hist" + suffix, hist));

        row = {omega, te, g.c_diag, g.mean, g.variance, std::int64_t{g.invalid}, std::int64_t{g.steps_per_period}};
        rec.diagnostics = {{"invalid", g.invalid}, {"steps_per_period", g.steps_per_period}};
        if (g.invalid > 0) {
          json errs = json::array();
          for (std::size_t i = 0; i < g.errors.size(); ++i) {
            if (!g.errors[i].empty()) errs.push_back({{"index", i}, {"error", g.errors[i]}});
          }
          rec.diagnostics["point_errors"] = errs;
        }
      });
      summary.add(std::move(row));
    }
  }
  run_task(ctx, m, "fotoc-grid summary",
           [&](TaskRecord& rec) { rec.files.push_back(ctx.write("fotoc_grid_summary.tsv", summary)); });
}

const std::vector<std::pair<std::string, void (*)(const Context&, Manifest&)>>& registry() {
  static const std::vector<std::pair<std::string, void (*)(const Context&, Manifest&)>> r = {
      {"poincare", cmd_poincare},
      {"entropy-map", cmd_entropy_map},
      {"spectrum", cmd_spectrum},
      {"fotoc", cmd_fotoc},
      {"fotoc-grid", cmd_fotoc_grid},
  };
  return r;
}

}  // namespace

std::vector<std::string> command_names() {
  std::vector<std::string> names;
  for (const auto& [n, _] : registry()) names.push_back(n);
  return names;
}

void validate_for(const std::string& command, const RunConfig& cfg) {
  cfg.validate();
  const auto names = command_names();
  if (std::find(names.begin(), names.end(), command) == names.end()) {
    throw InvalidArgument("unknown command '" + command + "'");
  }
  if (command == "fotoc") {
    if (cfg.fotoc.centres.empty()) throw InvalidArgument("fotoc: the centre list is empty");
    return;
  }
  if (cfg.drive.omegas.empty()) throw InvalidArgument(command + ": drive.omegas is empty");
  if (command == "poincare" && cfg.drive.mu == 0.0) {
    throw InvalidArgument("poincare: the stroboscopic section is undefined for an unmodulated drive (mu = 0)");
  }
}

Manifest run_command(const std::string& command, const RunConfig& cfg, std::ostream* log) {
  validate_for(command, cfg);
  const auto t0 = Clock::now();
  Manifest m;
  m.command = command;
  m.config = to_json(cfg);
  m.config_sha256 = config_hash(cfg);
  const Context ctx{cfg, m.config_sha256, cfg.output_dir, log};
  for (const auto& [name, fn] : registry()) {
    if (name == command) fn(ctx, m);
  }
  m.seconds = since(t0);
  write_manifest(ctx.dir, m);
  return m;
}

}  // namespace bhd::cli
