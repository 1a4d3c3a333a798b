#include "curllab/contact.hpp"
#include "curllab/curlspec.hpp"
#include "curllab/dynamics.hpp"
#include "curllab/error.hpp"
#include "curllab/instability.hpp"
#include "curllab/io.hpp"
#include "curllab/lab.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>

using namespace curllab;
using nlohmann::json;

namespace {

/// Destination for JSON lines: a file when a path is given, else stdout.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (path.empty() || path == "-") return;
    file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
    if (!*file_) throw IoError("cannot open '" + path + "' for writing");
    path_ = path;
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }
  void line(const json& j) {
    stream() << j.dump() << '\n';
    if (!stream()) throw IoError("write to '" + (path_.empty() ? std::string("stdout") : path_) + "' failed");
  }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::string path_;
};

curlspec::Window parse_window(const std::string& window, int count) {
  if (window.empty()) return curlspec::Window::smallest(count);
  const auto comma = window.find(',');
  if (comma == std::string::npos) throw InvalidArgument("window must be 'lower,upper'");
  try {
    return curlspec::Window::interval(std::stod(window.substr(0, comma)), std::stod(window.substr(comma + 1)));
  } catch (const std::logic_error&) {
    throw InvalidArgument("window must be 'lower,upper', got '" + window + "'");
  }
}

curlspec::SolverKind parse_solver(const std::string& s) {
  if (s == "auto") return curlspec::SolverKind::automatic;
  if (s == "dense") return curlspec::SolverKind::dense;
  if (s == "krylov") return curlspec::SolverKind::krylov;
  throw InvalidArgument("solver must be auto, dense or krylov");
}

struct SpectrumArgs {
  std::string metric = "flat";
  int truncation = 3;
  std::string window;
  int count = 12;
  std::string solver = "auto";
};

void add_spectrum_options(CLI::App* app, SpectrumArgs& a) {
  app->add_option("--metric", a.metric, "metric file or name (flat, conformal(c), random_cr(r,eps,seed))");
  app->add_option("--truncation,-N", a.truncation, "Fourier truncation");
  app->add_option("--window", a.window, "eigenvalue interval 'lower,upper'");
  app->add_option("--count", a.count, "number of eigenvalues of smallest modulus (without --window)");
  app->add_option("--solver", a.solver, "auto, dense or krylov");
}

std::vector<curlspec::EigenPair> compute_pairs(const fields::MetricField& g, const SpectrumArgs& a) {
  curlspec::SpectrumOptions opt;
  opt.solver = parse_solver(a.solver);
  return curlspec::eigenpairs(g, a.truncation, parse_window(a.window, a.count), opt);
}

struct BudgetArgs {
  std::string preset = "default";
  std::optional<double> T_max;
  std::optional<int> n_seeds;
  std::optional<double> wkb_T;
  std::optional<int> wkb_samples;
  std::uint64_t seed = 1;
  int threads = 0;
};

void add_budget_options(CLI::App* app, BudgetArgs& b) {
  app->add_option("--budget", b.preset, "budget preset: default or quick");
  app->add_option("--T-max", b.T_max, "largest orbit period searched");
  app->add_option("--seeds", b.n_seeds, "orbit search seeds");
  app->add_option("--wkb-T", b.wkb_T, "WKB horizon");
  app->add_option("--wkb-samples", b.wkb_samples, "WKB trajectories");
  app->add_option("--seed", b.seed, "random seed");
  app->add_option("--threads", b.threads, "worker threads (0: CURLLAB_THREADS or all cores)");
}

instability::Budget make_budget(const BudgetArgs& b) {
  instability::Budget budget = instability::Budget::preset(b.preset);
  if (b.T_max) budget.T_max = *b.T_max;
  if (b.n_seeds) budget.n_seeds = *b.n_seeds;
  if (b.wkb_T) budget.wkb_T = *b.wkb_T;
  if (b.wkb_samples) budget.wkb_samples = *b.wkb_samples;
  budget.seed = b.seed;
  budget.threads = b.threads;
  return budget;
}

std::string number(double v) {
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"curl eigenfields on the 3-torus and their linear instability"};
  app.require_subcommand(1);

  // spectrum
  SpectrumArgs spec_args;
  std::string spec_out;
  auto* spectrum = app.add_subcommand("spectrum", "eigenpairs of curl in a window, one JSON line each");
  add_spectrum_options(spectrum, spec_args);
  spectrum->add_option("--out", spec_out, "output file (default stdout)");

  // fixed-points
  std::string fp_field, fp_metric = "flat", fp_out;
  dynamics::FixedPointOptions fp_opt;
  auto* fixed = app.add_subcommand("fixed-points", "zeros of a vector field with their linearization");
  fixed->add_option("--field", fp_field, "abc:A,B,C, xi:k, or a field/eigenpair file")->required();
  fixed->add_option("--metric", fp_metric, "metric used to raise one_forms");
  fixed->add_option("--grid", fp_opt.grid_density, "seed grid points per axis");
  fixed->add_option("--out", fp_out, "output file (default stdout)");

  // orbits
  std::string orb_field, orb_metric = "flat", orb_form, orb_out, orb_csv;
  dynamics::OrbitOptions orb_opt;
  auto* orbits = app.add_subcommand("orbits", "periodic orbits up to a period bound");
  orbits->add_option("--field", orb_field, "abc:A,B,C, xi:k, or a field/eigenpair file")->required();
  orbits->add_option("--metric", orb_metric, "metric used to raise one_forms");
  orbits->add_option("--contact-form", orb_form, "contact form for the transverse frame and Conley-Zehnder index");
  orbits->add_option("--T-max", orb_opt.T_max, "largest period");
  orbits->add_option("--seeds", orb_opt.n_seeds, "random seeds");
  orbits->add_option("--seed", orb_opt.seed, "random seed");
  orbits->add_option("--threads", orb_opt.threads, "worker threads");
  orbits->add_option("--out", orb_out, "output file (default stdout)");
  orbits->add_option("--csv", orb_csv, "CSV of seed, period and multipliers");

  // adapted-metric
  int am_k = 1, am_resolution = 0;
  std::string am_out;
  auto* adapted = app.add_subcommand("adapted-metric", "metric adapted to the tight form xi_k and the standard J");
  adapted->add_option("--k", am_k, "tight form index");
  adapted->add_option("--resolution", am_resolution, "grid points per axis (default 8|k| + 4)");
  adapted->add_option("--out", am_out, "metric file (default stdout)");

  // reeb
  std::string reeb_form, reeb_out;
  int reeb_grid = 4;
  auto* reeb = app.add_subcommand("reeb", "Reeb field of a contact form");
  reeb->add_option("--form", reeb_form, "xi:k, abc:A,B,C, or a one_form/eigenpair file")->required();
  reeb->add_option("--grid", reeb_grid, "sample points per axis in the report");
  reeb->add_option("--out", reeb_out, "output file (default stdout)");

  // instability
  SpectrumArgs inst_args;
  BudgetArgs inst_budget;
  int eigen_index = 0;
  std::string inst_field, inst_out;
  auto* inst = app.add_subcommand("instability", "instability certificate for one eigenpair or field");
  add_spectrum_options(inst, inst_args);
  add_budget_options(inst, inst_budget);
  inst->add_option("--eigen-index", eigen_index, "position of the eigenpair in the window");
  inst->add_option("--field", inst_field, "certify this field instead of an eigenpair (abc:A,B,C, xi:k, file)");
  inst->add_option("--out", inst_out, "output file (default stdout)");

  // genericity-sweep
  std::string sweep_config, sweep_jsonl, sweep_csv;
  int sweep_threads = -1;
  auto* sweep = app.add_subcommand("genericity-sweep", "spectral and dynamical statistics over random metrics");
  sweep->add_option("--config", sweep_config, "sweep configuration (JSON)")->required();
  sweep->add_option("--jsonl", sweep_jsonl, "JSON-lines output (overrides the config)");
  sweep->add_option("--csv", sweep_csv, "CSV summary (overrides the config)");
  sweep->add_option("--threads", sweep_threads, "worker threads (overrides the config)");

  // certify-all
  SpectrumArgs all_args;
  BudgetArgs all_budget;
  std::string all_out;
  auto* all = app.add_subcommand("certify-all", "certificates for every eigenpair in a window");
  add_spectrum_options(all, all_args);
  add_budget_options(all, all_budget);
  all->add_option("--out", all_out, "output file (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*spectrum) {
      const auto g = io::load_metric(spec_args.metric);
      Output out(spec_out);
      for (const auto& p : compute_pairs(g, spec_args)) out.line(io::to_json(p));
    } else if (*fixed) {
      const auto u = io::load_vector_field(fp_field, io::load_metric(fp_metric));
      const auto search = dynamics::find_fixed_points(*u, fp_opt);
      Output out(fp_out);
      for (const auto& p : search.points) out.line(io::to_json(p));
    } else if (*orbits) {
      const auto u = io::load_vector_field(orb_field, io::load_metric(orb_metric));
      if (!orb_form.empty()) orb_opt.contact_form = io::load_form(orb_form);
      const auto search = dynamics::find_periodic_orbits(*u, orb_opt);
      Output out(orb_out);
      for (const auto& o : search.orbits) out.line(io::to_json(o));
      for (const auto& msg : search.unresolved) std::cerr << "unresolved: " << msg << '\n';
      if (!orb_csv.empty()) {
        std::ostringstream csv;
        csv << "seed_x,seed_y,seed_z,period,mu1_re,mu1_im,mu2_re,mu2_im\n";
        for (const auto& o : search.orbits)
          csv << number(o.seed[0]) << ',' << number(o.seed[1]) << ',' << number(o.seed[2]) << ','
              << number(o.period) << ',' << number(o.multipliers[0].real()) << ','
              << number(o.multipliers[0].imag()) << ',' << number(o.multipliers[1].real()) << ','
              << number(o.multipliers[1].imag()) << '\n';
        io::write_text(orb_csv, csv.str());
      }
    } else if (*adapted) {
      const auto a = contact::tight_form(am_k);
      const int res = am_resolution > 0 ? am_resolution : 8 * std::abs(am_k) + 4;
      const auto m = contact::adapted_metric(a, contact::AlmostComplexStructure::standard(a, res));
      json j = io::to_json(m.metric);
      std::cerr << "lambda " << number(m.lambda) << "  residual " << m.residual << "  asymmetry " << m.asymmetry
                << "  reconstruction " << m.reconstruction << '\n';
      Output out(am_out);
      out.line(j);
    } else if (*reeb) {
      const contact::ContactForm form(io::load_form(reeb_form));
      const auto x = contact::reeb_field(form);
      const auto res = contact::reeb_residual(form.form(), *x);
      json samples = json::array();
      const double h = 2.0 * M_PI / reeb_grid;
      for (int i = 0; i < reeb_grid; ++i)
        for (int j = 0; j < reeb_grid; ++j)
          for (int k = 0; k < reeb_grid; ++k) {
            const Eigen::Vector3d p(h * i, h * j, h * k);
            samples.push_back({{"x", io::to_json(p)}, {"reeb", io::to_json(x->value(p))}});
          }
      Output out(reeb_out);
      out.line({{"contact_defect", form.defect()},
                {"orientation", form.orientation()},
                {"normalization_residual", res.normalization},
                {"contraction_residual", res.contraction},
                {"samples", samples}});
    } else if (*inst) {
      const auto budget = make_budget(inst_budget);
      instability::InstabilityCertificate cert;
      if (!inst_field.empty()) {
        const auto g = io::load_metric(inst_args.metric);
        const auto u = io::load_vector_field(inst_field, g);
        cert = instability::certify_field(*u, nullptr, budget);
        cert.field_id = inst_field;
        cert.metric_id = inst_args.metric;
      } else {
        const auto g = io::load_metric(inst_args.metric);
        if (inst_args.window.empty()) inst_args.count = std::max(inst_args.count, eigen_index + 1);
        const auto pairs = compute_pairs(g, inst_args);
        if (eigen_index < 0 || eigen_index >= static_cast<int>(pairs.size()))
          throw InvalidArgument("eigen index " + std::to_string(eigen_index) + " outside the " +
                                std::to_string(pairs.size()) + " computed eigenpairs");
        cert = instability::certify(g, pairs[static_cast<std::size_t>(eigen_index)], budget, inst_args.metric,
                                    "eigenpair:" + std::to_string(eigen_index));
      }
      Output out(inst_out);
      out.line(instability::to_json(cert));
    } else if (*sweep) {
      lab::SweepConfig config = lab::config_from_json(io::read_json(sweep_config));
      if (!sweep_jsonl.empty()) config.jsonl_path = sweep_jsonl;
      if (!sweep_csv.empty()) config.csv_path = sweep_csv;
      if (sweep_threads >= 0) config.threads = sweep_threads;
      Output out(config.jsonl_path);
      const auto records = lab::run_sweep(config, &out.stream());
      if (!out.stream()) throw IoError("writing the sweep records failed");
      if (!config.csv_path.empty()) lab::emit_report(records, lab::ReportFormat::csv, config.csv_path);
      int failed = 0;
      for (const auto& r : records)
        if (r.error) ++failed;
      std::cerr << records.size() << " samples, " << failed << " failed, config hash " << lab::config_hash(config)
                << '\n';
      return failed == 0 ? 0 : 1;
    } else if (*all) {
      const auto g = io::load_metric(all_args.metric);
      const auto budget = make_budget(all_budget);
      Output out(all_out);
      for (const auto& p : compute_pairs(g, all_args))
        out.line(instability::to_json(
            instability::certify(g, p, budget, all_args.metric, "eigenpair:" + std::to_string(p.index))));
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
