// qtl: command-line driver for the teleportation laboratory.
//
// Exit status: 0 success, 1 verify suite failure, 3 validation or dimension
// error, 4 optimizer non-convergence, 5 file IO error. Usage errors use the
// CLI11 codes.

#include <CLI11.hpp>

#include <cstdint>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "qtl/qtl.hpp"

namespace {

constexpr int kExitVerifyFailed = 1;
constexpr int kExitValidation = 3;
constexpr int kExitConvergence = 4;
constexpr int kExitIo = 5;

struct Common {
  int n = 2;
  std::uint64_t seed = qtl::kDefaultSeed;
  int count = 100;
  int samples = 10000;
  int restarts = 10;
  int max_iters = 500;
  std::string out;
  std::vector<std::string> in;
};

void add_common(CLI::App* cmd, Common& c, bool with_in) {
  cmd->add_option("--n", c.n, "local dimension")->check(CLI::Range(2, 16));
  cmd->add_option("--seed", c.seed, "random seed");
  cmd->add_option("--count", c.count, "number of random states")->check(CLI::NonNegativeNumber);
  cmd->add_option("--samples", c.samples, "Monte-Carlo samples")->check(CLI::Range(100, 100000000));
  cmd->add_option("--restarts", c.restarts, "optimizer runs per maximization")->check(CLI::PositiveNumber);
  cmd->add_option("--max-iters", c.max_iters, "iterations per optimizer run")->check(CLI::NonNegativeNumber);
  cmd->add_option("--out", c.out, "output path (standard output when omitted)");
  if (with_in) cmd->add_option("--in", c.in, "input paths")->expected(1, 3);
}

qtl::OptimizerConfig optimizer_config(const Common& c) {
  qtl::OptimizerConfig cfg;
  cfg.seed = c.seed;
  cfg.restarts = c.restarts;
  cfg.max_iters = c.max_iters;
  return cfg;
}

void warn_cost(int n) {
  if (n >= 4) {
    std::cerr << "warning: n = " << n << " optimizes over U(" << n * n << "); expect long run times\n";
  }
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
  } else {
    qtl::io::write_text_file(path, text);
  }
}

std::string fmt(double x) { return qtl::io::format_number(x); }

int cmd_basis(const Common& c, const std::string& family) {
  emit(c.out, qtl::io::basis_dump(qtl::io::basis_family_from_string(family), c.n).dump(2) + "\n");
  return 0;
}

int cmd_state(const Common& c, const std::string& kind, double p) {
  qtl::Rng rng(c.seed);
  const qtl::DensityMatrix rho = [&] {
    if (kind == "max-entangled") return qtl::maximally_entangled_state(c.n);
    if (kind == "max-mixed") return qtl::maximally_mixed_state(c.n);
    if (kind == "isotropic") return qtl::isotropic_state(c.n, p);
    if (kind == "random") return qtl::random_resource(c.n, rng);
    if (kind == "input") return qtl::random_density(c.n, rng);
    throw qtl::ValidationError("kind", "unknown state kind '" + kind + "'");
  }();
  emit(c.out, qtl::io::density_to_json(rho).dump(2) + "\n");
  return 0;
}

int cmd_spec(const Common& c, const std::string& protocol) {
  const auto p = qtl::protocol_from_string(protocol);
  const qtl::ChannelSpec spec = p == qtl::Protocol::one_channel_bell   ? qtl::ChannelSpec::one_channel(c.n)
                                : p == qtl::Protocol::two_channel_bell ? qtl::ChannelSpec::two_channel_bell(c.n)
                                                                       : qtl::ChannelSpec::two_channel_ghz(c.n);
  emit(c.out, qtl::io::channel_spec_to_json(spec).dump(2) + "\n");
  return 0;
}

int cmd_simulate(const Common& c) {
  if (c.in.size() != 3) throw qtl::ValidationError("in", "simulate takes --in SPEC CHI RHO");
  const auto spec = qtl::io::load_channel_spec(c.in[0]);
  const auto chi = qtl::io::load_density(c.in[1]);
  const auto rho = qtl::io::load_density(c.in[2]);
  warn_cost(spec.n());
  const auto out = qtl::apply_channel(spec, chi, rho);
  const auto diag = qtl::diagnose_density(out.matrix());
  const auto mc = qtl::average_fidelity_mc(spec, chi, static_cast<std::size_t>(c.samples), c.seed);
  const double f_hat = qtl::channel_entangled_fraction(spec, chi);
  qtl::io::json report = {{"trace_residual", diag.trace_error},
                          {"positivity_residual", std::max(0.0, -diag.min_eigenvalue)},
                          {"mc_fidelity", mc.mean},
                          {"mc_standard_error", mc.standard_error},
                          {"mc_samples", mc.samples},
                          {"entangled_fraction", f_hat},
                          {"closed_form_fidelity", qtl::fidelity_closed_form(std::clamp(f_hat, 0.0, 1.0), spec.n())}};
  qtl::io::json j = qtl::io::density_to_json(out);
  j["report"] = report;
  emit(c.out, j.dump(2) + "\n");
  return 0;
}

int cmd_fef(const Common& c, const std::string& kind, const std::string& trace_path) {
  if (c.in.size() != 1) throw qtl::ValidationError("in", "fef takes --in CHI");
  const auto chi = qtl::io::load_density(c.in[0]);
  const int n = qtl::local_dim_of_square(chi.dim(), "resource");
  warn_cost(n);
  const auto report = qtl::compute_fef(qtl::fef_kind_from_string(kind), chi, optimizer_config(c));
  std::cout << "kind " << qtl::to_string(report.kind) << " (lower bound)\n"
            << "value " << fmt(report.value) << "\n"
            << "optimal_fidelity " << fmt(report.optimal_fidelity) << "\n"
            << "useful " << (report.useful ? "true" : "false") << "\n"
            << "converged " << (report.converged ? "true" : "false") << "\n";
  if (!c.out.empty()) {
    qtl::io::write_json_file(c.out, qtl::io::maximizers_to_json(report));
    std::cout << "maximizers " << c.out << "\n";
  }
  if (!trace_path.empty()) qtl::io::write_csv_file(trace_path, qtl::io::write_trace_csv, report.traces);
  return 0;
}

int cmd_df(const Common& c) {
  warn_cost(c.n);
  const auto records = qtl::df_experiment(c.n, c.count, optimizer_config(c), c.seed);
  std::ostringstream os;
  qtl::io::write_df_csv(os, records);
  emit(c.out, os.str());
  return 0;
}

int cmd_verify(const std::string& level) {
  if (level != "quick" && level != "full") throw qtl::ValidationError("level", "expected quick or full");
  const auto results = qtl::run_verify(level == "full" ? qtl::VerifyLevel::full : qtl::VerifyLevel::quick);
  bool ok = true;
  for (const auto& r : results) {
    std::cout << (r.passed ? "PASS " : "FAIL ") << std::left << std::setw(26) << r.name << " residual "
              << fmt(r.residual) << " threshold " << fmt(r.threshold) << " (" << std::setprecision(3) << r.seconds
              << " s)\n";
    ok = ok && r.passed;
  }
  return ok ? 0 : kExitVerifyFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulation and optimal-fidelity computation for one- and two-channel teleportation"};
  app.require_subcommand(1);
  Common c;

  std::string family = "bell";
  auto* basis = app.add_subcommand("basis", "dump a basis family with orthogonality residuals");
  add_common(basis, c, false);
  basis->add_option("--family", family, "bell | ghz | weyl")->check(CLI::IsMember({"bell", "ghz", "weyl"}));

  std::string state_kind = "random";
  double p = 0.5;
  auto* state = app.add_subcommand("state", "write a density matrix file");
  add_common(state, c, false);
  state->add_option("--kind", state_kind, "max-entangled | max-mixed | isotropic | random | input");
  state->add_option("--p", p, "isotropic weight")->check(CLI::Range(0.0, 1.0));

  std::string protocol = "two-channel-bell";
  auto* spec = app.add_subcommand("spec", "write the default channel spec of a protocol");
  add_common(spec, c, false);
  spec->add_option("--protocol", protocol, "one-channel-bell | two-channel-bell | two-channel-ghz");

  auto* simulate = app.add_subcommand("simulate", "apply a teleportation channel: --in SPEC CHI RHO");
  add_common(simulate, c, true);

  std::string kind = "f1";
  std::string trace_path;
  auto* fef = app.add_subcommand("fef", "maximize an entangled-fraction objective: --in CHI");
  add_common(fef, c, true);
  fef->add_option("--kind", kind, "f1 | f2lower | f2full | f2ghz")
      ->check(CLI::IsMember({"f1", "f2lower", "f2full", "f2ghz"}));
  fef->add_option("--trace", trace_path, "CSV path for the convergence traces");

  auto* df = app.add_subcommand("df", "F2 - F1 over random states, as CSV");
  add_common(df, c, false);

  std::string level = "quick";
  auto* verify = app.add_subcommand("verify", "run the invariant suites");
  verify->add_option("--level", level, "quick | full")->check(CLI::IsMember({"quick", "full"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (*basis) return cmd_basis(c, family);
    if (*state) return cmd_state(c, state_kind, p);
    if (*spec) return cmd_spec(c, protocol);
    if (*simulate) return cmd_simulate(c);
    if (*fef) return cmd_fef(c, kind, trace_path);
    if (*df) return cmd_df(c);
    if (*verify) return cmd_verify(level);
  } catch (const qtl::ValidationError& e) {
    std::cerr << "validation error [" << e.field() << "]: " << e.what() << "\n";
    return kExitValidation;
  } catch (const qtl::DimensionError& e) {
    std::cerr << "dimension error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const qtl::ConvergenceError& e) {
    std::cerr << "convergence error: " << e.what() << "\n";
    return kExitConvergence;
  } catch (const qtl::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  }
  return 0;
}
