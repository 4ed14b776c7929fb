// Copyright 2026 The stiefel-hermite Authors
// SPDX-License-Identifier: Apache-2.0

// Command line harness for the interpolation experiments. Writes one CSV per
// run to --out (or stdout).

#include <cstdint>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sth/errors.hpp"
#include "sth/experiments.hpp"
#include "sth/report.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct Flags {
  std::optional<long> n, r, m;
  std::optional<int> nodes;
  std::optional<std::string> interval;
  std::optional<std::uint64_t> seed;
  std::optional<double> h, tau, rbf_shape;
  std::optional<std::string> centering;
  std::optional<std::string> methods;
  std::string out;
};

void add_flags(CLI::App* cmd, Flags& f) {
  // -h is taken by the step size, so help is long-form only.
  cmd->set_help_flag("--help", "print this help message and exit");
  cmd->add_option("--n", f.n, "ambient dimension n");
  cmd->add_option("--r", f.r, "number of columns r");
  cmd->add_option("--m", f.m, "column count m of the fixed-rank product");
  cmd->add_option("--nodes", f.nodes, "number of Chebyshev sample nodes");
  cmd->add_option("--interval", f.interval, "sampling interval a,b");
  cmd->add_option("--seed", f.seed, "random seed");
  cmd->add_option("--h", f.h, "finite-difference step of the velocity transport");
  cmd->add_option("--tau", f.tau, "convergence threshold of the Stiefel logarithm");
  cmd->add_option("--centering", f.centering, "arc center: q or p")
      ->check(CLI::IsMember({"q", "p"}));
  cmd->add_option("--methods", f.methods, "comma separated subset of hermite,geodesic,rbf");
  cmd->add_option("--rbf-shape", f.rbf_shape, "inverse multiquadric shape parameter");
  cmd->add_option("--out", f.out, "output CSV path (default: stdout)");
}

std::vector<std::string> split_commas(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) parts.push_back(item);
  return parts;
}

sth::ExperimentConfig make_config(sth::ExperimentKind kind, const Flags& f) {
  sth::ExperimentConfig c = sth::default_config(kind);
  if (f.n) c.n = *f.n;
  if (f.r) c.r = *f.r;
  if (f.m) c.m = *f.m;
  if (f.nodes) c.num_nodes = *f.nodes;
  if (f.seed) c.seed = *f.seed;
  if (f.h) c.h = *f.h;
  if (f.tau) c.tau = *f.tau;
  if (f.rbf_shape) c.rbf_shape = *f.rbf_shape;
  if (f.centering) {
    c.centering = *f.centering == "p" ? sth::Centering::p_centered : sth::Centering::q_centered;
  }
  if (f.interval) {
    const auto parts = split_commas(*f.interval);
    if (parts.size() != 2) throw sth::PreconditionError("--interval expects a,b");
    c.a = sth::parse_double(parts[0]);
    c.b = sth::parse_double(parts[1]);
  }
  if (f.methods) {
    c.methods.clear();
    for (const std::string& name : split_commas(*f.methods)) {
      c.methods.push_back(sth::parse_method(name));
    }
    if (c.methods.empty()) throw sth::PreconditionError("--methods is empty");
  }
  sth::validate(c);
  return c;
}

int finish(const sth::ErrorReport& report, const std::string& out) {
  if (out.empty()) {
    sth::write_report(report, std::cout);
  } else {
    sth::emit_report(report, out);
    for (const sth::ErrorSeries& s : report.series) {
      if (s.summarize) {
        std::cout << s.name << ": max_rel " << sth::format_double(s.max_rel) << ", l2_rel "
                  << sth::format_double(s.l2_rel) << '\n';
      }
    }
    std::cout << "wrote " << out << '\n';
  }
  int code = kExitOk;
  for (const sth::ErrorSeries& s : report.series) {
    if (!s.failed_samples.empty()) {
      std::cerr << "note: " << s.name << " skipped " << s.failed_samples.size()
                << " sample(s) whose logarithm did not converge\n";
    }
    if (!s.failure.empty()) {
      std::cerr << "error: " << s.name << ": " << s.failure << '\n';
      code = kExitNumerical;
    }
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hermite interpolation on the Stiefel manifold: experiment harness"};
  app.require_subcommand(1);
  app.set_help_flag("--help", "print this help message and exit");

  struct Command {
    const char* name;
    const char* help;
    sth::ExperimentKind kind;
    std::function<sth::ErrorReport(const sth::ExperimentConfig&)> run;
  };
  const std::vector<Command> commands = {
      {"transport-accuracy", "velocity transport reconstruction error versus step size",
       sth::ExperimentKind::transport_accuracy, sth::run_transport_accuracy},
      {"qr-interp", "interpolation of the Q-factor of a cubic matrix path",
       sth::ExperimentKind::qr_interp, sth::run_qr_interp},
      {"svd-interp", "interpolation of a fixed-rank truncated SVD",
       sth::ExperimentKind::svd_interp, sth::run_svd_interp},
      {"snapshot-interp", "interpolation of left singular vectors of function snapshots",
       sth::ExperimentKind::snapshot_interp, sth::run_snapshot_experiment},
      {"tangent-vs-manifold", "tangent-space versus manifold interpolation errors",
       sth::ExperimentKind::tangent_vs_manifold, sth::run_tangent_vs_manifold},
      {"bound-check", "observed distances against the error-curvature bound",
       sth::ExperimentKind::bound_check, sth::run_bound_check},
  };

  std::vector<Flags> flags(commands.size());
  std::vector<CLI::App*> subs;
  for (std::size_t i = 0; i < commands.size(); ++i) {
    subs.push_back(app.add_subcommand(commands[i].name, commands[i].help));
    add_flags(subs.back(), flags[i]);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  for (std::size_t i = 0; i < commands.size(); ++i) {
    if (!subs[i]->parsed()) continue;
    try {
      const sth::ExperimentConfig config = make_config(commands[i].kind, flags[i]);
      return finish(commands[i].run(config), flags[i].out);
    } catch (const sth::NoConvergence& e) {
      std::cerr << "error: " << commands[i].name << ": " << e.what() << " (iterations "
                << e.iterations() << ", residual " << e.residual() << ")\n";
      return kExitNumerical;
    } catch (const sth::NumericalError& e) {
      std::cerr << "error: " << commands[i].name << ": " << e.what() << '\n';
      return kExitNumerical;
    } catch (const std::exception& e) {
      std::cerr << "error: " << commands[i].name << ": " << e.what() << '\n';
      return kExitConfig;
    }
  }
  return kExitConfig;
}
