// occert: survey curvature pinching and the class P over sampled points of S^6.

#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "occert/cli.hpp"

namespace {

std::vector<std::string> split_checks(const std::string& list) {
  std::vector<std::string> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace occert::cli;

  CLI::App app{"Numerical certification of curvature hypotheses on S^6"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  std::string metric = "round";
  std::string spec_path;
  int points = 20;
  std::uint64_t seed = 0;
  double fd_step = 1e-3;
  bool richardson = false;
  int multistarts = 64;
  double tol = 1e-9;
  std::string checks = "bhl,p_sufficient,p_refute";
  std::string out;

  auto add_run_flags = [&](CLI::App* sub) {
    sub->add_option("--metric", metric, "metric family (round, flat) or inline JSON spec");
    sub->add_option("--spec", spec_path, "JSON metric spec file");
    sub->add_option("--points", points, "number of sampled points");
    sub->add_option("--seed", seed, "sampling and search seed");
    sub->add_option("--fd-step", fd_step, "finite-difference step h");
    sub->add_flag("--richardson", richardson, "fourth-order Richardson differences");
    sub->add_option("--multistarts", multistarts, "starts for the searches");
    sub->add_option("--tol", tol, "refutation tolerance");
    sub->add_option("--checks", checks, "comma list of bhl,p_sufficient,p_refute,lemma_ll_demo");
    sub->add_option("--out", out, "report path (default: JSON on standard output)");
  };
  CLI::App* certify = app.add_subcommand("certify", "certify hypotheses at sampled points");
  CLI::App* spectrum = app.add_subcommand("spectrum", "curvature operator spectra at sampled points");
  app.add_subcommand("selftest", "run built-in consistency checks");
  add_run_flags(certify);
  add_run_flags(spectrum);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : exit_config;
  }

  if (app.got_subcommand("selftest")) return run_selftest(std::cout);

  RunConfig config;
  try {
    config.command = app.got_subcommand("certify") ? "certify" : "spectrum";
    config.metric_spec = spec_path.empty() ? metric_spec_from_flag(metric) : read_json_file(spec_path);
    config.metric = parse_metric_spec(config.metric_spec);
    config.points = points;
    config.seed = seed;
    config.fd.h = fd_step;
    config.fd.scheme = richardson ? occert::FDScheme::richardson_4th : occert::FDScheme::central_2nd;
    config.multistarts = multistarts;
    config.tol = tol;
    config.checks = split_checks(checks);
    config.out = out;
    config.validate();
  } catch (const occert::Error& e) {
    std::cerr << "occert: " << e.what() << "\n";
    return e.kind() == occert::ErrorKind::io ? exit_io : exit_config;
  }

  try {
    const Report report = config.command == "certify" ? run_certify(config) : run_spectrum(config);
    emit_report(report, config.out);
    if (!config.out.empty() && config.out != "-") print_summary(report, std::cout);
    return report.exit_code;
  } catch (const occert::Error& e) {
    std::cerr << "occert: " << e.what() << "\n";
    return e.kind() == occert::ErrorKind::io ? exit_io : exit_unknown;
  }
}
