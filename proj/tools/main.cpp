#include <iostream>

#include "CLI11.hpp"
#include "polysmooth/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Smoothing of piecewise-linear maps between polyhedra"};
  app.require_subcommand(1);
  polysmooth::cli::JobSpec job;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--out", job.out_path, "Artifact output path");
    sub->add_option("--report", job.report_path, "Report path (default: stdout)");
    sub->add_flag("--timing", job.timing, "Include phase timings in the report");
  };
  auto sampling = [&](CLI::App* sub) {
    sub->add_option("--samples", job.samples, "Number of verification samples")->check(CLI::Range(1, 10000000));
    sub->add_option("--seed", job.seed, "Use pseudorandom samples with this seed");
    sub->add_option("--csv", job.csv_path, "CSV evaluation table (ambient dimension <= 3)");
  };

  auto* subdivide = app.add_subcommand("subdivide", "Iterated barycentric subdivision with mesh certificates");
  subdivide->add_option("--complex", job.complex_path, "Complex JSON")->required();
  subdivide->add_option("--k", job.k, "Subdivision rounds");
  common(subdivide);

  auto* approximate = app.add_subcommand("approximate", "Smooth approximation of a map between polyhedra");
  approximate->add_option("--complex", job.complex_path, "Source complex JSON")->required();
  approximate->add_option("--target", job.target_path, "Target complex JSON");
  approximate->add_option("--map", job.map_path, "Map JSON")->required();
  approximate->add_option("--eps", job.eps, "Error bound")->required();
  approximate->add_option("--nu", job.nu, "Smoothness class");
  approximate->add_option("--share", job.share, "Share of eps spent on the simplicial stage");
  common(approximate);
  sampling(approximate);

  auto* smooth = app.add_subcommand("smooth", "Smooth a piecewise map within eta");
  smooth->add_option("--complex", job.complex_path, "Source complex JSON")->required();
  smooth->add_option("--target", job.target_path, "Target complex JSON");
  smooth->add_option("--map", job.map_path, "Map JSON")->required();
  smooth->add_option("--eta", job.eta, "Error bound")->required();
  smooth->add_option("--nu", job.nu, "Smoothness class");
  common(smooth);
  sampling(smooth);

  auto* iota = app.add_subcommand("iota", "Smooth approximation of the identity within 2^-n");
  iota->add_option("--complex", job.complex_path, "Complex JSON")->required();
  iota->add_option("--nu", job.nu, "Smoothness class");
  iota->add_option("--n", job.n, "Level");
  common(iota);
  sampling(iota);

  auto* retraction = app.add_subcommand("retraction", "Weak retraction onto a coordinate crossings divisor");
  retraction->add_option("--divisor", job.divisor_path, "Divisor JSON")->required();
  retraction->add_option("--eta", job.eta, "Collar width (overrides the file)");
  retraction->add_option("--nu", job.nu, "Smoothness class (overrides the file)");
  retraction->add_option("--csv", job.csv_path, "CSV vector field (dimension <= 3)");
  common(retraction);

  auto* verify = app.add_subcommand("verify", "Verify a cover, or build and verify one");
  verify->add_option("--cover", job.cover_path, "Cover JSON");
  verify->add_option("--complex", job.complex_path, "Complex JSON to build a cover for");
  verify->add_option("--delta", job.delta, "Cover radius when building");
  common(verify);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  job.command = app.get_subcommands().front()->get_name();
  return polysmooth::cli::run(job, std::cout, std::cerr);
}
