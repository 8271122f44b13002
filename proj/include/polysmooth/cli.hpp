#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace polysmooth::cli {

/// One invocation of the command-line tool.
struct JobSpec {
  std::string command;  // subdivide | approximate | smooth | iota | retraction | verify
  std::string complex_path, target_path, map_path, cover_path, divisor_path;
  std::string out_path, csv_path, report_path;
  std::optional<std::string> eps, eta, delta, share;
  std::optional<int> nu, n, k;
  std::optional<std::uint64_t> seed;
  std::size_t samples = 10000;
  bool timing = false;
};

/// Runs the job, writing the report to `report_path` or `out`. Returns 0 when
/// every certificate passes, 1 on violations or failed certification, 2 on
/// input errors (messages go to `err`).
int run(const JobSpec& job, std::ostream& out, std::ostream& err);

}  // namespace polysmooth::cli
