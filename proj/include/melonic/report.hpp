#pragma once

// Check reports emitted by the command-line driver: one JSON object per line.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "melonic/series.hpp"

namespace melonic {

enum class Status { Pass, Fail, Error };

std::string to_string(Status s);

struct CheckReport {
  std::string check;
  /// Every parameter needed to reproduce the run, in insertion order.
  nlohmann::ordered_json parameters = nlohmann::ordered_json::object();
  Status status = Status::Pass;
  /// Serialized residual Series lines plus "failed: <condition>" lines; empty on pass.
  std::vector<std::string> residual;
  /// Computed values (coefficients, degrees, counts).
  nlohmann::ordered_json result = nlohmann::ordered_json::object();
  std::vector<std::string> notes;
  std::optional<double> runtime_ms;
  std::string error;

  /// Appends the lines of r; the status follows.
  void add_residual(const Series& r, const std::string& label = "");
  /// Records a boolean condition; a false one becomes a residual line.
  void require(bool ok, const std::string& condition);
  /// Pass iff no residual lines; error is sticky.
  void finalize();

  nlohmann::ordered_json to_json() const;
  std::string json_line() const;
  std::string text() const;
  static CheckReport from_json(const nlohmann::ordered_json& j);
};

/// 0 when all pass, 2 when any errored, 1 otherwise.
int exit_code(const std::vector<CheckReport>& reports);

struct Check {
  std::string name;
  nlohmann::ordered_json parameters = nlohmann::ordered_json::object();
  /// Fills residual, result and notes of a report that already carries name and parameters.
  std::function<void(CheckReport&)> run;
};

/// Runs the checks on up to `threads` workers. Results come back in input
/// order; an exception becomes an error report. With `timing` the wall-clock
/// time is recorded per report.
std::vector<CheckReport> run_checks(const std::vector<Check>& checks, int threads, bool timing);

}  // namespace melonic
