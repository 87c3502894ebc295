#include "melonic/report.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace melonic {

std::string to_string(Status s) {
  switch (s) {
    case Status::Pass:
      return "pass";
    case Status::Fail:
      return "fail";
    case Status::Error:
      return "error";
  }
  return "error";
}

namespace {

Status parse_status(const std::string& s) {
  if (s == "pass") return Status::Pass;
  if (s == "fail") return Status::Fail;
  if (s == "error") return Status::Error;
  throw std::invalid_argument("unknown status: " + s);
}

}  // namespace

void CheckReport::add_residual(const Series& r, const std::string& label) {
  for (const auto& line : r.lines()) residual.push_back(label.empty() ? line : label + ": " + line);
  finalize();
}

void CheckReport::require(bool ok, const std::string& condition) {
  if (!ok) residual.push_back("failed: " + condition);
  finalize();
}

void CheckReport::finalize() {
  if (!error.empty())
    status = Status::Error;
  else
    status = residual.empty() ? Status::Pass : Status::Fail;
}

nlohmann::ordered_json CheckReport::to_json() const {
  nlohmann::ordered_json j;
  j["check"] = check;
  j["parameters"] = parameters;
  j["status"] = to_string(status);
  j["residual"] = residual;
  if (!result.empty()) j["result"] = result;
  if (!notes.empty()) j["notes"] = notes;
  if (!error.empty()) j["error"] = error;
  if (runtime_ms) j["runtime_ms"] = *runtime_ms;
  return j;
}

std::string CheckReport::json_line() const { return to_json().dump(); }

std::string CheckReport::text() const {
  std::ostringstream os;
  os << to_string(status) << "  " << check << "  " << parameters.dump() << "\n";
  if (!result.empty()) os << "  result: " << result.dump() << "\n";
  for (const auto& n : notes) os << "  note: " << n << "\n";
  if (!error.empty()) os << "  error: " << error << "\n";
  for (const auto& r : residual) os << "  residual: " << r << "\n";
  if (runtime_ms) os << "  runtime_ms: " << *runtime_ms << "\n";
  return os.str();
}

CheckReport CheckReport::from_json(const nlohmann::ordered_json& j) {
  CheckReport r;
  r.check = j.at("check").get<std::string>();
  r.parameters = j.at("parameters");
  r.status = parse_status(j.at("status").get<std::string>());
  r.residual = j.at("residual").get<std::vector<std::string>>();
  if (j.contains("result")) r.result = j.at("result");
  if (j.contains("notes")) r.notes = j.at("notes").get<std::vector<std::string>>();
  if (j.contains("error")) r.error = j.at("error").get<std::string>();
  if (j.contains("runtime_ms")) r.runtime_ms = j.at("runtime_ms").get<double>();
  return r;
}

int exit_code(const std::vector<CheckReport>& reports) {
  int code = 0;
  for (const auto& r : reports) {
    if (r.status == Status::Error) return 2;
    if (r.status == Status::Fail) code = 1;
  }
  return code;
}

std::vector<CheckReport> run_checks(const std::vector<Check>& checks, int threads, bool timing) {
  std::vector<CheckReport> out(checks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < checks.size(); i = next++) {
      const auto start = std::chrono::steady_clock::now();
      CheckReport r;
      r.check = checks[i].name;
      r.parameters = checks[i].parameters;
      try {
        checks[i].run(r);
      } catch (const std::exception& e) {
        r.residual.clear();
        r.error = e.what();
      }
      r.finalize();
      if (timing)
        r.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
      out[i] = std::move(r);
    }
  };
  const int n = std::max(1, std::min<int>(threads, static_cast<int>(checks.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return out;
}

}  // namespace melonic
