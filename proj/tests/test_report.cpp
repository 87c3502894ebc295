#include <gtest/gtest.h>

#include <stdexcept>

#include "melonic/report.hpp"

using namespace melonic;

TEST(CheckReport, StatusFollowsResidual) {
  CheckReport r;
  r.check = "x";
  r.add_residual(Series());
  EXPECT_EQ(r.status, Status::Pass);
  EXPECT_TRUE(r.residual.empty());
  r.require(true, "holds");
  EXPECT_EQ(r.status, Status::Pass);
  Series s;
  s.add_term(Monomial::time(tvar(1, 2)), GaussRat(mpq_class(1, 3)));
  r.add_residual(s, "r1");
  EXPECT_EQ(r.status, Status::Fail);
  ASSERT_EQ(r.residual.size(), 1U);
  EXPECT_EQ(r.residual[0].rfind("r1: ", 0), 0U);
}

TEST(CheckReport, FailedConditionIsAResidualLine) {
  CheckReport r;
  r.require(false, "[B,Y] = 0");
  EXPECT_EQ(r.status, Status::Fail);
  EXPECT_EQ(r.residual, std::vector<std::string>{"failed: [B,Y] = 0"});
}

TEST(CheckReport, JsonRoundTrip) {
  CheckReport r;
  r.check = "verify commutator";
  r.parameters["D"] = 3;
  r.parameters["p_max"] = 4;
  r.result["monomials"] = 34;
  r.notes.push_back("sign convention");
  r.finalize();
  const std::string line = r.json_line();
  EXPECT_EQ(line.find('\n'), std::string::npos);
  EXPECT_EQ(line.rfind("{\"check\":\"verify commutator\",\"parameters\":{\"D\":3,\"p_max\":4},\"status\":\"pass\"", 0), 0U);
  EXPECT_EQ(line.find("runtime_ms"), std::string::npos);
  const CheckReport back = CheckReport::from_json(nlohmann::ordered_json::parse(line));
  EXPECT_EQ(back.json_line(), line);
}

TEST(CheckReport, ExitCodes) {
  CheckReport pass, fail, err;
  fail.require(false, "x");
  err.error = "budget";
  err.finalize();
  EXPECT_EQ(exit_code({}), 0);
  EXPECT_EQ(exit_code({pass, pass}), 0);
  EXPECT_EQ(exit_code({pass, fail}), 1);
  EXPECT_EQ(exit_code({fail, err, pass}), 2);
}

TEST(RunChecks, OrderAndErrorsIndependentOfThreads) {
  std::vector<Check> checks;
  for (int i = 0; i < 7; ++i) {
    Check c;
    c.name = "c" + std::to_string(i);
    c.parameters["i"] = i;
    c.run = [i](CheckReport& r) {
      if (i == 3) throw std::invalid_argument("bad");
      r.result["square"] = i * i;
      r.require(i != 5, "i != 5");
    };
    checks.push_back(c);
  }
  const auto one = run_checks(checks, 1, false);
  const auto four = run_checks(checks, 4, false);
  ASSERT_EQ(one.size(), 7U);
  for (std::size_t i = 0; i < one.size(); ++i) {
    EXPECT_EQ(one[i].json_line(), four[i].json_line());
    EXPECT_EQ(one[i].check, "c" + std::to_string(i));
  }
  EXPECT_EQ(one[3].status, Status::Error);
  EXPECT_EQ(one[3].error, "bad");
  EXPECT_EQ(one[3].parameters["i"], 3);
  EXPECT_EQ(one[5].status, Status::Fail);
  EXPECT_EQ(exit_code(one), 2);
  EXPECT_TRUE(run_checks(checks, 2, true)[0].runtime_ms.has_value());
}
