#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>
#include <sys/wait.h>

#include <json.hpp>

#include "xipow/numeric.hpp"

using nlohmann::json;

namespace {

struct Outcome {
  int code = -1;
  std::string out;
};

Outcome run(const std::string& args) {
  std::string cmd = std::string(XIPOW_CLI) + " " + args + " 2>/dev/null";
  Outcome r;
  FILE* p = popen(cmd.c_str(), "r");
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string write(const std::string& name, const std::string& body) {
  std::string path = ::testing::TempDir() + "xipow_cli_" + name;
  std::ofstream(path) << body;
  return path;
}

std::string base2() { return write("b2.json", R"({"kind":"natural","n":2})"); }

}  // namespace

TEST(Cli, SolveSat) {
  std::string f = write("sat.sxp", "(exists (x) (and (pow x) (< 3 x) (< x 5)))");
  Outcome r = run("solve --base " + base2() + " --formula " + f);
  EXPECT_EQ(r.code, 0);
  json j = json::parse(r.out);
  EXPECT_EQ(j.at("status"), "sat");
  EXPECT_EQ(j.at("witness").at("x").at("exponent"), 2);
}

TEST(Cli, SolveUnsat) {
  std::string f = write("unsat.sxp", "(exists (x) (and (pow x) (= (* x x) 2)))");
  Outcome r = run("solve --base " + base2() + " --formula " + f);
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(json::parse(r.out).at("status"), "unsat");
}

TEST(Cli, SolveEnumerateStrategy) {
  std::string f = write("sum.sxp", "(exists (x y) (and (pow x) (pow y) (= (+ x y) 12)))");
  Outcome r = run("solve --base " + base2() + " --formula " + f + " --strategy enumerate --max-exponent 4");
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(json::parse(r.out).at("status"), "sat");
}

TEST(Cli, ErrorsAreJson) {
  std::string f = write("uni.sxp", "(forall (x) (< x 0))");
  Outcome r = run("solve --base " + base2() + " --formula " + f);
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(json::parse(r.out).at("error").at("kind"), "UNIVERSAL_QUANTIFIER");
  Outcome missing = run("solve --base /nonexistent.json --formula " + f);
  EXPECT_EQ(missing.code, 2);
  EXPECT_TRUE(json::parse(missing.out).at("error").contains("detail"));
  Outcome bad_base = run("sign --base " + write("neg.json", R"({"kind":"rational","value":"-1/2"})") + " --poly x");
  EXPECT_EQ(bad_base.code, 2);
  EXPECT_EQ(json::parse(bad_base.out).at("error").at("kind"), "INVALID_BASE");
  Outcome bad_flag = run("solve --strategy nope");
  EXPECT_EQ(bad_flag.code, 2);
  EXPECT_NO_THROW(json::parse(bad_flag.out));
}

TEST(Cli, SignAtDefiningPolynomial) {
  std::string b = write("sqrt2.json", R"({"kind":"algebraic","poly":[-2,0,1],"lo":1,"hi":2})");
  Outcome r = run("sign --base " + b + " --poly '(+ (^ x 2) -2)'");
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(json::parse(r.out).at("sign"), "0");
  EXPECT_EQ(json::parse(run("sign --base " + b + " --poly '(+ x -1)'").out).at("sign"), "+");
}

TEST(Cli, ApproxPi) {
  std::string b = write("pi.json", R"({"kind":"pi"})");
  Outcome r = run("approx --base " + b + " -n 16");
  EXPECT_EQ(r.code, 0);
  json j = json::parse(r.out);
  EXPECT_EQ(j.at("accuracy"), 16);
  xipow::Rat v = xipow::parse_rat(j.at("value").get<std::string>());
  // pi to 30 digits.
  xipow::Rat pi = xipow::parse_rat("314159265358979323846264338328/100000000000000000000000000000");
  EXPECT_LE(xipow::abs_rat(v - pi), xipow::pow2(-16));
}

TEST(Cli, Erisk) {
  std::string g = write("chain.json", R"({"states":[
      {"name":"s","player":"max","actions":[{"name":"a","dist":[["t","1"]]}],"reward":"2","target":null},
      {"name":"t","player":"max","actions":[],"reward":"0","target":1}],
    "initial":"s","threshold":"1"})");
  Outcome r = run("erisk --game " + g + " --b e --eta 1");
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(json::parse(r.out).at("holds"), true);
  Outcome r3 = run("erisk --game " + g + " --b 2 --eta 1/2");
  EXPECT_EQ(json::parse(r3.out).at("holds"), true);
  Outcome bad = run("erisk --game " + g + " --b e --eta 0");
  EXPECT_EQ(bad.code, 2);
  EXPECT_EQ(json::parse(bad.out).at("error").at("kind"), "INVALID_PARAMS");
}

TEST(Cli, Bounds) {
  std::string f = write("bnd.sxp", "(exists (x) (and (pow x) (< 3 x) (< x 5)))");
  Outcome r = run("bounds --base " + base2() + " --formula " + f);
  EXPECT_EQ(r.code, 0);
  json j = json::parse(r.out);
  EXPECT_TRUE(j.contains("U"));
  EXPECT_TRUE(j.contains("structural"));
}

TEST(Cli, EmitEtr) {
  std::string f = write("psi.sxp", "(and (< 3 u) (< u 5))");
  Outcome r = run("emit-etr --base " + base2() + " --formula " + f + " --exponent u=2");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("(set-logic QF_NRA)"), std::string::npos);
  EXPECT_NE(r.out.find("(assert (= |u| x1))"), std::string::npos);
  EXPECT_NE(r.out.find("(check-sat)"), std::string::npos);
  // Without exponents the power solver picks them.
  Outcome auto_exp = run("emit-etr --base " + base2() + " --formula " + f);
  EXPECT_EQ(auto_exp.out, r.out);
  std::string g = write("psi_unsat.sxp", "(and (< 4 u) (< u 5))");
  Outcome none = run("emit-etr --base " + base2() + " --formula " + g);
  EXPECT_EQ(none.code, 1);
  EXPECT_NE(none.out.find("(assert false)"), std::string::npos);
}

TEST(Cli, DelegateThroughQeBuiltin) {
  std::string f = write("del.sxp", "(exists (x y) (and (pow x) (pow y) (= (+ x y) 12)))");
  Outcome builtin = run("solve --base " + base2() + " --formula " + f);
  Outcome delegated = run("solve --base " + base2() + " --formula " + f + " --qe 'exec:" + XIPOW_CLI + " qe-builtin'");
  EXPECT_EQ(delegated.code, builtin.code);
  json a = json::parse(builtin.out), b = json::parse(delegated.out);
  EXPECT_EQ(a.at("status"), b.at("status"));
  EXPECT_EQ(a.at("witness").at("x").at("exponent"), b.at("witness").at("x").at("exponent"));
  Outcome failing = run("solve --base " + base2() + " --formula " + f + " --qe exec:false");
  EXPECT_EQ(failing.code, 2);
  EXPECT_EQ(json::parse(failing.out).at("error").at("kind"), "DELEGATE_FAILURE");
}

TEST(Cli, Deterministic) {
  std::string f = write("det.sxp", "(exists (x) (and (not (pow x)) (< 3 x) (< x 5)))");
  Outcome a = run("solve --base " + base2() + " --formula " + f);
  Outcome b = run("solve --base " + base2() + " --formula " + f);
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(a.code, 0);
}
