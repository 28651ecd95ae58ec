#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>
#include <string>

#include "postlie/cli/run.hpp"

namespace {

namespace fs = std::filesystem;
using postlie::cli::Json;

const fs::path kRoot = POSTLIE_SOURCE_DIR;
const fs::path kGolden = kRoot / "tests" / "golden";
const fs::path kInputs = kGolden / "inputs";

struct Outcome {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string quote(const std::string& s) { return "'" + s + "'"; }

/// Runs the CLI through the shell; `args` is appended verbatim.
Outcome cli(const std::string& args, const std::string& env = "") {
  const fs::path err = fs::temp_directory_path() / ("postlie_cli_err_" + std::to_string(::getpid()));
  const std::string cmd = env + " " + quote(POSTLIE_CLI) + " " + args + " 2>" + quote(err.string());
  Outcome o;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (!pipe) return o;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) o.out.append(buf, n);
  const int status = ::pclose(pipe);
  o.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  o.err = slurp(err);
  fs::remove(err);
  return o;
}

std::string input(const std::string& name) { return quote((kInputs / name).string()); }

// ------------------------------------------------------------ golden files

struct GoldenCase {
  std::string golden;
  std::string args;
  int exit_code;
};

void PrintTo(const GoldenCase& c, std::ostream* os) { *os << c.golden; }

const std::vector<GoldenCase>& golden_cases() {
  static const std::vector<GoldenCase> cases{
      {"example_1_graft.json", "trees graft " + input("example_1_graft.json"), 0},
      {"uparrow_display.json", "trees uparrow " + input("uparrow_display.json"), 0},
      {"hat_triangle_display.json", "trees products " + input("hat_triangle_display.json"), 0},
      {"example_1_deform_graft.json", "trees deform-graft " + input("example_1_graft.json"), 0},
      {"check_zero_algebra.json", "check " + input("zero_algebra.json"), 0},
      {"mc_lie_pair.json", "mc " + input("lie_pair.json"), 0},
      {"cohomology_dual_numbers.json", "cohomology --degree 1,2 --les 2 " + input("dual_numbers.json"), 0},
      {"deform_trivialize_idempotents.json",
       "deform trivialize --random-order 3 --seed 7 " + input("idempotents.json"), 0},
      {"schema_error_bad_index.json", "check " + input("bad_index.json"), 2},
  };
  return cases;
}

class GoldenTest : public ::testing::TestWithParam<GoldenCase> {};

TEST_P(GoldenTest, ReportMatchesBytes) {
  const auto& c = GetParam();
  const Outcome o = cli(c.args);
  EXPECT_EQ(o.exit_code, c.exit_code) << o.err;
  EXPECT_EQ(o.out, slurp(kGolden / c.golden)) << "regenerate with tests/golden/regenerate.sh if the change is intended";
}

INSTANTIATE_TEST_SUITE_P(Cli, GoldenTest, ::testing::ValuesIn(golden_cases()), [](const auto& info) {
  std::string n = info.param.golden.substr(0, info.param.golden.size() - 5);
  for (char& ch : n)
    if (!std::isalnum(static_cast<unsigned char>(ch))) ch = '_';
  return n;
});

TEST(Cli, EveryGoldenFileHasARegenerationCommand) {
  const std::string script = slurp(kGolden / "regenerate.sh");
  std::set<std::string> scripted;
  const std::regex out_re(R"(-o "\$G/([A-Za-z0-9_]+\.json)\")");
  for (auto it = std::sregex_iterator(script.begin(), script.end(), out_re); it != std::sregex_iterator(); ++it)
    scripted.insert((*it)[1]);
  std::set<std::string> on_disk, tested;
  for (const auto& e : fs::directory_iterator(kGolden))
    if (e.path().extension() == ".json") on_disk.insert(e.path().filename().string());
  for (const auto& c : golden_cases()) tested.insert(c.golden);
  EXPECT_EQ(on_disk, scripted);
  EXPECT_EQ(on_disk, tested);
}

TEST(Cli, RegenerationScriptReproducesGoldens) {
  const fs::path tmp = fs::temp_directory_path() / ("postlie_regen_" + std::to_string(::getpid()));
  fs::create_directories(tmp / "tests" / "golden");
  fs::copy(kInputs, tmp / "tests" / "golden" / "inputs", fs::copy_options::recursive);
  const std::string cmd = "cd " + quote(tmp.string()) + " && sh " + quote((kGolden / "regenerate.sh").string()) + " " +
                          quote(POSTLIE_CLI) + " 2>/dev/null";
  ASSERT_EQ(std::system(cmd.c_str()), 0);
  for (const auto& c : golden_cases())
    EXPECT_EQ(slurp(tmp / "tests" / "golden" / c.golden), slurp(kGolden / c.golden)) << c.golden;
  fs::remove_all(tmp);
}

// The golden trees agree with the library serialization of independently
// built expected terms.
TEST(Cli, GraftGoldenHasTheTwoExpectedTerms) {
  using namespace postlie;
  const Json g = Json::parse(slurp(kGolden / "example_1_graft.json"));
  ASSERT_EQ(g["result"].size(), 2u);
  const MultiIndex alpha{1, 0}, beta{1, 1}, gamma{0, 1}, a{1, 1}, b{0, 1};
  auto leaf = [](MultiIndex m) { return DecoratedTree::leaf(std::move(m)); };
  const auto xi = std::make_pair(EdgeLabel::Xi(), leaf(MultiIndex(2)));
  const DecoratedTree on_root =
      DecoratedTree::make(gamma, {xi, {EdgeLabel::I(b), leaf(beta)}, {EdgeLabel::I(a), leaf(alpha)}});
  const DecoratedTree on_beta =
      DecoratedTree::make(gamma, {xi, {EdgeLabel::I(b), DecoratedTree::make(beta, {{EdgeLabel::I(a), leaf(alpha)}})}});
  std::set<std::string> expected{cli::to_json(on_root).dump(), cli::to_json(on_beta).dump()}, got;
  for (const auto& term : g["result"]) {
    EXPECT_EQ(term["coefficient"], "1/1");
    got.insert(term["tree"].dump());
  }
  EXPECT_EQ(got, expected);
}

TEST(Cli, UparrowGoldenSkipsTheNoiseLeaf) {
  const Json g = Json::parse(slurp(kGolden / "uparrow_display.json"));
  ASSERT_EQ(g["result"].size(), 2u);
  for (const auto& term : g["result"]) {
    EXPECT_EQ(term["coefficient"], "1/1");
    // the Xi leaf keeps decoration (0,0) in both terms
    bool saw_xi = false;
    for (const auto& child : term["tree"]["children"])
      if (child["edge"].contains("Xi")) {
        saw_xi = true;
        EXPECT_EQ(child["tree"]["node"], Json::array({0, 0}));
      }
    EXPECT_TRUE(saw_xi);
  }
}

TEST(Cli, HatTriangleGoldenHasBinomialWeights) {
  // beta = (2,1), a = (1,1): l ranges over {0, e0, e1, e0+e1}, weights C(beta, l) = 1, 2, 1, 2
  const Json g = Json::parse(slurp(kGolden / "hat_triangle_display.json"));
  std::multiset<std::string> coeffs;
  for (const auto& term : g["hat_triangle"]) coeffs.insert(term["coefficient"].get<std::string>());
  EXPECT_EQ(coeffs, (std::multiset<std::string>{"1/1", "1/1", "2/1", "2/1"}));
  ASSERT_EQ(g["triangle"].size(), 1u);
  EXPECT_EQ(g["triangle"][0]["coefficient"], "1/1");
  // omega_1 carries l = e0 and e1; omega_2 carries l = e0 + e1
  ASSERT_EQ(g["omega"].size(), 2u);
  EXPECT_EQ(g["omega"][0].size(), 2u);
  EXPECT_EQ(g["omega"][1].size(), 1u);
  // t = 1/2: weights 1, 2/2, 1/2, 2/4
  std::multiset<std::string> half;
  for (const auto& term : g["t_family"][0]["hat_triangle_t"]) half.insert(term["coefficient"].get<std::string>());
  EXPECT_EQ(half, (std::multiset<std::string>{"1/1", "1/1", "1/2", "1/2"}));
}

// ------------------------------------------------------------- behaviour

TEST(Cli, ZeroProductAlgebraPasses) {
  const Outcome o = cli("check " + input("zero_algebra.json"));
  EXPECT_EQ(o.exit_code, 0);
  EXPECT_TRUE(Json::parse(o.out)["holds"].get<bool>());
}

TEST(Cli, DualNumbersFirstCohomologyIsTheDerivations) {
  // Q[x]/(x^2): D(1) = 0 and D(x) = c x, so Der is one-dimensional
  const Json r = Json::parse(cli("cohomology --degree 1 " + input("dual_numbers.json")).out);
  EXPECT_EQ(r["degrees"][0]["betti"], 1);
  EXPECT_EQ(r["degrees"][0]["derivation_dim"], 1);
}

TEST(Cli, FailedChecksExitOne) {
  // (x y) z != x (y z) pattern: e1 > e1 = e2, e2 > e1 = e1 is not left-symmetric
  const std::string doc = R"({"dim": 2, "products": {"triangle": [[0,0,1,"1"],[1,0,0,"1"]]}})";
  const Outcome o = cli("check -", "printf '%s' " + quote(doc) + " |");
  EXPECT_EQ(o.exit_code, 1);
  const Json r = Json::parse(o.out);
  EXPECT_FALSE(r["holds"].get<bool>());
  EXPECT_FALSE(r["checks"]["pre_lie"]["witnesses"].empty());
}

TEST(Cli, PreconditionFailuresExitOneWithAReport) {
  const std::string doc = R"({"dim": 2, "products": {"triangle": [[0,0,1,"1"],[1,0,0,"1"]]}})";
  const Outcome o = cli("mc -", "printf '%s' " + quote(doc) + " |");
  EXPECT_EQ(o.exit_code, 1);
  EXPECT_EQ(Json::parse(o.out)["error"]["kind"], "precondition");
}

TEST(Cli, SchemaViolationsNameThePath) {
  struct Case {
    std::string doc, path;
  };
  const std::vector<Case> cases{
      {R"({"dim": 2, "products": {"triangle": [[0,0,0,"1"],[0,1,2,"1"]]}})", "/products/triangle/1/2"},
      {R"({"dim": 2, "products": {"triangle": [[0,0,0,"1/0"]]}})", "/products/triangle/0/3"},
      {R"({"dim": 2, "products": {"cup": []}})", "/products/cup"},
      {R"({"dim": 2, "products": {"bracket": [[0,1,0,"1"],[1,0,0,"1"]]}})", "/products/bracket"},
      {R"({"products": {}})", "/"},
      {R"({"dim": 2, "basis": ["a"]})", "/basis"},
      {R"({"dim": 2, "extra": 1})", "/extra"},
      {"[1, 2", "/"},
  };
  for (const auto& c : cases) {
    const Outcome o = cli("check -", "printf '%s' " + quote(c.doc) + " |");
    EXPECT_EQ(o.exit_code, 2) << c.doc;
    const Json r = Json::parse(o.out);
    EXPECT_EQ(r["error"]["kind"], "schema") << c.doc;
    EXPECT_EQ(r["error"]["path"], c.path) << c.doc;
    EXPECT_NE(o.err.find(c.path), std::string::npos) << o.err;
  }
}

TEST(Cli, TreeSchemaViolationsNameThePath) {
  struct Case {
    std::string doc, path;
  };
  const std::vector<Case> cases{
      {R"({"tau": {"node": [0,1], "children": [{"edge": {"Xi": null}, "tree": {"node": [1,0]}}]}, "i": 0})",
       "/tau/children/0/tree/node"},
      {R"({"tau": {"node": [0,1], "children": [{"edge": {"I": [1]}, "tree": {"node": [1,0]}}]}, "i": 0})",
       "/tau/children/0/edge/I"},
      {R"({"tau": {"node": [0,1], "children": [{"edge": {"J": [1,0]}, "tree": {"node": [1,0]}}]}, "i": 0})",
       "/tau/children/0/edge"},
      {R"({"tau": {"node": [0,1], "children": [{"edge": {"Xi": null}, "tree": {"node": [0,0]}},
                                                {"edge": {"Xi": null}, "tree": {"node": [0,0]}}]}, "i": 0})",
       "/tau/children"},
      {R"({"tau": {"node": [0,-1]}, "i": 0})", "/tau/node/1"},
      {R"({"tau": {"node": [0,1]}, "i": 2})", "/i"},
  };
  for (const auto& c : cases) {
    const Outcome o = cli("trees uparrow -", "printf '%s' " + quote(c.doc) + " |");
    EXPECT_EQ(o.exit_code, 2) << c.doc;
    EXPECT_EQ(Json::parse(o.out)["error"]["path"], c.path) << c.doc;
  }
}

TEST(Cli, AntisymmetricProductsMayListOneOrientation) {
  const std::string one = R"({"dim": 2, "products": {"pi": [[0,1,0,"1"]]}})";
  const std::string both = R"({"dim": 2, "products": {"pi": [[0,1,0,"1"],[1,0,0,"-1"]]}})";
  const Json a = Json::parse(cli("mc -", "printf '%s' " + quote(one) + " |").out);
  const Json b = Json::parse(cli("mc -", "printf '%s' " + quote(both) + " |").out);
  EXPECT_TRUE(a["holds"].get<bool>());
  EXPECT_EQ(a["residual"], b["residual"]);
}

TEST(Cli, StdinAndFileInputGiveIdenticalReports) {
  const Outcome file = cli("trees graft " + input("example_1_graft.json"));
  const Outcome in = cli("trees graft - < " + input("example_1_graft.json"));
  EXPECT_EQ(file.out, in.out);
}

TEST(Cli, OutputFileMatchesStdout) {
  const fs::path out = fs::temp_directory_path() / ("postlie_out_" + std::to_string(::getpid()) + ".json");
  const Outcome o = cli("check " + input("dual_numbers.json") + " -o " + quote(out.string()));
  EXPECT_EQ(o.exit_code, 0);
  EXPECT_TRUE(o.out.empty());
  EXPECT_EQ(slurp(out), cli("check " + input("dual_numbers.json")).out);
  fs::remove(out);
}

TEST(Cli, ReportsAreByteIdenticalAcrossRunsAndThreadCounts) {
  const std::string args = "cohomology --degree 1,2,3 --les 2 " + input("dual_numbers.json");
  const Outcome one = cli(args + " --threads 1");
  EXPECT_EQ(one.exit_code, 0);
  EXPECT_EQ(one.out, cli(args + " --threads 1").out);
  EXPECT_EQ(one.out, cli(args + " --threads 3").out);
  EXPECT_EQ(one.out, cli(args, "POSTLIE_THREADS=4").out);
}

TEST(Cli, SeedDeterminesRandomDeformations) {
  const std::string args = "deform residuals --random-order 2 " + input("dual_numbers.json");
  const Outcome a = cli(args + " --seed 11"), b = cli(args + " --seed 11");
  EXPECT_EQ(a.exit_code, 0);
  EXPECT_EQ(a.out, b.out);
  const Json ra = Json::parse(a.out), rc = Json::parse(cli(args + " --seed 12").out);
  EXPECT_NE(ra["config_hash"], rc["config_hash"]);
  for (const auto& r : ra["residuals"]) EXPECT_TRUE(r["holds"].get<bool>());
}

TEST(Cli, ConfigHashTracksInputAndKnobs) {
  const Json a = Json::parse(cli("cohomology --degree 1 " + input("dual_numbers.json")).out);
  const Json b = Json::parse(cli("cohomology --degree 2 " + input("dual_numbers.json")).out);
  const Json c = Json::parse(cli("cohomology --degree 1 " + input("idempotents.json")).out);
  EXPECT_EQ(a["version"], postlie::cli::kVersion);
  EXPECT_NE(a["config_hash"], b["config_hash"]);
  EXPECT_NE(a["config_hash"], c["config_hash"]);
  EXPECT_EQ(a["config_hash"], postlie::cli::fnv1a64(a["config"].dump()));
}

TEST(Cli, DeformationRoundTripThroughJson) {
  // a sampled deformation fed back as explicit input reproduces the residual report
  const Json sampled = Json::parse(cli("deform residuals --random-order 2 --seed 5 " + input("dual_numbers.json")).out);
  Json doc = sampled["deformation"];
  doc["algebra"] = Json::parse(slurp(kInputs / "dual_numbers.json"));
  const Outcome o = cli("deform residuals -", "printf '%s' " + quote(doc.dump()) + " |");
  EXPECT_EQ(o.exit_code, 0) << o.err;
  EXPECT_EQ(Json::parse(o.out)["residuals"], sampled["residuals"]);
  const Json inf = Json::parse(cli("deform infinitesimal -", "printf '%s' " + quote(doc.dump()) + " |").out);
  EXPECT_TRUE(inf["two_cocycle"].get<bool>());
  EXPECT_EQ(inf["infinitesimal"]["pi"], doc["pi"][0]);
}

TEST(Cli, TreesVerifyPassesAndCatchesMutations) {
  const Outcome ok = cli("trees-verify --max-edges 2 --max-decoration 1");
  EXPECT_EQ(ok.exit_code, 0) << ok.err;
  const Json r = Json::parse(ok.out);
  EXPECT_EQ(r["basis_size"], 25);
  EXPECT_TRUE(r["failures"].empty() || r["failures"]["post2"] == 0);
  const Outcome bad = cli("trees-verify --max-edges 2 --max-decoration 1 --mutation unit-binomials");
  EXPECT_EQ(bad.exit_code, 1);
  const Json m = Json::parse(bad.out);
  EXPECT_GT(m["failures"]["post2"].get<int>(), 0);
  EXPECT_FALSE(m["witnesses"].empty());
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(cli("").exit_code, 2);
  EXPECT_EQ(cli("frobnicate").exit_code, 2);
  EXPECT_EQ(cli("trees prune -").exit_code, 2);
  const Outcome missing = cli("check /nonexistent/file.json");
  EXPECT_EQ(missing.exit_code, 2);
  EXPECT_EQ(Json::parse(missing.out)["error"]["kind"], "io");
}

TEST(Cli, RunIsCallableInProcess) {
  postlie::cli::RunConfig c;
  c.command = "check";
  const auto r = postlie::cli::run(c, slurp(kInputs / "zero_algebra.json"));
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_EQ(r.text(), slurp(kGolden / "check_zero_algebra.json"));
}

}  // namespace
