#include <gtest/gtest.h>

#include <sys/wait.h>

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <nalie/json_io.hpp>

using namespace nalie;
using io::Json;

namespace {

struct CliRun {
    int code;
    std::string out;
    std::string err;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

CliRun cli(const std::string& args) {
    const std::string err = ::testing::TempDir() + "nalie_cli_stderr.txt";
    const std::string cmd = std::string("cd ") + NALIE_DATA + " && " + NALIE_CLI + " " + args + " 2>" + err;
    FILE* p = popen(cmd.c_str(), "r");
    std::string out;
    std::array<char, 4096> buf;
    while (std::size_t n = fread(buf.data(), 1, buf.size(), p)) out.append(buf.data(), n);
    int status = pclose(p);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out, slurp(err)};
}

Json error_object(const CliRun& r) {
    std::string line = r.err;
    EXPECT_EQ(std::count(line.begin(), line.end(), '\n'), 1) << line;
    return Json::parse(line);
}

}  // namespace

TEST(Cli, CanonThreeDim) {
    CliRun r = cli("canon --triple triple_three_dim.json");
    ASSERT_EQ(r.code, 0) << r.err;
    Json j = Json::parse(r.out);
    EXPECT_EQ(j["canonical"].dump(), R"([["0","1","0"],["1","1","0"],["0","0","1"]])");
    EXPECT_EQ(j["heights"].dump(), "[2,3,1]");
    CanonicalResult c = io::canonical_result_from_json(j);
    EXPECT_EQ(io::to_json(c, Field::gf(1)).dump() + "\n", r.out);

    const std::string tmp = ::testing::TempDir() + "nalie_canon.json";
    EXPECT_EQ(cli("canon --triple triple_three_dim.json --out " + tmp).code, 0);
    EXPECT_EQ(slurp(tmp), r.out);
}

TEST(Cli, InvariantsAndEquiv) {
    CliRun r = cli("invariants --triple triple_three_dim.json");
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(r.out, R"({"cells":[{"q":1,"r":1,"n":1,"n1":1},{"q":2,"r":3,"n":1,"n1":0},{"q":3,"r":2,"n":1,"n1":1}]})"
                     "\n");
    CliRun e = cli("equiv --a triple_three_dim.json --b triple_three_dim.json");
    EXPECT_EQ(e.code, 0);
    EXPECT_EQ(e.out, "true\n");
    CliRun f = cli("equiv --a triple_three_dim.json --b triple_repeated_flag.json");
    EXPECT_EQ(f.code, 0);
    EXPECT_EQ(f.out, "false\n");
}

TEST(Cli, CanonTwoFlags) {
    EXPECT_EQ(Json::parse(cli("canon --triple triple_shifted_flag.json").out)["heights"].dump(), "[3,3,3,4]");
    EXPECT_EQ(Json::parse(cli("canon --triple triple_repeated_flag.json").out)["heights"].dump(), "[1,1,1,4]");
}

TEST(Cli, Cohomology) {
    CliRun r = cli("cohomology --n 2 --heights 1,1 --k 2");
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out, "3\n");
    EXPECT_EQ(cli("cohomology --n 3 --heights 1,2,1 --k 1").out, "3\n");
    EXPECT_EQ(cli("cohomology --n 2 --heights 1,x --k 2").code, 2);
    EXPECT_EQ(cli("cohomology --n 3 --heights 1,1 --k 2").code, 2);
    EXPECT_EQ(cli("cohomology --n 2 --heights 1,1 --k 7").code, 1);
}

TEST(Cli, AlgebraAndStructureConstants) {
    const std::string sc = ::testing::TempDir() + "nalie_sc.jsonl";
    CliRun r = cli("algebra --form form_sq_21.json --sc " + sc);
    ASSERT_EQ(r.code, 0) << r.err;
    Json j = Json::parse(r.out);
    EXPECT_EQ(j["dim"], 7);
    EXPECT_EQ(j["center_dim"], 0);
    std::ifstream in(sc);
    std::string line;
    std::size_t count = 0;
    while (std::getline(in, line)) {
        Json rec = Json::parse(line);
        EXPECT_EQ(rec.dump(), line);
        ++count;
    }
    EXPECT_EQ(count, j["nonzero_brackets"].get<std::size_t>());
}

TEST(Cli, Simple) {
    EXPECT_EQ(cli("simple --form form_sq_21.json").out, R"({"algebra":"P","dim":7,"simple":true})"
                                                         "\n");
    EXPECT_EQ(cli("simple --form form_sq_111.json").out, R"({"algebra":"P","dim":7,"simple":false})"
                                                          "\n");
}

TEST(Cli, ClosedBracketNormalizeApply) {
    EXPECT_EQ(cli("closed --form form_not_closed.json").out, "false\n");
    EXPECT_EQ(cli("closed --form form_sq_21_eta.json").out, "true\n");
    EXPECT_EQ(cli("bracket --form form_sq_21.json --f poly_x1sq_x2.json --g poly_x1.json").out,
              R"([{"alpha":[1,0],"c":"1"}])"
              "\n");
    CliRun n = cli("normalize --form form_sq_21_eta.json");
    ASSERT_EQ(n.code, 0) << n.err;
    Json j = Json::parse(n.out);
    EXPECT_TRUE(j["reduced"].get<bool>());
    EXPECT_EQ(io::form2_from_json(j["form"]), kanon_form(DivPowRing::make({2, 1}, 1), 0, {}));

    CliRun a = cli("apply-aut --aut aut_21.json --form form_sq_21.json");
    ASSERT_EQ(a.code, 0) << a.err;
    Form2 w = io::form2_from_json(Json::parse(a.out));
    EXPECT_TRUE(is_closed(w));
    EXPECT_EQ(io::to_json(w).dump() + "\n", a.out);
}

TEST(Cli, ErrorsAndExitCodes) {
    CliRun r = cli("canon --triple bad_flag_chain.json");
    EXPECT_EQ(r.code, 2);
    Json e = error_object(r);
    EXPECT_EQ(e["error"], "validation");
    EXPECT_NE(e["message"].get<std::string>().find("/flag/chain/1"), std::string::npos);

    r = cli("canon --triple bad_unknown_key.json");
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(error_object(r)["message"].get<std::string>().find("unknown key 'comment'"), std::string::npos);

    r = cli("simple --form form_bad_exponent.json");
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(error_object(r)["message"].get<std::string>().find("/terms/0/poly/1/alpha/0"), std::string::npos);

    r = cli("canon --triple missing.json");
    EXPECT_EQ(r.code, 2);

    r = cli("canon --triple degenerate_triple.json");
    EXPECT_EQ(r.code, 3);
    EXPECT_EQ(error_object(r)["error"], "precondition");
    EXPECT_EQ(cli("simple --form form_not_closed.json").code, 3);
    EXPECT_EQ(cli("simple --form form_dx1dx2.json").code, 3);
    EXPECT_EQ(cli("apply-aut --aut aut_singular.json --form form_sq_11.json").code, 3);

    r = cli("");
    EXPECT_EQ(r.code, 1);
    EXPECT_EQ(error_object(r)["error"], "usage");
    EXPECT_EQ(cli("canon").code, 1);
    EXPECT_EQ(cli("canon --triple triple_three_dim.json --bogus").code, 1);
}

TEST(Cli, Deterministic) {
    for (const char* c : {"canon --triple triple_repeated_flag.json", "normalize --form form_omega2_gf4.json",
                          "apply-aut --aut aut_21.json --form form_sq_21.json", "simple --form form_sq_111.json --derived"}) {
        CliRun a = cli(c), b = cli(c);
        EXPECT_EQ(a.code, 0) << c;
        EXPECT_EQ(a.out, b.out) << c;
    }
}
