#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <sys/wait.h>
#include <fstream>
#include <sstream>
#include <string>

namespace {

struct CmdResult {
    int exit_code;
    std::string out;
};

CmdResult run_cmd(const std::string& cmd) {
    std::array<char, 256> buf{};
    std::string out;
    FILE* pipe = popen((cmd + " 2>/dev/null").c_str(), "r");
    EXPECT_NE(pipe, nullptr);
    while (fgets(buf.data(), buf.size(), pipe)) out += buf.data();
    const int status = pclose(pipe);
    return {WEXITSTATUS(status), out};
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

const std::string kBin = DDSIM_PATH;
const std::string kData = DDRIVE_DATA_DIR;

}  // namespace

TEST(Cli, SimFlatMissionCompletesWithExitZero) {
    const auto r = run_cmd(kBin + " sim --config " + kData +
                           "/scenarios/flat_mission.cfg --out /tmp/cli_flat.csv");
    EXPECT_EQ(r.exit_code, 0) << r.out;
    EXPECT_NE(r.out.find("status=completed"), std::string::npos);
    const std::string trace = read_file("/tmp/cli_flat.csv");
    EXPECT_EQ(trace.rfind("time,x,y,theta,", 0), 0u);
}

TEST(Cli, SimIsByteDeterministic) {
    const auto r1 = run_cmd(kBin + " sim --config " + kData +
                            "/scenarios/hill_fuzzy.cfg --out /tmp/cli_h1.csv");
    const auto r2 = run_cmd(kBin + " sim --config " + kData +
                            "/scenarios/hill_fuzzy.cfg --out /tmp/cli_h2.csv");
    EXPECT_EQ(r1.out, r2.out);
    EXPECT_EQ(read_file("/tmp/cli_h1.csv"), read_file("/tmp/cli_h2.csv"));
}

TEST(Cli, SimDisconnectExitsThree) {
    const auto r = run_cmd(kBin + " sim --config " + kData +
                           "/scenarios/hill_plain.cfg --out /tmp/cli_hp.csv");
    EXPECT_EQ(r.exit_code, 3);
    EXPECT_NE(r.out.find("status=disconnected"), std::string::npos);
}

TEST(Cli, ConfigErrorsExitTwo) {
    std::ofstream("/tmp/cli_bad.cfg") << "[plant]\nbogus = 1\n";
    const auto r = run_cmd(kBin + " sim --config /tmp/cli_bad.cfg --out /tmp/cli_bad.csv");
    EXPECT_EQ(r.exit_code, 2);
    const auto missing = run_cmd(kBin + " sim --config /tmp/no_such_file.cfg");
    EXPECT_EQ(missing.exit_code, 2);
}

TEST(Cli, TuneZnComposesUltimateGain) {
    const auto r = run_cmd(kBin + " tune --config " + kData +
                           "/scenarios/tune_forward.cfg --method zn --out /tmp/cli_zn.csv");
    EXPECT_EQ(r.exit_code, 0);
    const std::string report = read_file("/tmp/cli_zn.csv");
    EXPECT_EQ(report.rfind("method,step,kp,ki,kd,note", 0), 0u);
    EXPECT_NE(report.find("ultimate gain"), std::string::npos);
    EXPECT_NE(report.find(",PID"), std::string::npos);
}

TEST(Cli, TuneUnknownMethodExitsTwo) {
    const auto r = run_cmd(kBin + " tune --config " + kData +
                           "/scenarios/tune_forward.cfg --method magic --out /tmp/cli_x.csv");
    EXPECT_EQ(r.exit_code, 2);
}

TEST(Cli, ColorSubcommand) {
    auto r = run_cmd(kBin + " color --color black --distance 8 --noise 0");
    EXPECT_EQ(r.exit_code, 0);
    EXPECT_NE(r.out.find("winner=black"), std::string::npos);

    r = run_cmd(kBin + " color --raw 51,41,34");
    EXPECT_EQ(r.exit_code, 0);
    EXPECT_NE(r.out.find("ambiguous=green,white"), std::string::npos);

    r = run_cmd(kBin + " color --color black --distance 12");
    EXPECT_EQ(r.exit_code, 2);

    r = run_cmd(kBin + " color --color mauve --distance 5");
    EXPECT_EQ(r.exit_code, 2);
}

TEST(Cli, FuzzyEvalZeroAndCorners) {
    auto r = run_cmd(kBin + " fuzzy --e 0 --ec 0");
    EXPECT_EQ(r.exit_code, 0);
    EXPECT_NE(r.out.find("dkp=0 "), std::string::npos);
    EXPECT_NE(r.out.find("dki=0 "), std::string::npos);

    r = run_cmd(kBin + " fuzzy --e 3 --ec 3");
    // Table cell (PB, PB) for kp is NB: strongly negative adjustment.
    EXPECT_NE(r.out.find("dkp=-2.66"), std::string::npos);

    r = run_cmd(kBin + " fuzzy --e -3 --ec -3");
    EXPECT_NE(r.out.find("dkp=2.66"), std::string::npos);
}

TEST(Cli, KinOneShot) {
    auto r = run_cmd(kBin + " kin --wheels 0,1 --track 0.2");
    EXPECT_EQ(r.exit_code, 0);
    EXPECT_NE(r.out.find("v_c=0.5"), std::string::npos);
    EXPECT_NE(r.out.find("w=5"), std::string::npos);
    EXPECT_NE(r.out.find("r_c=0.1"), std::string::npos);

    r = run_cmd(kBin + " kin --wheels 1,1 --track 0.2");
    EXPECT_NE(r.out.find("r_c=straight"), std::string::npos);

    r = run_cmd(kBin + " kin --twist 1,0 --track 0.2");
    EXPECT_NE(r.out.find("v_l=1"), std::string::npos);
    EXPECT_NE(r.out.find("v_r=1"), std::string::npos);

    r = run_cmd(kBin + " kin --track 0.2");
    EXPECT_EQ(r.exit_code, 2);
}
