#include <catch2/catch.hpp>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>

#include <json.hpp>

#include "qconc/json_io.hpp"
#include "qconc/random.hpp"
#include "qconc/state.hpp"
#include "qconc/superdense.hpp"

using namespace qconc;

namespace {

struct RunResult {
    int exit_code;
    std::string output;
};

RunResult run_cli(const std::string& args) {
    const std::string cmd = std::string(QCONC_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string output;
    std::array<char, 4096> buf{};
    std::size_t got = 0;
    while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) output.append(buf.data(), got);
    const int status = pclose(pipe);
    return {WEXITSTATUS(status), output};
}

std::string write_temp(const std::string& name, const Json& j) {
    const std::string path = std::string("/tmp/qconc_cli_") + name + ".json";
    std::ofstream out(path);
    out << j.dump();
    return path;
}

std::string diag_state_file(const std::string& name, std::initializer_list<double> lambda) {
    std::vector<double> roots;
    for (double l : lambda) roots.push_back(std::sqrt(l));
    const PureBipartiteState s{ComplexMatrix::diagonal(roots)};
    return write_temp(name, state_to_json(s));
}

} // namespace

TEST_CASE("schmidt command reports the spectrum") {
    const std::string phi2 = write_temp("phi2", state_to_json(max_entangled(2)));
    const RunResult r = run_cli("schmidt " + phi2);
    REQUIRE(r.exit_code == 0);
    const Json j = Json::parse(r.output);
    CHECK(j["lambda"][0].get<double>() == Approx(0.5).margin(1e-12));
    CHECK(j["lambda"][1].get<double>() == Approx(0.5).margin(1e-12));
    CHECK(j["schmidtRank"] == 2);
    CHECK(j["entropyBits"].get<double>() == Approx(1.0).margin(1e-9));
}

TEST_CASE("schmidt command flags rank deficiency and rejects bad norms") {
    const std::string product = diag_state_file("product", {1.0, 0.0});
    const Json j = Json::parse(run_cli("schmidt " + product).output);
    CHECK(j["schmidtRank"] == 1);

    Json bad = state_to_json(max_entangled(2));
    bad["re"][0][0] = 0.6;
    const std::string bad_path = write_temp("badnorm", bad);
    CHECK(run_cli("schmidt " + bad_path).exit_code == 2);

    CHECK(run_cli("schmidt /tmp/qconc_cli_missing_file.json").exit_code == 2);
}

TEST_CASE("concentrate command reproduces gamma_max and the MC frequency") {
    const std::string tilted = diag_state_file("tilted", {0.75, 0.25});
    const RunResult r = run_cli("concentrate " + tilted + " --trials 4000 --seed 7");
    REQUIRE(r.exit_code == 0);
    const Json j = Json::parse(r.output);
    CHECK(j["gammaMax"].get<double>() == Approx(0.5).margin(1e-9));
    CHECK(j["analyticProbability"].get<double>() == Approx(0.5).margin(1e-9));
    CHECK(j["outputMaximallyEntangled"] == true);
    CHECK(std::abs(j["monteCarlo"]["frequency"].get<double>() - 0.5)
          < 5.0 * std::sqrt(0.25 / 4000.0));

    const std::string phi3 = write_temp("phi3", state_to_json(max_entangled(3)));
    const Json j3 = Json::parse(run_cli("concentrate " + phi3 + " --trials 100").output);
    CHECK(j3["gammaMax"].get<double>() == Approx(1.0).margin(1e-9));

    const std::string product = diag_state_file("product2", {1.0, 0.0});
    CHECK(run_cli("concentrate " + product).exit_code == 3);
}

TEST_CASE("shared command decides both directions") {
    const PureBipartiteState s1 = random_pure_state(2, 2, 424242);
    Rng rng(5);
    const PureBipartiteState s2 =
        apply_local_unitaries(s1, ComplexMatrix::identity(2), random_haar_unitary(2, rng));
    const std::string f1 = write_temp("shared1", state_to_json(s1));
    const std::string f2 = write_temp("shared2", state_to_json(s2));
    const Json yes = Json::parse(run_cli("shared " + f1 + " " + f2 + " --side alice").output);
    CHECK(yes["decision"] == "Concentratable");
    CHECK(yes["verification"]["output1Maximal"] == true);
    CHECK(yes["verification"]["output2Maximal"] == true);

    const std::string tilted = diag_state_file("tilted2", {0.75, 0.25});
    const std::string phi2 = write_temp("phi2b", state_to_json(max_entangled(2)));
    const Json no =
        Json::parse(run_cli("shared " + tilted + " " + phi2 + " --falsify 2000").output);
    CHECK(no["decision"] == "Impossible");
    CHECK(no["marginalDistance"].get<double>() > 0.01);
    CHECK(no["falsifier"]["bestScore"].get<double>() < 1.0 - 1e-4);

    // dimension mismatch is an input error
    const std::string phi3 = write_temp("phi3b", state_to_json(max_entangled(3)));
    CHECK(run_cli("shared " + tilted + " " + phi3).exit_code == 2);
}

TEST_CASE("superdense command matches the analytic rate") {
    const Json j =
        Json::parse(run_cli("superdense --lambda2 0.25 --trials 10000 --seed 11").output);
    CHECK(j["analyticProbability"].get<double>() == Approx(0.5).margin(1e-12));
    CHECK(j["errorsGivenSuccess"] == 0);
    CHECK(std::abs(j["successRate"].get<double>() - 0.5) < 5.0 * std::sqrt(0.25 / 10000.0));

    CHECK(run_cli("superdense --lambda2 0.7").exit_code == 2);
    CHECK(run_cli("superdense --lambda2 0").exit_code == 2);
}

TEST_CASE("purify command searches Werner noise and validates input") {
    const Json j = Json::parse(run_cli("purify --werner 0.5 --budget 3000 --seed 3").output);
    CHECK(j["bestScore"].get<double>() < 0.999);
    CHECK(j["inputFraction"].get<double>() == Approx(0.625).margin(1e-9));

    // a pure density input is rejected (rank 1: concentration applies, not purification)
    const std::string pure =
        write_temp("pure_density", density_to_json(DensityMatrix(pure_projector(
                                       random_pure_state(2, 2, 808)))));
    CHECK(run_cli("purify " + pure + " --budget 10").exit_code == 2);
    CHECK(run_cli("purify --werner 1.5").exit_code == 2);
    CHECK(run_cli("purify").exit_code == 2);
}

TEST_CASE("verify --quick passes on a correct build") {
    const RunResult r = run_cli("verify --quick --format pretty");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("verification passed") != std::string::npos);
}

TEST_CASE("reports are byte-identical across reruns for fixed seed and flags") {
    const std::string tilted = diag_state_file("det", {0.6, 0.4});
    const std::string cmd = "concentrate " + tilted + " --trials 500 --seed 99";
    CHECK(run_cli(cmd).output == run_cli(cmd).output);

    const std::string dense = "superdense --lambda2 0.4 --trials 500 --seed 5";
    CHECK(run_cli(dense).output == run_cli(dense).output);

    const std::string purify = "purify --werner 0.3 --budget 500 --seed 6 --format csv";
    CHECK(run_cli(purify).output == run_cli(purify).output);
}

TEST_CASE("csv format flattens the report") {
    const std::string tilted = diag_state_file("csv", {0.75, 0.25});
    const RunResult r = run_cli("schmidt " + tilted + " --format csv");
    REQUIRE(r.exit_code == 0);
    CHECK(r.output.rfind("key,value\n", 0) == 0);
    CHECK(r.output.find("lambda[0],0.7") != std::string::npos);
    CHECK(r.output.find("lambda[1],0.25") != std::string::npos);
    CHECK(r.output.find("schmidtRank,2") != std::string::npos);
}

TEST_CASE("--out writes the report to a file") {
    const std::string tilted = diag_state_file("outfile", {0.75, 0.25});
    const std::string out_path = "/tmp/qconc_cli_outfile_report.json";
    std::remove(out_path.c_str());
    const RunResult r = run_cli("schmidt " + tilted + " --out " + out_path);
    CHECK(r.exit_code == 0);
    CHECK(r.output.empty());
    std::ifstream in(out_path);
    REQUIRE(in.good());
    Json j;
    in >> j;
    CHECK(j["schmidtRank"] == 2);
}

TEST_CASE("unknown arguments are input errors") {
    CHECK(run_cli("frobnicate").exit_code == 2);
    CHECK(run_cli("schmidt").exit_code == 2); // missing required positional
}
