// Copyright 2026 The Clover Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "clover/errors.hpp"
#include "clover/protocol_json.hpp"
#include "clover/random.hpp"
#include "clover/report.hpp"
#include "clover/state_json.hpp"
#include "oracles.hpp"

namespace clover {
namespace {

using nlohmann::json;

const std::filesystem::path kData = CLOVER_DATA_DIR;

std::filesystem::path scratch_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("clover_formats_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

const Register kA{"A", 2, Party::Alice};
const Register kB{"B", 2, Party::Bob};

TEST(StateJson, HandWrittenPhiPlus) {
    const json j = json::parse(R"({
        "layout": [{"label": "A", "dim": 2, "party": "Alice"}, {"label": "B", "dim": 2, "party": "Bob"}],
        "ensemble": [{"p": 1.0, "factors": [{"labels": ["A", "B"],
                      "vector": [[0.7071067811865476, 0], [0, 0], [0, 0], [0.7071067811865476, 0]]}]}]})");
    const auto s = state_from_json(j);
    Vector v = Vector::Zero(4);
    v(0) = v(3) = 1.0 / std::sqrt(2.0);
    EXPECT_LE(oracle::max_abs(s.density() - v * v.adjoint()), 1e-15);
    EXPECT_EQ(s.layout().at("B").party, Party::Bob);
}

TEST(StateJson, DenseRoundTrip) {
    Rng rng(3);
    const RegisterLayout layout({kA, Register{"B", 3, Party::Bob}});
    const auto s = QuantumState::dense(layout, random_density(6, rng));
    const auto back = state_from_json(json::parse(state_to_json(s).dump()));
    EXPECT_TRUE(back.is_dense());
    EXPECT_EQ(back.layout(), s.layout());
    EXPECT_EQ(oracle::max_abs(back.density() - s.density()), 0.0);
}

TEST(StateJson, EnsembleRoundTripKeepsFactors) {
    Rng rng(4);
    const RegisterLayout layout({kA, kB, Register{"R", 2, Party::Referee}});
    Branch b1{0.25, {Factor{{"A", "B"}, random_unit_vector(4, rng)}, Factor{{"R"}, Matrix(random_density(2, rng))}}};
    Branch b2{0.75, {Factor{{"R", "A", "B"}, random_unit_vector(8, rng)}}};
    const auto s = QuantumState::ensemble(layout, {b1, b2});
    const auto back = state_from_json(json::parse(state_to_json(s).dump()));
    ASSERT_TRUE(back.is_ensemble());
    ASSERT_EQ(back.branches().size(), 2u);
    EXPECT_EQ(back.branches()[0].factors.size(), 2u);
    EXPECT_FALSE(back.branches()[0].factors[1].is_pure());
    EXPECT_EQ(oracle::max_abs(back.density() - s.density()), 0.0);
}

TEST(StateJson, SaveAndLoad) {
    const auto dir = scratch_dir("state");
    const auto s = max_entangled(3);
    save_state(s, dir / "phi.json");
    EXPECT_FALSE(std::filesystem::exists(dir / "phi.json.tmp"));
    EXPECT_LE(trace_distance(load_state(dir / "phi.json"), s), 1e-15);
}

TEST(StateJson, ShippedDataFilesLoad) {
    EXPECT_EQ(schmidt_rank(load_state(kData / "phiplus.json")).rank, 2u);
    EXPECT_EQ(schmidt_rank(load_state(kData / "phiplus_qutrit.json")).rank, 2u);
    EXPECT_EQ(schmidt_rank(load_state(kData / "ket22.json")).rank, 1u);
    const auto weak = load_state(kData / "weak_qutrit.json");
    const auto report = schmidt_rank(weak);
    ASSERT_EQ(report.rank, 2u);
    EXPECT_NEAR(report.coefficients(0) * report.coefficients(0), 0.8, 1e-12);
}

TEST(StateJson, MalformedInputsRaiseFormatError) {
    const std::string layout = R"([{"label": "A", "dim": 2, "party": "Alice"}])";
    const auto parse = [&](const std::string& text) { return state_from_json(json::parse(text)); };
    EXPECT_THROW(parse(R"({"dense": [[1, 0]]})"), FormatError);
    EXPECT_THROW(parse(R"({"layout": )" + layout + "}"), FormatError);
    EXPECT_THROW(parse(R"({"layout": )" + layout + R"(, "dense": [[1, 0], [0, 0], [0, 0]]})"), FormatError);
    EXPECT_THROW(parse(R"({"layout": )" + layout + R"(, "dense": [[1], [0], [0], [0]]})"), FormatError);
    EXPECT_THROW(parse(R"({"layout": [{"label": "A", "dim": 0, "party": "Alice"}], "dense": []})"), FormatError);
    EXPECT_THROW(parse(R"({"layout": [{"label": "A", "dim": 2}], "dense": []})"), FormatError);
    EXPECT_THROW(parse(R"({"layout": [{"label": "A", "dim": 2, "party": "Carol"}], "dense": []})"), FormatError);
    EXPECT_THROW(parse(R"({"layout": )" + layout + R"(, "ensemble": [{"p": 1, "factors": [{"labels": ["A"]}]}]})"),
                 FormatError);
    EXPECT_THROW(load_state(kData / "does_not_exist.json"), FormatError);
    const auto dir = scratch_dir("garbage");
    std::ofstream(dir / "bad.json") << "{ not json";
    EXPECT_THROW(load_state(dir / "bad.json"), FormatError);
}

TEST(StateJson, InvalidDensitiesAreRejected) {
    const std::string layout = R"({"layout": [{"label": "A", "dim": 2, "party": "Alice"}], )";
    EXPECT_THROW(state_from_json(json::parse(layout + R"("dense": [[1, 0], [1, 0], [0, 0], [0, 0]]})")), Error);
    EXPECT_THROW(state_from_json(json::parse(layout + R"("dense": [[2, 0], [0, 0], [0, 0], [-1, 0]]})")), Error);
    EXPECT_THROW(state_from_json(json::parse(layout + R"("dense": [[0.5, 0], [0, 0], [0, 0], [0.4, 0]]})")), Error);
}

Matrix pauli_x() {
    Matrix x = Matrix::Zero(2, 2);
    x(0, 1) = x(1, 0) = 1.0;
    return x;
}

SloccqProtocol sample_protocol() {
    const RegisterLayout a({kA}), b({kB});
    Matrix p0 = Matrix::Zero(2, 2), p1 = Matrix::Zero(2, 2);
    p0(0, 0) = 1.0;
    p1(1, 1) = 1.0;
    ProtocolRound measure;
    measure.name = "measure";
    measure.party = Party::Alice;
    measure.targets = {"A"};
    measure.instrument = Instrument(a, a, {{"0", {p0}}, {"1", {p1}}});
    ProtocolRound correct;
    correct.name = "correct";
    correct.party = Party::Bob;
    correct.targets = {"B"};
    correct.instrument = Instrument::from_channel(KrausChannel(b, b, {Matrix::Identity(2, 2)}));
    correct.condition_on = "measure";
    correct.conditioned.emplace("1", Instrument::from_channel(KrausChannel(b, b, {pauli_x()})));
    correct.broadcast = false;
    correct.postselect = {"ok"};
    ProtocolRound send;
    send.name = "send";
    send.party = Party::Alice;
    send.instrument = Instrument::from_channel(preparation_channel(
        basis_product({{Register{"Q", 2, Party::Alice}, 1}})));
    send.transfer = QuantumTransfer{"Q", 2};
    return SloccqProtocol({measure, correct, send}, 2);
}

TEST(ProtocolJson, RoundTripIsStable) {
    const auto p = sample_protocol();
    const json j = protocol_to_json(p);
    EXPECT_EQ(j.at("format"), kProtocolFormat);
    EXPECT_EQ(j.at("budget"), 2);
    const auto back = protocol_from_json(json::parse(j.dump()));
    EXPECT_EQ(protocol_to_json(back), j);
    ASSERT_EQ(back.rounds().size(), 3u);
    EXPECT_EQ(back.rounds()[1].condition_on, std::optional<std::string>("measure"));
    EXPECT_FALSE(back.rounds()[1].broadcast);
    EXPECT_EQ(back.rounds()[1].postselect, std::set<std::string>{"ok"});
    EXPECT_EQ(back.rounds()[2].transfer_dim(), 2u);
    EXPECT_EQ(back.budget_used(), 2u);

    const auto a = run_protocol(p, max_entangled(2)).final_state();
    const auto c = run_protocol(back, max_entangled(2)).final_state();
    EXPECT_LE(trace_distance(a, c), 1e-15);
}

TEST(ProtocolJson, SaveLoadAndBudgetOverride) {
    const auto dir = scratch_dir("protocol");
    save_protocol(sample_protocol(), dir / "p.json");
    EXPECT_EQ(load_protocol(dir / "p.json").budget(), 2u);
    EXPECT_EQ(load_protocol(dir / "p.json", 5).budget(), 5u);
    EXPECT_THROW(load_protocol(dir / "p.json", 1), BudgetError);
}

TEST(ProtocolJson, ShippedMeasureAndCorrectProtocol) {
    const auto p = load_protocol(kData / "measure_and_correct.json");
    EXPECT_EQ(p.budget(), 1u);
    const auto fin = run_protocol(p, load_state(kData / "phiplus.json")).final_state();
    EXPECT_LE(trace_distance(fin, load_state(kData / "measure_and_correct_target.json")), 1e-12);
}

TEST(ProtocolJson, MalformedInputsRaiseFormatError) {
    json j = protocol_to_json(sample_protocol());
    json wrong_format = j;
    wrong_format["format"] = "clover-protocol/9";
    EXPECT_THROW(protocol_from_json(wrong_format), FormatError);
    json no_rounds = j;
    no_rounds.erase("rounds");
    EXPECT_THROW(protocol_from_json(no_rounds), FormatError);
    json bad_shape = j;
    bad_shape["rounds"][0]["instrument"]["branches"][0]["kraus"][0]["rows"] = 3;
    EXPECT_THROW(protocol_from_json(bad_shape), FormatError);
    json bad_party = j;
    bad_party["rounds"][0]["party"] = "Eve";
    EXPECT_THROW(protocol_from_json(bad_party), FormatError);
    EXPECT_THROW(load_protocol(kData / "missing_protocol.json"), FormatError);
}

ReportDocument sample_report(bool fail) {
    ReportDocument rep("demo", {{"n", 2}});
    rep.record("info", 3, "count");
    rep.expect_near("near", 1.0 + 1e-12, 1.0, 1e-9, "sum");
    rep.expect_at_most("small", 1e-11, 1e-10, "distance");
    rep.expect_above("big", 0.5, 1e-6, "distance");
    rep.expect_equal("rank", 4, fail ? 5 : 4, "schmidt_rank");
    rep.expect_true("flag", true, "check");
    return rep;
}

TEST(Report, VerdictFollowsTheChecks) {
    EXPECT_EQ(sample_report(false).verdict(), Verdict::Verified);
    const auto bad = sample_report(true);
    EXPECT_EQ(bad.verdict(), Verdict::Falsified);
    EXPECT_FALSE(bad.find("rank")->passed);
    EXPECT_TRUE(bad.find("small")->passed);
    EXPECT_EQ(bad.find("missing"), nullptr);
    auto refused = sample_report(false);
    refused.refuse("no certificate");
    EXPECT_EQ(refused.verdict(), Verdict::Refused);
    EXPECT_NE(refused.notes().back().find("no certificate"), std::string::npos);

    ReportDocument edge("edge");
    edge.expect_at_most("equal_bound", 1e-10, 1e-10, "x");
    edge.expect_above("equal_floor", 1e-6, 1e-6, "x");
    edge.expect_near("nan", std::nan(""), 0.0, 1.0, "x");
    EXPECT_TRUE(edge.find("equal_bound")->passed);
    EXPECT_FALSE(edge.find("equal_floor")->passed);
    EXPECT_FALSE(edge.find("nan")->passed);
}

TEST(Report, JsonFields) {
    const json j = sample_report(false).to_json();
    EXPECT_EQ(j.at("format"), kReportFormat);
    EXPECT_EQ(j.at("pipeline"), "demo");
    EXPECT_EQ(j.at("inputs").at("n"), 2);
    EXPECT_EQ(j.at("verdict"), "verified");
    EXPECT_TRUE(j.contains("created_at"));
    EXPECT_EQ(j.at("versions").at("report_format"), kReportFormat);
    EXPECT_EQ(j.at("versions").at("protocol_format"), kProtocolFormat);
    const auto& qs = j.at("quantities");
    ASSERT_EQ(qs.size(), 6u);
    EXPECT_EQ(qs[0].at("name"), "info");
    EXPECT_FALSE(qs[0].contains("check"));
    EXPECT_EQ(qs[2].at("tolerance"), 1e-10);
    EXPECT_EQ(qs[2].at("provenance"), "distance");
    EXPECT_TRUE(qs[4].contains("check"));
    EXPECT_EQ(sample_report(true).to_json().at("verdict"), "falsified");
}

TEST(Report, DeterministicApartFromTimestamp) {
    json a = sample_report(false).to_json();
    json b = sample_report(false).to_json();
    a.erase("created_at");
    b.erase("created_at");
    EXPECT_EQ(a.dump(), b.dump());
    EXPECT_EQ(sample_report(false).to_json(false).dump(), a.dump());
}

TEST(Report, TextListsEveryQuantity) {
    const auto text = sample_report(true).to_text();
    EXPECT_NE(text.find("pipeline: demo"), std::string::npos);
    EXPECT_NE(text.find("FAIL  rank"), std::string::npos);
    EXPECT_NE(text.find("ok    small"), std::string::npos);
    EXPECT_NE(text.find("verdict: falsified"), std::string::npos);
}

TEST(WriteFileAtomically, ReplacesContents) {
    const auto dir = scratch_dir("atomic");
    write_file_atomically(dir / "out.txt", "first");
    write_file_atomically(dir / "out.txt", "second");
    std::ifstream in(dir / "out.txt");
    std::string s;
    std::getline(in, s);
    EXPECT_EQ(s, "second");
    EXPECT_FALSE(std::filesystem::exists(dir / "out.txt.tmp"));
    EXPECT_THROW(write_file_atomically(dir / "no_such_dir" / "x.txt", "x"), FormatError);
}

}  // namespace
}  // namespace clover
