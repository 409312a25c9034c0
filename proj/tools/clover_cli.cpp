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

// clover: command-line verifier.
//
// Exit codes: 0 verified, 2 falsified or refused, 1 usage or I/O error.

#include <functional>
#include <iostream>
#include <optional>
#include <string>

#if __has_include("CLI11.hpp")
#include "CLI11.hpp"
#else
#include <CLI/CLI.hpp>
#endif
#include "clover/pipelines.hpp"
#include "clover/protocol_json.hpp"
#include "clover/state_json.hpp"

namespace {

using clover::ReportDocument;

struct OutputOptions {
    std::string out;
    std::string format = "json";
};

void add_output_options(CLI::App* cmd, OutputOptions& opts) {
    cmd->add_option("--out", opts.out, "Write the report to this file (atomically)");
    cmd->add_option("--format", opts.format, "Report format")->check(CLI::IsMember({"json", "text"}));
}

int emit(const ReportDocument& report, const OutputOptions& opts) {
    const std::string body = opts.format == "text" ? report.to_text() : report.to_json().dump(2) + "\n";
    if (!opts.out.empty()) clover::write_file_atomically(opts.out, body);
    std::cout << body;
    return report.verdict() == clover::Verdict::Verified ? 0 : 2;
}

int run_pipeline(const std::string& name, const std::function<ReportDocument()>& fn, const OutputOptions& opts) {
    try {
        return emit(fn(), opts);
    } catch (const clover::FormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const clover::Error& e) {
        ReportDocument refused(name);
        refused.refuse(e.what());
        try {
            return emit(refused, opts);
        } catch (const clover::Error& io) {
            std::cerr << "error: " << io.what() << "\n";
            return 1;
        }
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"clover: catalytic entanglement transformation verifier"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(CLOVER_VERSION));

    clover::PipelineOptions pipeline_options;
    OutputOptions out;
    std::size_t n = 0;

    auto* theorem = app.add_subcommand("theorem", "Catalytic transformation beyond the SLOCCQ budget 2^n - 1");
    theorem->add_option("--n", n, "Copies parameter (1 or 2)")->required()->check(CLI::Range(1, 2));
    add_output_options(theorem, out);
    theorem->add_option("--corrupt", pipeline_options.corrupt)->group("");

    std::string rho_file, sigma_file;
    auto* lemma1 = app.add_subcommand("lemma1", "Catalytic protocol for given states");
    lemma1->add_option("--rho", rho_file, "State JSON for rho")->required()->check(CLI::ExistingFile);
    lemma1->add_option("--sigma", sigma_file, "State JSON for the product state sigma")
        ->required()
        ->check(CLI::ExistingFile);
    lemma1->add_option("--n", n, "Number of copies (1 to 3)")->required()->check(CLI::Range(1, 3));
    add_output_options(lemma1, out);
    lemma1->add_option("--corrupt", pipeline_options.corrupt)->group("");

    bool shared_randomness = false;
    auto* obs1 = app.add_subcommand("obs1", "Compile the catalyst into an SLOCCQ preparation and replay");
    obs1->add_option("--n", n, "Number of copies (2 or 3)")->required()->check(CLI::Range(2, 3));
    obs1->add_flag("--shared-randomness", shared_randomness, "Use a product system state (Schmidt number 1 catalyst)");
    add_output_options(obs1, out);
    obs1->add_option("--corrupt", pipeline_options.corrupt)->group("");

    auto* obs3 = app.add_subcommand("obs3", "One-bit LOCC transformation and its entropy obstruction");
    add_output_options(obs3, out);
    obs3->add_option("--seed", pipeline_options.seed, "Seed for the sampled shared states and channels");
    obs3->add_option("--corrupt", pipeline_options.corrupt)->group("");

    std::string input_file;
    std::vector<std::string> cut;
    auto* schmidt = app.add_subcommand("schmidt", "Schmidt data and Schmidt-number certificate of a state");
    schmidt->add_option("--input", input_file, "State JSON")->required()->check(CLI::ExistingFile);
    schmidt->add_option("--cut", cut, "Registers on the left side of the cut (default: Alice's)")->delimiter(',');
    add_output_options(schmidt, out);

    std::string protocol_file, target_file, final_out;
    std::size_t budget = 0;
    auto* simulate = app.add_subcommand("simulate", "Run an SLOCCQ protocol and check its ledger");
    simulate->add_option("--protocol", protocol_file, "Protocol JSON")->required()->check(CLI::ExistingFile);
    simulate->add_option("--input", input_file, "State JSON")->required()->check(CLI::ExistingFile);
    simulate->add_option("--budget", budget, "Quantum budget (overrides the file)");
    simulate->add_option("--target", target_file, "State JSON to compare the final state with")
        ->check(CLI::ExistingFile);
    simulate->add_option("--final-out", final_out, "Write the final state JSON here");
    add_output_options(simulate, out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    if (*theorem) {
        return run_pipeline("theorem", [&] { return clover::pipeline_theorem(n, pipeline_options); }, out);
    }
    if (*lemma1) {
        return run_pipeline(
            "lemma1",
            [&] {
                return clover::pipeline_lemma1(clover::load_state(rho_file), clover::load_state(sigma_file), n,
                                               pipeline_options, {{"rho", rho_file}, {"sigma", sigma_file}});
            },
            out);
    }
    if (*obs1) {
        return run_pipeline("obs1", [&] { return clover::pipeline_obs1(n, pipeline_options, shared_randomness); },
                            out);
    }
    if (*obs3) return run_pipeline("obs3", [&] { return clover::pipeline_obs3(pipeline_options); }, out);
    if (*schmidt) {
        return run_pipeline(
            "schmidt", [&] { return clover::pipeline_schmidt(clover::load_state(input_file), cut); }, out);
    }
    if (*simulate) {
        return run_pipeline(
            "simulate",
            [&] {
                const auto protocol = clover::load_protocol(protocol_file, budget);
                const auto input = clover::load_state(input_file);
                std::optional<clover::QuantumState> target;
                if (!target_file.empty()) target = clover::load_state(target_file);
                auto report = clover::pipeline_simulate(protocol, input, target,
                                                        {{"protocol", protocol_file}, {"input", input_file}});
                if (!final_out.empty()) {
                    clover::save_state(clover::run_protocol(protocol, input).final_state(), final_out);
                }
                return report;
            },
            out);
    }
    return 1;
}
