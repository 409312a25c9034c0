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

#include "clover/report.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <iomanip>
#include <sstream>

#include "clover/protocol_json.hpp"

#ifndef CLOVER_VERSION
#define CLOVER_VERSION "unknown"
#endif

namespace clover {

using nlohmann::json;

namespace {

std::string utc_now() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream out;
    out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return out.str();
}

std::string format_double(double v) {
    std::ostringstream out;
    out << std::setprecision(3) << std::scientific << v;
    return out.str();
}

}  // namespace

std::string_view to_string(Verdict verdict) {
    switch (verdict) {
        case Verdict::Verified:
            return "verified";
        case Verdict::Falsified:
            return "falsified";
        case Verdict::Refused:
            return "refused";
    }
    return "?";
}

ReportDocument::ReportDocument(std::string pipeline, json inputs)
    : pipeline_(std::move(pipeline)), inputs_(std::move(inputs)) {}

Verdict ReportDocument::verdict() const {
    if (refused_) return Verdict::Refused;
    for (const auto& q : quantities_) {
        if (!q.passed) return Verdict::Falsified;
    }
    return Verdict::Verified;
}

const Quantity* ReportDocument::find(const std::string& name) const {
    for (const auto& q : quantities_) {
        if (q.name == name) return &q;
    }
    return nullptr;
}

void ReportDocument::record(const std::string& name, json value, const std::string& provenance) {
    quantities_.push_back(Quantity{name, std::move(value), "", std::nullopt, true, provenance});
}

void ReportDocument::expect_near(const std::string& name, double value, double expected, double tolerance,
                                 const std::string& provenance) {
    const bool ok = std::isfinite(value) && std::abs(value - expected) <= tolerance;
    std::ostringstream check;
    check << "== " << expected << " +- " << format_double(tolerance);
    quantities_.push_back(Quantity{name, value, check.str(), tolerance, ok, provenance});
}

void ReportDocument::expect_at_most(const std::string& name, double value, double bound,
                                    const std::string& provenance) {
    const bool ok = std::isfinite(value) && value <= bound;
    quantities_.push_back(Quantity{name, value, "<= " + format_double(bound), bound, ok, provenance});
}

void ReportDocument::expect_above(const std::string& name, double value, double bound, const std::string& provenance) {
    const bool ok = std::isfinite(value) && value > bound;
    quantities_.push_back(Quantity{name, value, "> " + format_double(bound), std::nullopt, ok, provenance});
}

void ReportDocument::expect_equal(const std::string& name, long long value, long long expected,
                                  const std::string& provenance) {
    quantities_.push_back(
        Quantity{name, value, "== " + std::to_string(expected), std::nullopt, value == expected, provenance});
}

void ReportDocument::expect_true(const std::string& name, bool value, const std::string& provenance) {
    quantities_.push_back(Quantity{name, value, "== true", std::nullopt, value, provenance});
}

void ReportDocument::refuse(const std::string& reason) {
    refused_ = true;
    notes_.push_back("refused: " + reason);
}

json ReportDocument::to_json(bool with_timestamp) const {
    json qs = json::array();
    for (const auto& q : quantities_) {
        json jq{{"name", q.name}, {"value", q.value}, {"passed", q.passed}, {"provenance", q.provenance}};
        if (!q.check.empty()) jq["check"] = q.check;
        if (q.tolerance) jq["tolerance"] = *q.tolerance;
        qs.push_back(std::move(jq));
    }
    json out{{"format", kReportFormat},
             {"pipeline", pipeline_},
             {"inputs", inputs_},
             {"quantities", std::move(qs)},
             {"notes", notes_},
             {"verdict", std::string(to_string(verdict()))},
             {"versions", {{"clover", CLOVER_VERSION}, {"report_format", kReportFormat},
                           {"protocol_format", kProtocolFormat}}}};
    if (with_timestamp) out["created_at"] = utc_now();
    return out;
}

std::string ReportDocument::to_text() const {
    std::ostringstream out;
    out << "pipeline: " << pipeline_ << "\n";
    out << "inputs:   " << inputs_.dump() << "\n";
    for (const auto& q : quantities_) {
        out << (q.passed ? "  ok    " : "  FAIL  ") << q.name << " = " << q.value.dump();
        if (!q.check.empty()) out << "  (" << q.check << ")";
        out << "  [" << q.provenance << "]\n";
    }
    for (const auto& n : notes_) out << "note: " << n << "\n";
    out << "verdict: " << to_string(verdict()) << "\n";
    return out.str();
}

}  // namespace clover
