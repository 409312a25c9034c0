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

#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace clover {

inline constexpr const char* kReportFormat = "clover-report/1";

enum class Verdict { Verified, Falsified, Refused };

std::string_view to_string(Verdict verdict);

struct Quantity {
    std::string name;
    nlohmann::json value;
    /// What the value was checked against, in words ("<= 1e-10", "== 4"). Empty for records.
    std::string check;
    std::optional<double> tolerance;
    bool passed = true;
    /// The library operation that produced the value.
    std::string provenance;
};

class ReportDocument {
   public:
    explicit ReportDocument(std::string pipeline, nlohmann::json inputs = nlohmann::json::object());

    const std::string& pipeline() const { return pipeline_; }
    const nlohmann::json& inputs() const { return inputs_; }
    const std::vector<Quantity>& quantities() const { return quantities_; }
    const std::vector<std::string>& notes() const { return notes_; }
    Verdict verdict() const;
    const Quantity* find(const std::string& name) const;

    /// Informational value; never fails.
    void record(const std::string& name, nlohmann::json value, const std::string& provenance);
    /// |value - expected| <= tolerance.
    void expect_near(const std::string& name, double value, double expected, double tolerance,
                     const std::string& provenance);
    /// value <= bound.
    void expect_at_most(const std::string& name, double value, double bound, const std::string& provenance);
    /// value > bound.
    void expect_above(const std::string& name, double value, double bound, const std::string& provenance);
    void expect_equal(const std::string& name, long long value, long long expected, const std::string& provenance);
    void expect_true(const std::string& name, bool value, const std::string& provenance);
    void note(std::string text) { notes_.push_back(std::move(text)); }
    /// Marks the run as refused (a precondition could not be met); the reason is kept as a note.
    void refuse(const std::string& reason);

    /// JSON document. The timestamp is the only field that differs between identical runs.
    nlohmann::json to_json(bool with_timestamp = true) const;
    std::string to_text() const;

   private:
    std::string pipeline_;
    nlohmann::json inputs_;
    std::vector<Quantity> quantities_;
    std::vector<std::string> notes_;
    bool refused_ = false;
};

}  // namespace clover
