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

#include "clover/state_json.hpp"

#include <fstream>
#include <sstream>

namespace clover {

using nlohmann::json;

json layout_to_json(const RegisterLayout& layout) {
    json out = json::array();
    for (const auto& r : layout.registers()) {
        out.push_back({{"label", r.label}, {"dim", r.dim}, {"party", std::string(to_string(r.party))}});
    }
    return out;
}

RegisterLayout layout_from_json(const json& j) {
    if (!j.is_array()) throw FormatError("layout must be an array");
    std::vector<Register> regs;
    for (const auto& r : j) {
        if (!r.contains("label") || !r.contains("dim") || !r.contains("party")) {
            throw FormatError("layout entries need label, dim and party");
        }
        const auto dim = r.at("dim").get<long long>();
        if (dim <= 0) throw FormatError("register dimension must be positive");
        regs.push_back(Register{r.at("label").get<std::string>(), static_cast<std::size_t>(dim),
                                party_from_string(r.at("party").get<std::string>())});
    }
    return RegisterLayout(std::move(regs));
}

json complex_list(const Vector& v) {
    json out = json::array();
    for (Eigen::Index k = 0; k < v.size(); ++k) out.push_back({v(k).real(), v(k).imag()});
    return out;
}

Vector complex_vector(const json& j) {
    if (!j.is_array()) throw FormatError("expected a list of [re, im] pairs");
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t k = 0; k < j.size(); ++k) {
        const auto& e = j[k];
        if (e.is_number()) {
            v(static_cast<Eigen::Index>(k)) = e.get<double>();
        } else if (e.is_array() && e.size() == 2) {
            v(static_cast<Eigen::Index>(k)) = Complex(e[0].get<double>(), e[1].get<double>());
        } else {
            throw FormatError("complex entries must be [re, im] pairs");
        }
    }
    return v;
}

json matrix_to_json(const Matrix& m) {
    json out = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) out.push_back({m(i, j).real(), m(i, j).imag()});
    }
    return out;
}

Matrix matrix_from_json(const json& j, Eigen::Index rows, Eigen::Index cols) {
    const Vector flat = complex_vector(j);
    if (flat.size() != rows * cols) {
        throw FormatError("matrix has " + std::to_string(flat.size()) + " entries, expected " +
                          std::to_string(rows * cols));
    }
    return reshape_rows(flat, static_cast<std::size_t>(rows), static_cast<std::size_t>(cols));
}

json state_to_json(const QuantumState& s) {
    json out;
    out["layout"] = layout_to_json(s.layout());
    if (s.is_dense()) {
        out["dense"] = matrix_to_json(s.dense_matrix());
        return out;
    }
    json branches = json::array();
    for (const auto& b : s.branches()) {
        json factors = json::array();
        for (const auto& f : b.factors) {
            json jf{{"labels", f.labels}};
            if (f.is_pure()) {
                jf["vector"] = complex_list(f.vector());
            } else {
                jf["block"] = matrix_to_json(f.block());
            }
            factors.push_back(std::move(jf));
        }
        branches.push_back({{"p", b.probability}, {"factors", std::move(factors)}});
    }
    out["ensemble"] = std::move(branches);
    return out;
}

QuantumState state_from_json(const json& j) {
    try {
        if (!j.contains("layout")) throw FormatError("state needs a layout");
        RegisterLayout layout = layout_from_json(j.at("layout"));
        if (j.contains("dense")) {
            const auto n = static_cast<Eigen::Index>(layout.total_dim());
            return QuantumState::dense(std::move(layout), matrix_from_json(j.at("dense"), n, n));
        }
        if (!j.contains("ensemble")) throw FormatError("state needs either 'dense' or 'ensemble'");
        std::vector<Branch> branches;
        for (const auto& jb : j.at("ensemble")) {
            Branch b{jb.at("p").get<double>(), {}};
            for (const auto& jf : jb.at("factors")) {
                Factor f;
                f.labels = jf.at("labels").get<std::vector<std::string>>();
                std::size_t d = 1;
                for (const auto& l : f.labels) d *= layout.at(l).dim;
                if (jf.contains("vector")) {
                    f.data = complex_vector(jf.at("vector"));
                } else if (jf.contains("block")) {
                    const auto n = static_cast<Eigen::Index>(d);
                    f.data = matrix_from_json(jf.at("block"), n, n);
                } else {
                    throw FormatError("factor needs 'vector' or 'block'");
                }
                b.factors.push_back(std::move(f));
            }
            branches.push_back(std::move(b));
        }
        return QuantumState::ensemble(std::move(layout), std::move(branches));
    } catch (const json::exception& e) {
        throw FormatError(std::string("malformed state JSON: ") + e.what());
    }
}

QuantumState load_state(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open state file '" + path.string() + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw FormatError("cannot parse '" + path.string() + "': " + e.what());
    }
    return state_from_json(j);
}

void save_state(const QuantumState& s, const std::filesystem::path& path) {
    write_file_atomically(path, state_to_json(s).dump(2) + "\n");
}

void write_file_atomically(const std::filesystem::path& path, const std::string& contents) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw FormatError("cannot write '" + tmp.string() + "'");
        out << contents;
        if (!out) throw FormatError("write to '" + tmp.string() + "' failed");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw FormatError("cannot move report into place: " + ec.message());
}

}  // namespace clover
