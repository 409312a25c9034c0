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

#include "clover/catalysis.hpp"

#include <cmath>

namespace clover {

namespace {

constexpr double kSupportFloor = 1e-10;
constexpr double kOverlapTol = 1e-9;

std::size_t ipow(std::size_t base, std::size_t exp) {
    std::size_t r = 1;
    for (std::size_t k = 0; k < exp; ++k) r *= base;
    return r;
}

Matrix support_projector(const Matrix& rho) {
    const auto es = eig_hermitian(rho);
    const auto n = rho.rows();
    Matrix p = Matrix::Zero(n, n);
    for (Eigen::Index k = 0; k < es.eigenvalues.size(); ++k) {
        if (es.eigenvalues(k) > kSupportFloor) p += es.eigenvectors.col(k) * es.eigenvectors.col(k).adjoint();
    }
    return p;
}

Matrix party_marginal(const QuantumState& s, Party party) {
    return marginal(s, s.layout().party_labels(party)).density();
}

std::vector<std::pair<double, Vector>> spectral_parts(const Matrix& rho) {
    const auto es = eig_hermitian(rho);
    std::vector<std::pair<double, Vector>> parts;
    for (Eigen::Index k = 0; k < es.eigenvalues.size(); ++k) {
        if (es.eigenvalues(k) > kSupportFloor) parts.emplace_back(es.eigenvalues(k), es.eigenvectors.col(k));
    }
    double total = 0.0;
    for (const auto& [w, v] : parts) total += w;
    for (auto& [w, v] : parts) w /= total;
    return parts;
}

std::vector<std::string> copy_labels(const std::vector<std::string>& labels, std::size_t copies, bool slots) {
    std::vector<std::string> out;
    for (std::size_t k = 1; k <= copies; ++k) {
        for (const auto& l : labels) out.push_back(slots ? slot_label(l, k) : output_label(l, k));
    }
    return out;
}

std::vector<Register> copy_registers(const RegisterLayout& layout, const std::vector<std::string>& labels,
                                     std::size_t copies, bool slots) {
    std::vector<Register> out;
    for (std::size_t k = 1; k <= copies; ++k) {
        for (const auto& l : labels) {
            Register r = layout.at(l);
            r.label = slots ? slot_label(l, k) : output_label(l, k);
            out.push_back(std::move(r));
        }
    }
    return out;
}

QuantumState as_ensemble(const QuantumState& s) { return s.is_ensemble() ? s : purify_factors(s); }

/// copies-fold tensor power of s with register X renamed to X.k (or C.X.k).
QuantumState tensor_power(const QuantumState& s, std::size_t copies, bool slots) {
    QuantumState out;
    const QuantumState base = as_ensemble(s);
    for (std::size_t k = 1; k <= copies; ++k) {
        std::map<std::string, std::string> renames;
        for (const auto& l : base.layout().labels()) renames[l] = slots ? slot_label(l, k) : output_label(l, k);
        out = tensor(out, base.relabeled(renames));
    }
    return out;
}

/// Kraus operators of one party's shift-register map on [sys, slot_1..slot_{n-1}, (flag)] ->
/// [out_1..out_n, slot_1..slot_{n-1}, (flag)], each register group of dimension d.
std::vector<Matrix> shift_kraus(std::size_t d, std::size_t n, const std::vector<std::pair<double, Vector>>& fresh_parts,
                                FlagMode mode, const Matrix& p_rho, const Matrix& p_sigma) {
    const std::size_t in_dim = ipow(d, n);
    const std::size_t out_dim = ipow(d, 2 * n - 1);
    const std::size_t fresh_dim = ipow(d, n - 1);

    // Fresh sigma copies: one Kraus per tuple of spectral components.
    std::vector<std::pair<double, Vector>> fresh{{1.0, Vector::Ones(1)}};
    for (std::size_t k = 0; k + 1 < n; ++k) {
        std::vector<std::pair<double, Vector>> next;
        for (const auto& [w, v] : fresh) {
            for (const auto& [u, x] : fresh_parts) next.emplace_back(w * u, kron(v, x));
        }
        fresh = std::move(next);
    }

    auto digits = [d](std::size_t index, std::size_t count) {
        std::vector<std::size_t> out(count);
        for (std::size_t k = count; k-- > 0;) {
            out[k] = index % d;
            index /= d;
        }
        return out;
    };
    auto compose = [d](const std::vector<std::size_t>& ds) {
        std::size_t index = 0;
        for (auto x : ds) index = index * d + x;
        return index;
    };

    auto shift = [&](std::size_t i, const std::pair<double, Vector>& part) {
        Matrix m = Matrix::Zero(static_cast<Eigen::Index>(out_dim), static_cast<Eigen::Index>(in_dim));
        const double amp = std::sqrt(part.first);
        for (std::size_t in = 0; in < in_dim; ++in) {
            const auto c = digits(in, n);  // c[0] = sys, c[1..n-1] = slots
            for (std::size_t g = 0; g < fresh_dim; ++g) {
                const Complex a = part.second(static_cast<Eigen::Index>(g));
                if (a == Complex(0.0)) continue;
                const auto f = digits(g, n - 1);
                std::vector<std::size_t> out;
                if (i + 1 < n) {
                    out.push_back(c[i + 1]);
                    out.insert(out.end(), f.begin(), f.end());
                    for (std::size_t k = 1; k < n; ++k) out.push_back(k == i + 1 ? c[0] : c[k]);
                } else {
                    out = c;
                    out.insert(out.end(), f.begin(), f.end());
                }
                m(static_cast<Eigen::Index>(compose(out)), static_cast<Eigen::Index>(in)) += amp * a;
            }
        }
        return m;
    };

    std::vector<Matrix> kraus;
    if (mode == FlagMode::ExplicitFlags) {
        const auto nn = static_cast<Eigen::Index>(n);
        for (std::size_t i = 0; i < n; ++i) {
            Matrix flag = Matrix::Zero(nn, nn);
            flag(static_cast<Eigen::Index>((i + 1) % n), static_cast<Eigen::Index>(i)) = 1.0;
            for (const auto& part : fresh) kraus.push_back(kron(shift(i, part), flag));
        }
        return kraus;
    }

    const auto dd = static_cast<Eigen::Index>(d);
    Matrix covered = Matrix::Zero(static_cast<Eigen::Index>(in_dim), static_cast<Eigen::Index>(in_dim));
    for (std::size_t i = 0; i < n; ++i) {
        Matrix proj = Matrix::Identity(dd, dd);
        for (std::size_t k = 1; k < n; ++k) proj = kron(proj, k <= i ? p_rho : p_sigma);
        covered += proj;
        for (const auto& part : fresh) kraus.push_back(shift(i, part) * proj);
    }
    const Matrix rest = Matrix::Identity(covered.rows(), covered.cols()) - covered;
    if (rest.cwiseAbs().maxCoeff() > 1e-12) {
        for (const auto& part : fresh) kraus.push_back(shift(0, part) * rest);
    }
    return kraus;
}

struct PartySide {
    std::vector<std::string> labels;
    std::size_t dim = 1;
    Matrix p_rho;
    Matrix p_sigma;
    std::vector<std::pair<double, Vector>> sigma_parts;
};

PartySide party_side(const QuantumState& rho, const QuantumState& sigma, Party party) {
    PartySide side;
    side.labels = rho.layout().party_labels(party);
    side.dim = rho.layout().party_dim(party);
    const Matrix rho_m = party_marginal(rho, party);
    const Matrix sigma_m = party_marginal(sigma, party);
    side.p_rho = support_projector(rho_m);
    side.p_sigma = support_projector(sigma_m);
    side.sigma_parts = spectral_parts(sigma_m);
    return side;
}

/// sigma laid out like rho, after checking that both live on the same bipartite registers.
QuantumState aligned_sigma(const QuantumState& rho, const QuantumState& sigma) {
    const auto& layout = rho.layout();
    if (layout.empty()) throw PreconditionError("rho has no registers");
    if (layout.party_labels(Party::Alice).empty() || layout.party_labels(Party::Bob).empty()) {
        throw PreconditionError("rho must have registers on both sides");
    }
    if (!layout.party_labels(Party::Referee).empty()) throw PreconditionError("rho must be bipartite");
    if (sigma.layout().size() != layout.size()) throw LayoutError("rho and sigma live on different registers");
    QuantumState s = sigma.permuted(layout.labels());
    if (!(s.layout() == layout)) throw LayoutError("rho and sigma live on different registers");
    return s;
}

void check_product(const QuantumState& sigma) {
    const auto& layout = sigma.layout();
    const auto alice = layout.party_labels(Party::Alice);
    const auto bob = layout.party_labels(Party::Bob);
    const QuantumState product = tensor(marginal(sigma, alice).to_dense(), marginal(sigma, bob).to_dense());
    if (trace_distance(sigma, product) > kOverlapTol) throw PreconditionError("sigma is not a product state");
}

}  // namespace

std::string_view to_string(FlagMode mode) {
    return mode == FlagMode::ExplicitFlags ? "explicit-flags" : "support-measurement";
}

FlagMode flag_mode_from_string(std::string_view name) {
    if (name == "explicit-flags") return FlagMode::ExplicitFlags;
    if (name == "support-measurement") return FlagMode::SupportMeasurement;
    throw PreconditionError("unknown flag mode '" + std::string(name) + "'");
}

std::string output_label(const std::string& label, std::size_t copy) { return label + "." + std::to_string(copy); }

std::string slot_label(const std::string& label, std::size_t copy) {
    return "C." + label + "." + std::to_string(copy);
}

bool locally_orthogonal(const QuantumState& rho, const QuantumState& sigma) {
    const QuantumState s = aligned_sigma(rho, sigma);
    for (Party party : {Party::Alice, Party::Bob}) {
        const Matrix a = support_projector(party_marginal(rho, party));
        const Matrix b = support_projector(party_marginal(s, party));
        if (std::abs((a * b).trace()) > kOverlapTol) return false;
    }
    return true;
}

FlagMode default_flag_mode(const QuantumState& rho, const QuantumState& sigma) {
    return locally_orthogonal(rho, sigma) ? FlagMode::SupportMeasurement : FlagMode::ExplicitFlags;
}

QuantumState build_catalyst(const QuantumState& rho, const QuantumState& sigma, std::size_t n, FlagMode mode) {
    if (n == 0) throw PreconditionError("n must be at least 1");
    const QuantumState s = aligned_sigma(rho, sigma);
    check_product(s);
    if (mode == FlagMode::SupportMeasurement && !locally_orthogonal(rho, s)) {
        throw PreconditionError("support measurement needs locally orthogonal rho and sigma");
    }
    const auto alice = rho.layout().party_labels(Party::Alice);
    const auto bob = rho.layout().party_labels(Party::Bob);
    std::vector<std::string> order = copy_labels(alice, n - 1, true);
    const auto bob_slots = copy_labels(bob, n - 1, true);
    order.insert(order.end(), bob_slots.begin(), bob_slots.end());
    if (mode == FlagMode::ExplicitFlags) {
        order.push_back(kFlagAlice);
        order.push_back(kFlagBob);
    }

    std::vector<std::pair<double, QuantumState>> parts;
    for (std::size_t i = 0; i < n; ++i) {
        // Slots 1..i hold rho, slots i+1..n-1 hold sigma.
        QuantumState block = tensor_power(rho, i, true);
        QuantumState tail = tensor_power(s, n - 1 - i, true);
        std::map<std::string, std::string> shift;
        for (std::size_t k = 1; k + i < n; ++k) {
            for (const auto& l : rho.layout().labels()) shift[slot_label(l, k)] = slot_label(l, k + i);
        }
        block = tensor(block, tail.relabeled(shift));
        if (mode == FlagMode::ExplicitFlags) {
            block = tensor(block, basis_product({{Register{kFlagAlice, n, Party::Alice}, i},
                                                 {Register{kFlagBob, n, Party::Bob}, i}}));
        }
        parts.emplace_back(1.0 / static_cast<double>(n), block.permuted(order));
    }
    return mix(parts);
}

CloChannels build_clo_channels(const QuantumState& rho, const QuantumState& sigma, std::size_t n, FlagMode mode) {
    if (n == 0) throw PreconditionError("n must be at least 1");
    const QuantumState s = aligned_sigma(rho, sigma);
    check_product(s);
    if (mode == FlagMode::SupportMeasurement && !locally_orthogonal(rho, s)) {
        throw PreconditionError("support measurement needs locally orthogonal rho and sigma");
    }
    CloChannels out;
    for (Party party : {Party::Alice, Party::Bob}) {
        const PartySide side = party_side(rho, s, party);
        const std::string flag = party == Party::Alice ? kFlagAlice : kFlagBob;

        std::vector<Register> in_regs;
        for (const auto& l : side.labels) in_regs.push_back(rho.layout().at(l));
        const auto slots = copy_registers(rho.layout(), side.labels, n - 1, true);
        in_regs.insert(in_regs.end(), slots.begin(), slots.end());
        std::vector<Register> out_regs = copy_registers(rho.layout(), side.labels, n, false);
        out_regs.insert(out_regs.end(), slots.begin(), slots.end());
        if (mode == FlagMode::ExplicitFlags) {
            in_regs.push_back(Register{flag, n, party});
            out_regs.push_back(Register{flag, n, party});
        }
        RegisterLayout in_layout(in_regs);
        KrausChannel ch(in_layout, RegisterLayout(out_regs),
                        shift_kraus(side.dim, n, side.sigma_parts, mode, side.p_rho, side.p_sigma));
        if (party == Party::Alice) {
            out.alice = std::move(ch);
            out.alice_targets = in_layout.labels();
        } else {
            out.bob = std::move(ch);
            out.bob_targets = in_layout.labels();
        }
    }
    return out;
}

QuantumState clo_target(const QuantumState& rho, const QuantumState& sigma, std::size_t n) {
    if (n == 0) throw PreconditionError("n must be at least 1");
    const QuantumState s = aligned_sigma(rho, sigma);
    std::vector<std::string> order = copy_labels(rho.layout().party_labels(Party::Alice), n, false);
    const auto bob = copy_labels(rho.layout().party_labels(Party::Bob), n, false);
    order.insert(order.end(), bob.begin(), bob.end());
    const double nn = static_cast<double>(n);
    return mix({{1.0 / nn, tensor_power(rho, n, false).permuted(order)},
                {(nn - 1.0) / nn, tensor_power(s, n, false).permuted(order)}});
}

std::vector<std::string> CatalyticProtocol::output_labels() const {
    std::vector<std::string> out = copy_labels(rho.layout().party_labels(Party::Alice), n, false);
    const auto bob = copy_labels(rho.layout().party_labels(Party::Bob), n, false);
    out.insert(out.end(), bob.begin(), bob.end());
    return out;
}

CatalyticProtocol make_catalytic_protocol(const QuantumState& rho, const QuantumState& sigma, std::size_t n,
                                          std::optional<FlagMode> mode) {
    CatalyticProtocol p;
    p.n = n;
    p.rho = rho;
    p.sigma = aligned_sigma(rho, sigma);
    p.flag_mode = mode ? *mode : default_flag_mode(rho, p.sigma);
    p.catalyst = build_catalyst(rho, p.sigma, n, p.flag_mode);
    p.channels = build_clo_channels(rho, p.sigma, n, p.flag_mode);
    return p;
}

namespace {

CLORunReport run_unchecked(const CatalyticProtocol& protocol, const QuantumState& input, const RunOptions& options) {
    const CloChannels& ch = options.channels_override ? *options.channels_override : protocol.channels;
    QuantumState joint = tensor(as_ensemble(input.permuted(protocol.rho.layout().labels())), protocol.catalyst);
    if (options.dense) joint = joint.to_dense();
    joint = apply_channel(ch.alice, joint, ch.alice_targets);
    joint = apply_channel(ch.bob, joint, ch.bob_targets);

    CLORunReport report;
    report.dense = options.dense;
    report.output_state = marginal(joint, protocol.output_labels());
    report.output_target_distance =
        trace_distance(report.output_state, clo_target(protocol.rho, protocol.sigma, protocol.n));
    if (protocol.catalyst.layout().empty()) {
        report.catalyst_out = QuantumState();
        report.catalyst_restoration_distance = 0.0;
    } else {
        report.catalyst_out = marginal(joint, protocol.catalyst_labels());
        report.catalyst_restoration_distance = trace_distance(report.catalyst_out, protocol.catalyst);
    }
    const std::vector<std::string> flags = protocol.flag_mode == FlagMode::ExplicitFlags
                                               ? std::vector<std::string>{kFlagAlice, kFlagBob}
                                               : std::vector<std::string>{};
    report.catalyst_sn = sn_flagged_blocks(protocol.catalyst, flags);
    report.joint_available = options.keep_joint;
    if (options.keep_joint) report.joint = std::move(joint);
    return report;
}

}  // namespace

CLORunReport run_clo(const CatalyticProtocol& protocol, const QuantumState& input, const RunOptions& options) {
    CLORunReport probe;
    if (input.layout().size() != protocol.rho.layout().size() ||
        trace_distance(input, protocol.rho) > probe.input_tolerance) {
        throw PreconditionError("input differs from the state the protocol was built for");
    }
    return run_unchecked(protocol, input, options);
}

CLORunReport verify_input_sensitivity(const CatalyticProtocol& protocol, const QuantumState& wrong_input,
                                      const RunOptions& options) {
    return run_unchecked(protocol, wrong_input, options);
}

}  // namespace clover
