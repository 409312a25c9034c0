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

#include "clover/sloccq.hpp"

#include <algorithm>
#include <cmath>

namespace clover {

namespace {

Party other(Party p) { return p == Party::Alice ? Party::Bob : Party::Alice; }

std::size_t round_index(const std::vector<ProtocolRound>& rounds, const std::string& name, std::size_t before) {
    for (std::size_t k = 0; k < before; ++k) {
        if (rounds[k].name == name) return k;
    }
    throw PreconditionError("round condition '" + name + "' does not name an earlier round");
}

void check_outputs(const Instrument& ins, const ProtocolRound& round) {
    for (const auto& r : ins.layout_out().registers()) {
        if (r.party != round.party) {
            throw LayoutError("round '" + round.name + "' creates register '" + r.label + "' for the other party");
        }
    }
}

std::size_t derive_input_sn(const QuantumState& input) {
    try {
        if (input.is_pure()) return schmidt_rank(input).rank;
        return sn_decomposition_upper(input).upper;
    } catch (const LayoutError&) {
        return std::max<std::size_t>(
            1, std::min(input.layout().party_dim(Party::Alice), input.layout().party_dim(Party::Bob)));
    }
}

Vector single_branch_vector(const RegisterLayout& layout, const Branch& b) {
    return QuantumState::ensemble(layout, {Branch{1.0, b.factors}}).pure_vector();
}

/// Schmidt data of a pure component across the Alice/Bob cut, in the layout's party order.
struct Split {
    double weight;
    CutDecomposition dec;
    std::size_t rank;
};

Split split_component(double weight, const Vector& v, const RegisterLayout& layout) {
    Split s{weight, svd_across_cut(v, layout, Cut::alice_bob(layout)), 0};
    const double top = s.dec.singular_values.size() ? s.dec.singular_values(0) : 0.0;
    for (Eigen::Index k = 0; k < s.dec.singular_values.size(); ++k) {
        if (s.dec.singular_values(k) > kSchmidtRankTol * top) ++s.rank;
    }
    return s;
}

std::vector<Register> party_registers(const RegisterLayout& layout, Party party) {
    std::vector<Register> out;
    for (const auto& r : layout.registers()) {
        if (r.party == party) out.push_back(r);
    }
    return out;
}

/// Alice's sampling instrument: outcome i prepares sqrt(p_i) sum_m s_m |u_m>|m>_P on (alice regs, P).
/// With dim_p == 1 the register P is omitted.
Instrument sampling_instrument(const std::vector<Split>& parts, const std::vector<Register>& alice_regs,
                               const std::string& p_label, std::size_t dim_p) {
    std::vector<Register> out = alice_regs;
    if (dim_p > 1) out.push_back(Register{p_label, dim_p, Party::Alice});
    RegisterLayout out_layout(out);
    std::vector<InstrumentBranch> branches;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        const auto& sp = parts[i];
        Vector v = Vector::Zero(static_cast<Eigen::Index>(out_layout.total_dim()));
        for (std::size_t m = 0; m < sp.rank; ++m) {
            Vector e = Vector::Zero(static_cast<Eigen::Index>(dim_p));
            e(static_cast<Eigen::Index>(dim_p > 1 ? m : 0)) = 1.0;
            v += sp.dec.singular_values(static_cast<Eigen::Index>(m)) *
                 kron(Vector(sp.dec.left_basis.col(static_cast<Eigen::Index>(m))), e);
        }
        branches.push_back(InstrumentBranch{std::to_string(i), {Matrix(std::sqrt(sp.weight) * v)}});
    }
    return Instrument(RegisterLayout(), out_layout, std::move(branches));
}

/// Bob's decompression |m>_P -> |w_m> (completed to a channel), or plain preparation when dim_p == 1.
Instrument unpacking_instrument(const Split& sp, const std::vector<Register>& bob_regs, const std::string& p_label,
                                std::size_t dim_p) {
    RegisterLayout out_layout(bob_regs);
    const auto rows = static_cast<Eigen::Index>(out_layout.total_dim());
    if (dim_p <= 1) {
        Matrix k = sp.dec.right_basis.col(0);
        return Instrument(RegisterLayout(), out_layout, {InstrumentBranch{"ok", {k}}});
    }
    RegisterLayout in_layout({Register{p_label, dim_p, Party::Bob}});
    Matrix k = Matrix::Zero(rows, static_cast<Eigen::Index>(dim_p));
    for (std::size_t m = 0; m < sp.rank; ++m) {
        k.col(static_cast<Eigen::Index>(m)) = sp.dec.right_basis.col(static_cast<Eigen::Index>(m));
    }
    return Instrument::from_channel(complete_to_channel(in_layout, out_layout, {k}));
}

}  // namespace

SloccqProtocol::SloccqProtocol(std::vector<ProtocolRound> rounds, std::size_t budget)
    : rounds_(std::move(rounds)), budget_(budget) {
    if (budget_ == 0) throw PreconditionError("budget must be at least 1");
    std::set<std::string> names;
    for (std::size_t k = 0; k < rounds_.size(); ++k) {
        auto& r = rounds_[k];
        if (r.name.empty()) r.name = "round" + std::to_string(k);
        if (!names.insert(r.name).second) throw PreconditionError("duplicate round name '" + r.name + "'");
        if (r.party == Party::Referee) throw PreconditionError("the referee never acts");
        if (r.transfer && r.transfer->dim == 0) throw PreconditionError("transfer dimension must be positive");
        if (r.condition_on) {
            const auto& source = rounds_[round_index(rounds_, *r.condition_on, k)];
            if (source.party != r.party && !source.broadcast) {
                throw PreconditionError("round '" + r.name + "' conditions on an outcome it never receives");
            }
        }
        check_outputs(r.instrument, r);
        for (const auto& [label, ins] : r.conditioned) check_outputs(ins, r);
    }
    if (budget_used() > budget_) {
        throw BudgetError("protocol sends " + std::to_string(budget_used()) + " dimensions, budget is " +
                          std::to_string(budget_));
    }
}

std::size_t SloccqProtocol::budget_used() const {
    std::size_t used = 1;
    for (const auto& r : rounds_) used *= r.transfer_dim();
    return used;
}

std::vector<const BranchNode*> BranchTree::leaves() const {
    std::vector<const BranchNode*> out;
    for (const auto& n : nodes) {
        if (n.leaf) out.push_back(&n);
    }
    return out;
}

double BranchTree::success_probability() const {
    double p = 0.0;
    for (const auto* n : leaves()) {
        if (n->success) p += n->probability;
    }
    return p;
}

QuantumState BranchTree::final_state() const {
    std::vector<std::pair<double, QuantumState>> parts;
    for (const auto* n : leaves()) {
        if (n->success) parts.emplace_back(n->probability, n->state);
    }
    if (parts.empty()) throw PreconditionError("no successful branch");
    return mix(parts);
}

std::size_t BranchTree::max_budget_used() const {
    std::size_t m = 1;
    for (const auto& n : nodes) m = std::max(m, n.ledger.budget_used);
    return m;
}

BranchTree run_protocol(const SloccqProtocol& protocol, const QuantumState& input, std::size_t input_sn) {
    BranchTree tree;
    tree.input_sn = input_sn ? input_sn : derive_input_sn(input);
    BranchNode root;
    root.state = input;
    root.ledger = {1, tree.input_sn};
    tree.nodes.push_back(std::move(root));
    std::vector<std::size_t> frontier{0};
    const auto& rounds = protocol.rounds();
    for (std::size_t r = 0; r < rounds.size(); ++r) {
        const auto& round = rounds[r];
        const std::optional<std::size_t> cond =
            round.condition_on ? std::optional<std::size_t>(round_index(rounds, *round.condition_on, r)) : std::nullopt;
        std::vector<std::size_t> next;
        for (std::size_t idx : frontier) {
            const BranchNode parent = tree.nodes[idx];
            const Instrument* ins = &round.instrument;
            if (cond) {
                auto it = round.conditioned.find(parent.path[*cond]);
                if (it != round.conditioned.end()) ins = &it->second;
            }
            for (const auto& t : round.targets) {
                if (parent.state.layout().at(t).party != round.party) {
                    throw LayoutError("round '" + round.name + "' touches register '" + t + "' it does not hold");
                }
            }
            for (auto& outcome : apply_instrument(*ins, parent.state, round.targets)) {
                BranchNode child;
                child.path = parent.path;
                child.path.push_back(outcome.label);
                child.probability = parent.probability * outcome.probability;
                child.state = std::move(outcome.state);
                child.ledger = parent.ledger;
                if (round.transfer) {
                    const auto& reg = child.state.layout().at(round.transfer->label);
                    if (reg.party != round.party) {
                        throw LayoutError("round '" + round.name + "' sends register '" + reg.label +
                                          "' it does not hold");
                    }
                    if (reg.dim != round.transfer->dim) {
                        throw LayoutError("declared transfer dimension of '" + reg.label + "' is wrong");
                    }
                    child.state = child.state.with_party(reg.label, other(round.party));
                    child.ledger.budget_used *= round.transfer->dim;
                    child.ledger.sn_bound = tree.input_sn * child.ledger.budget_used;
                }
                child.success = round.postselect.empty() || round.postselect.count(child.path.back()) > 0;
                child.leaf = !child.success;
                tree.nodes.push_back(std::move(child));
                if (tree.nodes.back().success) next.push_back(tree.nodes.size() - 1);
            }
        }
        frontier = std::move(next);
    }
    for (std::size_t idx : frontier) tree.nodes[idx].leaf = true;
    return tree;
}

std::size_t ledger_bound(std::size_t input_sn, const std::vector<ProtocolRound>& rounds) {
    std::size_t b = input_sn;
    for (const auto& r : rounds) b *= r.transfer_dim();
    return b;
}

ImpossibilityCertificate certify_impossible(const SNCertificate& input, const SNCertificate& target, std::size_t budget) {
    ImpossibilityCertificate c;
    c.input_sn_upper = input.upper;
    c.target_sn_lower = target.lower;
    c.budget = budget;
    c.impossible = budget * input.upper < target.lower;
    const std::string numbers = std::to_string(budget) + " * " + std::to_string(input.upper) +
                                (c.impossible ? " < " : " >= ") + std::to_string(target.lower);
    c.statement = c.impossible ? "no protocol within the budget reaches the target Schmidt number: " + numbers
                               : "no claim: " + numbers;
    return c;
}

FilterResult filter_to_max_entangled(const QuantumState& v, const std::string& out_label) {
    if (!v.is_pure()) throw PreconditionError("filtration needs a pure input");
    const auto& layout = v.layout();
    const Cut cut = Cut::alice_bob(layout);
    const auto dec = svd_across_cut(v.pure_vector(), layout, cut);
    const auto report = schmidt_rank(v);
    const std::size_t k = report.rank;
    const double lambda_min = std::pow(dec.singular_values(static_cast<Eigen::Index>(k - 1)), 2);
    const RegisterLayout in_layout = layout.select(cut.left);
    const RegisterLayout out_layout({Register{out_label, k, Party::Alice}});
    Matrix success = Matrix::Zero(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(in_layout.total_dim()));
    for (std::size_t j = 0; j < k; ++j) {
        const auto jj = static_cast<Eigen::Index>(j);
        const double lambda = dec.singular_values(jj) * dec.singular_values(jj);
        success.row(jj) = std::sqrt(lambda_min / lambda) * dec.left_basis.col(jj).adjoint();
    }
    const KrausChannel full = complete_to_channel(in_layout, out_layout, {success});
    std::vector<Matrix> fail(full.kraus().begin() + 1, full.kraus().end());
    std::vector<InstrumentBranch> branches{{"success", {success}}};
    if (!fail.empty()) branches.push_back({"fail", std::move(fail)});
    FilterResult r;
    r.instrument = Instrument(in_layout, out_layout, std::move(branches));
    r.targets = cut.left;
    r.success_probability = static_cast<double>(k) * lambda_min;
    r.schmidt_rank = k;
    return r;
}

std::vector<ProtocolRound> teleport_register(const std::string& payload, const std::string& alice_half,
                                             const std::string& bob_half, std::size_t d, const std::string& bob_out,
                                             const std::string& name_prefix) {
    if (d == 0) throw PreconditionError("teleportation dimension must be positive");
    const auto n = static_cast<Eigen::Index>(d);
    const double norm = 1.0 / std::sqrt(static_cast<double>(d));
    const double pi = std::acos(-1.0);
    std::vector<InstrumentBranch> bell;
    std::map<std::string, Instrument> fixes;
    const RegisterLayout bob_in({Register{bob_half, d, Party::Bob}});
    const RegisterLayout bob_out_layout({Register{bob_out, d, Party::Bob}});
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index k = 0; k < n; ++k) {
            // |Phi_jk> = sum_m w^{km} |m>|m+j> / sqrt(d), as a (payload, alice_half) amplitude matrix.
            Matrix phi = Matrix::Zero(n, n);
            for (Eigen::Index m = 0; m < n; ++m) {
                phi(m, (m + j) % n) = norm * std::polar(1.0, 2.0 * pi * static_cast<double>(k * m) / static_cast<double>(n));
            }
            Matrix row(1, n * n);
            for (Eigen::Index p = 0; p < n; ++p) {
                for (Eigen::Index a = 0; a < n; ++a) row(0, p * n + a) = std::conj(phi(p, a));
            }
            const std::string label = std::to_string(j) + "." + std::to_string(k);
            bell.push_back({label, {row}});
            // Bob's half after the outcome is M psi with M(b, p) = sqrt(d) conj(phi(p, b)); undo M.
            const Matrix m = std::sqrt(static_cast<double>(d)) * phi.adjoint();
            fixes.emplace(label, Instrument(bob_in, bob_out_layout, {InstrumentBranch{"ok", {m.adjoint()}}}));
        }
    }
    ProtocolRound measure;
    measure.name = name_prefix + ".bell";
    measure.party = Party::Alice;
    measure.targets = {payload, alice_half};
    measure.instrument = Instrument(
        RegisterLayout({Register{payload, d, Party::Alice}, Register{alice_half, d, Party::Alice}}), RegisterLayout(),
        std::move(bell));
    measure.broadcast = true;

    ProtocolRound fix;
    fix.name = name_prefix + ".fix";
    fix.party = Party::Bob;
    fix.targets = {bob_half};
    fix.instrument = fixes.begin()->second;
    fix.condition_on = measure.name;
    fix.conditioned = std::move(fixes);
    fix.broadcast = false;
    return {std::move(measure), std::move(fix)};
}

std::vector<std::pair<double, Vector>> preparation_components(const QuantumState& target) {
    std::vector<std::pair<double, Vector>> out;
    if (target.is_pure()) {
        out.emplace_back(1.0, target.pure_vector());
        return out;
    }
    if (target.is_ensemble()) {
        const QuantumState pure = purify_factors(target);
        for (const auto& b : pure.branches()) out.emplace_back(b.probability, single_branch_vector(target.layout(), b));
        return out;
    }
    const auto mixture = sn_orthogonal_mixture(target);
    if (!mixture.refused()) return mixture.decomposition;
    const auto es = eig_hermitian(target.dense_matrix());
    for (Eigen::Index k = 0; k < es.eigenvalues.size(); ++k) {
        if (es.eigenvalues(k) > 1e-14) out.emplace_back(es.eigenvalues(k), es.eigenvectors.col(k));
    }
    return out;
}

ConverseProtocol construct_converse(const QuantumState& input, const QuantumState& target, std::size_t budget) {
    if (!input.is_pure()) throw PreconditionError("the converse construction needs a pure input");
    if (budget == 0) throw PreconditionError("budget must be at least 1");
    const std::string ea = "~EA", eb = "~EB", qa = "~QA", q = "~Q", sa = "~SA", sb = "~SB", p = "~P", pb = "~PB";
    for (const auto& l : target.layout().labels()) {
        if (!l.empty() && l[0] == '~') throw LayoutError("target labels starting with '~' are reserved");
        if (input.layout().contains(l)) throw LayoutError("target register '" + l + "' collides with an input register");
    }
    const auto& in_layout = input.layout();
    const Cut in_cut = Cut::alice_bob(in_layout);
    const auto in_dec = svd_across_cut(input.pure_vector(), in_layout, in_cut);
    const FilterResult filter = filter_to_max_entangled(input, ea);
    const std::size_t k = filter.schmidt_rank;
    const std::size_t big_d = k * budget;

    std::vector<Split> parts;
    for (const auto& [w, v] : preparation_components(target)) {
        parts.push_back(split_component(w, v, target.layout()));
        if (parts.back().rank > big_d) {
            throw PreconditionError("target component of Schmidt rank " + std::to_string(parts.back().rank) +
                                    " does not fit through a shared dimension of " + std::to_string(big_d));
        }
    }
    const auto alice_regs = party_registers(target.layout(), Party::Alice);
    const auto bob_regs = party_registers(target.layout(), Party::Bob);

    std::vector<ProtocolRound> rounds;
    {
        ProtocolRound r;
        r.name = "filter";
        r.party = Party::Alice;
        r.targets = filter.targets;
        r.instrument = filter.instrument;
        r.postselect = {"success"};
        rounds.push_back(std::move(r));
    }
    {
        // Bob maps his Schmidt vectors to the computational basis.
        const RegisterLayout bob_in = in_layout.select(in_cut.right);
        Matrix align = Matrix::Zero(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(bob_in.total_dim()));
        for (std::size_t j = 0; j < k; ++j) {
            align.row(static_cast<Eigen::Index>(j)) = in_dec.right_basis.col(static_cast<Eigen::Index>(j)).adjoint();
        }
        ProtocolRound r;
        r.name = "align";
        r.party = Party::Bob;
        r.targets = in_cut.right;
        r.instrument = Instrument::from_channel(
            complete_to_channel(bob_in, RegisterLayout({Register{eb, k, Party::Bob}}), {align}));
        r.broadcast = false;
        rounds.push_back(std::move(r));
    }
    std::vector<std::string> alice_merge{ea}, bob_merge{eb};
    std::vector<Register> alice_merge_regs{{ea, k, Party::Alice}}, bob_merge_regs{{eb, k, Party::Bob}};
    if (budget > 1) {
        ProtocolRound r;
        r.name = "share";
        r.party = Party::Alice;
        r.instrument =
            Instrument::from_channel(preparation_channel(max_entangled(budget, qa, q).with_party(q, Party::Alice)));
        r.transfer = QuantumTransfer{q, budget};
        r.broadcast = false;
        rounds.push_back(std::move(r));
        alice_merge.push_back(qa);
        bob_merge.push_back(q);
        alice_merge_regs.push_back({qa, budget, Party::Alice});
        bob_merge_regs.push_back({q, budget, Party::Bob});
    }
    const auto dd = static_cast<Eigen::Index>(big_d);
    for (Party party : {Party::Alice, Party::Bob}) {
        ProtocolRound r;
        r.name = party == Party::Alice ? "merge.alice" : "merge.bob";
        r.party = party;
        r.targets = party == Party::Alice ? alice_merge : bob_merge;
        const std::string out = party == Party::Alice ? sa : sb;
        r.instrument = Instrument::from_channel(
            KrausChannel(RegisterLayout(party == Party::Alice ? alice_merge_regs : bob_merge_regs),
                         RegisterLayout({Register{out, big_d, party}}), {Matrix::Identity(dd, dd)}));
        r.broadcast = false;
        rounds.push_back(std::move(r));
    }
    {
        ProtocolRound r;
        r.name = "prepare";
        r.party = Party::Alice;
        r.instrument = sampling_instrument(parts, alice_regs, p, big_d);
        r.broadcast = true;
        rounds.push_back(std::move(r));
    }
    if (big_d > 1) {
        for (auto& r : teleport_register(p, sa, sb, big_d, pb)) rounds.push_back(std::move(r));
    }
    {
        ProtocolRound r;
        r.name = "decompress";
        r.party = Party::Bob;
        if (big_d > 1) r.targets = {pb};
        r.condition_on = "prepare";
        for (std::size_t i = 0; i < parts.size(); ++i) {
            r.conditioned.emplace(std::to_string(i), unpacking_instrument(parts[i], bob_regs, pb, big_d));
        }
        r.instrument = r.conditioned.begin()->second;
        r.broadcast = false;
        rounds.push_back(std::move(r));
    }
    if (big_d == 1) {
        // Nothing was shared: the unused one-dimensional halves are dropped.
        for (Party party : {Party::Alice, Party::Bob}) {
            ProtocolRound r;
            r.name = party == Party::Alice ? "drop.alice" : "drop.bob";
            r.party = party;
            r.targets = {party == Party::Alice ? sa : sb};
            r.instrument = Instrument::from_channel(
                discard_channel(RegisterLayout({Register{r.targets[0], 1, party}})));
            r.broadcast = false;
            rounds.push_back(std::move(r));
        }
    }

    ConverseProtocol c;
    c.protocol = SloccqProtocol(std::move(rounds), budget);
    c.input_rank = k;
    c.shared_dim = big_d;
    c.filter_success_probability = filter.success_probability;
    return c;
}

CatalystPrep compile_catalyst_prep(const QuantumState& catalyst) {
    const auto& layout = catalyst.layout();
    if (!layout.party_labels(Party::Referee).empty()) throw PreconditionError("catalyst must be bipartite");
    const std::string p = "~P";
    if (layout.contains(p)) throw LayoutError("catalyst uses the reserved label '~P'");
    std::vector<Split> parts;
    std::size_t r_max = 1;
    for (const auto& [w, v] : preparation_components(catalyst)) {
        parts.push_back(split_component(w, v, layout));
        r_max = std::max(r_max, parts.back().rank);
    }
    const auto alice_regs = party_registers(layout, Party::Alice);
    const auto bob_regs = party_registers(layout, Party::Bob);

    std::vector<ProtocolRound> rounds;
    ProtocolRound sample;
    sample.name = "sample";
    sample.party = Party::Alice;
    sample.instrument = sampling_instrument(parts, alice_regs, p, r_max);
    sample.broadcast = true;
    if (r_max > 1) sample.transfer = QuantumTransfer{p, r_max};
    rounds.push_back(std::move(sample));

    ProtocolRound unpack;
    unpack.name = "unpack";
    unpack.party = Party::Bob;
    if (r_max > 1) unpack.targets = {p};
    unpack.condition_on = "sample";
    for (std::size_t i = 0; i < parts.size(); ++i) {
        unpack.conditioned.emplace(std::to_string(i), unpacking_instrument(parts[i], bob_regs, p, r_max));
    }
    unpack.instrument = unpack.conditioned.begin()->second;
    unpack.broadcast = false;
    rounds.push_back(std::move(unpack));

    CatalystPrep prep;
    prep.protocol = SloccqProtocol(std::move(rounds), r_max);
    prep.max_branch_rank = r_max;
    return prep;
}

}  // namespace clover
