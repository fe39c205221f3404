// SPDX-License-Identifier: Apache-2.0
#include "nlg/qhe.hpp"

#include <algorithm>
#include <cmath>

namespace nlg {

std::vector<std::uint8_t> Ciphertext::wire_bytes() const {
    std::vector<std::uint8_t> out(8, 0);
    for (int i = 0; i < 8; ++i) out[static_cast<std::size_t>(i)] =
        static_cast<std::uint8_t>((nonce >> (8 * (7 - i))) & 0xffu);
    const std::size_t nbytes = (payload.size() + 7) / 8;
    out.resize(8 + nbytes, 0);
    for (std::size_t i = 0; i < payload.size(); ++i)
        if (payload[i]) out[8 + i / 8] |= static_cast<std::uint8_t>(0x80u >> (i % 8));
    return out;
}

std::string Ciphertext::hex() const {
    static const char* digits = "0123456789abcdef";
    std::string s;
    for (std::uint8_t b : wire_bytes()) {
        s.push_back(digits[b >> 4]);
        s.push_back(digits[b & 0xf]);
    }
    return s;
}

void EvalCircuit::validate() const {
    const std::size_t n = message_wires + aux_wires;
    if (message_wires == 0) throw Error("circuit needs at least one message wire");
    if (output_wires.size() != message_wires)
        throw Error("designated output wires must match the message length");
    for (std::size_t w : output_wires)
        if (w >= n) throw DimensionMismatch("output wire out of range");
    for (const auto& g : gates) {
        for (std::size_t w : g.wires)
            if (w >= n) throw DimensionMismatch("gate wire out of range");
        if (g.name == "U") {
            const std::size_t d = std::size_t{1} << g.wires.size();
            if (g.matrix.rows() != d || g.matrix.cols() != d)
                throw DimensionMismatch("gate matrix size vs wire count");
        }
    }
}

std::uint64_t EvalCircuit::content_id() const {
    std::uint64_t h = 1469598103934665603ULL;
    auto fnv = [&h](std::uint64_t v) {
        for (int i = 0; i < 8; ++i) {
            h ^= (v >> (8 * i)) & 0xffu;
            h *= 1099511628211ULL;
        }
    };
    fnv(message_wires);
    fnv(aux_wires);
    for (std::size_t w : output_wires) fnv(w);
    for (const auto& g : gates) {
        for (char c : g.name) fnv(static_cast<std::uint64_t>(c));
        for (std::size_t w : g.wires) fnv(w);
        for (const auto& e : g.matrix.data()) {
            fnv(static_cast<std::uint64_t>(std::llround(e.real() * 1e12)));
            fnv(static_cast<std::uint64_t>(std::llround(e.imag() * 1e12)));
        }
    }
    return h;
}

std::vector<int> bits_of(std::size_t value, std::size_t width) {
    std::vector<int> bits(width, 0);
    for (std::size_t i = 0; i < width; ++i)
        bits[i] = static_cast<int>((value >> (width - 1 - i)) & 1u);
    return bits;
}

std::size_t value_of(const std::vector<int>& bits) {
    std::size_t v = 0;
    for (int b : bits) v = (v << 1) | static_cast<std::size_t>(b != 0);
    return v;
}

std::vector<cplx> apply_gate(std::vector<cplx> state, std::size_t n_wires, const Gate& g) {
    const CMatrix m = (g.name == "U") ? g.matrix : clifford_gate_matrix(g.name);
    const std::size_t k = g.wires.size();
    const std::size_t dk = std::size_t{1} << k;
    if (m.rows() != dk) throw DimensionMismatch("gate matrix vs wires");
    const std::size_t dim = state.size();
    if (dim != (std::size_t{1} << n_wires)) throw DimensionMismatch("state size");

    // Bit position of wire w inside the basis index (wire 0 is the MSB).
    std::vector<std::size_t> shift(k);
    for (std::size_t i = 0; i < k; ++i) shift[i] = n_wires - 1 - g.wires[i];

    std::vector<cplx> scratch(dk);
    std::vector<std::size_t> index(dk);
    // Iterate over assignments of the untouched wires.
    std::size_t touched_mask = 0;
    for (std::size_t i = 0; i < k; ++i) touched_mask |= std::size_t{1} << shift[i];
    for (std::size_t base = 0; base < dim; ++base) {
        if (base & touched_mask) continue;
        for (std::size_t t = 0; t < dk; ++t) {
            std::size_t idx = base;
            for (std::size_t i = 0; i < k; ++i)
                if ((t >> (k - 1 - i)) & 1u) idx |= std::size_t{1} << shift[i];
            index[t] = idx;
            scratch[t] = state[idx];
        }
        for (std::size_t r = 0; r < dk; ++r) {
            cplx acc(0.0, 0.0);
            for (std::size_t c = 0; c < dk; ++c) acc += m(r, c) * scratch[c];
            state[index[r]] = acc;
        }
    }
    return state;
}

std::vector<cplx> apply_circuit(std::vector<cplx> state, std::size_t n_wires,
                                const std::vector<Gate>& gates) {
    for (const auto& g : gates) state = apply_gate(std::move(state), n_wires, g);
    return state;
}

std::vector<MeasureBranch> measure_wires(const std::vector<cplx>& state, std::size_t n_wires,
                                         const std::vector<std::size_t>& wires) {
    const std::size_t dim = state.size();
    const std::size_t k = wires.size();
    const std::size_t n_out = std::size_t{1} << k;
    const std::size_t kept = n_wires - k;
    const std::size_t kept_dim = std::size_t{1} << kept;

    std::vector<std::size_t> shift(k);
    for (std::size_t i = 0; i < k; ++i) shift[i] = n_wires - 1 - wires[i];
    std::vector<bool> is_measured(n_wires, false);
    for (std::size_t w : wires) is_measured[w] = true;
    std::vector<std::size_t> kept_shift;  // basis shifts of kept wires, MSB first
    for (std::size_t w = 0; w < n_wires; ++w)
        if (!is_measured[w]) kept_shift.push_back(n_wires - 1 - w);

    std::vector<MeasureBranch> out;
    for (std::size_t o = 0; o < n_out; ++o) {
        MeasureBranch br;
        br.outcome = o;
        br.residual.assign(kept_dim, cplx(0.0, 0.0));
        std::size_t fixed = 0;
        for (std::size_t i = 0; i < k; ++i)
            if ((o >> (k - 1 - i)) & 1u) fixed |= std::size_t{1} << shift[i];
        for (std::size_t r = 0; r < kept_dim; ++r) {
            std::size_t idx = fixed;
            for (std::size_t i = 0; i < kept; ++i)
                if ((r >> (kept - 1 - i)) & 1u) idx |= std::size_t{1} << kept_shift[i];
            br.residual[r] = state[idx];
            br.prob += std::norm(state[idx]);
        }
        if (br.prob < 1e-14) continue;
        const double inv = 1.0 / std::sqrt(br.prob);
        for (auto& a : br.residual) a *= inv;
        out.push_back(std::move(br));
    }
    return out;
}

std::vector<int> prf_bits(const std::vector<int>& key_bits, std::uint64_t nonce,
                          std::size_t count) {
    // Keyed construction: FNV-1a over the key bits, SplitMix64 finalizer,
    // one output word per 64-bit block.
    std::uint64_t k = 1469598103934665603ULL;
    for (int b : key_bits) {
        k ^= static_cast<std::uint64_t>(b ? 0x5bu : 0xa4u);
        k *= 1099511628211ULL;
    }
    const std::uint64_t base = Rng::mix(k ^ Rng::mix(nonce ^ 0x9e3779b97f4a7c15ULL));
    std::vector<int> bits(count, 0);
    for (std::size_t i = 0; i < count; ++i) {
        const std::uint64_t word = Rng::mix(base + 0xbf58476d1ce4e5b9ULL * (i / 64 + 1));
        bits[i] = static_cast<int>((word >> (63 - (i % 64))) & 1u);
    }
    return bits;
}

std::pair<Ciphertext, std::vector<cplx>> QheBackend::eval_sample(const Ciphertext& ct,
                                                                 const EvalCircuit& c,
                                                                 const std::vector<cplx>& joint,
                                                                 std::size_t external_wires,
                                                                 std::uint64_t seed) {
    auto branches = eval_ensemble(ct, c, joint, external_wires);
    if (branches.empty()) throw DecodeFailure("no measurement branches");
    Rng rng(seed);
    double u = rng.uniform();
    std::size_t pick = branches.size() - 1;
    double acc = 0.0;
    for (std::size_t i = 0; i < branches.size(); ++i) {
        acc += branches[i].prob;
        if (u < acc) {
            pick = i;
            break;
        }
    }
    auto& br = branches[pick];
    if (auto* ideal = dynamic_cast<IdealBackend*>(this))
        ideal->commit_message(br.ct.nonce, br.message);
    return {br.ct, br.residual};
}

// ---------------------------------------------------------------------------
// Ideal backend

IdealBackend::IdealBackend(std::size_t message_bits, bool insecure)
    : QheBackend(insecure), ell_(message_bits) {
    if (ell_ == 0) throw Error("message length must be positive");
}

SecretKey IdealBackend::gen(std::size_t lambda, std::uint64_t seed) {
    if (lambda < 1) throw Error("security parameter must be >= 1");
    Rng rng = Rng(seed).split("ideal-gen");
    SecretKey sk;
    sk.bits.resize(lambda);
    for (auto& b : sk.bits) b = rng.bit() ? 1 : 0;
    sk.id = rng.next_u64();
    key_id_ = sk.id;
    key_generated_ = true;
    return sk;
}

Ciphertext IdealBackend::enc(const SecretKey& sk, const std::vector<int>& m) {
    if (!key_generated_ || sk.id != key_id_) throw WrongKey("unknown key for this session");
    if (m.size() != ell_) throw DimensionMismatch("message length");
    Ciphertext ct;
    ct.nonce = next_nonce_++;
    ct.payload.assign(ell_, 0);  // plaintext-independent bits
    ct.backend_tag = "ideal";
    table_[ct.nonce] = m;
    return ct;
}

std::vector<int> IdealBackend::dec(const SecretKey& sk, const Ciphertext& ct) {
    if (!key_generated_ || sk.id != key_id_) throw WrongKey("unknown key for this session");
    auto it = table_.find(ct.nonce);
    if (it == table_.end()) throw DecodeFailure("ciphertext not issued by this session");
    return it->second;
}

bool IdealBackend::supports(const EvalCircuit& c) const {
    (void)c;
    return true;  // any declared gate, including explicit unitaries
}

std::optional<std::vector<int>> IdealBackend::insecure_decrypt(const Ciphertext& ct) const {
    if (!insecure_) return std::nullopt;
    auto it = table_.find(ct.nonce);
    if (it == table_.end()) return std::nullopt;
    return it->second;
}

void IdealBackend::commit_message(std::uint64_t nonce, const std::vector<int>& m) {
    table_[nonce] = m;
}

std::vector<EvalBranch> IdealBackend::eval_ensemble(const Ciphertext& ct, const EvalCircuit& c,
                                                    const std::vector<cplx>& joint,
                                                    std::size_t external_wires) {
    c.validate();
    if (c.message_wires != ell_) throw DimensionMismatch("circuit message width");
    auto it = table_.find(ct.nonce);
    if (it == table_.end()) throw DecodeFailure("ciphertext not issued by this session");
    const std::vector<int>& m = it->second;

    const std::size_t n = ell_ + c.aux_wires + external_wires;
    if (joint.size() != (std::size_t{1} << (c.aux_wires + external_wires)))
        throw DimensionMismatch("joint state size");
    std::vector<cplx> msg(std::size_t{1} << ell_, cplx(0.0, 0.0));
    msg[value_of(m)] = 1.0;
    std::vector<cplx> state = kron_vec(msg, joint);
    state = apply_circuit(std::move(state), n, c.gates);

    const std::uint64_t fresh = next_nonce_++;
    std::vector<EvalBranch> out;
    for (auto& mb : measure_wires(state, n, c.output_wires)) {
        EvalBranch br;
        br.prob = mb.prob;
        br.message = bits_of(mb.outcome, ell_);
        br.ct.nonce = fresh;
        br.ct.payload.assign(ell_, 0);
        br.ct.backend_tag = "ideal";
        br.residual = std::move(mb.residual);
        br.kept_wires = n - ell_;
        out.push_back(std::move(br));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Clifford backend

CliffordBackend::CliffordBackend(std::size_t message_bits, bool insecure,
                                 bool broken_identity_prf)
    : QheBackend(insecure), ell_(message_bits), broken_prf_(broken_identity_prf) {
    if (ell_ == 0) throw Error("message length must be positive");
}

SecretKey CliffordBackend::gen(std::size_t lambda, std::uint64_t seed) {
    if (lambda < 1) throw Error("security parameter must be >= 1");
    Rng rng = Rng(seed).split("clifford-gen");
    SecretKey sk;
    sk.bits.resize(lambda);
    for (auto& b : sk.bits) b = rng.bit() ? 1 : 0;
    sk.id = rng.next_u64();
    session_key_ = sk;
    return sk;
}

std::vector<int> CliffordBackend::pad_bits(const SecretKey& sk, std::uint64_t nonce) const {
    if (broken_prf_) return std::vector<int>(2 * ell_, 0);
    return prf_bits(sk.bits, nonce, 2 * ell_);
}

Ciphertext CliffordBackend::enc(const SecretKey& sk, const std::vector<int>& m) {
    if (m.size() != ell_) throw DimensionMismatch("message length");
    Ciphertext ct;
    ct.nonce = next_nonce_++;
    ct.backend_tag = "clifford";
    const std::vector<int> pad = pad_bits(sk, ct.nonce);
    ct.payload.resize(ell_);
    for (std::size_t i = 0; i < ell_; ++i) ct.payload[i] = m[i] ^ pad[i];
    if (insecure_) pads_[ct.nonce] = pad;
    return ct;
}

std::vector<int> CliffordBackend::dec(const SecretKey& sk, const Ciphertext& ct) {
    if (ct.payload.size() != ell_) throw DecodeFailure("payload length");
    auto rec = eval_records_.find(ct.nonce);
    if (rec == eval_records_.end()) {
        const std::vector<int> pad = pad_bits(sk, ct.nonce);
        std::vector<int> m(ell_);
        for (std::size_t i = 0; i < ell_; ++i) m[i] = ct.payload[i] ^ pad[i];
        return m;  // wrong keys garble silently
    }
    // Propagate the parent pad through the recorded circuit's tableau.
    const EvalCircuit& c = rec->second.circuit;
    const std::vector<int> pad = pad_bits(sk, rec->second.parent_nonce);
    PauliFrame frame(ell_ + c.aux_wires);
    for (std::size_t i = 0; i < ell_; ++i) {
        frame.x[i] = pad[i];
        frame.z[i] = pad[ell_ + i];
    }
    for (const auto& g : c.gates) conjugate(frame, CliffordGate{g.name, g.wires});
    std::vector<int> m(ell_);
    for (std::size_t i = 0; i < ell_; ++i) m[i] = ct.payload[i] ^ frame.x[c.output_wires[i]];
    return m;
}

bool CliffordBackend::supports(const EvalCircuit& c) const {
    for (const auto& g : c.gates)
        if (!is_clifford_gate_name(g.name)) return false;
    return true;
}

std::optional<std::vector<int>> CliffordBackend::insecure_decrypt(const Ciphertext& ct) const {
    if (!insecure_) return std::nullopt;
    auto it = pads_.find(ct.nonce);
    if (it == pads_.end()) return std::nullopt;
    std::vector<int> m(ell_);
    for (std::size_t i = 0; i < ell_; ++i) m[i] = ct.payload[i] ^ it->second[i];
    return m;
}

std::vector<EvalBranch> CliffordBackend::eval_ensemble(const Ciphertext& ct, const EvalCircuit& c,
                                                       const std::vector<cplx>& joint,
                                                       std::size_t external_wires) {
    c.validate();
    if (c.message_wires != ell_) throw DimensionMismatch("circuit message width");
    if (!supports(c)) throw UnsupportedCircuit("non-Clifford circuit on the clifford backend");
    if (eval_records_.count(ct.nonce)) throw UnsupportedCircuit("multi-hop evaluation");
    if (ct.payload.size() != ell_) throw DecodeFailure("payload length");

    const std::size_t n = ell_ + c.aux_wires + external_wires;
    if (joint.size() != (std::size_t{1} << (c.aux_wires + external_wires)))
        throw DimensionMismatch("joint state size");
    std::vector<cplx> msg(std::size_t{1} << ell_, cplx(0.0, 0.0));
    msg[value_of(ct.payload)] = 1.0;  // padded computational-basis input
    std::vector<cplx> state = kron_vec(msg, joint);
    state = apply_circuit(std::move(state), n, c.gates);

    const std::uint64_t fresh = next_nonce_++;
    eval_records_[fresh] = EvalRecord{ct.nonce, c};

    std::vector<EvalBranch> out;
    for (auto& mb : measure_wires(state, n, c.output_wires)) {
        EvalBranch br;
        br.prob = mb.prob;
        br.ct.nonce = fresh;
        br.ct.payload = bits_of(mb.outcome, ell_);
        br.ct.backend_tag = "clifford";
        if (session_key_) br.message = dec(*session_key_, br.ct);
        br.residual = std::move(mb.residual);
        br.kept_wires = n - ell_;
        out.push_back(std::move(br));
    }
    return out;
}

std::unique_ptr<QheBackend> make_backend(const std::string& name, std::size_t message_bits,
                                         bool insecure) {
    if (name == "ideal") return std::make_unique<IdealBackend>(message_bits, insecure);
    if (name == "clifford") return std::make_unique<CliffordBackend>(message_bits, insecure);
    throw Error("unknown backend: " + name);
}

namespace {

std::pair<double, double> wilson_interval(double phat, std::size_t n) {
    if (n == 0) return {0.0, 1.0};
    const double z = 1.959963984540054;  // 95%
    const double z2 = z * z;
    const double denom = 1.0 + z2 / static_cast<double>(n);
    const double center = phat + z2 / (2.0 * static_cast<double>(n));
    const double half =
        z * std::sqrt(phat * (1.0 - phat) / static_cast<double>(n) +
                      z2 / (4.0 * static_cast<double>(n) * static_cast<double>(n)));
    return {(center - half) / denom, (center + half) / denom};
}

}  // namespace

SecurityReport security_harness(const std::function<std::unique_ptr<QheBackend>()>& factory,
                                const std::vector<int>& m0, const std::vector<int>& m1,
                                const Distinguisher& d, std::size_t trials, std::size_t lambda,
                                std::uint64_t seed) {
    Rng root(seed);
    std::size_t hits0 = 0, hits1 = 0;
    for (std::size_t t = 0; t < trials; ++t) {
        for (int arm = 0; arm < 2; ++arm) {
            Rng trial_rng = root.split(arm ? "arm1" : "arm0").split(t);
            auto backend = factory();
            SecretKey sk = backend->gen(lambda, trial_rng.next_u64());
            const Ciphertext challenge = backend->enc(sk, arm ? m1 : m0);
            EncOracle oracle = [&backend, &sk](const std::vector<int>& m) {
                return backend->enc(sk, m);
            };
            const int verdict = d(challenge, oracle, trial_rng);
            if (verdict) (arm ? hits1 : hits0)++;
        }
    }
    SecurityReport r;
    r.trials = trials;
    r.p_accept_m0 = trials ? static_cast<double>(hits0) / static_cast<double>(trials) : 0.0;
    r.p_accept_m1 = trials ? static_cast<double>(hits1) / static_cast<double>(trials) : 0.0;
    r.advantage = std::abs(r.p_accept_m0 - r.p_accept_m1);
    const auto [lo0, hi0] = wilson_interval(r.p_accept_m0, trials);
    const auto [lo1, hi1] = wilson_interval(r.p_accept_m1, trials);
    // Conservative interval for |p0 - p1| from the per-arm intervals.
    r.wilson_high = std::max({hi0 - lo1, hi1 - lo0, 0.0});
    r.wilson_low = std::max({lo0 - hi1, lo1 - hi0, 0.0});
    return r;
}

}  // namespace nlg
