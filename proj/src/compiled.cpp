// SPDX-License-Identifier: Apache-2.0
#include "nlg/compiled.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nlg/quantum.hpp"

namespace nlg {

std::size_t message_bits_for(const Game& g) {
    const std::size_t top = std::max(g.nA, g.kA) - 1;
    std::size_t bits = 1;
    while ((std::size_t{1} << bits) <= top) ++bits;
    return bits;
}

Ciphertext ProverStrategy::first_round(const Ciphertext& xi) {
    if (phase_ != 0) throw ProtocolViolation("first_round called twice");
    phase_ = 1;
    return do_first_round(xi);
}

std::size_t ProverStrategy::second_round(std::size_t y) {
    if (phase_ != 1) throw ProtocolViolation("second_round out of order");
    phase_ = 2;
    return do_second_round(y);
}

std::string Transcript::to_json_line() const {
    std::ostringstream os;
    os << "{\"x\":" << x << ",\"y\":" << y << ",\"xi_hex\":\"" << xi.hex() << "\",\"alpha_hex\":\""
       << alpha.hex() << "\",\"b\":" << b << ",\"a\":";
    if (a)
        os << *a;
    else
        os << "null";
    os << ",\"accept\":" << (accept ? "true" : "false") << ",\"seed\":" << seed << "}";
    return os.str();
}

VerifierSession::VerifierSession(const Game& g, QheBackend& backend, std::size_t lambda,
                                 std::uint64_t seed)
    : game_(g), backend_(backend), seed_(seed) {
    Rng rng = Rng(seed).split("verifier");
    // Draw (x, y) from mu.
    double u = rng.uniform();
    double acc = 0.0;
    x_ = g.nA - 1;
    y_ = g.nB - 1;
    bool picked = false;
    for (std::size_t x = 0; x < g.nA && !picked; ++x)
        for (std::size_t y = 0; y < g.nB && !picked; ++y) {
            acc += g.mu_at(x, y);
            if (u < acc) {
                x_ = x;
                y_ = y;
                picked = true;
            }
        }
    sk_ = backend_.gen(std::max<std::size_t>(8, lambda), rng.next_u64());
}

Ciphertext VerifierSession::challenge() {
    if (state_ != State::Init) throw ProtocolViolation("challenge already sent");
    state_ = State::SentXi;
    xi_ = backend_.enc(sk_, bits_of(x_, backend_.message_bits()));
    return xi_;
}

void VerifierSession::receive_alpha(const Ciphertext& alpha) {
    if (state_ != State::SentXi) throw ProtocolViolation("alpha out of order");
    alpha_ = alpha;
}

std::size_t VerifierSession::bob_question() {
    if (state_ != State::SentXi) throw ProtocolViolation("bob question out of order");
    state_ = State::SentY;
    return y_;
}

Transcript VerifierSession::finish(std::size_t b) {
    if (state_ != State::SentY) throw ProtocolViolation("finish out of order");
    state_ = State::Done;
    Transcript t;
    t.x = x_;
    t.y = y_;
    t.xi = xi_;
    t.alpha = alpha_;
    t.b = b;
    t.seed = seed_;
    try {
        const std::vector<int> a_bits = backend_.dec(sk_, alpha_);
        const std::size_t a = value_of(a_bits);
        if (a < game_.kA) t.a = a;
    } catch (const Error&) {
        // Decode failures score as reject (protocol step 5).
    }
    t.accept = t.a && b < game_.kB && game_.v_at(x_, y_, *t.a, b) == 1;
    return t;
}

Transcript run_session(const Game& g, ProverStrategy& prover, QheBackend& backend,
                       std::size_t lambda, std::uint64_t seed) {
    VerifierSession session(g, backend, lambda, seed);
    const Ciphertext xi = session.challenge();
    session.receive_alpha(prover.first_round(xi));
    const std::size_t y = session.bob_question();
    return session.finish(prover.second_round(y));
}

// ---------------------------------------------------------------------------
// Exact evaluation

ExactValueResult exact_value(const Game& g, const WhiteBoxProver& prover, QheBackend& backend,
                             std::size_t lambda) {
    (void)lambda;
    if (!prover.instrument || !prover.bob_povm)
        throw NotWhiteBox("prover does not expose instrument and POVMs");
    if (prover.realizable && !prover.realizable(backend))
        throw UnsupportedCircuit("prover not realizable on backend " + backend.name());

    ExactValueResult out;
    out.data.dim = prover.dim_out;
    out.data.nA = g.nA;
    out.data.kA = g.kA;
    out.data.nB = g.nB;
    out.data.kB = g.kB;
    out.data.sigma.assign(g.nA * g.kA, CMatrix(prover.dim_out, prover.dim_out));
    for (std::size_t x = 0; x < g.nA; ++x) {
        for (const auto& br : prover.instrument(x)) {
            if (br.answer >= g.kA) throw NotWhiteBox("branch answer outside O_A");
            CMatrix acc(prover.dim_out, prover.dim_out);
            for (const auto& k : br.kraus) acc += k * prover.rho * k.adjoint();
            out.data.sigma[x * g.kA + br.answer] += acc;
        }
        double mass = 0.0;
        for (std::size_t a = 0; a < g.kA; ++a)
            mass += out.data.sigma[x * g.kA + a].trace().real();
        out.answer_mass.push_back(mass);
    }
    out.data.bob.resize(g.nB);
    for (std::size_t y = 0; y < g.nB; ++y) out.data.bob[y] = prover.bob_povm(y);
    out.correlation = out.data.correlation();
    out.omega = winning_probability(g, out.correlation);
    return out;
}

// ---------------------------------------------------------------------------
// Honest prover

namespace {

std::size_t wire_count_for(std::size_t dim) {
    std::size_t w = 0;
    while ((std::size_t{1} << w) < dim) ++w;
    return std::max<std::size_t>(w, 1);
}

// POVM padded to 2^w dims; the padding subspace is folded into outcome 0.
std::vector<CMatrix> pad_povm(const std::vector<CMatrix>& povm, std::size_t dpad) {
    const std::size_t d = povm[0].rows();
    std::vector<CMatrix> out;
    for (std::size_t a = 0; a < povm.size(); ++a) {
        CMatrix m(dpad, dpad);
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j) m(i, j) = povm[a](i, j);
        if (a == 0)
            for (std::size_t i = d; i < dpad; ++i) m(i, i) = 1.0;
        out.push_back(std::move(m));
    }
    return out;
}

class HonestSessionProver : public ProverStrategy {
  public:
    HonestSessionProver(const Game& g, const QuantumStrategy& strategy, QheBackend& backend,
                        std::uint64_t seed)
        : strategy_(strategy), backend_(backend), rng_(Rng(seed).split("honest")) {
        ell_ = message_bits_for(g);
        alice_wires_ = wire_count_for(strategy.dA);
        bob_wires_ = wire_count_for(strategy.dB);
        circuit_ = honest_alice_circuit(strategy, ell_);
    }

  protected:
    Ciphertext do_first_round(const Ciphertext& xi) override {
        const std::size_t dA = std::size_t{1} << alice_wires_;
        const std::size_t dB = std::size_t{1} << bob_wires_;
        std::vector<cplx> psi_pad(dA * dB, cplx(0.0, 0.0));
        for (std::size_t i = 0; i < strategy_.dA; ++i)
            for (std::size_t j = 0; j < strategy_.dB; ++j)
                psi_pad[i * dB + j] = strategy_.psi[i * strategy_.dB + j];
        std::vector<cplx> scratch0(std::size_t{1} << ell_, cplx(0.0, 0.0));
        scratch0[0] = 1.0;
        std::vector<cplx> joint = kron_vec(scratch0, psi_pad);
        auto [ct, residual] = backend_.eval_sample(xi, circuit_, joint, bob_wires_,
                                                   rng_.next_u64());
        kept_ = std::move(residual);
        return ct;
    }

    std::size_t do_second_round(std::size_t y) override {
        const std::size_t dB = std::size_t{1} << bob_wires_;
        const std::size_t rest = kept_.size() / dB;
        CMatrix rho_b(dB, dB);
        for (std::size_t r = 0; r < rest; ++r)
            for (std::size_t j = 0; j < dB; ++j)
                for (std::size_t j2 = 0; j2 < dB; ++j2)
                    rho_b(j, j2) += kept_[r * dB + j] * std::conj(kept_[r * dB + j2]);
        auto povm = pad_povm(strategy_.bob[y], dB);
        double u = rng_.uniform();
        double acc = 0.0;
        for (std::size_t b = 0; b < povm.size(); ++b) {
            acc += std::max(0.0, (povm[b] * rho_b).trace().real());
            if (u < acc) return b;
        }
        return povm.size() - 1;
    }

  private:
    QuantumStrategy strategy_;
    QheBackend& backend_;
    Rng rng_;
    std::size_t ell_ = 0, alice_wires_ = 0, bob_wires_ = 0;
    EvalCircuit circuit_;
    std::vector<cplx> kept_;
};

}  // namespace

EvalCircuit honest_alice_circuit(const QuantumStrategy& strategy, std::size_t message_bits) {
    const std::size_t ell = message_bits;
    const std::size_t alice_wires = wire_count_for(strategy.dA);
    const std::size_t dA = std::size_t{1} << alice_wires;
    const std::size_t n_questions = strategy.alice.size();
    const std::size_t kA = n_questions ? strategy.alice[0].size() : 0;
    const std::size_t block = (std::size_t{1} << ell) * dA;  // scratch (x) alice

    // Controlled measurement unitary: message value q selects W_q acting on
    // scratch (x) alice; W_q rotates sqrt(M_qa)|i> into |a>_scratch (x) ... .
    CMatrix u(block * (std::size_t{1} << ell), block * (std::size_t{1} << ell));
    for (std::size_t q = 0; q < (std::size_t{1} << ell); ++q) {
        CMatrix wq = CMatrix::identity(block);
        if (q < n_questions) {
            CMatrix iso(block, dA);
            auto padded = pad_povm(strategy.alice[q], dA);
            for (std::size_t a = 0; a < kA; ++a) {
                CMatrix root = mat_sqrt_psd(padded[a], 1e-8);
                for (std::size_t i = 0; i < dA; ++i)
                    for (std::size_t r = 0; r < dA; ++r) iso(a * dA + r, i) += root(r, i);
            }
            wq = complete_unitary(iso);
        }
        for (std::size_t r = 0; r < block; ++r)
            for (std::size_t c = 0; c < block; ++c)
                u(q * block + r, q * block + c) = wq(r, c);
    }

    EvalCircuit circuit;
    circuit.message_wires = ell;
    circuit.aux_wires = ell + alice_wires;
    Gate g;
    g.name = "U";
    for (std::size_t w = 0; w < 2 * ell + alice_wires; ++w) g.wires.push_back(w);
    g.matrix = std::move(u);
    circuit.gates.push_back(std::move(g));
    for (std::size_t i = 0; i < ell; ++i) circuit.output_wires.push_back(ell + i);
    circuit.validate();
    return circuit;
}

WhiteBoxProver honest_prover(const QuantumStrategy& strategy, QheBackend& backend) {
    strategy.validate();
    const std::size_t dB = strategy.dB;

    // The backend must support the round-1 measurement circuit family.
    {
        EvalCircuit c = honest_alice_circuit(strategy, backend.message_bits());
        if (!backend.supports(c))
            throw UnsupportedCircuit(
                "question-controlled measurement selection is not expressible on backend " +
                backend.name());
    }

    WhiteBoxProver p;
    p.name = "honest";
    p.dim_in = strategy.dA * strategy.dB;
    p.dim_out = dB;
    std::vector<cplx> psi = strategy.psi;
    p.rho = CMatrix::outer(psi, psi);
    QuantumStrategy strat = strategy;
    p.instrument = [strat](std::size_t x) {
        std::vector<WhiteBoxProver::Branch> branches;
        const std::size_t dA = strat.dA, dB = strat.dB;
        for (std::size_t a = 0; a < strat.alice[x].size(); ++a) {
            WhiteBoxProver::Branch br;
            br.answer = a;
            CMatrix root = mat_sqrt_psd(strat.alice[x][a], 1e-8);
            // Kraus (<i|_A sqrt(M) (x) 1_B): H_A (x) H_B -> H_B.
            for (std::size_t i = 0; i < dA; ++i) {
                CMatrix k(dB, dA * dB);
                for (std::size_t ip = 0; ip < dA; ++ip) {
                    const cplx w = root(i, ip);
                    if (w == cplx(0.0, 0.0)) continue;
                    for (std::size_t j = 0; j < dB; ++j) k(j, ip * dB + j) += w;
                }
                br.kraus.push_back(std::move(k));
            }
            branches.push_back(std::move(br));
        }
        return branches;
    };
    p.bob_povm = [strat](std::size_t y) { return strat.bob[y]; };
    p.realizable = [strat](const QheBackend& b) {
        EvalCircuit c = honest_alice_circuit(strat, b.message_bits());
        return b.supports(c);
    };
    p.make_session = [strat](const Game& g, QheBackend& b, std::uint64_t seed) {
        return std::unique_ptr<ProverStrategy>(new HonestSessionProver(g, strat, b, seed));
    };
    return p;
}

// ---------------------------------------------------------------------------
// Adversary battery

namespace {

// Lemma-style instrument for a fixed subnormalized family: Phi_a(rho) =
// tr(rho) sigma_a, realizable without reading the question.
std::vector<WhiteBoxProver::Branch> constant_instrument(const std::vector<CMatrix>& sigma_a) {
    std::vector<WhiteBoxProver::Branch> out;
    const std::size_t d = sigma_a[0].rows();
    for (std::size_t a = 0; a < sigma_a.size(); ++a) {
        WhiteBoxProver::Branch br;
        br.answer = a;
        EigResult e = hermitian_eig(sigma_a[a], 1e-7);
        for (std::size_t t = 0; t < d; ++t) {
            const double lam = e.eigenvalues[t];
            if (lam <= 1e-14) continue;
            for (std::size_t j = 0; j < d; ++j) {
                CMatrix k(d, d);
                for (std::size_t i = 0; i < d; ++i)
                    k(i, j) = std::sqrt(lam) * e.eigenvectors(i, t);
                br.kraus.push_back(std::move(k));
            }
        }
        out.push_back(std::move(br));
    }
    return out;
}

WhiteBoxProver sequential_cheater(const std::string& name, const std::vector<CMatrix>& sigma_a,
                                  const std::vector<std::vector<CMatrix>>& bob) {
    WhiteBoxProver p;
    p.name = name;
    const std::size_t d = sigma_a[0].rows();
    p.dim_in = p.dim_out = d;
    CMatrix rho(d, d);
    for (const auto& s : sigma_a) rho += s;  // trace 1 by construction
    p.rho = rho;
    auto branches = constant_instrument(sigma_a);
    p.instrument = [branches](std::size_t) { return branches; };
    p.bob_povm = [bob](std::size_t y) { return bob[y]; };
    p.realizable = [](const QheBackend&) { return true; };  // never touches the ciphertext
    return p;
}

// Best-effort ciphertext guesser: echoes the question ciphertext back as its
// answer (the only valid ciphertext it holds), so the decrypted answer is
// a = x; keeps its quantum state untouched for Bob's round.
WhiteBoxProver echo_prover(const Game& g, const CMatrix& rho_b,
                           const std::vector<std::vector<CMatrix>>& bob) {
    if (g.nA > g.kA) throw NotWhiteBox("echo prover needs questions to decode as answers");
    WhiteBoxProver p;
    p.name = "ciphertext-echo";
    const std::size_t d = rho_b.rows();
    p.dim_in = p.dim_out = d;
    p.rho = rho_b;
    p.instrument = [d](std::size_t x) {
        WhiteBoxProver::Branch br;
        br.answer = x;
        br.kraus = {CMatrix::identity(d)};
        return std::vector<WhiteBoxProver::Branch>{br};
    };
    p.bob_povm = [bob](std::size_t y) { return bob[y]; };
    p.realizable = [](const QheBackend&) { return true; };
    return p;
}

// With the insecure flag the prover reads x in the clear and replays the
// non-signaling LP optimum on classical registers |x,a>.
WhiteBoxProver key_stealing_prover(const Game& g, const Correlation& ns_opt) {
    WhiteBoxProver p;
    p.name = "key-stealer";
    const std::size_t d = g.nA * g.kA;
    p.dim_in = p.dim_out = d;
    CMatrix rho(d, d);
    rho(0, 0) = 1.0;
    p.rho = rho;
    Game game = g;
    Correlation c = ns_opt;
    p.instrument = [game, c, d](std::size_t x) {
        std::vector<WhiteBoxProver::Branch> out;
        for (std::size_t a = 0; a < game.kA; ++a) {
            double pa = 0.0;
            for (std::size_t b = 0; b < game.kB; ++b) pa += c.at(x, 0, a, b);
            WhiteBoxProver::Branch br;
            br.answer = a;
            CMatrix k(d, d);
            // Send the fixed initial register to |x,a> with weight sqrt(p(a|x)).
            k(x * game.kA + a, 0) = std::sqrt(std::max(0.0, pa));
            br.kraus = {k};
            out.push_back(std::move(br));
        }
        return out;
    };
    p.bob_povm = [game, c, d](std::size_t y) {
        std::vector<CMatrix> povm(game.kB, CMatrix(d, d));
        for (std::size_t x = 0; x < game.nA; ++x)
            for (std::size_t a = 0; a < game.kA; ++a) {
                double pa = 0.0;
                for (std::size_t b = 0; b < game.kB; ++b) pa += c.at(x, y, a, b);
                for (std::size_t b = 0; b < game.kB; ++b) {
                    const double cond = pa > 1e-12 ? c.at(x, y, a, b) / pa
                                                   : 1.0 / static_cast<double>(game.kB);
                    povm[b](x * game.kA + a, x * game.kA + a) = cond;
                }
            }
        return povm;
    };
    p.realizable = [](const QheBackend& b) { return b.insecure(); };
    return p;
}

QuantumStrategy battery_base_strategy(const Game& g) {
    if (g.name == "chsh") return chsh_optimal_strategy();
    if (g.name == "magic-square") return magic_square_perfect_strategy();
    return seesaw_lower_bound(g, 2, 4, 60, 0xb17b00f5u).strategy;
}

}  // namespace

BatteryReport adversary_battery(const Game& g, const std::string& backend_name,
                                std::size_t lambda, bool insecure) {
    g.validate();
    BatteryReport report;
    report.insecure = insecure;
    report.npa_level1_bound = npa_upper_bound(g, 1).value;
    report.nonsignaling_value = nlg::nonsignaling_value(g);

    const QuantumStrategy base = battery_base_strategy(g);
    const SequentialQuantumStrategy forward = sequential_from_quantum(base);

    std::vector<WhiteBoxProver> provers;
    // x-averaged honest data: a realizable ciphertext-ignoring cheat.
    {
        std::vector<CMatrix> sig(g.kA, CMatrix(forward.dim, forward.dim));
        for (std::size_t a = 0; a < g.kA && a < forward.kA; ++a) {
            for (std::size_t x = 0; x < forward.nA; ++x) sig[a] += forward.sigma_at(x, a);
            sig[a] = sig[a] * cplx(1.0 / static_cast<double>(forward.nA), 0.0);
        }
        provers.push_back(sequential_cheater("sequential-cheater-avg", sig, forward.bob));
    }
    // Pretend the question was x0.
    for (std::size_t x0 = 0; x0 < g.nA; ++x0) {
        std::vector<CMatrix> sig(g.kA, CMatrix(forward.dim, forward.dim));
        for (std::size_t a = 0; a < g.kA && a < forward.kA; ++a) sig[a] = forward.sigma_at(x0, a);
        provers.push_back(sequential_cheater("sequential-cheater-x" + std::to_string(x0), sig,
                                             forward.bob));
    }
    if (g.nA <= g.kA) {
        CMatrix rho_b(forward.dim, forward.dim);
        rho_b = forward.sigma_x(0);
        provers.push_back(echo_prover(g, rho_b, forward.bob));
    }
    if (insecure)
        provers.push_back(key_stealing_prover(g, nonsignaling_optimal_correlation(g)));

    auto backend = make_backend(backend_name, message_bits_for(g), insecure);
    for (auto& p : provers) {
        const bool stealer = p.name == "key-stealer";
        BatteryEntry entry;
        entry.prover = p.name;
        entry.insecure_only = stealer;
        ExactValueResult res = exact_value(g, p, *backend, lambda);
        entry.omega = res.omega;
        entry.strong_nonsig_deg3 = strong_nonsig_residual(res.data, 3).max_residual;
        if (!stealer) report.max_secure_omega = std::max(report.max_secure_omega, entry.omega);
        report.entries.push_back(std::move(entry));
    }
    return report;
}

std::vector<ValueSequencePoint> value_sequence(
    const Game& g, const std::function<WhiteBoxProver(std::size_t lambda)>& prover_family,
    const std::vector<std::size_t>& lambdas, const std::string& backend_name) {
    if (lambdas.empty()) throw Error("lambda list must be nonempty");
    std::vector<ValueSequencePoint> out;
    for (std::size_t lam : lambdas) {
        auto backend = make_backend(backend_name, message_bits_for(g), false);
        WhiteBoxProver p = prover_family(lam);
        ValueSequencePoint pt;
        pt.lambda = lam;
        pt.omega = exact_value(g, p, *backend, lam).omega;
        out.push_back(pt);
    }
    for (std::size_t i = out.size(); i-- > 0;) {
        const double next_min = (i + 1 < out.size()) ? out[i + 1].running_tail_min : out[i].omega;
        const double next_max = (i + 1 < out.size()) ? out[i + 1].running_tail_max : out[i].omega;
        out[i].running_tail_min = std::min(out[i].omega, next_min);
        out[i].running_tail_max = std::max(out[i].omega, next_max);
    }
    return out;
}

SessionStats run_sessions(const Game& g, const WhiteBoxProver& prover,
                          const std::string& backend_name, std::size_t lambda,
                          std::size_t sessions, std::uint64_t seed, bool keep_transcripts) {
    if (!prover.make_session) throw NotWhiteBox("prover has no session realization");
    SessionStats stats;
    stats.sessions = sessions;
    Rng root(seed);
    for (std::size_t i = 0; i < sessions; ++i) {
        Rng srng = root.split("session").split(i);
        auto backend = make_backend(backend_name, message_bits_for(g), false);
        auto session_prover = prover.make_session(g, *backend, srng.next_u64());
        Transcript t = run_session(g, *session_prover, *backend, lambda, srng.next_u64());
        if (t.accept) ++stats.accepts;
        if (keep_transcripts) stats.transcripts.push_back(std::move(t));
    }
    stats.accept_rate =
        sessions ? static_cast<double>(stats.accepts) / static_cast<double>(sessions) : 0.0;
    return stats;
}

}  // namespace nlg
