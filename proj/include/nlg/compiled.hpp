// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "nlg/games.hpp"
#include "nlg/qhe.hpp"
#include "nlg/sequential.hpp"
#include "nlg/values.hpp"

namespace nlg {

// Message length for a game: questions and answers ride the same message
// space M (supserset of I_A and O_A).
std::size_t message_bits_for(const Game& g);

// Black-box prover: first_round exactly once, then second_round exactly
// once. One instance serves one session.
class ProverStrategy {
  public:
    virtual ~ProverStrategy() = default;
    Ciphertext first_round(const Ciphertext& xi);
    std::size_t second_round(std::size_t y);

  protected:
    virtual Ciphertext do_first_round(const Ciphertext& xi) = 0;
    virtual std::size_t do_second_round(std::size_t y) = 0;

  private:
    int phase_ = 0;
};

struct Transcript {
    std::size_t x = 0, y = 0;
    Ciphertext xi, alpha;
    std::size_t b = 0;
    std::optional<std::size_t> a;  // absent on decode failure
    bool accept = false;
    std::uint64_t seed = 0;

    std::string to_json_line() const;
};

// Verifier state machine for one compiled-game session.
class VerifierSession {
  public:
    enum class State { Init, SentXi, SentY, Done };

    VerifierSession(const Game& g, QheBackend& backend, std::size_t lambda, std::uint64_t seed);
    Ciphertext challenge();                 // Init -> SentXi
    void receive_alpha(const Ciphertext&);  // stores prover's first reply
    std::size_t bob_question();             // SentXi -> SentY
    Transcript finish(std::size_t b);       // SentY -> Done, decide accept
    State state() const { return state_; }

  private:
    const Game& game_;
    QheBackend& backend_;
    State state_ = State::Init;
    SecretKey sk_;
    std::size_t x_ = 0, y_ = 0;
    Ciphertext xi_, alpha_;
    std::uint64_t seed_ = 0;
};

Transcript run_session(const Game& g, ProverStrategy& prover, QheBackend& backend,
                       std::size_t lambda, std::uint64_t seed);

// White-box prover: the first-round behavior per decrypted question is an
// instrument (branches labeled by the decrypted answer), Bob's round is a
// POVM family on the residual register. Equations (sigma_xa, B_yb) are
// evaluated directly from this data.
struct WhiteBoxProver {
    std::string name;
    std::size_t dim_in = 0, dim_out = 0;
    CMatrix rho;  // initial state on dim_in
    struct Branch {
        std::size_t answer = 0;
        std::vector<CMatrix> kraus;  // dim_out x dim_in
    };
    std::function<std::vector<Branch>(std::size_t x)> instrument;
    std::function<std::vector<CMatrix>(std::size_t y)> bob_povm;
    // True when the prover's first-round circuit family is expressible on
    // the named backend.
    std::function<bool(const QheBackend&)> realizable;
    // Session-path realization (optional).
    std::function<std::unique_ptr<ProverStrategy>(const Game&, QheBackend&, std::uint64_t seed)>
        make_session;
};

struct ExactValueResult {
    double omega = 0.0;
    Correlation correlation;
    SequentialQuantumStrategy data;            // extracted sigma_xa and B_yb
    std::vector<double> answer_mass;           // sum_a tr sigma_xa per x (should be 1)
};

// Exact evaluation of a white-box prover; requires the ideal backend (the
// nonce space is enumerable and encryption is deterministic per session).
ExactValueResult exact_value(const Game& g, const WhiteBoxProver& prover, QheBackend& backend,
                             std::size_t lambda);

// Honest prover compiled from a nonlocal strategy: round 1 homomorphically
// evaluates Alice's measurement, round 2 measures Bob's POVM on the kept
// register. Throws UnsupportedCircuit if the backend cannot express the
// Alice measurement circuits.
WhiteBoxProver honest_prover(const QuantumStrategy& strategy, QheBackend& backend);

// The round-1 measurement circuit the honest prover asks the backend to
// evaluate (exposed for the QHE correctness tests).
EvalCircuit honest_alice_circuit(const QuantumStrategy& strategy, std::size_t message_bits);

struct BatteryEntry {
    std::string prover;
    double omega = 0.0;
    double strong_nonsig_deg3 = 0.0;  // max over x,x', monomial degree <= 3
    bool insecure_only = false;
};

struct BatteryReport {
    std::vector<BatteryEntry> entries;
    double max_secure_omega = 0.0;
    double npa_level1_bound = 0.0;
    double nonsignaling_value = 0.0;
    bool insecure = false;
};

BatteryReport adversary_battery(const Game& g, const std::string& backend_name,
                                std::size_t lambda, bool insecure);

struct ValueSequencePoint {
    std::size_t lambda = 0;
    double omega = 0.0;
    double running_tail_min = 0.0;  // min over this and later lambdas
    double running_tail_max = 0.0;
};

std::vector<ValueSequencePoint> value_sequence(
    const Game& g, const std::function<WhiteBoxProver(std::size_t lambda)>& prover_family,
    const std::vector<std::size_t>& lambdas, const std::string& backend_name);

// Monte-Carlo acceptance over sessions (black-box path).
struct SessionStats {
    std::size_t sessions = 0, accepts = 0;
    double accept_rate = 0.0;
    std::vector<Transcript> transcripts;  // filled when keep_transcripts
};

SessionStats run_sessions(const Game& g, const WhiteBoxProver& prover,
                          const std::string& backend_name, std::size_t lambda,
                          std::size_t sessions, std::uint64_t seed,
                          bool keep_transcripts = false);

}  // namespace nlg
