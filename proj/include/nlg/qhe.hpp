// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "nlg/clifford.hpp"
#include "nlg/numerics.hpp"
#include "nlg/quantum.hpp"

namespace nlg {

struct SecretKey {
    std::vector<int> bits;
    std::uint64_t id = 0;
};

// Wire format: nonce (8 bytes big-endian counter) || payload (ceil(l/8)
// bytes, big-endian bit packing).
struct Ciphertext {
    std::uint64_t nonce = 0;
    std::vector<int> payload;
    std::string backend_tag;

    std::vector<std::uint8_t> wire_bytes() const;
    std::string hex() const;
};

// Circuit gates: named Clifford gates, or "U" with an explicit unitary on
// the listed wires (ideal backend only).
struct Gate {
    std::string name;
    std::vector<std::size_t> wires;
    CMatrix matrix;  // only for name == "U"
};

struct EvalCircuit {
    std::size_t message_wires = 0;  // l
    std::size_t aux_wires = 0;      // a_C
    std::vector<Gate> gates;
    std::vector<std::size_t> output_wires;  // exactly l wires, MSB first

    void validate() const;
    std::uint64_t content_id() const;
};

// Statevector engine. Wire 0 carries the most significant index bit.
std::vector<cplx> apply_gate(std::vector<cplx> state, std::size_t n_wires, const Gate& g);
std::vector<cplx> apply_circuit(std::vector<cplx> state, std::size_t n_wires,
                                const std::vector<Gate>& gates);

struct MeasureBranch {
    std::size_t outcome = 0;  // measured bits, wires[0] = MSB
    double prob = 0.0;
    std::vector<cplx> residual;  // renormalized state on the unmeasured wires
};
std::vector<MeasureBranch> measure_wires(const std::vector<cplx>& state, std::size_t n_wires,
                                         const std::vector<std::size_t>& wires);

std::vector<int> bits_of(std::size_t value, std::size_t width);  // MSB first
std::size_t value_of(const std::vector<int>& bits);

// Keyed PRF used by the Clifford backend's per-nonce pads. Deterministic,
// key-sensitive; documented via the test vectors shipped in data/.
std::vector<int> prf_bits(const std::vector<int>& key_bits, std::uint64_t nonce,
                          std::size_t count);

struct EvalBranch {
    double prob = 0.0;
    Ciphertext ct;
    std::vector<int> message;    // what Dec yields for this branch
    std::vector<cplx> residual;  // state on kept wires (unmeasured circuit wires + external)
    std::size_t kept_wires = 0;
};

// Gen/Enc/Eval/Dec with two backends. A backend instance owns per-session
// key and nonce tables; confine one instance to one protocol session.
class QheBackend {
  public:
    virtual ~QheBackend() = default;
    virtual std::string name() const = 0;
    virtual std::size_t message_bits() const = 0;

    virtual SecretKey gen(std::size_t lambda, std::uint64_t seed) = 0;
    virtual Ciphertext enc(const SecretKey& sk, const std::vector<int>& m) = 0;
    virtual std::vector<int> dec(const SecretKey& sk, const Ciphertext& ct) = 0;
    virtual bool supports(const EvalCircuit& c) const = 0;

    // Exhaustive branch decomposition of Eval^C applied to ct and the first
    // aux_wires of `joint`; `joint` spans aux_wires + external_wires qubits
    // and external wires are untouched.
    virtual std::vector<EvalBranch> eval_ensemble(const Ciphertext& ct, const EvalCircuit& c,
                                                  const std::vector<cplx>& joint,
                                                  std::size_t external_wires) = 0;

    // Born-rule sampling wrapper around eval_ensemble.
    std::pair<Ciphertext, std::vector<cplx>> eval_sample(const Ciphertext& ct,
                                                         const EvalCircuit& c,
                                                         const std::vector<cplx>& joint,
                                                         std::size_t external_wires,
                                                         std::uint64_t seed);

    // Models the insecure flag: plaintext recovery without sk, available
    // only when the backend was built insecure.
    virtual std::optional<std::vector<int>> insecure_decrypt(const Ciphertext& ct) const = 0;
    bool insecure() const { return insecure_; }

  protected:
    explicit QheBackend(bool insecure) : insecure_(insecure) {}
    bool insecure_ = false;
};

// Ideal functionality: enc stores nonce -> plaintext in a private table,
// ciphertext bits are plaintext-independent, eval decrypts internally and
// re-encrypts under a fresh nonce. Perfect hiding by construction.
class IdealBackend : public QheBackend {
  public:
    explicit IdealBackend(std::size_t message_bits, bool insecure = false);
    std::string name() const override { return "ideal"; }
    std::size_t message_bits() const override { return ell_; }
    SecretKey gen(std::size_t lambda, std::uint64_t seed) override;
    Ciphertext enc(const SecretKey& sk, const std::vector<int>& m) override;
    std::vector<int> dec(const SecretKey& sk, const Ciphertext& ct) override;
    bool supports(const EvalCircuit& c) const override;
    std::vector<EvalBranch> eval_ensemble(const Ciphertext& ct, const EvalCircuit& c,
                                          const std::vector<cplx>& joint,
                                          std::size_t external_wires) override;
    std::optional<std::vector<int>> insecure_decrypt(const Ciphertext& ct) const override;

    // Commits a sampled eval outcome so a later dec resolves it.
    void commit_message(std::uint64_t nonce, const std::vector<int>& m);

  private:
    std::size_t ell_;
    std::uint64_t key_id_ = 0;
    bool key_generated_ = false;
    std::uint64_t next_nonce_ = 0;
    std::map<std::uint64_t, std::vector<int>> table_;
};

// Quantum one-time pad X^p Z^q with per-nonce pads from prf_bits; Eval
// applies a Clifford circuit to the padded computational-basis input plus
// aux and returns the measured wires; Dec propagates the pad through the
// circuit's tableau and unpads.
class CliffordBackend : public QheBackend {
  public:
    explicit CliffordBackend(std::size_t message_bits, bool insecure = false,
                             bool broken_identity_prf = false);
    std::string name() const override { return "clifford"; }
    std::size_t message_bits() const override { return ell_; }
    SecretKey gen(std::size_t lambda, std::uint64_t seed) override;
    Ciphertext enc(const SecretKey& sk, const std::vector<int>& m) override;
    std::vector<int> dec(const SecretKey& sk, const Ciphertext& ct) override;
    bool supports(const EvalCircuit& c) const override;
    std::vector<EvalBranch> eval_ensemble(const Ciphertext& ct, const EvalCircuit& c,
                                          const std::vector<cplx>& joint,
                                          std::size_t external_wires) override;
    std::optional<std::vector<int>> insecure_decrypt(const Ciphertext& ct) const override;

    std::vector<int> pad_bits(const SecretKey& sk, std::uint64_t nonce) const;  // 2l bits

  private:
    struct EvalRecord {
        std::uint64_t parent_nonce = 0;
        EvalCircuit circuit;
    };
    std::size_t ell_;
    bool broken_prf_;
    std::uint64_t next_nonce_ = 0;
    std::map<std::uint64_t, EvalRecord> eval_records_;
    // For the insecure flag only: remembered pads per nonce.
    std::map<std::uint64_t, std::vector<int>> pads_;
    std::optional<SecretKey> session_key_;
};

std::unique_ptr<QheBackend> make_backend(const std::string& name, std::size_t message_bits,
                                         bool insecure = false);

// Declared-API adversary: sees a challenge ciphertext and an encryption
// oracle, never the key.
using EncOracle = std::function<Ciphertext(const std::vector<int>&)>;
using Distinguisher = std::function<int(const Ciphertext&, const EncOracle&, Rng&)>;

struct SecurityReport {
    double p_accept_m0 = 0.0, p_accept_m1 = 0.0;
    double advantage = 0.0;
    double wilson_low = 0.0, wilson_high = 0.0;  // 95% interval for the advantage
    std::size_t trials = 0;
};

SecurityReport security_harness(const std::function<std::unique_ptr<QheBackend>()>& factory,
                                const std::vector<int>& m0, const std::vector<int>& m1,
                                const Distinguisher& d, std::size_t trials, std::size_t lambda,
                                std::uint64_t seed);

}  // namespace nlg
